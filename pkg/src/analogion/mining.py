"""Threshold filtering of metrics rows and instance-level analogy mining.

A (parent, child) row passes when its instance count, reduction ratio,
overlap and parent entropy all clear the configured thresholds (nulls
fail). Passing rows become parent-child candidates, and passing children
that share a parent pair up into sibling candidates. For each candidate,
instance analogies are pairs of instances that point at the same node
value through content properties (the structural subclass/instance
properties are excluded, as are entities belonging to both classes).
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import IO, Iterable, Sequence

import numpy as np

from .errors import AnalogionError, ModeMismatchError
from .metrics import ClassMetrics
from .store import INSTANCE_OF, NodeId, OntologyStore, SUBCLASS_OF, TRANSITIVE

SIBLING = "sibling"
PARENT_CHILD = "parent-child"

POLICY_ANY = "any-property"
POLICY_SAME = "same-property"
POLICIES = (POLICY_ANY, POLICY_SAME)


@dataclass(frozen=True)
class FilterConfig:
    ic_min: int = 1000
    rr_max: float = 0.85
    co_max: float = 0.5
    h_min: float = 1.0
    mode: str = TRANSITIVE


@dataclass(frozen=True)
class ClassPairCandidate:
    """A class pair worth mining, with the metrics rows that admitted it."""

    kind: str  # SIBLING or PARENT_CHILD
    class_a: NodeId
    class_b: NodeId
    parent: NodeId | None  # shared parent for sibling candidates
    metrics: tuple[ClassMetrics, ...] = field(default=(), compare=False)


@dataclass(frozen=True)
class InstanceAnalogy:
    """Two instances tied together by a shared node-valued statement object."""

    a: NodeId
    b: NodeId
    value: NodeId
    property_a: NodeId
    property_b: NodeId


def row_passes(row: ClassMetrics, config: FilterConfig) -> bool:
    """Conjunction of all four thresholds; undefined metrics never pass."""
    return (
        row.ic_child > config.ic_min
        and row.rr is not None
        and row.rr < config.rr_max
        and row.co is not None
        and row.co < config.co_max
        and row.h_parent is not None
        and row.h_parent > config.h_min
    )


def filter_classes(
    rows: Iterable[ClassMetrics], config: FilterConfig
) -> list[ClassPairCandidate]:
    """Apply thresholds; emit parent-child candidates plus sibling pairs.

    Sibling candidates pair up every two passing children of the same
    parent, unordered, ids ascending. Raises if any row was computed under
    a different instance mode than the filter expects.
    """
    passing: list[ClassMetrics] = []
    for row in rows:
        if row.mode != config.mode:
            raise ModeMismatchError(
                f"metrics row ({row.parent.ext}, {row.child.ext}) uses mode "
                f"{row.mode!r} but the filter expects {config.mode!r}"
            )
        if row_passes(row, config):
            passing.append(row)

    candidates = [
        ClassPairCandidate(PARENT_CHILD, row.parent, row.child, None, (row,))
        for row in passing
    ]

    by_parent: dict[NodeId, list[ClassMetrics]] = {}
    for row in passing:
        by_parent.setdefault(row.parent, []).append(row)
    sibling_cands = []
    for parent in sorted(by_parent, key=NodeId.sort_key):
        rows_here = sorted(by_parent[parent], key=lambda r: r.child.sort_key())
        for i in range(len(rows_here)):
            for j in range(i + 1, len(rows_here)):
                a, b = rows_here[i], rows_here[j]
                sibling_cands.append(
                    ClassPairCandidate(SIBLING, a.child, b.child, parent, (a, b))
                )
    return candidates + sibling_cands


def instance_analogies(
    store: OntologyStore,
    candidate: ClassPairCandidate,
    policy: str = POLICY_ANY,
    limit: int = 100,
    mode: str = TRANSITIVE,
) -> list[InstanceAnalogy]:
    """Mine instance pairs (a from class A, b from class B) sharing a value.

    A hit is a statement (a, p1, v) and a statement (b, p2, v) with a
    node-valued v; `same-property` additionally requires p1 == p2.
    Entities that are instances of both classes are excluded outright.
    Output is sorted by (value, a, b, p1, p2) numeric ids and truncated
    to `limit`.
    """
    if policy not in POLICIES:
        raise AnalogionError(f"unknown policy {policy!r}; expected one of {POLICIES}")
    if limit < 1:
        raise AnalogionError("limit must be >= 1")
    a_cls = store.node(candidate.class_a)
    b_cls = store.node(candidate.class_b)
    a_iids = store._instance_iids(a_cls.iid, mode)
    b_iids = store._instance_iids(b_cls.iid, mode)
    shared = np.intersect1d(a_iids, b_iids, assume_unique=True)
    if len(shared):
        a_iids = np.setdiff1d(a_iids, shared, assume_unique=True)
        b_iids = np.setdiff1d(b_iids, shared, assume_unique=True)

    structural = {
        store._ids.get(SUBCLASS_OF, -2),
        store._ids.get(INSTANCE_OF, -2),
    }

    def content_statements(iid: int):
        for row in store._rows_for_subject(iid):
            row = int(row)
            prop = int(store._s_prop[row])
            obj = int(store._s_obj[row])
            if obj >= 0 and prop not in structural:
                yield prop, obj

    # value -> [(property, subject)] over the A side
    by_value: dict[int, list[tuple[int, int]]] = {}
    for a in a_iids:
        a = int(a)
        for prop, obj in content_statements(a):
            by_value.setdefault(obj, []).append((prop, a))

    hits: set[tuple[int, int, int, int, int]] = set()
    for b in b_iids:
        b = int(b)
        for p2, obj in content_statements(b):
            for p1, a in by_value.get(obj, ()):
                if a == b:
                    continue
                if policy == POLICY_SAME and p1 != p2:
                    continue
                hits.add((obj, a, b, p1, p2))

    def sort_key(hit: tuple[int, int, int, int, int]):
        return tuple(store._node_of(i).sort_key() for i in hit)

    ordered = sorted(hits, key=sort_key)[:limit]
    return [
        InstanceAnalogy(
            a=store._node_of(a),
            b=store._node_of(b),
            value=store._node_of(v),
            property_a=store._node_of(p1),
            property_b=store._node_of(p2),
        )
        for (v, a, b, p1, p2) in ordered
    ]


def mine_all(
    store: OntologyStore,
    candidates: Sequence[ClassPairCandidate],
    policy: str = POLICY_ANY,
    limit: int = 100,
    max_total: int | None = None,
    threads: int = 1,
) -> list[tuple[ClassPairCandidate, list[InstanceAnalogy]]]:
    """Mine every candidate, optionally in parallel, output order fixed."""

    def work(cand: ClassPairCandidate) -> list[InstanceAnalogy]:
        mode = cand.metrics[0].mode if cand.metrics else TRANSITIVE
        return instance_analogies(store, cand, policy=policy, limit=limit, mode=mode)

    if threads > 1 and len(candidates) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            mined = list(pool.map(work, candidates))
    else:
        mined = [work(c) for c in candidates]

    results: list[tuple[ClassPairCandidate, list[InstanceAnalogy]]] = []
    remaining = max_total
    for cand, items in zip(candidates, mined):
        if remaining is not None:
            items = items[:remaining]
            remaining -= len(items)
        results.append((cand, items))
    return results


CANDIDATES_HEADER = "kind\tclassA\tclassB\tparent"
ANALOGIES_HEADER = "a\tb\tvalue\tpropA\tpropB"


def write_candidates_tsv(
    candidates: Iterable[ClassPairCandidate], fileobj: IO[str]
) -> None:
    fileobj.write(CANDIDATES_HEADER + "\n")
    for c in candidates:
        fileobj.write(
            f"{c.kind}\t{c.class_a.ext}\t{c.class_b.ext}\t"
            f"{c.parent.ext if c.parent else ''}\n"
        )


def write_analogies_tsv(items: Iterable[InstanceAnalogy], fileobj: IO[str]) -> None:
    fileobj.write(ANALOGIES_HEADER + "\n")
    for it in items:
        fileobj.write(
            f"{it.a.ext}\t{it.b.ext}\t{it.value.ext}\t"
            f"{it.property_a.ext}\t{it.property_b.ext}\n"
        )
