"""Class-level structure metrics over the subclass/instance graph.

Four per-class quantities drive candidate selection downstream:

  instance count   ic(C)   = |instances(C)|                (generality)
  reduction ratio  rr(P,C) = 1 - |instances(C)| / |instances(P)|   (selectivity)
  class overlap    co(C)   = Jaccard(instances(C), instances(S))   (salience,
                             S = sibling with the most instances)
  entropy          h(P)    = sum over children C, -p(C) * log2(p(C))
                             with p(C) = |instances(C)| / |instances(P)|  (diversity)

Instance sets are direct or transitive per configuration; metrics that are
not measurable (empty parent, empty union) surface as explicit nulls, never
as sentinel numbers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import IO, Iterable, Iterator

import numpy as np

from .errors import AnalogionError, UndefinedMetricError
from .store import NodeId, OntologyStore, TRANSITIVE, MODES


@dataclass(frozen=True)
class MetricsConfig:
    mode: str = TRANSITIVE
    normalize_entropy: bool = False

    def __post_init__(self):
        if self.mode not in MODES:
            raise AnalogionError(f"unknown instance mode {self.mode!r}")


DEFAULT_CONFIG = MetricsConfig()


@dataclass(frozen=True)
class ClassMetrics:
    """Metrics record for one (parent, child) subclass edge."""

    parent: NodeId
    child: NodeId
    ic_parent: int
    ic_child: int
    rr: float | None
    co: float | None
    largest_sibling: NodeId | None
    h_parent: float | None
    mode: str


def instance_count(
    store: OntologyStore, cls: str | NodeId, config: MetricsConfig = DEFAULT_CONFIG
) -> int:
    return store.instance_count(cls, config.mode)


def reduction_ratio(
    store: OntologyStore,
    parent: str | NodeId,
    child: str | NodeId,
    config: MetricsConfig = DEFAULT_CONFIG,
) -> float:
    """1 - |child instances| / |parent instances| for an existing subclass edge."""
    p = store.node(parent)
    c = store.node(child)
    if p not in store.parents_of(c):
        raise AnalogionError(f"no subclass edge ({c.ext} -> {p.ext}) in store")
    ic_p = store.instance_count(p, config.mode)
    if ic_p == 0:
        raise UndefinedMetricError(
            f"reduction ratio undefined: parent {p.ext} has no instances"
        )
    return 1.0 - store.instance_count(c, config.mode) / ic_p


def class_overlap(
    store: OntologyStore, cls: str | NodeId, config: MetricsConfig = DEFAULT_CONFIG
) -> tuple[float, NodeId | None]:
    """Jaccard overlap with the largest sibling; (0.0, None) when no sibling exists."""
    node = store.node(cls)
    siblings = store.siblings_of(node)
    if not siblings:
        return 0.0, None
    largest = min(
        siblings,
        key=lambda s: (-store.instance_count(s, config.mode), s.sort_key()),
    )
    a = store._instance_iids(node.iid, config.mode)
    b = store._instance_iids(store.node(largest).iid, config.mode)
    inter = len(np.intersect1d(a, b, assume_unique=True))
    union = len(a) + len(b) - inter
    if union == 0:
        raise UndefinedMetricError(
            f"class overlap undefined: {node.ext} and sibling {largest.ext} are both empty"
        )
    return inter / union, largest


def entropy(
    store: OntologyStore, parent: str | NodeId, config: MetricsConfig = DEFAULT_CONFIG
) -> float:
    """Diversity of a parent class over its direct children's instance shares."""
    p = store.node(parent)
    children = sorted(store.subclasses_of(p), key=NodeId.sort_key)
    if not children:
        raise UndefinedMetricError(f"entropy undefined: {p.ext} has no subclasses")
    ic_p = store.instance_count(p, config.mode)
    if ic_p == 0:
        raise UndefinedMetricError(f"entropy undefined: parent {p.ext} has no instances")
    shares = [store.instance_count(c, config.mode) / ic_p for c in children]
    shares = [s for s in shares if s > 0.0]
    if config.normalize_entropy:
        total = sum(shares)
        shares = [s / total for s in shares] if total > 0 else shares
    return float(sum(-s * math.log2(s) for s in shares))


def metrics_table(
    store: OntologyStore, config: MetricsConfig = DEFAULT_CONFIG
) -> Iterator[ClassMetrics]:
    """One record per (parent, child) subclass edge, ordered by numeric ids.

    Per-class overlap and per-parent entropy are cached across rows; rows
    whose metrics are undefined carry None in those fields.
    """
    edges = sorted(
        store.subclass_pairs(), key=lambda cp: (cp[1].sort_key(), cp[0].sort_key())
    )
    ic_cache: dict[str, int] = {}
    co_cache: dict[str, tuple[float | None, NodeId | None]] = {}
    h_cache: dict[str, float | None] = {}

    def ic(node: NodeId) -> int:
        v = ic_cache.get(node.ext)
        if v is None:
            v = store.instance_count(node, config.mode)
            ic_cache[node.ext] = v
        return v

    for child, parent in edges:
        ic_p = ic(parent)
        ic_c = ic(child)
        rr = None if ic_p == 0 else 1.0 - ic_c / ic_p
        if child.ext not in co_cache:
            try:
                co_cache[child.ext] = class_overlap(store, child, config)
            except UndefinedMetricError:
                co_cache[child.ext] = (None, None)
        co, largest = co_cache[child.ext]
        if parent.ext not in h_cache:
            try:
                h_cache[parent.ext] = entropy(store, parent, config)
            except UndefinedMetricError:
                h_cache[parent.ext] = None
        yield ClassMetrics(
            parent=parent,
            child=child,
            ic_parent=ic_p,
            ic_child=ic_c,
            rr=rr,
            co=co,
            largest_sibling=largest,
            h_parent=h_cache[parent.ext],
            mode=config.mode,
        )


METRICS_HEADER = "parent\tchild\tic_parent\tic_child\trr\tco\tlargest_sibling\th_parent"


def _fmt(value: float | None) -> str:
    return "" if value is None else f"{value:.6f}"


def write_metrics_tsv(rows: Iterable[ClassMetrics], fileobj: IO[str]) -> None:
    """Serialize metrics rows; nulls are empty fields, reals use 6 decimals."""
    fileobj.write(METRICS_HEADER + "\n")
    for r in rows:
        fileobj.write(
            "\t".join(
                [
                    r.parent.ext,
                    r.child.ext,
                    str(r.ic_parent),
                    str(r.ic_child),
                    _fmt(r.rr),
                    _fmt(r.co),
                    r.largest_sibling.ext if r.largest_sibling else "",
                    _fmt(r.h_parent),
                ]
            )
            + "\n"
        )
