"""Proportional-analogy dataset construction.

Quads pair two (child, parent) subclass pairs. Positives share an
inheritance category and are stratified by how the parents relate:
identical parent (direct), parents with a common parent (parent), or a
bounded-distance common ancestor past a stoplist of top-level classes
(distant). Negatives pair seeds from different categories. Generation is
seeded and byte-reproducible.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import IO, Iterable, Mapping, NamedTuple, Sequence

from .errors import AnalogionError, BucketShortfallError, DatasetError
from .probe import InheritanceCategory
from .store import NodeId, OntologyStore

POS_DIRECT = "direct"
POS_PARENT = "parent"
POS_DISTANT = "distant"
POS_NONE = "none"

LABEL_POSITIVE = "positive"
LABEL_NEGATIVE = "negative"

DEFAULT_STOPLIST = ("Q35120",)  # top-of-ontology "entity" class


@dataclass(frozen=True)
class SeedPair:
    child: NodeId
    parent: NodeId
    category: InheritanceCategory

    def sort_key(self):
        return (self.child.sort_key(), self.parent.sort_key())


@dataclass(frozen=True)
class AnalogyQuad:
    pair1: SeedPair
    pair2: SeedPair
    label: str  # LABEL_POSITIVE or LABEL_NEGATIVE
    pos_type: str  # POS_* value; POS_NONE for negatives

    @property
    def category1(self) -> InheritanceCategory:
        return self.pair1.category

    @property
    def category2(self) -> InheritanceCategory:
        return self.pair2.category


class QuadCounts(NamedTuple):
    direct: int
    parent: int
    distant: int
    negative: int


def classify_pos_type(
    store: OntologyStore,
    pair1: SeedPair,
    pair2: SeedPair,
    max_distance: int = 3,
    stoplist: frozenset[NodeId] | set[NodeId] = frozenset(),
) -> str:
    """Structural relation of the two pairs' parents; categories are ignored.

    direct: same parent node. parent: the parents have a common parent.
    distant: the parents share an ancestor within max_distance hops, not
    counting stoplisted roots. Otherwise none.
    """
    p1 = store.node(pair1.parent)
    p2 = store.node(pair2.parent)
    if p1 == p2:
        return POS_DIRECT
    if store.parents_of(p1) & store.parents_of(p2):
        return POS_PARENT
    shared = (
        store.ancestors_within(p1, max_distance).keys()
        & store.ancestors_within(p2, max_distance).keys()
    ) - set(stoplist)
    if shared:
        return POS_DISTANT
    return POS_NONE


def _canonical(pair_a: SeedPair, pair_b: SeedPair) -> tuple[SeedPair, SeedPair]:
    return (pair_a, pair_b) if pair_a.sort_key() <= pair_b.sort_key() else (pair_b, pair_a)


def build_quads(
    store: OntologyStore,
    seeds: Sequence[SeedPair],
    counts: QuadCounts,
    seed: int,
    max_distance: int = 3,
    stoplist: frozenset[NodeId] | set[NodeId] = frozenset(),
) -> list[AnalogyQuad]:
    """Sample the requested number of quads per bucket, without replacement.

    Positives come from same-category seed pairs whose structural relation
    matches the bucket; negatives from different-category pairs regardless
    of structure. Identical inputs and seed give identical output. Raises
    BucketShortfallError naming the first bucket that cannot be filled.
    """
    for sp in seeds:
        if store.node(sp.parent) not in store.parents_of(store.node(sp.child)):
            raise AnalogionError(
                f"seed ({sp.child.ext}, {sp.parent.ext}) has no subclass edge in store"
            )
    ordered = sorted(seeds, key=SeedPair.sort_key)
    if len(set(s.sort_key() for s in ordered)) != len(ordered):
        raise AnalogionError("duplicate seed pairs in input")

    buckets: dict[str, list[tuple[SeedPair, SeedPair]]] = {
        POS_DIRECT: [],
        POS_PARENT: [],
        POS_DISTANT: [],
        POS_NONE: [],
    }
    for i in range(len(ordered)):
        for j in range(i + 1, len(ordered)):
            a, b = ordered[i], ordered[j]
            if a.category != b.category:
                buckets[POS_NONE].append((a, b))
                continue
            kind = classify_pos_type(store, a, b, max_distance, stoplist)
            if kind != POS_NONE:
                buckets[kind].append((a, b))

    wanted = {
        POS_DIRECT: counts.direct,
        POS_PARENT: counts.parent,
        POS_DISTANT: counts.distant,
        POS_NONE: counts.negative,
    }
    for bucket, need in wanted.items():
        have = len(buckets[bucket])
        if need > have:
            name = "negative" if bucket == POS_NONE else bucket
            raise BucketShortfallError(name, need, have)

    rng = random.Random(seed)
    quads: list[AnalogyQuad] = []
    for bucket in (POS_DIRECT, POS_PARENT, POS_DISTANT, POS_NONE):
        chosen = rng.sample(buckets[bucket], wanted[bucket])
        label = LABEL_NEGATIVE if bucket == POS_NONE else LABEL_POSITIVE
        pos_type = POS_NONE if bucket == POS_NONE else bucket
        for a, b in chosen:
            pair1, pair2 = _canonical(a, b)
            quads.append(AnalogyQuad(pair1, pair2, label, pos_type))

    keys = [(q.pair1.sort_key(), q.pair2.sort_key()) for q in quads]
    if len(set(keys)) != len(keys):
        raise AnalogionError("internal error: duplicate quads emitted")
    for q in quads:
        if q.label == LABEL_POSITIVE:
            found = classify_pos_type(store, q.pair1, q.pair2, max_distance, stoplist)
            if found != q.pos_type:
                raise AnalogionError(
                    f"internal error: quad reclassified as {found}, recorded {q.pos_type}"
                )
    return quads


def category_distribution(quads: Iterable[AnalogyQuad]) -> dict[InheritanceCategory, int]:
    """Positive quads per category (keys cover all seven categories)."""
    out = {cat: 0 for cat in InheritanceCategory}
    for q in quads:
        if q.label == LABEL_POSITIVE:
            out[q.category1] += 1
    return out


# -- seeds and dataset files --------------------------------------------------

SEEDS_HEADER = "child\tparent"
DATASET_HEADER = (
    "child1\tparent1\tchild2\tparent2\tlabel\tpos_type\tcategory1\tcategory2"
)


def load_seeds(
    fileobj: IO[str],
    store: OntologyStore,
    annotations: Mapping[tuple[NodeId, NodeId], InheritanceCategory],
) -> list[SeedPair]:
    """Read seed (child, parent) pairs; every seed must have an annotation."""
    lines = iter(fileobj)
    try:
        header = next(lines).rstrip("\r\n")
    except StopIteration:
        raise AnalogionError("seeds file is empty")
    if header.lstrip("﻿") != SEEDS_HEADER:
        raise AnalogionError(f"seeds header must be {SEEDS_HEADER!r}, got {header!r}")
    seeds = []
    for line_no, raw in enumerate(lines, start=2):
        line = raw.rstrip("\r\n")
        if not line:
            continue
        cols = line.split("\t")
        if len(cols) != 2:
            raise AnalogionError(f"seeds line {line_no}: expected 2 columns")
        child = store.node(cols[0])
        parent = store.node(cols[1])
        category = annotations.get((child, parent))
        if category is None:
            raise AnalogionError(
                f"seeds line {line_no}: pair ({child.ext}, {parent.ext}) has no annotation"
            )
        seeds.append(SeedPair(child, parent, category))
    return seeds


@dataclass(frozen=True)
class QuadRecord:
    """One dataset row: node labels plus labeling, as written to disk."""

    child1: str
    parent1: str
    child2: str
    parent2: str
    label: int  # 1 positive, 0 negative
    pos_type: str
    category1: str
    category2: str


def _text(store: OntologyStore, node: NodeId) -> str:
    return store.label_of(node) or node.ext


def dataset_records(store: OntologyStore, quads: Sequence[AnalogyQuad]) -> list[QuadRecord]:
    return [
        QuadRecord(
            child1=_text(store, q.pair1.child),
            parent1=_text(store, q.pair1.parent),
            child2=_text(store, q.pair2.child),
            parent2=_text(store, q.pair2.parent),
            label=1 if q.label == LABEL_POSITIVE else 0,
            pos_type=q.pos_type,
            category1=q.category1.name,
            category2=q.category2.name,
        )
        for q in quads
    ]


def write_dataset(records: Iterable[QuadRecord], fileobj: IO[str]) -> None:
    fileobj.write(DATASET_HEADER + "\n")
    for r in records:
        fileobj.write(
            f"{r.child1}\t{r.parent1}\t{r.child2}\t{r.parent2}\t"
            f"{r.label}\t{r.pos_type}\t{r.category1}\t{r.category2}\n"
        )


def read_dataset(fileobj: IO[str]) -> list[QuadRecord]:
    lines = iter(fileobj)
    try:
        header = next(lines).rstrip("\r\n")
    except StopIteration:
        raise DatasetError("dataset file is empty")
    if header.lstrip("﻿") != DATASET_HEADER:
        raise DatasetError(f"dataset header must be {DATASET_HEADER!r}, got {header!r}")
    records = []
    for line_no, raw in enumerate(lines, start=2):
        line = raw.rstrip("\r\n")
        if not line:
            continue
        cols = line.split("\t")
        if len(cols) != 8:
            raise DatasetError(f"dataset line {line_no}: expected 8 columns")
        if cols[4] not in ("0", "1"):
            raise DatasetError(f"dataset line {line_no}: label must be 0 or 1")
        if cols[5] not in (POS_DIRECT, POS_PARENT, POS_DISTANT, POS_NONE):
            raise DatasetError(f"dataset line {line_no}: bad pos_type {cols[5]!r}")
        records.append(
            QuadRecord(
                child1=cols[0],
                parent1=cols[1],
                child2=cols[2],
                parent2=cols[3],
                label=int(cols[4]),
                pos_type=cols[5],
                category1=cols[6],
                category2=cols[7],
            )
        )
    return records


def _node_by_label(store: OntologyStore) -> dict[str, NodeId | None]:
    """Label -> node map; labels shared by several nodes map to None."""
    out: dict[str, NodeId | None] = {}
    for cls in store.classes():
        label = store.label_of(cls)
        if label is None:
            continue
        out[label] = None if label in out else cls
    return out


def validate_records(
    store: OntologyStore,
    records: Sequence[QuadRecord],
    max_distance: int = 3,
    stoplist: frozenset[NodeId] | set[NodeId] = frozenset(),
) -> list[str]:
    """Re-validate an (possibly hand-edited) dataset file against the store.

    Returns human-readable problem strings; an empty list means the file
    still satisfies every dataset invariant.
    """
    by_label = _node_by_label(store)
    problems: list[str] = []
    seen: set[tuple] = set()

    def resolve(text: str, row: int, role: str) -> NodeId | None:
        if store.has_node(text):
            return store.node(text)
        node = by_label.get(text)
        if node is None:
            problems.append(f"row {row}: cannot resolve {role} {text!r} to a unique node")
        return node

    for idx, r in enumerate(records, start=1):
        key = tuple(
            sorted([(r.child1, r.parent1), (r.child2, r.parent2)])
        )
        if key in seen:
            problems.append(f"row {idx}: duplicate quad under unordered-pair equality")
        seen.add(key)
        if (r.child1, r.parent1) == (r.child2, r.parent2):
            problems.append(f"row {idx}: pair1 equals pair2")
        if r.label == 1 and r.category1 != r.category2:
            problems.append(f"row {idx}: positive quad with differing categories")
        if r.label == 0 and r.category1 == r.category2:
            problems.append(f"row {idx}: negative quad with equal categories")
        if r.label == 0 and r.pos_type != POS_NONE:
            problems.append(f"row {idx}: negative quad with pos_type {r.pos_type!r}")
        if r.label == 1 and r.pos_type == POS_NONE:
            problems.append(f"row {idx}: positive quad with pos_type none")
        nodes = [
            resolve(r.child1, idx, "child1"),
            resolve(r.parent1, idx, "parent1"),
            resolve(r.child2, idx, "child2"),
            resolve(r.parent2, idx, "parent2"),
        ]
        if any(n is None for n in nodes):
            continue
        c1, p1, c2, p2 = nodes
        try:
            cat = InheritanceCategory.parse(r.category1)
            cat2 = InheritanceCategory.parse(r.category2)
        except AnalogionError as exc:
            problems.append(f"row {idx}: {exc}")
            continue
        pair1 = SeedPair(c1, p1, cat)
        pair2 = SeedPair(c2, p2, cat2)
        if p1 not in store.parents_of(c1):
            problems.append(f"row {idx}: ({c1.ext}, {p1.ext}) is not a subclass edge")
            continue
        if p2 not in store.parents_of(c2):
            problems.append(f"row {idx}: ({c2.ext}, {p2.ext}) is not a subclass edge")
            continue
        if r.label == 1:
            found = classify_pos_type(store, pair1, pair2, max_distance, stoplist)
            if found != r.pos_type:
                problems.append(
                    f"row {idx}: recorded pos_type {r.pos_type!r} but structure says {found!r}"
                )
    return problems
