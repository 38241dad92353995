"""Compound subclass pair probing.

Finds subclass pairs whose subject label textually contains the object
label (e.g. "red wine" under "wine"), then gathers the evidence a curator
needs to categorize the pair: qualifiers on the subclass statement, the
subject's other statements, and the subject's siblings.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import IO, Iterable, Sequence

from .errors import AnalogionError, UnknownNodeError
from .store import NodeId, OntologyStore, Statement, SUBCLASS_OF, Value


class InheritanceCategory(Enum):
    """Manually assigned relation type of a compound subclass pair."""

    PURPOSE = "PURPOSE"
    PROPERTY = "PROPERTY"
    LOCATION = "LOCATION"
    OWNERSHIP = "OWNERSHIP"
    MATERIAL = "MATERIAL"
    INSTANCE = "INSTANCE"
    TEMPORAL = "TEMPORAL"

    @classmethod
    def parse(cls, token: str) -> "InheritanceCategory":
        try:
            return cls[token.strip().upper()]
        except KeyError:
            valid = ", ".join(m.name for m in cls)
            raise AnalogionError(f"unknown category {token!r}; expected one of: {valid}")


@dataclass(frozen=True)
class ProbeReport:
    """Everything gathered about one (subject subclass-of object) pair."""

    subject: NodeId
    object: NodeId
    qualifiers: tuple[tuple[NodeId, Value], ...]
    statements: tuple[Statement, ...]
    siblings: tuple[NodeId, ...]
    category: InheritanceCategory | None = None


@dataclass(frozen=True)
class SuperstringScan:
    pairs: tuple[tuple[NodeId, NodeId], ...]
    missing_label_pairs: int


@dataclass(frozen=True)
class CoverageStats:
    total: int
    with_qualifiers: int
    histogram: dict[str, int] = field(default_factory=dict)


def _normalize(label: str) -> str:
    return label.strip().casefold()


def superstring_pairs(store: OntologyStore, whole_word: bool = False) -> SuperstringScan:
    """Subclass pairs whose subject label strictly contains the object label.

    Matching is contiguous-substring after Unicode lowercasing and trimming;
    `whole_word` additionally requires the object label to sit on word
    boundaries inside the subject label. Pairs lacking a label on either
    side are skipped and counted, and results are ordered by subject
    numeric id (ascending), then object.
    """
    seen: set[tuple[str, str]] = set()
    kept: list[tuple[NodeId, NodeId]] = []
    missing = 0
    for child, parent in store.subclass_pairs():
        if (child.ext, parent.ext) in seen:
            continue
        seen.add((child.ext, parent.ext))
        subj_label = store.label_of(child)
        obj_label = store.label_of(parent)
        if subj_label is None or obj_label is None:
            missing += 1
            continue
        subj_norm = _normalize(subj_label)
        obj_norm = _normalize(obj_label)
        if subj_norm == obj_norm:
            continue
        if whole_word:
            pattern = r"(?<!\w)" + re.escape(obj_norm) + r"(?!\w)"
            if not re.search(pattern, subj_norm):
                continue
        elif obj_norm not in subj_norm:
            continue
        kept.append((child, parent))
    kept.sort(key=lambda cp: (cp[0].sort_key(), cp[1].sort_key()))
    return SuperstringScan(tuple(kept), missing)


def probe_pair(
    store: OntologyStore,
    subject: str | NodeId,
    object: str | NodeId,
    category: InheritanceCategory | None = None,
) -> ProbeReport:
    """Populate a ProbeReport for one subclass pair.

    The subject's statement list keeps file order and excludes the probed
    subclass statement itself; siblings are the object's other children.
    """
    subj = store.node(subject)
    obj = store.node(object)
    stmt = store.subclass_statement(subj, obj)
    if stmt is None:
        raise AnalogionError(
            f"no subclass statement ({subj.ext}, {SUBCLASS_OF}, {obj.ext}) in store"
        )
    others = tuple(s for s in store.statements_of(subj) if s.sid != stmt.sid)
    siblings = tuple(sorted(store.subclasses_of(obj) - {subj}, key=NodeId.sort_key))
    return ProbeReport(
        subject=subj,
        object=obj,
        qualifiers=stmt.qualifiers,
        statements=others,
        siblings=siblings,
        category=category,
    )


def qualifier_coverage(reports: Sequence[ProbeReport], store: OntologyStore) -> CoverageStats:
    """How often subclass statements carry qualifiers, and which properties.

    The histogram is keyed by the qualifier property's label (falling back
    to the external id) so reports read like the probe tables.
    """
    if not reports:
        raise AnalogionError("qualifier_coverage requires at least one report")
    hist: dict[str, int] = {}
    with_quals = 0
    for report in reports:
        if report.qualifiers:
            with_quals += 1
        for prop, _value in report.qualifiers:
            key = store.label_of(prop) or prop.ext
            hist[key] = hist.get(key, 0) + 1
    return CoverageStats(total=len(reports), with_qualifiers=with_quals, histogram=hist)


ANNOTATIONS_HEADER = "subject\tobject\tcategory"


def load_annotations(
    fileobj: IO[str], store: OntologyStore
) -> dict[tuple[NodeId, NodeId], InheritanceCategory]:
    """Read the category sidecar: subject <TAB> object <TAB> category."""
    lines = iter(fileobj)
    try:
        header = next(lines).rstrip("\r\n")
    except StopIteration:
        raise AnalogionError("annotations file is empty")
    if header.lstrip("﻿") != ANNOTATIONS_HEADER:
        raise AnalogionError(
            f"annotations header must be {ANNOTATIONS_HEADER!r}, got {header!r}"
        )
    out: dict[tuple[NodeId, NodeId], InheritanceCategory] = {}
    for line_no, raw in enumerate(lines, start=2):
        line = raw.rstrip("\r\n")
        if not line:
            continue
        cols = line.split("\t")
        if len(cols) != 3:
            raise AnalogionError(f"annotations line {line_no}: expected 3 columns")
        subj, obj, cat = cols
        key = (store.node(subj), store.node(obj))
        if key in out:
            raise AnalogionError(
                f"annotations line {line_no}: duplicate pair {subj} / {obj}"
            )
        out[key] = InheritanceCategory.parse(cat)
    return out


def _display(store: OntologyStore, node: NodeId) -> str:
    label = store.label_of(node)
    return f"{label} ({node.ext})" if label else node.ext


def _value_text(store: OntologyStore, value: Value) -> str:
    return (store.label_of(value) or value.ext) if isinstance(value, NodeId) else value


PROBE_HEADER = "subject\tobject\tcategory\tqualifiers\tstatements\tsiblings"


def write_probe_reports(
    store: OntologyStore, reports: Iterable[ProbeReport], fileobj: IO[str]
) -> None:
    """Write reports as a TSV table; empty cells render as '-'."""
    fileobj.write(PROBE_HEADER + "\n")
    for r in reports:
        quals = "; ".join(
            f"{_value_text(store, p)}: {_value_text(store, v)}" for p, v in r.qualifiers
        )
        stmts = "; ".join(
            f"{_value_text(store, s.subject)} - {_value_text(store, s.property)} - "
            f"{_value_text(store, s.object)}"
            for s in r.statements
        )
        sibs = ", ".join(store.label_of(s) or s.ext for s in r.siblings)
        fileobj.write(
            "\t".join(
                [
                    _display(store, r.subject),
                    _display(store, r.object),
                    r.category.name if r.category else "-",
                    quals or "-",
                    stmts or "-",
                    sibs or "-",
                ]
            )
            + "\n"
        )
