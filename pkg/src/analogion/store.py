"""Immutable ontology store over tab-separated edge files.

The store interns every node identifier, indexes statements by subject and
by (subject, property), and builds the subclass DAG plus direct/transitive
instance sets once at construction time. Instance sets are kept as sorted
integer arrays so the set algebra behind the class metrics (intersections,
unions, cardinalities) stays linear-time merges even on large dumps.

After construction a store is never mutated; every query is pure and the
object can be shared freely across threads.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass
from typing import IO, Iterable, Iterator, Mapping, Sequence, Union

import numpy as np

from .errors import AnalogionError, CycleError, EdgeFileError, UnknownNodeError

EDGE_HEADER = "id\tnode1\tlabel\tnode2"
SUBCLASS_OF = "P279"
INSTANCE_OF = "P31"
LABEL_COLUMN_TOKEN = "label"
DESCRIPTION_COLUMN_TOKEN = "description"

DIRECT = "direct"
TRANSITIVE = "transitive"
MODES = (DIRECT, TRANSITIVE)

POLICY_ERROR = "error"
POLICY_BREAK = "break"
CYCLE_POLICIES = (POLICY_ERROR, POLICY_BREAK)

_NODE_RE = re.compile(r"[PQ][0-9]+\Z")
_EMPTY = np.empty(0, dtype=np.int64)


def is_node_token(token: str) -> bool:
    """True when the token is a P/Q node identifier rather than a literal."""
    return _NODE_RE.match(token) is not None


@dataclass(frozen=True, eq=False)
class NodeId:
    """Interned graph node.

    `iid` is the store-local dense integer; `ext` the external identifier
    (e.g. "Q250"). Equality, hashing and ordering follow `ext` only, so
    nodes from different stores compare by identity of the external id.
    """

    iid: int
    ext: str

    @property
    def kind(self) -> str:
        return "property" if self.ext[0] == "P" else "entity"

    @property
    def numeric(self) -> int:
        return int(self.ext[1:])

    def sort_key(self) -> tuple[int, str]:
        return (self.numeric, self.ext)

    def __eq__(self, other) -> bool:
        return isinstance(other, NodeId) and other.ext == self.ext

    def __hash__(self) -> int:
        return hash(self.ext)

    def __lt__(self, other: "NodeId") -> bool:
        return self.sort_key() < other.sort_key()

    def __repr__(self) -> str:
        return f"NodeId({self.ext})"

    def __str__(self) -> str:
        return self.ext


Value = Union[NodeId, str]  # node-valued object or opaque literal


@dataclass(frozen=True)
class Statement:
    """One edge row plus the qualifier rows attached to it, in file order."""

    sid: str
    subject: NodeId
    property: NodeId
    object: Value
    qualifiers: tuple[tuple[NodeId, Value], ...] = ()

    def key(self) -> tuple:
        """Order-insensitive comparison key (used by round-trip checks)."""
        obj = self.object.ext if isinstance(self.object, NodeId) else ("lit", self.object)
        quals = tuple(
            (p.ext, v.ext if isinstance(v, NodeId) else ("lit", v)) for p, v in self.qualifiers
        )
        return (self.sid, self.subject.ext, self.property.ext, obj, quals)


def _require_mode(mode: str) -> None:
    if mode not in MODES:
        raise AnalogionError(f"unknown instance mode {mode!r}; expected one of {MODES}")


class OntologyStore:
    """Queryable, immutable view of a parsed edge file.

    Construct through `parse_edge_file` or `build_store`; the initializer
    wires pre-built internal state and is not a public entry point.
    """

    def __init__(self, state: "_Builder"):
        self._exts: list[str] = state.exts
        self._ids: dict[str, int] = state.ids
        self._numeric = state.numeric_arr

        self._sids: list[str] = state.sids
        self._sid_index: dict[str, int] = state.sid_index
        self._s_subj = state.s_subj
        self._s_prop = state.s_prop
        self._s_obj = state.s_obj
        self._s_literal: dict[int, str] = state.literals
        self._s_quals: dict[int, tuple] = state.final_quals

        self._subj_sorted = state.subj_sorted
        self._subj_order = state.subj_order
        self._sp_sorted = state.sp_sorted
        self._sp_order = state.sp_order

        # Post-cycle-policy subclass adjacency, both directions.
        self._sub_child_keys = state.sub_child_keys
        self._sub_child_vals = state.sub_child_vals
        self._sub_parent_keys = state.sub_parent_keys
        self._sub_parent_vals = state.sub_parent_vals

        self._inst_class_keys = state.inst_class_keys
        self._inst_class_vals = state.inst_class_vals

        self._class_iids = state.class_iids
        self._trans: dict[int, np.ndarray] = state.trans_sets
        self._labels: dict[int, str] = state.labels
        self._descriptions: dict[int, str] = state.descriptions

        self._cycles: list[list[int]] = state.cycles
        self._broken_edges: list[tuple[int, int]] = state.broken_edges
        self.cycle_policy: str = state.cycle_policy
        self.malformed_rows: int = state.malformed
        self.dangling_qualifiers: int = state.dangling

    # -- node resolution ---------------------------------------------------

    def node(self, ext: str | NodeId) -> NodeId:
        """Resolve an external identifier (or re-resolve a NodeId) in this store."""
        key = ext.ext if isinstance(ext, NodeId) else ext
        iid = self._ids.get(key)
        if iid is None:
            raise UnknownNodeError(key)
        return NodeId(iid, key)

    def has_node(self, ext: str | NodeId) -> bool:
        key = ext.ext if isinstance(ext, NodeId) else ext
        return key in self._ids

    def _iid(self, node: str | NodeId) -> int:
        return self.node(node).iid

    def _node_of(self, iid: int) -> NodeId:
        return NodeId(iid, self._exts[iid])

    def _nodes_of(self, iids: Iterable[int]) -> frozenset[NodeId]:
        exts = self._exts
        return frozenset(NodeId(i, exts[i]) for i in iids)

    def label_of(self, node: str | NodeId) -> str | None:
        return self._labels.get(self._iid(node))

    def description_of(self, node: str | NodeId) -> str | None:
        return self._descriptions.get(self._iid(node))

    @property
    def n_nodes(self) -> int:
        return len(self._exts)

    # -- statements --------------------------------------------------------

    @property
    def n_statements(self) -> int:
        return len(self._sids)

    def statement(self, sid: str) -> Statement:
        row = self._sid_index.get(sid)
        if row is None:
            raise AnalogionError(f"unknown statement id: {sid}")
        return self._statement_at(row)

    def _statement_at(self, row: int) -> Statement:
        obj_iid = int(self._s_obj[row])
        obj: Value = self._s_literal[row] if obj_iid < 0 else self._node_of(obj_iid)
        quals = tuple(
            (self._node_of(p), (lit if v < 0 else self._node_of(v)))
            for (_qid, p, v, lit) in self._s_quals.get(row, ())
        )
        return Statement(
            sid=self._sids[row],
            subject=self._node_of(int(self._s_subj[row])),
            property=self._node_of(int(self._s_prop[row])),
            object=obj,
            qualifiers=quals,
        )

    def iter_statements(self) -> Iterator[Statement]:
        for row in range(len(self._sids)):
            yield self._statement_at(row)

    def _rows_for_subject(self, iid: int) -> np.ndarray:
        lo = np.searchsorted(self._subj_sorted, iid, side="left")
        hi = np.searchsorted(self._subj_sorted, iid, side="right")
        return self._subj_order[lo:hi]

    def _rows_for_subject_property(self, s_iid: int, p_iid: int) -> np.ndarray:
        key = (s_iid << 32) | p_iid
        lo = np.searchsorted(self._sp_sorted, key, side="left")
        hi = np.searchsorted(self._sp_sorted, key, side="right")
        return self._sp_order[lo:hi]

    def statements_of(self, subject: str | NodeId, property: str | NodeId | None = None) -> list[Statement]:
        """All statements with this subject (optionally one property), in file order."""
        s_iid = self._iid(subject)
        if property is None:
            rows = self._rows_for_subject(s_iid)
        else:
            rows = self._rows_for_subject_property(s_iid, self._iid(property))
        return [self._statement_at(int(r)) for r in rows]

    def subclass_statement(self, child: str | NodeId, parent: str | NodeId) -> Statement | None:
        """First subclass statement (child, P279, parent) in file order, if any."""
        if SUBCLASS_OF not in self._ids:
            return None
        c_iid = self._iid(child)
        p_iid = self._ids[SUBCLASS_OF]
        target = self._iid(parent)
        for row in self._rows_for_subject_property(c_iid, p_iid):
            if int(self._s_obj[int(row)]) == target:
                return self._statement_at(int(row))
        return None

    # -- subclass structure --------------------------------------------------

    def _lookup_sorted(self, keys: np.ndarray, vals: np.ndarray, iid: int) -> np.ndarray:
        lo = np.searchsorted(keys, iid, side="left")
        hi = np.searchsorted(keys, iid, side="right")
        return vals[lo:hi]

    def _parent_iids(self, iid: int) -> np.ndarray:
        return self._lookup_sorted(self._sub_child_keys, self._sub_child_vals, iid)

    def _child_iids(self, iid: int) -> np.ndarray:
        return self._lookup_sorted(self._sub_parent_keys, self._sub_parent_vals, iid)

    def parents_of(self, node: str | NodeId) -> frozenset[NodeId]:
        return self._nodes_of(int(i) for i in self._parent_iids(self._iid(node)))

    def subclasses_of(self, node: str | NodeId) -> frozenset[NodeId]:
        """Direct children under the subclass relation."""
        return self._nodes_of(int(i) for i in self._child_iids(self._iid(node)))

    def subclass_pairs(self) -> list[tuple[NodeId, NodeId]]:
        """All (child, parent) subclass edges, sorted by numeric ids."""
        pairs = [
            (self._node_of(int(c)), self._node_of(int(p)))
            for c, p in zip(self._sub_edge_children(), self._sub_edge_parents())
        ]
        pairs.sort(key=lambda cp: (cp[0].sort_key(), cp[1].sort_key()))
        return pairs

    def _sub_edge_children(self) -> np.ndarray:
        return self._sub_child_keys

    def _sub_edge_parents(self) -> np.ndarray:
        return self._sub_child_vals

    def classes(self) -> list[NodeId]:
        """Every node that takes part in class structure, sorted by numeric id."""
        nodes = [self._node_of(int(i)) for i in self._class_iids]
        nodes.sort(key=NodeId.sort_key)
        return nodes

    def siblings_of(self, node: str | NodeId) -> frozenset[NodeId]:
        """Union of the direct children of every parent, minus the node itself."""
        iid = self._iid(node)
        out: set[int] = set()
        for p in self._parent_iids(iid):
            out.update(int(c) for c in self._child_iids(int(p)))
        out.discard(iid)
        return self._nodes_of(out)

    def ancestors_within(self, node: str | NodeId, max_distance: int) -> dict[NodeId, int]:
        """Minimum-hop ancestors up to `max_distance` subclass hops, excluding the node."""
        if max_distance < 1:
            raise AnalogionError("max_distance must be >= 1")
        start = self._iid(node)
        dist: dict[int, int] = {start: 0}
        frontier = deque([start])
        while frontier:
            cur = frontier.popleft()
            d = dist[cur]
            if d >= max_distance:
                continue
            for p in self._parent_iids(cur):
                p = int(p)
                if p not in dist:
                    dist[p] = d + 1
                    frontier.append(p)
        dist.pop(start)
        return {self._node_of(i): d for i, d in dist.items()}

    def detect_cycles(self) -> list[list[NodeId]]:
        """Cycles found in the raw input subclass graph, one entry per component."""
        return [[self._node_of(i) for i in cyc] for cyc in self._cycles]

    def broken_edges(self) -> list[tuple[NodeId, NodeId]]:
        """(child, parent) subclass edges dropped under the "break" cycle policy."""
        return [(self._node_of(c), self._node_of(p)) for c, p in self._broken_edges]

    # -- instances -----------------------------------------------------------

    def _direct_iids(self, iid: int) -> np.ndarray:
        return self._lookup_sorted(self._inst_class_keys, self._inst_class_vals, iid)

    def _transitive_iids(self, iid: int) -> np.ndarray:
        arr = self._trans.get(iid)
        return self._direct_iids(iid) if arr is None else arr

    def _instance_iids(self, iid: int, mode: str) -> np.ndarray:
        _require_mode(mode)
        return self._direct_iids(iid) if mode == DIRECT else self._transitive_iids(iid)

    def instances_of(self, node: str | NodeId, mode: str = TRANSITIVE) -> frozenset[NodeId]:
        """Entities that are instances of the class (directly, or via any descendant)."""
        iids = self._instance_iids(self._iid(node), mode)
        return self._nodes_of(int(i) for i in iids)

    def instance_count(self, node: str | NodeId, mode: str = TRANSITIVE) -> int:
        return int(len(self._instance_iids(self._iid(node), mode)))

    def classes_of(self, entity: str | NodeId) -> frozenset[NodeId]:
        """Direct classes the entity is an instance of."""
        iid = self._iid(entity)
        rows = (
            self._rows_for_subject_property(iid, self._ids[INSTANCE_OF])
            if INSTANCE_OF in self._ids
            else ()
        )
        out = set()
        for row in rows:
            obj = int(self._s_obj[int(row)])
            if obj >= 0:
                out.add(obj)
        return self._nodes_of(out)

    # -- reporting / serialization -------------------------------------------

    def summary(self) -> dict[str, int]:
        return {
            "nodes": self.n_nodes,
            "statements": self.n_statements,
            "subclass_edges": int(len(self._sub_child_keys)),
            "instance_edges": int(len(self._inst_class_keys)),
            "classes": int(len(self._class_iids)),
            "labels": len(self._labels),
            "descriptions": len(self._descriptions),
            "malformed_rows": self.malformed_rows,
            "dangling_qualifiers": self.dangling_qualifiers,
            "cycles": len(self._cycles),
            "broken_subclass_edges": len(self._broken_edges),
        }

    def to_edge_file(self, fileobj: IO[str]) -> None:
        """Serialize back to the edge format; reparsing yields the same statements."""
        write = fileobj.write
        write(EDGE_HEADER + "\n")
        for row in range(len(self._sids)):
            sid = self._sids[row]
            subj = self._exts[int(self._s_subj[row])]
            prop = self._exts[int(self._s_prop[row])]
            obj_iid = int(self._s_obj[row])
            obj = self._s_literal[row] if obj_iid < 0 else self._exts[obj_iid]
            write(f"{sid}\t{subj}\t{prop}\t{obj}\n")
            for qid, p, v, lit in self._s_quals.get(row, ()):
                val = lit if v < 0 else self._exts[v]
                write(f"{qid}\t{sid}\t{self._exts[p]}\t{val}\n")
        for iid in sorted(self._labels, key=lambda i: self._exts[i]):
            write(f"label-{self._exts[iid]}\t{self._exts[iid]}\tlabel\t{self._labels[iid]}\n")
        for iid in sorted(self._descriptions, key=lambda i: self._exts[i]):
            ext = self._exts[iid]
            write(f"description-{ext}\t{ext}\tdescription\t{self._descriptions[iid]}\n")


class _Builder:
    """Accumulates parsed rows, then finalizes indexes and the closure."""

    def __init__(self):
        self.ids: dict[str, int] = {}
        self.exts: list[str] = []
        self.sids: list[str] = []
        self.sid_index: dict[str, int] = {}
        self._subj: list[int] = []
        self._prop: list[int] = []
        self._obj: list[int] = []
        self.literals: dict[int, str] = {}
        # row -> [(line, qualifier-row-id, prop iid, value iid | -1, literal | None)]
        self.quals: dict[int, list] = {}
        self.pending_quals: dict[str, list] = {}
        self.labels: dict[int, str] = {}
        self.descriptions: dict[int, str] = {}
        self.sub_edge_list: list[tuple[int, int]] = []
        self.inst_edge_list: list[tuple[int, int]] = []
        self.malformed = 0
        self.dangling = 0

    def intern(self, ext: str) -> int:
        iid = self.ids.get(ext)
        if iid is None:
            iid = len(self.exts)
            self.ids[ext] = iid
            self.exts.append(ext)
        return iid

    def add_statement(
        self,
        sid: str,
        subject: str,
        prop: str,
        obj: str,
        line: int | None = None,
        qualifiers: Sequence[tuple[str, str]] = (),
    ) -> None:
        if sid in self.sid_index:
            raise EdgeFileError(f"duplicate statement id {sid!r}", line)
        obj_is_node = is_node_token(obj)
        if prop in (SUBCLASS_OF, INSTANCE_OF) and not obj_is_node:
            self.malformed += 1  # structural edge to a literal is meaningless
            return
        row = len(self.sids)
        self.sids.append(sid)
        self.sid_index[sid] = row
        s_iid = self.intern(subject)
        p_iid = self.intern(prop)
        self._subj.append(s_iid)
        self._prop.append(p_iid)
        if obj_is_node:
            o_iid = self.intern(obj)
            self._obj.append(o_iid)
            if prop == SUBCLASS_OF:
                self.sub_edge_list.append((s_iid, o_iid))
            elif prop == INSTANCE_OF:
                self.inst_edge_list.append((s_iid, o_iid))
        else:
            self._obj.append(-1)
            self.literals[row] = obj
        for qprop, qval in qualifiers:
            self.add_qualifier(sid, f"{sid}-q{len(self.quals.get(row, ()))}", qprop, qval)

    def add_qualifier(self, sid: str, qrow_id: str, prop: str, value: str, line: int = 0) -> None:
        row = self.sid_index.get(sid)
        v_iid = self.intern(value) if is_node_token(value) else -1
        lit = None if v_iid >= 0 else value
        entry = (line, qrow_id, self.intern(prop), v_iid, lit)
        if row is None:
            self.pending_quals.setdefault(sid, []).append(entry)
        else:
            self.quals.setdefault(row, []).append(entry)

    def add_label(self, node: str, text: str) -> None:
        self.labels[self.intern(node)] = text

    def add_description(self, node: str, text: str) -> None:
        self.descriptions[self.intern(node)] = text

    # -- finalization ---------------------------------------------------------

    def finalize(self, cycle_policy: str) -> OntologyStore:
        if cycle_policy not in CYCLE_POLICIES:
            raise AnalogionError(
                f"unknown cycle policy {cycle_policy!r}; expected one of {CYCLE_POLICIES}"
            )
        self.cycle_policy = cycle_policy

        for sid, entries in self.pending_quals.items():
            row = self.sid_index.get(sid)
            if row is None:
                self.dangling += len(entries)
            else:
                self.quals.setdefault(row, []).extend(entries)
        self.pending_quals = {}
        self.final_quals = {
            row: tuple(sorted(entries, key=lambda e: e[0]))
            for row, entries in self.quals.items()
        }

        n = len(self.sids)
        self.s_subj = np.asarray(self._subj, dtype=np.int64) if n else _EMPTY
        self.s_prop = np.asarray(self._prop, dtype=np.int64) if n else _EMPTY
        self.s_obj = np.asarray(self._obj, dtype=np.int64) if n else _EMPTY
        self._subj = self._prop = self._obj = []

        self.subj_order = np.argsort(self.s_subj, kind="stable")
        self.subj_sorted = self.s_subj[self.subj_order]
        sp_key = (self.s_subj << 32) | self.s_prop if n else _EMPTY
        self.sp_order = np.argsort(sp_key, kind="stable")
        self.sp_sorted = sp_key[self.sp_order]

        self.numeric_arr = np.asarray(
            [int(e[1:]) for e in self.exts], dtype=np.int64
        ) if self.exts else _EMPTY

        raw_edges = sorted(set(self.sub_edge_list))
        self.cycles = _cycle_report(raw_edges, self.numeric_arr, self.exts)
        if self.cycles and cycle_policy == POLICY_ERROR:
            raise CycleError(
                [[NodeId(i, self.exts[i]) for i in cyc] for cyc in self.cycles]
            )
        edges, self.broken_edges = _break_cycles(raw_edges, self.numeric_arr, self.exts)

        self.sub_child_keys, self.sub_child_vals = _sorted_pairs(edges)
        self.sub_parent_keys, self.sub_parent_vals = _sorted_pairs(
            [(p, c) for c, p in edges]
        )
        inst = sorted(set(self.inst_edge_list))
        self.inst_class_keys, self.inst_class_vals = _sorted_pairs(
            [(c, e) for e, c in inst]
        )

        class_set = {c for c, _ in edges} | {p for _, p in edges} | {c for _, c in inst}
        self.class_iids = np.asarray(sorted(class_set), dtype=np.int64)
        self.trans_sets = self._transitive_closure(edges, class_set)
        return OntologyStore(self)

    def _transitive_closure(
        self, edges: list[tuple[int, int]], class_set: set[int]
    ) -> dict[int, np.ndarray]:
        children: dict[int, list[int]] = {}
        parents: dict[int, list[int]] = {}
        indegree = {c: 0 for c in class_set}
        for c, p in edges:
            children.setdefault(p, []).append(c)
            parents.setdefault(c, []).append(p)
            indegree[p] += 1
        # Kahn: leaves first, so every child set exists before its parents need it.
        order: list[int] = []
        ready = deque(sorted(i for i, d in indegree.items() if d == 0))
        while ready:
            node = ready.popleft()
            order.append(node)
            for p in parents.get(node, ()):
                indegree[p] -= 1
                if indegree[p] == 0:
                    ready.append(p)
        if len(order) != len(class_set):
            raise AnalogionError("internal error: subclass graph still cyclic after policy")

        key_arr, val_arr = self.inst_class_keys, self.inst_class_vals

        def direct(iid: int) -> np.ndarray:
            lo = np.searchsorted(key_arr, iid, side="left")
            hi = np.searchsorted(key_arr, iid, side="right")
            return val_arr[lo:hi]

        trans: dict[int, np.ndarray] = {}
        for c in order:
            kids = children.get(c, ())
            if not kids:
                trans[c] = direct(c)
                continue
            parts = [direct(c)] + [trans[k] for k in kids]
            parts = [p for p in parts if len(p)]
            if not parts:
                trans[c] = _EMPTY
            elif len(parts) == 1:
                trans[c] = parts[0]
            else:
                trans[c] = np.unique(np.concatenate(parts))
        return trans


def _sorted_pairs(pairs: Sequence[tuple[int, int]]) -> tuple[np.ndarray, np.ndarray]:
    """Pairs -> (sorted key array, aligned value array) for searchsorted lookups."""
    if not pairs:
        return _EMPTY, _EMPTY
    arr = np.asarray(sorted(pairs), dtype=np.int64)
    return np.ascontiguousarray(arr[:, 0]), np.ascontiguousarray(arr[:, 1])


def _tarjan_components(nodes: Iterable[int], adj: Mapping[int, Sequence[int]]) -> list[list[int]]:
    """Strongly connected components, iterative to survive deep hierarchies."""
    index: dict[int, int] = {}
    low: dict[int, int] = {}
    onstack: set[int] = set()
    stack: list[int] = []
    components: list[list[int]] = []
    counter = 0
    for root in nodes:
        if root in index:
            continue
        work: list[list] = [[root, 0]]
        while work:
            frame = work[-1]
            v, ptr = frame
            if ptr == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                onstack.add(v)
            neighbors = adj.get(v, ())
            advanced = False
            while frame[1] < len(neighbors):
                w = neighbors[frame[1]]
                frame[1] += 1
                if w not in index:
                    work.append([w, 0])
                    advanced = True
                    break
                if w in onstack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    onstack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                components.append(comp)
    return components


def _cycle_report(
    edges: Sequence[tuple[int, int]], numeric: np.ndarray, exts: Sequence[str]
) -> list[list[int]]:
    """SCCs of size > 1 plus self-loops, each sorted by numeric id."""
    adj: dict[int, list[int]] = {}
    nodes: set[int] = set()
    selfloops: set[int] = set()
    for c, p in edges:
        nodes.add(c)
        nodes.add(p)
        if c == p:
            selfloops.add(c)
        else:
            adj.setdefault(c, []).append(p)

    def node_key(i: int) -> tuple[int, str]:
        return (int(numeric[i]), exts[i])

    cycles = [
        sorted(comp, key=node_key)
        for comp in _tarjan_components(sorted(nodes, key=node_key), adj)
        if len(comp) > 1
    ]
    cycles.extend([v] for v in selfloops)
    cycles.sort(key=lambda cyc: node_key(cyc[0]))
    return cycles


def _break_cycles(
    edges: Sequence[tuple[int, int]], numeric: np.ndarray, exts: Sequence[str]
) -> tuple[list[tuple[int, int]], list[tuple[int, int]]]:
    """Drop back edges until acyclic.

    Within each cyclic component the dropped edge is the one whose child has
    the largest numeric id (ties to the larger parent), which makes the
    result independent of input order.
    """

    def edge_key(e: tuple[int, int]) -> tuple[int, str, int, str]:
        c, p = e
        return (int(numeric[c]), exts[c], int(numeric[p]), exts[p])

    current = set(edges)
    removed: list[tuple[int, int]] = []
    while True:
        report = _cycle_report(sorted(current), numeric, exts)
        if not report:
            break
        for comp in report:
            comp_set = set(comp)
            if len(comp) == 1:
                victim = (comp[0], comp[0])
            else:
                internal = [
                    e for e in current if e[0] in comp_set and e[1] in comp_set and e[0] != e[1]
                ]
                victim = max(internal, key=edge_key)
            current.discard(victim)
            removed.append(victim)
    removed.sort(key=edge_key)
    return sorted(current), removed


def parse_edge_file(stream: IO, cycle_policy: str = POLICY_ERROR) -> OntologyStore:
    """Parse a UTF-8 tab-separated edge file into an OntologyStore.

    Rows are dispatched on their columns: `label`/`description` rows fill the
    name maps, rows whose node1 is a known statement id attach qualifiers,
    everything else is a statement. Malformed rows are counted and skipped;
    a missing header or a duplicate statement id aborts the parse.
    """
    b = _Builder()
    line_no = 0
    node_match = _NODE_RE.match
    first = True
    for raw in stream:
        if isinstance(raw, bytes):
            raw = raw.decode("utf-8")
        line_no += 1
        line = raw.rstrip("\r\n")
        if first:
            first = False
            if line.lstrip("﻿") != EDGE_HEADER:
                raise EdgeFileError(
                    f"missing or invalid header; expected {EDGE_HEADER!r}", line_no
                )
            continue
        if not line:
            continue
        cols = line.split("\t")
        if len(cols) != 4:
            b.malformed += 1
            continue
        rid, n1, prop, n2 = cols
        if prop == LABEL_COLUMN_TOKEN:
            if node_match(n1):
                b.add_label(n1, n2)
            else:
                b.malformed += 1
        elif prop == DESCRIPTION_COLUMN_TOKEN:
            if node_match(n1):
                b.add_description(n1, n2)
            else:
                b.malformed += 1
        elif n1 in b.sid_index:
            if node_match(prop):
                b.add_qualifier(n1, rid, prop, n2, line_no)
            else:
                b.malformed += 1
        elif node_match(n1):
            if node_match(prop):
                b.add_statement(rid, n1, prop, n2, line_no)
            else:
                b.malformed += 1
        else:
            # Unknown non-node subject: a qualifier for a statement defined
            # later in the file, or dangling if it never appears.
            if node_match(prop):
                b.add_qualifier(n1, rid, prop, n2, line_no)
            else:
                b.malformed += 1
    if first:
        raise EdgeFileError(f"missing or invalid header; expected {EDGE_HEADER!r}")
    return b.finalize(cycle_policy)


def build_store(
    *,
    subclass: Iterable[tuple[str, str]] = (),
    instance: Iterable[tuple[str, str]] = (),
    statements: Iterable[tuple] = (),
    labels: Mapping[str, str] | None = None,
    descriptions: Mapping[str, str] | None = None,
    cycle_policy: str = POLICY_ERROR,
) -> OntologyStore:
    """Build a store from in-memory edge lists (test and tooling convenience).

    `subclass` holds (child, parent) pairs, `instance` (entity, class) pairs;
    `statements` entries are (sid, subject, property, object) with an optional
    trailing qualifier list of (property, value) pairs.
    """
    b = _Builder()
    n = 0
    for child, parent in subclass:
        n += 1
        b.add_statement(f"sub-{n}", child, SUBCLASS_OF, parent)
    for entity, cls in instance:
        n += 1
        b.add_statement(f"inst-{n}", entity, INSTANCE_OF, cls)
    for entry in statements:
        sid, subject, prop, obj = entry[:4]
        quals = entry[4] if len(entry) > 4 else ()
        b.add_statement(sid, subject, prop, obj, qualifiers=quals)
    for node, text in (labels or {}).items():
        b.add_label(node, text)
    for node, text in (descriptions or {}).items():
        b.add_description(node, text)
    return b.finalize(cycle_policy)
