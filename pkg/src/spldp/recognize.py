"""Recover an SPL decomposition from a bare directed graph.

Instance files describe CFGs as plain vertex and edge lists.  This module
parses such a graph back into the series/parallel/loop grammar.  Where the
grammar needs a vertex or edge the drawing leaves out (the break and continue
targets of the whole graph, a loop body that never completes, a loop without
an exit edge, ...), a *phantom* is inserted.  Phantom vertices admit a single
dummy value and phantom edges cost nothing, so any optimum over the
augmented graph is an optimum over the original one.

Supported input: every edge is explained by the grammar once phantoms are
allowed and every vertex other than the break and continue targets is
reachable from the entry.  Graphs with dead code (statements after a
``break`` or ``continue``) are often ambiguous and may be rejected with
:class:`DecompositionError`; files can carry an explicit decomposition
instead.
"""

from __future__ import annotations

import itertools
from collections import deque
from typing import Any, Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from .decompose import (ATOM, LOOP, PARALLEL, PHANTOM, SERIES, DecompNode, DecompositionError,
                        SplDecomposition)
from .graph import AtomKind, Edge


class _Phantom:
    __slots__ = ("n",)
    _ids = itertools.count()

    def __init__(self):
        self.n = next(self._ids)

    def __repr__(self) -> str:
        return f"<phantom {self.n}>"


class _Fail(Exception):
    pass


class _Recognizer:
    def __init__(self, edges: Dict[Any, Edge]):
        self.edges = edges
        self.memo: Dict = {}

    # -------------------------------------------------------------- helpers

    def _pieces(self, eids: FrozenSet, sp: Tuple) -> List[FrozenSet]:
        """Group edges that share a non-special vertex."""
        parent: Dict = {}

        def find(x):
            while parent.setdefault(x, x) != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        special = set(sp)
        for eid in eids:
            e = self.edges[eid]
            for v in (e.src, e.dst):
                if v not in special:
                    parent[find(("e", eid))] = find(("v", v))
            find(("e", eid))
        groups: Dict = {}
        for eid in sorted(eids, key=_key):
            groups.setdefault(find(("e", eid)), []).append(eid)
        return [frozenset(g) for g in groups.values()]

    # -------------------------------------------------------------- grammar

    def rec(self, eids: FrozenSet, sp: Tuple):
        key = (eids, sp)
        if key not in self.memo:
            try:
                self.memo[key] = self._rec(eids, sp)
            except _Fail:
                self.memo[key] = None
        result = self.memo[key]
        if result is None:
            raise _Fail()
        return result

    def _rec(self, eids: FrozenSet, sp: Tuple):
        if not eids:
            raise _Fail()
        s, t, b, c = sp
        pieces = self._pieces(eids, sp)
        if len(pieces) == 1:
            return self._single(eids, sp, None)[0]
        try:
            return self._parallel(pieces, sp)
        except _Fail:
            # a loop whose only link to what follows is its exit edge looks
            # like a parallel branch; read it as a series instead
            return self._series(eids, sp)

    def _parallel(self, pieces: List[FrozenSet], sp: Tuple):
        s, t, b, c = sp
        starts = [p for p in pieces if any(self.edges[e].src == s for e in p)]
        stubs = [p for p in pieces if p not in starts]
        pool = [p for p in starts if len(p) == 1 and self.edges[next(iter(p))].dst == t]
        others = [p for p in starts if p not in pool]
        looping = [p for p in others if any(self.edges[e].dst == s for e in p)]
        if stubs and not looping:
            raise _Fail()
        # dispatch edges of loops whose break/continue/end is never reached;
        # try every way of handing them to the loops at this vertex
        at = [others.index(p) for p in looping]
        choices = itertools.product(range(len(looping)), repeat=len(stubs))
        for choice in itertools.islice(choices, 256):
            groups = list(others)
            for stub, k in zip(stubs, choice):
                groups[at[k]] = groups[at[k]] | stub
            try:
                return self._fold(groups, set(at), list(pool), sp)
            except _Fail:
                pass
        raise _Fail()

    def _fold(self, groups: List[FrozenSet], loops, pool: List, sp: Tuple):
        results = []
        for i, p in enumerate(groups):
            exit_eid = next(iter(pool[-1])) if i in loops and pool else None
            node, used = self._single(p, sp, exit_eid)
            if used:
                pool.pop()
            results.append(node)
        for p in pool:
            results.append(self._single(p, sp, None)[0])
        node = results[0]
        for other in results[1:]:
            node = (PARALLEL, sp, node, other)
        return node

    def _single(self, eids: FrozenSet, sp: Tuple, exit_eid):
        s, t, b, c = sp
        if exit_eid is None and len(eids) == 1:
            e = self.edges[next(iter(eids))]
            kinds = {t: AtomKind.EPS, b: AtomKind.BREAK, c: AtomKind.CONTINUE}
            if e.src == s and e.dst in kinds:
                return (ATOM, sp, kinds[e.dst], e.id), False
            raise _Fail()
        if any(self.edges[e].dst == s for e in eids):
            try:
                return self._loop(eids, sp, exit_eid), exit_eid is not None
            except _Fail:
                pass
        return self._series(eids, sp), False

    def _loop(self, eids: FrozenSet, sp: Tuple, exit_eid):
        s, t, b, c = sp
        edges = [self.edges[e] for e in sorted(eids, key=_key)]
        enters = [e for e in edges if e.src == s]
        backs = [e for e in edges if e.dst == s]
        brks = [e for e in edges if e.dst == t]
        if len(enters) != 1 or not 1 <= len(backs) <= 2 or len(brks) > 1:
            raise _Fail()
        if any(e.dst in (b, c) for e in edges):
            raise _Fail()
        enter = enters[0]
        s1 = enter.dst
        if s1 in sp or any(e.src in sp for e in backs + brks):
            raise _Fail()
        if len({e.src for e in backs}) != len(backs):
            raise _Fail()
        body = eids - {enter.id} - {e.id for e in backs} - {e.id for e in brks}
        brk = brks[0] if brks else None
        b1 = brk.src if brk else _Phantom()
        if len(backs) == 2:
            options = [(backs[0], backs[1]), (backs[1], backs[0])]
        else:
            options = [(backs[0], None), (None, backs[0])]
        for back, cont in options:
            t1 = back.src if back else _Phantom()
            c1 = cont.src if cont else _Phantom()
            body_sp = (s1, t1, b1, c1)
            if len(set(body_sp)) != 4:
                continue
            try:
                inner = self.rec(body, body_sp)
            except _Fail:
                continue
            loop_edges = (
                enter.id,
                exit_eid if exit_eid is not None else ("phantom", s, t),
                back.id if back else ("phantom", t1, s),
                cont.id if cont else ("phantom", c1, s),
                brk.id if brk else ("phantom", b1, t),
            )
            return (LOOP, sp, inner, loop_edges)
        raise _Fail()

    def _series(self, eids: FrozenSet, sp: Tuple):
        s, t, b, c = sp
        edges = [self.edges[e] for e in eids]
        adj: Dict = {}
        out: Dict = {}
        for e in edges:
            out.setdefault(e.src, []).append(e)
            if e.src in (b, c) or e.dst in (b, c):
                continue
            adj.setdefault(e.src, set()).add(e.dst)
            adj.setdefault(e.dst, set()).add(e.src)
        internal = {v for e in edges for v in (e.src, e.dst)} - set(sp)
        has_pred = {e.dst for e in edges}
        candidates = []
        for m in sorted(internal, key=_key):
            comp = {s}
            queue = deque([s])
            while queue:
                v = queue.popleft()
                for w in adj.get(v, ()):
                    if w != m and w not in comp:
                        comp.add(w)
                        queue.append(w)
            if t in comp or any(e.dst in comp for e in out.get(m, ())):
                continue
            # Unreachable vertices hanging only off m: either a dispatch edge of
            # a loop ending at m (left side) or of a loop starting at m (right).
            stubs = sorted((v for v in internal - comp if v != m and v not in has_pred
                            and adj.get(v, set()) == {m}), key=_key)
            choices = itertools.product((True, False), repeat=len(stubs)) if len(stubs) <= 4 else \
                [(True,) * len(stubs), (False,) * len(stubs)]
            for choice in choices:
                left = comp | {v for v, go in zip(stubs, choice) if go}
                first = frozenset(e.id for e in edges if e.src in left)
                if not first or first == eids:
                    continue
                candidates.append((len(comp), m, first))
        candidates.sort(key=lambda x: x[0])
        for _, m, first in candidates:
            try:
                left = self.rec(first, (s, m, b, c))
                right = self.rec(eids - first, (m, t, b, c))
            except _Fail:
                continue
            return (SERIES, sp, left, right)
        raise _Fail()


def _key(x):
    return (0, x, "") if isinstance(x, int) else (1, 0, repr(x))


def recognize(vertices: Sequence, edges: Iterable[Edge], entry=None, exit=None,
              brk=None, cont=None) -> SplDecomposition:
    """Decompose a bare graph.  ``entry``/``exit`` default to the unique vertex
    without predecessors / successors; ``brk``/``cont`` default to phantoms."""
    vertices = list(vertices)
    if len(set(vertices)) != len(vertices):
        raise DecompositionError("duplicate vertex ids")
    edge_map: Dict[Any, Edge] = {}
    vset = set(vertices)
    for e in edges:
        if e.id in edge_map:
            raise DecompositionError(f"duplicate edge id {e.id!r}")
        if e.src not in vset or e.dst not in vset:
            raise DecompositionError(f"edge {e.id!r} references an unknown vertex")
        edge_map[e.id] = e
    indeg = {v: 0 for v in vertices}
    outdeg = {v: 0 for v in vertices}
    for e in edge_map.values():
        indeg[e.dst] += 1
        outdeg[e.src] += 1
    if entry is None:
        roots = [v for v in vertices if indeg[v] == 0 and outdeg[v] > 0]
        if len(roots) != 1:
            raise DecompositionError("cannot infer the entry vertex; specify it explicitly")
        entry = roots[0]
    if exit is None:
        sinks = [v for v in vertices if outdeg[v] == 0 and v not in (brk, cont)]
        if len(sinks) != 1:
            raise DecompositionError("cannot infer the exit vertex; specify it explicitly")
        exit = sinks[0]
    b = brk if brk is not None else _Phantom()
    c = cont if cont is not None else _Phantom()
    sp = (entry, exit, b, c)
    if len(set(sp)) != 4:
        raise DecompositionError("entry, exit, break and continue vertices must be distinct")
    for v in vertices:
        if v not in sp and indeg[v] + outdeg[v] == 0:
            raise DecompositionError(f"vertex {v!r} has no edges")
    if not edge_map:
        raise DecompositionError("graph has no edges")
    rec = _Recognizer(edge_map)
    try:
        tree = rec.rec(frozenset(edge_map), sp)
    except _Fail:
        raise DecompositionError("graph is not a structured (series/parallel/loop) control-flow graph") from None
    return _materialize(tree, vertices, edge_map)


def _materialize(tree, vertices: List, edge_map: Dict[Any, Edge]) -> SplDecomposition:
    ints = all(isinstance(v, int) for v in vertices) and all(isinstance(e, int) for e in edge_map)
    next_v = max([v for v in vertices if isinstance(v, int)], default=-1) + 1
    next_e = max([e for e in edge_map if isinstance(e, int)], default=-1) + 1
    taken_v = {str(v) for v in vertices}
    taken_e = {str(e) for e in edge_map}
    names: Dict[_Phantom, Any] = {}
    counter = itertools.count()

    def fresh(taken, start):
        if ints:
            return start + next(counter)
        while True:
            name = f"~{next(counter)}"
            if name not in taken:
                return name

    def vname(v):
        if isinstance(v, _Phantom):
            if v not in names:
                names[v] = fresh(taken_v, next_v)
            return names[v]
        return v

    edges = dict(edge_map)
    phantom_edges = []

    def ename(x):
        if isinstance(x, tuple):
            _, u, w = x
            eid = fresh(taken_e, next_e)
            edges[eid] = Edge(eid, vname(u), vname(w), PHANTOM)
            phantom_edges.append(eid)
            return eid
        return x

    holder: List[DecompNode] = []
    stack = [(tree, holder)]
    while stack:
        item, sink = stack.pop()
        kind, sp = item[0], tuple(vname(v) for v in item[1])
        if kind == ATOM:
            node = DecompNode(ATOM, *sp, atom=item[2], edges=(item[3],))
        elif kind == LOOP:
            node = DecompNode(LOOP, *sp, edges=tuple(ename(x) for x in item[3]))
            stack.append((item[2], node.children))
        else:
            node = DecompNode(kind, *sp)
            # children are appended in pop order, so push the right one first
            node.children = [None, None]
            stack.append((item[3], _Slot(node.children, 1)))
            stack.append((item[2], _Slot(node.children, 0)))
        sink.append(node)
    phantom_vertices = list(names.values())
    d = SplDecomposition(holder[0], edges, vertices + phantom_vertices, phantom_vertices, phantom_edges)
    d.validate()
    return d


class _Slot:
    """Write-once list slot so children land at fixed positions."""

    def __init__(self, target: list, index: int):
        self.target, self.index = target, index

    def append(self, value) -> None:
        self.target[self.index] = value
