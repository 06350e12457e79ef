"""SPL graphs: multigraphs with four distinguished vertices and the
series / parallel / loop compositions that generate them."""

from __future__ import annotations

import enum
import itertools
from collections import deque
from dataclasses import dataclass
from typing import Any, Dict, FrozenSet, Hashable, Iterable, List, Optional, Sequence, Tuple

_vertex_ids = itertools.count()
_edge_ids = itertools.count()


def fresh_vertex() -> int:
    return next(_vertex_ids)


def fresh_edge() -> int:
    return next(_edge_ids)


class AtomKind(enum.Enum):
    EPS = "eps"
    BREAK = "break"
    CONTINUE = "continue"

    def __str__(self) -> str:
        return {"eps": "ε", "break": "break", "continue": "continue"}[self.value]


@dataclass(frozen=True, slots=True)
class Edge:
    id: Hashable
    src: Hashable
    dst: Hashable
    payload: Any = None


class GraphError(ValueError):
    pass


class SplGraph:
    """Immutable SPL graph ``(V, E, S, T, B, C)``.

    Edges keep their identity through every composition; merging vertices only
    rewrites endpoints.
    """

    __slots__ = ("vertices", "edges", "s", "t", "b", "c", "_edge_ids")

    def __init__(self, vertices: Iterable[Hashable], edges: Iterable[Edge], s, t, b, c):
        self.vertices: FrozenSet = frozenset(vertices)
        self.edges: Tuple[Edge, ...] = tuple(edges)
        self.s, self.t, self.b, self.c = s, t, b, c
        if len({s, t, b, c}) != 4:
            raise GraphError("distinguished vertices must be pairwise distinct")
        missing = {s, t, b, c} - self.vertices
        if missing:
            raise GraphError(f"distinguished vertices {sorted(map(str, missing))} not in vertex set")
        ids = set()
        for e in self.edges:
            if e.id in ids:
                raise GraphError(f"duplicate edge id {e.id!r}")
            ids.add(e.id)
            if e.src not in self.vertices or e.dst not in self.vertices:
                raise GraphError(f"edge {e.id!r} has an endpoint outside the vertex set")
        self._edge_ids = frozenset(ids)

    @property
    def specials(self) -> Tuple:
        return (self.s, self.t, self.b, self.c)

    @property
    def edge_ids(self) -> FrozenSet:
        return self._edge_ids

    def in_degree(self, v) -> int:
        return sum(1 for e in self.edges if e.dst == v)

    def out_degree(self, v) -> int:
        return sum(1 for e in self.edges if e.src == v)

    def __repr__(self) -> str:
        return f"SplGraph(|V|={len(self.vertices)}, |E|={len(self.edges)}, S={self.s}, T={self.t}, B={self.b}, C={self.c})"


def atomic(kind: AtomKind, payload: Any = None, *, ids: Optional[Sequence] = None, edge_id=None) -> SplGraph:
    """One of the three single-edge graphs.  ``ids`` optionally fixes (S, T, B, C)."""
    s, t, b, c = ids if ids is not None else (fresh_vertex() for _ in range(4))
    dst = {AtomKind.EPS: t, AtomKind.BREAK: b, AtomKind.CONTINUE: c}[AtomKind(kind)]
    eid = fresh_edge() if edge_id is None else edge_id
    return SplGraph((s, t, b, c), [Edge(eid, s, dst, payload)], s, t, b, c)


def _check_disjoint(g1: SplGraph, g2: SplGraph) -> None:
    if g1.vertices & g2.vertices:
        raise GraphError("operands share vertex ids")
    if g1.edge_ids & g2.edge_ids:
        raise GraphError("operands share edge ids")


def _merge(g1: SplGraph, g2: SplGraph, rename: Dict, specials: Tuple) -> SplGraph:
    vertices = (g1.vertices | g2.vertices) - rename.keys()
    edges = list(g1.edges)
    for e in g2.edges:
        src = rename.get(e.src, e.src)
        dst = rename.get(e.dst, e.dst)
        edges.append(e if (src, dst) == (e.src, e.dst) else Edge(e.id, src, dst, e.payload))
    return SplGraph(vertices, edges, *specials)


def series(g1: SplGraph, g2: SplGraph) -> SplGraph:
    """Merge (T1, S2), (B1, B2), (C1, C2); the result's specials are (S1, T2, B, C)."""
    _check_disjoint(g1, g2)
    rename = {g2.s: g1.t, g2.b: g1.b, g2.c: g1.c}
    return _merge(g1, g2, rename, (g1.s, g2.t, g1.b, g1.c))


def parallel(g1: SplGraph, g2: SplGraph) -> SplGraph:
    """Merge the two operands' special tuples position by position."""
    _check_disjoint(g1, g2)
    rename = {g2.s: g1.s, g2.t: g1.t, g2.b: g1.b, g2.c: g1.c}
    return _merge(g1, g2, rename, g1.specials)


LOOP_EDGE_NAMES = ("enter", "exit", "back", "cont", "brk")


def loop_(g: SplGraph, payloads: Optional[Dict[str, Any]] = None, *, ids: Optional[Sequence] = None,
          edge_ids: Optional[Sequence] = None) -> SplGraph:
    """Wrap ``g`` with fresh specials and the five edges
    (S,S1) enter, (S,T) exit, (T1,S) back, (C1,S) cont, (B1,T) brk."""
    payloads = payloads or {}
    s, t, b, c = ids if ids is not None else (fresh_vertex() for _ in range(4))
    if {s, t, b, c} & g.vertices:
        raise GraphError("loop specials collide with operand vertices")
    eids = list(edge_ids) if edge_ids is not None else [fresh_edge() for _ in range(5)]
    ends = [(s, g.s), (s, t), (g.t, s), (g.c, s), (g.b, t)]
    new = [Edge(eid, u, v, payloads.get(name)) for eid, (u, v), name in zip(eids, ends, LOOP_EDGE_NAMES)]
    if {e.id for e in new} & g.edge_ids:
        raise GraphError("loop edge ids collide with operand edges")
    return SplGraph(g.vertices | {s, t, b, c}, list(g.edges) + new, s, t, b, c)


def is_closed(g: SplGraph) -> bool:
    return all(e.dst != g.b and e.dst != g.c for e in g.edges)


def payload_key(payload: Any) -> str:
    label = getattr(payload, "label", None)
    if callable(label):
        return label()
    return "" if payload is None else str(payload)


def canonical_form(g: SplGraph, payloads: bool = True) -> Tuple:
    """A total invariant under renaming of vertex and edge ids.

    S, T, B, C get numbers 0..3; remaining vertices are numbered in BFS order
    from the specials, exploring edges in a deterministic order (direction,
    payload label, neighbour number).  The result is the sorted list of
    (src#, dst#, payload label) triples plus the vertex count.
    """
    key = payload_key if payloads else (lambda _p: "")
    number: Dict = {v: i for i, v in enumerate(g.specials)}
    out_adj: Dict = {v: [] for v in g.vertices}
    in_adj: Dict = {v: [] for v in g.vertices}
    for e in g.edges:
        out_adj[e.src].append(e)
        in_adj[e.dst].append(e)
    color = _refine_colors(g, out_adj, in_adj, key)
    queue = deque(g.specials)
    while queue:
        v = queue.popleft()
        nbrs = [(0, key(e.payload), e.dst) for e in out_adj[v]]
        nbrs += [(1, key(e.payload), e.src) for e in in_adj[v]]
        nbrs.sort(key=lambda x: (x[0], x[1], color[x[2]], number.get(x[2], -1)))
        for _, _, w in nbrs:
            if w not in number:
                number[w] = len(number)
                queue.append(w)
    for v in sorted(g.vertices - number.keys(), key=repr):  # unreachable from specials
        number[v] = len(number)
    triples = sorted((number[e.src], number[e.dst], key(e.payload)) for e in g.edges)
    return (len(g.vertices), tuple(triples))


def _refine_colors(g: SplGraph, out_adj: Dict, in_adj: Dict, key) -> Dict:
    """Colour refinement seeded with the special roles; used only to break BFS ties."""
    color = {v: -1 for v in g.vertices}
    for i, v in enumerate(g.specials):
        color[v] = i
    classes = len(set(color.values()))
    while True:
        sig = {
            v: (color[v],
                tuple(sorted((key(e.payload), color[e.dst]) for e in out_adj[v])),
                tuple(sorted((key(e.payload), color[e.src]) for e in in_adj[v])))
            for v in g.vertices
        }
        ranks = {s: i for i, s in enumerate(sorted(set(sig.values())))}
        color = {v: ranks[sig[v]] for v in g.vertices}
        if len(ranks) == classes:
            return color
        classes = len(ranks)


def isomorphic(g1: SplGraph, g2: SplGraph, payloads: bool = True) -> bool:
    return canonical_form(g1, payloads) == canonical_form(g2, payloads)


def adjacency(g: SplGraph) -> Tuple[Dict, Dict]:
    succ: Dict = {v: [] for v in g.vertices}
    pred: Dict = {v: [] for v in g.vertices}
    for e in g.edges:
        succ[e.src].append(e)
        pred[e.dst].append(e)
    return succ, pred


def edges_between(g: SplGraph, src, dst) -> List[Edge]:
    return [e for e in g.edges if e.src == src and e.dst == dst]
