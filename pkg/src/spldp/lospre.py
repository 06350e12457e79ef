"""Lifetime-optimal speculative partial redundancy elimination.

A temporary holds the value of one expression.  The life set ``L`` is where
the temporary is kept alive; the expression must then be computed into it on
every edge ``(x, y)`` with ``x ∉ L \\ I`` and ``y ∈ U ∪ L``.  The objective
adds the injection cost ``c`` of those edges to the liveness cost ``l`` of
the vertices in ``L``.

Solved as a PCSP with the two-value domain ``(False, True)`` ("in L");
membership in ``U`` and ``I`` is fixed per vertex and folded into the edge
costs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, FrozenSet, Iterable, Mapping, Optional, Set, Tuple, Union

from . import costs
from .costs import INF
from .decompose import Cfg
from .pcsp import PcspInstance, SolveStats, solve

OUT, IN = False, True
DOMAIN = (OUT, IN)

CostInput = Union[Any, Mapping, Callable]


def _lookup(given: CostInput, key, kind: str, fallback):
    if callable(given):
        return costs.coerce(kind, given(key))
    if isinstance(given, Mapping):
        return costs.coerce(kind, given.get(key, fallback))
    return costs.coerce(kind, given)


@dataclass
class LospreInstance:
    """``c`` maps edge ids to costs (or is one cost for every edge, or a
    callable on the edge id); ``l`` likewise for vertices.  Missing mapping
    entries cost zero."""

    cfg: Cfg
    U: FrozenSet
    I: FrozenSet
    c: CostInput = 1
    l: CostInput = 0
    kind: str = "int"

    def __post_init__(self):
        costs.check_kind(self.kind)
        self.U = frozenset(self.U)
        self.I = frozenset(self.I)
        verts = set(self.cfg.real_vertices)
        for name, s in (("U", self.U), ("I", self.I)):
            stray = s - verts
            if stray:
                raise ValueError(f"{name} mentions unknown vertices {sorted(map(str, stray))}")
        missing = {self.cfg.s, self.cfg.t} - self.I
        if missing:
            raise ValueError("the entry and exit vertices must be invalidating")

    def edge_cost(self, eid):
        return _lookup(self.c, eid, self.kind, costs.zero(self.kind))

    def vertex_cost(self, v):
        return _lookup(self.l, v, self.kind, costs.zero(self.kind))


@dataclass
class LospreSolution:
    cost: Any
    life: FrozenSet
    calc: FrozenSet  # edge ids
    stats: Optional[SolveStats] = None


def injects(x_in_life: bool, x_invalidating: bool, y_in_use: bool, y_in_life: bool) -> bool:
    """Whether the expression is computed on an edge ``(x, y)``."""
    return not (x_in_life and not x_invalidating) and (y_in_use or y_in_life)


def calc_set(cfg: Cfg, U: Iterable, L: Iterable, I: Iterable) -> FrozenSet:
    """Ids of the edges that receive a computation of the expression."""
    U, L, I = set(U), set(L), set(I)
    return frozenset(e.id for e in cfg.real_edges
                     if injects(e.src in L, e.src in I, e.dst in U, e.dst in L))


def edge_pairs(cfg: Cfg, ids: Iterable) -> Set[Tuple[Any, Any]]:
    return {(cfg.edge_by_id[i].src, cfg.edge_by_id[i].dst) for i in ids}


def lospre_cost(inst: LospreInstance, L: Iterable):
    L = frozenset(L)
    total = costs.zero(inst.kind)
    for eid in sorted(calc_set(inst.cfg, inst.U, L, inst.I), key=str):
        total = total + inst.edge_cost(eid)
    for v in L:
        total = total + inst.vertex_cost(v)
    return total


def lospre_pcsp(inst: LospreInstance) -> PcspInstance:
    U, I = inst.U, inst.I

    def edge_cost(e, ax, ay):
        if injects(ax, e.src in I, e.dst in U, ay):
            return inst.edge_cost(e.id)
        return costs.zero(inst.kind)

    def node_cost(v, a):
        return inst.vertex_cost(v) if a else costs.zero(inst.kind)

    return PcspInstance(inst.cfg, DOMAIN, edge_cost, node_cost, kind=inst.kind)


def solve_lospre(inst: LospreInstance, backend: Optional[str] = None) -> LospreSolution:
    sol = solve(lospre_pcsp(inst), backend=backend)
    if sol.assignment is None:
        return LospreSolution(INF, frozenset(), frozenset(), sol.stats)
    life = frozenset(v for v, a in sol.assignment.items() if a)
    return LospreSolution(sol.cost, life, calc_set(inst.cfg, inst.U, life, inst.I), sol.stats)
