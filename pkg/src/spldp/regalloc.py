"""Register allocation as a PCSP over the CFG.

The value at a vertex is a partial allocation of the variables live there:
a tuple of ``(variable, register)`` pairs sorted by variable, where the
register is an int in ``range(r)`` or ``None`` for a spilled variable.
Neighbouring allocations must agree on every variable live at both ends.

Two cost models are built in.  ``"spill-free"`` allows no ``None`` at all.
``"unit-spill"`` charges 1 per spilled live range: a range is the set of
vertices where one variable is continuously live, and its charge is taken on
the first edge (by id) that touches it.  Any other callable
``cost_oracle(edge, a1, a2)`` is applied to compatible pairs as is.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, FrozenSet, List, Optional, Sequence, Tuple, Union

import numpy as np

from . import costs
from .analysis import LiveMap, liveness
from .costs import INF, INF_CODE
from .decompose import Cfg
from .pcsp import PcspInstance, PcspSolution, SolveStats, solve

Allocation = Tuple[Tuple[str, Optional[int]], ...]
SPILL_FREE = "spill-free"
UNIT_SPILL = "unit-spill"
R_MAX = 20


@dataclass
class RegAllocInstance:
    cfg: Cfg
    live: LiveMap
    r: int
    cost_oracle: Union[str, Callable] = SPILL_FREE
    spill_free: Optional[bool] = None  # default: True exactly for the spill-free oracle

    def __post_init__(self):
        if self.r < 0:
            raise ValueError("register count must be non-negative")
        if isinstance(self.cost_oracle, str) and self.cost_oracle not in (SPILL_FREE, UNIT_SPILL):
            raise ValueError(f"unknown cost oracle {self.cost_oracle!r}")
        if self.spill_free is None:
            self.spill_free = self.cost_oracle == SPILL_FREE


@dataclass(frozen=True)
class InterferenceGraph:
    vertices: FrozenSet[str]
    edges: FrozenSet[FrozenSet[str]]

    def neighbours(self, x: str) -> FrozenSet[str]:
        return frozenset(y for e in self.edges if x in e for y in e if y != x)

    def has_edge(self, x: str, y: str) -> bool:
        return frozenset((x, y)) in self.edges

    def sorted_edges(self) -> List[Tuple[str, str]]:
        return sorted(tuple(sorted(e)) for e in self.edges)


@dataclass
class RegAllocSolution:
    cost: Any
    allocation: Optional[Dict[Any, Allocation]]
    stats: SolveStats
    spilled: FrozenSet[str] = field(default_factory=frozenset)

    @property
    def feasible(self) -> bool:
        return self.cost is not INF


def allocations(variables: Sequence[str], r: int, spill: bool) -> List[Allocation]:
    """Every injective map of ``variables`` into ``range(r)`` (plus ``None``
    when ``spill``), in lexicographic order with ``None`` after every register."""
    names = sorted(variables)
    out: List[Allocation] = []

    def rec(i: int, used: set, acc: list):
        if i == len(names):
            out.append(tuple(acc))
            return
        for reg in range(r):
            if reg not in used:
                used.add(reg)
                acc.append((names[i], reg))
                rec(i + 1, used, acc)
                acc.pop()
                used.discard(reg)
        if spill:
            acc.append((names[i], None))
            rec(i + 1, used, acc)
            acc.pop()

    rec(0, set(), [])
    return out


def spilled_in(a: Allocation) -> FrozenSet[str]:
    return frozenset(x for x, reg in a if reg is None)


def compatible(a1: Allocation, a2: Allocation) -> bool:
    d1 = dict(a1)
    return all(d1[x] == reg for x, reg in a2 if x in d1)


def build_interference(live: LiveMap) -> InterferenceGraph:
    verts = set()
    edges = set()
    for s in live.vertex.values():
        verts |= s
        for x, y in itertools.combinations(sorted(s), 2):
            edges.add(frozenset((x, y)))
    return InterferenceGraph(frozenset(verts), frozenset(edges))


def live_ranges(cfg: Cfg, live: LiveMap) -> Dict[Tuple[str, Any], int]:
    """Map ``(variable, vertex)`` to a range number.  Two occurrences share a
    range when an edge joins them with the variable live at both ends."""
    parent: Dict[Tuple[str, Any], Tuple[str, Any]] = {}

    def find(k):
        while parent[k] != k:
            parent[k] = parent[parent[k]]
            k = parent[k]
        return k

    for v in cfg.vertices:
        for x in live.vertex.get(v, ()):
            parent[(x, v)] = (x, v)
    for e in cfg.edges:
        for x in live.vertex.get(e.src, frozenset()) & live.vertex.get(e.dst, frozenset()):
            ra, rb = find((x, e.src)), find((x, e.dst))
            if ra != rb:
                parent[ra] = rb
    numbers: Dict[Tuple[str, Any], int] = {}
    out = {}
    for k in sorted(parent, key=lambda k: (k[0], str(k[1]))):
        out[k] = numbers.setdefault(find(k), len(numbers))
    return out


def _spill_charges(cfg: Cfg, live: LiveMap) -> Dict[Any, Tuple[List[str], List[str]]]:
    """For each edge id, the variables whose range is charged there, read
    from the source allocation and from the destination allocation."""
    ranges = live_ranges(cfg, live)
    charged = set()
    out: Dict[Any, Tuple[List[str], List[str]]] = {}
    for e in cfg.edges:
        src_side, dst_side = [], []
        for x in sorted(live.vertex[e.src]):
            if ranges[(x, e.src)] not in charged:
                charged.add(ranges[(x, e.src)])
                src_side.append(x)
        for x in sorted(live.vertex[e.dst]):
            if ranges[(x, e.dst)] not in charged:
                charged.add(ranges[(x, e.dst)])
                dst_side.append(x)
        out[e.id] = (src_side, dst_side)
    return out


class _Domains:
    def __init__(self, r: int, spill: bool):
        self.r, self.spill = r, spill
        self.cache: Dict[FrozenSet[str], Tuple[List[Allocation], bool]] = {}

    def get(self, names: FrozenSet[str]) -> Tuple[List[Allocation], bool]:
        """(domain, overflow); an overflowing live set gets one all-spilled
        placeholder that the caller prices at infinity."""
        if names not in self.cache:
            if not self.spill and len(names) > self.r:
                self.cache[names] = ([tuple((x, None) for x in sorted(names))], True)
            else:
                self.cache[names] = (allocations(names, self.r, self.spill), False)
        return self.cache[names]


def _keys(dom: List[Allocation], shared: Sequence[str], ids: Dict) -> np.ndarray:
    out = np.empty(len(dom), dtype=np.int64)
    for i, a in enumerate(dom):
        d = dict(a)
        out[i] = ids.setdefault(tuple(d[x] for x in shared), len(ids))
    return out


def _spill_vector(dom: List[Allocation], names: List[str]) -> np.ndarray:
    if not names:
        return np.zeros(len(dom), dtype=np.int64)
    return np.array([sum(dict(a)[x] is None for x in names) for a in dom], dtype=np.int64)


def build_regalloc_pcsp(inst: RegAllocInstance) -> PcspInstance:
    cfg, live = inst.cfg, inst.live
    doms = _Domains(inst.r, not inst.spill_free)
    domains: Dict[Any, List[Allocation]] = {}
    node_tables: Dict[Any, np.ndarray] = {}
    for v in cfg.real_vertices:
        dom, overflow = doms.get(frozenset(live.vertex[v]))
        domains[v] = dom
        if overflow:
            node_tables[v] = np.array([INF_CODE], dtype=np.int64)

    oracle = inst.cost_oracle
    if callable(oracle):
        def edge_cost(e, a1, a2):
            return oracle(e, a1, a2) if compatible(a1, a2) else INF
        return PcspInstance(cfg, domains, edge_cost, kind="int", node_tables=node_tables)

    charges = _spill_charges(cfg, live) if oracle == UNIT_SPILL else {}
    tables = {}
    for e in cfg.real_edges:
        ds, dd = domains[e.src], domains[e.dst]
        shared = sorted(live.vertex[e.src] & live.vertex[e.dst])
        ids: Dict = {}
        ks, kd = _keys(ds, shared, ids), _keys(dd, shared, ids)
        ok = ks[:, None] == kd[None, :]
        if oracle == UNIT_SPILL:
            src_side, dst_side = charges[e.id]
            base = _spill_vector(ds, src_side)[:, None] + _spill_vector(dd, dst_side)[None, :]
        else:
            base = np.zeros(ok.shape, dtype=np.int64)
        if oracle == SPILL_FREE and not inst.spill_free:
            sp = np.array([bool(spilled_in(a)) for a in ds])[:, None] | np.array(
                [bool(spilled_in(a)) for a in dd])[None, :]
            ok &= ~sp
        tables[e.id] = np.where(ok, base, INF_CODE).astype(np.int64)

    def edge_cost(e, a1, a2):
        # Reference objective (the tables above are its vectorized form).
        if not compatible(a1, a2):
            return INF
        if oracle == SPILL_FREE:
            return INF if spilled_in(a1) or spilled_in(a2) else 0
        src_side, dst_side = charges[e.id]
        d1, d2 = dict(a1), dict(a2)
        return sum(d1[x] is None for x in src_side) + sum(d2[x] is None for x in dst_side)

    return PcspInstance(cfg, domains, edge_cost, kind="int", edge_tables=tables, node_tables=node_tables)


def solve_regalloc(inst: RegAllocInstance, backend: Optional[str] = None) -> RegAllocSolution:
    sol: PcspSolution = solve(build_regalloc_pcsp(inst), backend=backend)
    if sol.assignment is None:
        return RegAllocSolution(INF, None, sol.stats)
    spilled = frozenset().union(*(spilled_in(a) for a in sol.assignment.values()))
    return RegAllocSolution(sol.cost, sol.assignment, sol.stats, spilled)


def spill_free_feasible(cfg: Cfg, live: LiveMap, r: int, backend: Optional[str] = None) -> bool:
    if live.max_pressure() > r:
        return False
    return solve_regalloc(RegAllocInstance(cfg, live, r), backend=backend).feasible


def min_spill_free_registers(cfg: Cfg, live: Optional[LiveMap] = None, r_max: int = R_MAX,
                             backend: Optional[str] = None) -> Optional[int]:
    """Smallest ``r <= r_max`` admitting a spill-free allocation, or ``None``.

    Feasibility is monotone in ``r`` and the largest live set is a lower
    bound, so the search gallops upward from that bound and then bisects.
    """
    live = live if live is not None else liveness(cfg)
    lo = live.max_pressure()
    if lo > r_max:
        return None
    if spill_free_feasible(cfg, live, lo, backend):
        return lo
    step, hi = 1, None
    while hi is None:
        cand = min(lo + step, r_max)
        if spill_free_feasible(cfg, live, cand, backend):
            hi = cand
        elif cand == r_max:
            return None
        else:
            lo, step = cand, step * 2
    # invariant: infeasible at lo, feasible at hi
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if spill_free_feasible(cfg, live, mid, backend):
            hi = mid
        else:
            lo = mid
    return hi


def allocation_cost(inst: RegAllocInstance, allocation: Dict[Any, Allocation]):
    """Objective of a per-vertex allocation, straight from the definitions."""
    pinst = build_regalloc_pcsp(inst)
    total = costs.zero("int")
    for e in inst.cfg.real_edges:
        total = total + pinst.edge_cost_fn(e, allocation[e.src], allocation[e.dst])
    if inst.spill_free and inst.live.max_pressure() > inst.r:
        total = total + INF
    return total
