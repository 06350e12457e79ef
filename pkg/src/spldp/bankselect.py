"""Placement of bank selection instructions.

Every vertex gets the bank that is active there, or ``None`` when it is not
known.  Along an edge the bank may persist or become unknown for free; any
other change needs a switch instruction on that edge, which costs ``c1`` on
the taken side of a conditional branch (an extra jump is needed) and ``c0``
elsewhere.  Control enters with no known bank, so the entry vertex is fixed
to ``None`` unless the instance precolors it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict, FrozenSet, List, Mapping, Optional, Sequence, Tuple

from .costs import INF
from .decompose import Cfg
from .pcsp import PcspInstance, SolveStats, solve

UNKNOWN = None


@dataclass
class BankInstance:
    cfg: Cfg
    banks: Sequence
    precolored: Mapping = field(default_factory=dict)
    c0: int = 1
    c1: int = 2
    taken_edges: FrozenSet = frozenset()

    def __post_init__(self):
        self.banks = tuple(self.banks)
        self.precolored = dict(self.precolored)
        self.taken_edges = frozenset(self.taken_edges)
        if UNKNOWN in self.banks:
            raise ValueError("None is reserved for the unknown bank")
        if len(set(self.banks)) != len(self.banks):
            raise ValueError("duplicate banks")
        if not 0 < self.c0 < self.c1:
            raise ValueError(f"need 0 < c0 < c1, got c0={self.c0}, c1={self.c1}")
        verts = set(self.cfg.real_vertices)
        for v, b in self.precolored.items():
            if v not in verts:
                raise ValueError(f"precolored vertex {v!r} is not in the graph")
            if b not in self.banks:
                raise ValueError(f"vertex {v!r} is precolored with unknown bank {b!r}")
        stray = self.taken_edges - {e.id for e in self.cfg.real_edges}
        if stray:
            raise ValueError(f"taken edges {sorted(map(str, stray))} are not in the graph")

    def domain(self, v) -> Tuple:
        if v in self.precolored:
            return (self.precolored[v],)
        if v == self.cfg.s:
            return (UNKNOWN,)
        return (UNKNOWN,) + self.banks

    def switch_cost(self, edge, b0, b1) -> int:
        if b1 == b0 or b1 is UNKNOWN:
            return 0
        return self.c1 if edge.id in self.taken_edges else self.c0


@dataclass
class BankSolution:
    cost: Any
    assignment: Optional[Dict[Any, Any]]
    switch_edges: List[Tuple[Any, Any]]  # (edge id, bank selected on it)
    stats: Optional[SolveStats] = None


def taken_from_payloads(cfg: Cfg) -> FrozenSet:
    """Edges marked as the taken side of a conditional when the CFG was built."""
    return frozenset(e.id for e in cfg.real_edges if getattr(e.payload, "taken", False))


def build_bank_pcsp(inst: BankInstance) -> PcspInstance:
    domains = {v: inst.domain(v) for v in inst.cfg.real_vertices}
    return PcspInstance(inst.cfg, domains, inst.switch_cost)


def switches(inst: BankInstance, assignment: Mapping) -> List[Tuple[Any, Any]]:
    return [(e.id, assignment[e.dst]) for e in inst.cfg.real_edges
            if inst.switch_cost(e, assignment[e.src], assignment[e.dst]) > 0]


def solve_bank(inst: BankInstance, backend: Optional[str] = None) -> BankSolution:
    sol = solve(build_bank_pcsp(inst), backend=backend)
    if sol.assignment is None:
        return BankSolution(INF, None, [], sol.stats)
    return BankSolution(sol.cost, sol.assignment, switches(inst, sol.assignment), sol.stats)


def naive_cost(inst: BankInstance) -> int:
    """Cost of selecting the bank again on every edge into a precolored vertex."""
    return sum(inst.c1 if e.id in inst.taken_edges else inst.c0
               for e in inst.cfg.real_edges if e.dst in inst.precolored)
