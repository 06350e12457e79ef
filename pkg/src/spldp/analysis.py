"""Liveness and the use/invalidating sets of an expression.

Commands sit on edges.  A condition guarding an edge is evaluated before the
edge's command, so its variables are uses even if the command redefines
them.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Dict, FrozenSet, Mapping, Optional, Set, Tuple

from . import lang
from .decompose import Cfg


def edge_uses(edge) -> FrozenSet[str]:
    uses = getattr(edge.payload, "uses", None)
    return uses() if callable(uses) else frozenset()


def edge_defs(edge) -> FrozenSet[str]:
    defs = getattr(edge.payload, "defs", None)
    return defs() if callable(defs) else frozenset()


@dataclass(frozen=True)
class LiveMap:
    vertex: Mapping  # vertex -> frozenset of variables live there
    edge: Mapping  # edge id -> variables live at either endpoint

    def __getitem__(self, v) -> FrozenSet[str]:
        return self.vertex[v]

    def variables(self) -> FrozenSet[str]:
        out: Set[str] = set()
        for s in self.vertex.values():
            out |= s
        return frozenset(out)

    def max_pressure(self) -> int:
        return max((len(s) for s in self.vertex.values()), default=0)


def liveness(cfg: Cfg, extra_uses: Optional[Mapping] = None) -> LiveMap:
    """Least fixpoint of ``live(u) = ∪ use(e) ∪ (live(v) − def(e))`` over
    edges ``e = (u, v)``.  ``extra_uses`` maps edge ids to additional uses."""
    extra_uses = extra_uses or {}
    uses = {e.id: edge_uses(e) | frozenset(extra_uses.get(e.id, ())) for e in cfg.edges}
    defs = {e.id: edge_defs(e) for e in cfg.edges}
    live: Dict = {v: frozenset() for v in cfg.vertices}
    work = deque(cfg.vertices)
    queued = set(cfg.vertices)
    while work:
        u = work.popleft()
        queued.discard(u)
        new: Set[str] = set()
        for e in cfg.succ[u]:
            new |= uses[e.id]
            new |= live[e.dst] - defs[e.id]
        new = frozenset(new)
        if new != live[u]:
            live[u] = new
            for e in cfg.pred[u]:
                if e.src not in queued:
                    queued.add(e.src)
                    work.append(e.src)
    edge_live = {e.id: live[e.src] | live[e.dst] for e in cfg.edges}
    return LiveMap(live, edge_live)


def transfer(cfg: Cfg, live: LiveMap) -> Dict:
    """One application of the backward equations (a fixpoint maps to itself)."""
    out = {}
    for u in cfg.vertices:
        acc: Set[str] = set()
        for e in cfg.succ[u]:
            acc |= edge_uses(e)
            acc |= live.vertex[e.dst] - edge_defs(e)
        out[u] = frozenset(acc)
    return out


def computes(edge, expr: lang.Expr) -> bool:
    exprs = getattr(edge.payload, "expressions", None)
    return callable(exprs) and any(sub == expr for sub in exprs())


def derive_lospre_sets(cfg: Cfg, expr: lang.Expr) -> Tuple[FrozenSet, FrozenSet]:
    """Use and invalidating vertices of ``expr``.

    A vertex stands for the commands on its outgoing edges.  It is in ``U``
    when one of them computes ``expr`` (in a command or a guard), and in
    ``I`` when one of them assigns an operand of ``expr``, so the stored
    value is stale once control leaves it.  The entry and the exit are
    always invalidating.  A branch vertex with a killing arm counts as
    invalidating for every arm.
    """
    operands = lang.variables(expr)
    use = {e.src for e in cfg.edges if computes(e, expr)}
    inval = {e.src for e in cfg.edges if edge_defs(e) & operands}
    inval |= {cfg.s, cfg.t}
    return frozenset(use), frozenset(inval)
