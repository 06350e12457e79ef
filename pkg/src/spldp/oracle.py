"""Exhaustive reference solvers.

These enumerate assignments (or life sets) directly and never look at a
decomposition, so agreement with the dynamic program is a meaningful check.
The PCSP oracle evaluates costs through the same code tables as the solver,
which keeps the objective itself from drifting between the two.
"""

from __future__ import annotations

from typing import Any, Dict, Optional, Tuple

import numpy as np

from .costs import INF, INF_CODE, SAT, Lex
from .pcsp import PcspInstance

DEFAULT_LIMIT = 10 ** 7
CHUNK = 1 << 16


class OracleLimitExceeded(ValueError):
    pass


def brute_force(inst: PcspInstance, limit: int = DEFAULT_LIMIT) -> Tuple[Any, Optional[Dict]]:
    """Minimum over every assignment in lexicographic order (first vertex most
    significant, domain order within a vertex); the first minimum wins."""
    space = inst.search_space()
    if space > limit:
        raise OracleLimitExceeded(f"{space} assignments exceed the limit of {limit}")
    tab = inst.tabulate()
    cfg = inst.cfg
    verts = inst.vertices
    pos = {v: i for i, v in enumerate(verts)}
    radix = np.array([tab.sizes[v] for v in verts], dtype=np.int64)
    strides = np.ones(len(verts), dtype=np.int64)
    for i in range(len(verts) - 2, -1, -1):
        strides[i] = strides[i + 1] * radix[i + 1]
    terms = [(pos[e.src], pos[e.dst], tab.edges[e.id]) for e in cfg.real_edges]
    node_terms = [(pos[v], tab.nodes[v]) for v in verts if tab.nodes[v].any()]

    best, best_idx = INF_CODE, 0
    for start in range(0, space, CHUNK):
        idx = np.arange(start, min(space, start + CHUNK), dtype=np.int64)
        digits = [(idx // strides[i]) % radix[i] for i in range(len(verts))]
        total = np.zeros(idx.shape, dtype=np.int64)
        for i, j, mat in terms:
            total += mat[digits[i], digits[j]]
            np.minimum(total, INF_CODE, out=total)
        for i, vec in node_terms:
            total += vec[digits[i]]
            np.minimum(total, INF_CODE, out=total)
        k = int(np.argmin(total))
        if total[k] < best:
            best, best_idx = int(total[k]), start + k
    if best >= SAT:
        return INF, None
    assignment = {v: inst.domains[v][int((best_idx // strides[i]) % radix[i])] for i, v in enumerate(verts)}
    return tab.codec.decode(best), assignment


# --------------------------------------------------------------------------- LOSPRE

LOSPRE_MAX_VERTICES = 24


def brute_force_lospre(inst, max_vertices: int = LOSPRE_MAX_VERTICES):
    """Minimum of the LOSPRE objective over every life set, straight from the
    injection predicate.  Life sets are enumerated as bit masks over the
    vertices in graph order; the first minimum wins."""
    cfg = inst.cfg
    verts = cfg.real_vertices
    n = len(verts)
    if n > max_vertices:
        raise OracleLimitExceeded(f"{n} vertices exceed the limit of {max_vertices}")
    pos = {v: i for i, v in enumerate(verts)}
    width = 2 if inst.kind == "lex2" else 1

    def parts(cost):
        if cost is INF:
            return None
        return tuple(cost) if width == 2 else (int(cost),)

    edge_terms = [(pos[e.src], pos[e.dst], e.src in inst.I, e.dst in inst.U, parts(inst.edge_cost(e.id)))
                  for e in cfg.real_edges]
    node_terms = [(pos[v], parts(inst.vertex_cost(v))) for v in verts]

    best = None  # (key tuple, mask)
    total_masks = 1 << n
    for start in range(0, total_masks, CHUNK):
        masks = np.arange(start, min(total_masks, start + CHUNK), dtype=np.int64)
        bits = [((masks >> i) & 1).astype(bool) for i in range(n)]
        sums = [np.zeros(masks.shape, dtype=np.int64) for _ in range(width)]
        dead = np.zeros(masks.shape, dtype=bool)
        for x, y, x_inval, y_use, w in edge_terms:
            hit = ~(bits[x] & (not x_inval)) & (y_use | bits[y])
            if w is None:
                dead |= hit
            else:
                for k in range(width):
                    sums[k] += hit * w[k]
        for x, w in node_terms:
            if w is None:
                dead |= bits[x]
            else:
                for k in range(width):
                    sums[k] += bits[x] * w[k]
        alive = np.flatnonzero(~dead)
        if alive.size == 0:
            continue
        # lexsort: last key is primary; ties go to the lowest mask
        j = alive[np.lexsort([alive] + [sums[k][alive] for k in reversed(range(width))])[0]]
        key = tuple(int(sums[k][j]) for k in range(width))
        if best is None or key < best[0]:
            best = (key, start + int(j))
    if best is None:
        return INF, None
    key, mask = best
    life = frozenset(v for i, v in enumerate(verts) if mask >> i & 1)
    return (Lex(*key) if width == 2 else key[0]), life


# --------------------------------------------------------------------------- coloring


def _ranges(cfg, live):
    """Live ranges as (variable, frozenset of vertices), found by search."""
    out = []
    seen = set()
    for v in cfg.vertices:
        for x in sorted(live.vertex[v]):
            if (x, v) in seen:
                continue
            comp, todo = set(), [v]
            while todo:
                u = todo.pop()
                if u in comp:
                    continue
                comp.add(u)
                for e in cfg.succ[u]:
                    if x in live.vertex[e.dst]:
                        todo.append(e.dst)
                for e in cfg.pred[u]:
                    if x in live.vertex[e.src]:
                        todo.append(e.src)
            seen.update((x, u) for u in comp)
            out.append((x, frozenset(comp)))
    return out


def _range_conflicts(cfg, live):
    ranges = _ranges(cfg, live)
    n = len(ranges)
    adj = [set() for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            if ranges[i][1] & ranges[j][1]:
                adj[i].add(j)
                adj[j].add(i)
    return ranges, adj


def _colorable(nodes, adj, k: int) -> bool:
    order = sorted(nodes, key=lambda i: -len(adj[i] & nodes))
    color = {}

    def rec(p: int) -> bool:
        if p == len(order):
            return True
        i = order[p]
        taken = {color[j] for j in adj[i] if j in color}
        for c in range(k):
            if c not in taken:
                color[i] = c
                if rec(p + 1):
                    return True
                del color[i]
        return False

    return rec(0)


def min_registers_oracle(cfg, live, r_max: int = 20) -> Optional[int]:
    """Chromatic number of the live-range conflict graph (backtracking)."""
    _, adj = _range_conflicts(cfg, live)
    nodes = set(range(len(adj)))
    for k in range(r_max + 1):
        if _colorable(nodes, adj, k):
            return k
    return None


def min_spills_oracle(cfg, live, r: int) -> int:
    """Fewest live ranges to remove so that the rest is ``r``-colorable."""
    import itertools

    _, adj = _range_conflicts(cfg, live)
    everything = set(range(len(adj)))
    for size in range(len(adj) + 1):
        for drop in itertools.combinations(sorted(everything), size):
            if _colorable(everything - set(drop), adj, r):
                return size
    return len(adj)


# --------------------------------------------------------------------------- banks


def min_switches_oracle(inst, limit: int = DEFAULT_LIMIT) -> Tuple[int, Optional[Dict]]:
    """Fewest switch edges over every bank assignment (plain enumeration)."""
    import itertools

    verts = inst.cfg.real_vertices
    doms = [inst.domain(v) for v in verts]
    space = 1
    for d in doms:
        space *= len(d)
    if space > limit:
        raise OracleLimitExceeded(f"{space} assignments exceed the limit of {limit}")
    best, arg = None, None
    for values in itertools.product(*doms):
        a = dict(zip(verts, values))
        count = sum(1 for e in inst.cfg.real_edges
                    if a[e.dst] is not None and a[e.dst] != a[e.src])
        if best is None or count < best:
            best, arg = count, a
    return best, arg
