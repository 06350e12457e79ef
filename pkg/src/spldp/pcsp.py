"""Binary partial constraint satisfaction over SPL decompositions.

For every decomposition node ``u`` the solver keeps a table indexed by the
values of ``u``'s four special vertices.  An entry is the cheapest way to
assign the node's *interior* vertices (those of its graph other than the four
specials), counting every edge of the node's graph and the node costs of the
interior vertices.  Node costs of specials are added by the ancestor in whose
interior the vertex lands, so each vertex is charged exactly once.

Tables are dense ``int64`` arrays when the four domain sizes multiply to at
most ``dense_limit`` and dictionaries of finite entries otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Mapping, Optional, Sequence

import numpy as np

from . import costs, kernels
from .costs import INF, INF_CODE, SAT, Codec
from .decompose import ATOM, LOOP, PARALLEL, SERIES, Cfg, SplDecomposition
from .graph import AtomKind

DENSE_LIMIT = 1 << 20

EdgeCost = Callable[[Any, Any, Any], Any]
NodeCost = Callable[[Any, Any], Any]


class PcspError(ValueError):
    pass


class PcspInstance:
    """Domains per vertex, a cost per edge and value pair, optional node costs.

    ``domains`` is either one sequence shared by all vertices or a mapping
    from vertex to sequence.  ``edge_cost(edge, a, b)`` prices the values at
    the edge's source and destination.  Instead of (or in addition to) the
    callable, ``edge_tables`` may map edge ids to ``len(dom(src)) x
    len(dom(dst))`` cost matrices; for the ``int`` kind these may be ``int64``
    arrays using :data:`costs.INF_CODE` for infinity.  Phantom vertices and
    edges (see :mod:`spldp.recognize`) are handled automatically.
    """

    def __init__(self, cfg: Cfg, domains, edge_cost: Optional[EdgeCost] = None,
                 node_cost: Optional[NodeCost] = None, kind: str = "int",
                 edge_tables: Optional[Mapping] = None, node_tables: Optional[Mapping] = None):
        self.cfg = cfg
        self.kind = costs.check_kind(kind)
        self.edge_cost_fn = edge_cost
        self.node_cost_fn = node_cost
        self.edge_tables = dict(edge_tables or {})
        self.node_tables = dict(node_tables or {})
        if edge_cost is None and any(e.id not in self.edge_tables for e in cfg.real_edges):
            raise PcspError("every edge needs a cost: pass edge_cost or a table per edge")
        shared = not isinstance(domains, Mapping)
        self.domains: Dict[Any, tuple] = {}
        for v in cfg.vertices:
            if v in cfg.phantom_vertices:
                self.domains[v] = (None,)
                continue
            if shared:
                dom = tuple(domains)
            elif v in domains:
                dom = tuple(domains[v])
            else:
                raise PcspError(f"no domain for vertex {v!r}")
            if not dom:
                raise PcspError(f"empty domain for vertex {v!r}")
            self.domains[v] = dom
        self._index = {v: {x: i for i, x in enumerate(dom)} for v, dom in self.domains.items()}
        self._tab = None

    @property
    def vertices(self) -> List:
        return self.cfg.real_vertices

    def index_of(self, v, value) -> int:
        try:
            return self._index[v][value]
        except (KeyError, TypeError):
            raise PcspError(f"value {value!r} is not in the domain of vertex {v!r}") from None

    def edge_cost(self, edge, a, b):
        table = self.edge_tables.get(edge.id)
        if table is not None:
            value = table[self.index_of(edge.src, a)][self.index_of(edge.dst, b)]
            if isinstance(table, np.ndarray):
                return INF if value >= SAT else int(value)
            return costs.coerce(self.kind, value)
        return costs.coerce(self.kind, self.edge_cost_fn(edge, a, b))

    def node_cost(self, v, a):
        table = self.node_tables.get(v)
        if table is not None:
            value = table[self.index_of(v, a)]
            if isinstance(table, np.ndarray):
                return INF if value >= SAT else int(value)
            return costs.coerce(self.kind, value)
        if self.node_cost_fn is None:
            return costs.zero(self.kind)
        return costs.coerce(self.kind, self.node_cost_fn(v, a))

    def has_node_costs(self) -> bool:
        return self.node_cost_fn is not None or bool(self.node_tables)

    def search_space(self) -> int:
        n = 1
        for v in self.vertices:
            n *= len(self.domains[v])
        return n

    def tabulate(self) -> "Tables":
        if self._tab is None:
            self._tab = Tables.build(self)
        return self._tab


@dataclass
class Tables:
    """An instance flattened to code matrices; shared by the DP and the oracle."""

    codec: Codec
    sizes: Dict[Any, int]
    edges: Dict[Any, np.ndarray]  # edge id -> (|dom src|, |dom dst|)
    nodes: Dict[Any, np.ndarray]  # vertex -> (|dom v|,)

    @classmethod
    def build(cls, inst: PcspInstance) -> "Tables":
        cfg = inst.cfg
        kind = inst.kind
        sizes = {v: len(d) for v, d in inst.domains.items()}
        raw_edges: Dict[Any, Any] = {}
        raw_nodes: Dict[Any, Any] = {}
        first = second = 0
        for e in cfg.edges:
            if e.id in cfg.phantom_edges:
                continue
            table = inst.edge_tables.get(e.id)
            if isinstance(table, np.ndarray):
                raw_edges[e.id] = _checked_codes(table, (sizes[e.src], sizes[e.dst]), kind, f"edge {e.id!r}")
                finite = raw_edges[e.id][raw_edges[e.id] < SAT]
                first += int(np.abs(finite).max()) if finite.size else 0
                continue
            da, db = inst.domains[e.src], inst.domains[e.dst]
            mat = [[inst.edge_cost(e, a, b) for b in db] for a in da]
            m1, m2 = costs.magnitudes(kind, (x for row in mat for x in row))
            first, second = first + m1, second + m2
            raw_edges[e.id] = mat
        if inst.has_node_costs():
            for v in cfg.real_vertices:
                table = inst.node_tables.get(v)
                if isinstance(table, np.ndarray):
                    raw_nodes[v] = _checked_codes(table, (sizes[v],), kind, f"vertex {v!r}")
                    finite = raw_nodes[v][raw_nodes[v] < SAT]
                    first += int(np.abs(finite).max()) if finite.size else 0
                    continue
                vec = [inst.node_cost(v, a) for a in inst.domains[v]]
                m1, m2 = costs.magnitudes(kind, vec)
                first, second = first + m1, second + m2
                raw_nodes[v] = vec
        codec = Codec.for_values(kind, first, second)
        enc = codec.encode
        edges = {}
        for e in cfg.edges:
            if e.id in cfg.phantom_edges:
                edges[e.id] = np.zeros((sizes[e.src], sizes[e.dst]), dtype=np.int64)
                continue
            mat = raw_edges[e.id]
            edges[e.id] = mat if isinstance(mat, np.ndarray) else np.array(
                [[enc(x) for x in row] for row in mat], dtype=np.int64).reshape(sizes[e.src], sizes[e.dst])
        nodes = {}
        for v in cfg.vertices:
            vec = raw_nodes.get(v)
            if vec is None:
                nodes[v] = np.zeros(sizes[v], dtype=np.int64)
            elif isinstance(vec, np.ndarray):
                nodes[v] = vec
            else:
                nodes[v] = np.array([enc(x) for x in vec], dtype=np.int64)
        return cls(codec, sizes, edges, nodes)


def _checked_codes(table: np.ndarray, shape, kind: str, what: str) -> np.ndarray:
    if kind != "int":
        raise PcspError("pre-encoded cost arrays are only supported for the int cost kind")
    arr = np.ascontiguousarray(table, dtype=np.int64)
    if arr.shape != shape:
        raise PcspError(f"cost table for {what} has shape {arr.shape}, expected {shape}")
    arr = arr.copy()
    arr[arr >= SAT] = INF_CODE
    return arr


# --------------------------------------------------------------------------- objective


def eval_cost(inst: PcspInstance, assignment: Mapping) -> Any:
    """The objective of a total assignment, computed directly from the cost
    callables (no tables, no codes)."""
    for v in inst.vertices:
        if v not in assignment:
            raise PcspError(f"assignment is missing vertex {v!r}")
        inst.index_of(v, assignment[v])
    acc = costs.zero(inst.kind)
    for e in inst.cfg.real_edges:
        acc = acc + inst.edge_cost(e, assignment[e.src], assignment[e.dst])
    if inst.has_node_costs():
        for v in inst.vertices:
            acc = acc + inst.node_cost(v, assignment[v])
    return acc


# --------------------------------------------------------------------------- solver


@dataclass
class SolveStats:
    backend: str = ""
    nodes: int = 0
    dense_nodes: int = 0
    sparse_nodes: int = 0
    work: List[int] = field(default_factory=list)  # per node, postorder
    local_dmax: List[int] = field(default_factory=list)

    @property
    def total_work(self) -> int:
        return sum(self.work)

    def max_ratio(self) -> float:
        """Largest work / dmax**5 over all nodes."""
        return max((w / d ** 5 for w, d in zip(self.work, self.local_dmax)), default=0.0)


@dataclass
class PcspSolution:
    cost: Any
    assignment: Optional[Dict[Any, Any]]
    stats: SolveStats

    @property
    def feasible(self) -> bool:
        return self.cost is not INF


def _check_match(cfg: Cfg, d: SplDecomposition) -> None:
    if d is cfg.decomposition:
        return
    mine = {eid: (e.src, e.dst) for eid, e in cfg.edge_by_id.items()}
    theirs = {eid: (e.src, e.dst) for eid, e in d.edges.items()}
    if mine != theirs or tuple(d.root.specials) != cfg.specials or set(d.vertices) != set(cfg.vertices):
        raise PcspError("decomposition does not describe the instance's graph")


def solve(inst: PcspInstance, d: Optional[SplDecomposition] = None, backend: Optional[str] = None,
          dense_limit: int = DENSE_LIMIT) -> PcspSolution:
    """Exact minimum of the instance by dynamic programming over ``d``
    (default: the decomposition the instance's CFG came from)."""
    cfg = inst.cfg
    d = d if d is not None else cfg.decomposition
    _check_match(cfg, d)
    tab = inst.tabulate()
    kern = kernels.get(backend)
    stats = SolveStats(backend=backend or kernels.current())
    solver = _Dp(tab, d, kern, dense_limit, stats)
    code, choice_root = solver.run()
    cost = tab.codec.decode(code)
    if cost is INF:
        return PcspSolution(INF, None, stats)
    idx = solver.reconstruct(choice_root)
    assignment = {v: inst.domains[v][i] for v, i in idx.items() if v not in cfg.phantom_vertices}
    return PcspSolution(cost, assignment, stats)


class _Dp:
    def __init__(self, tab: Tables, d: SplDecomposition, kern, dense_limit: int, stats: SolveStats):
        self.tab = tab
        self.d = d
        self.kern = kern
        self.limit = dense_limit
        self.stats = stats
        self.choice: Dict[int, Any] = {}

    def size(self, v) -> int:
        return self.tab.sizes[v]

    def shape(self, node):
        return tuple(self.tab.sizes[v] for v in node.specials)

    def run(self):
        tables: Dict[int, Any] = {}
        st = self.stats
        for node in self.d.postorder():
            kids = [tables.pop(ch.index) for ch in node.children]
            shape = self.shape(node)
            dense = all(isinstance(k, np.ndarray) for k in kids)
            if dense:
                out_shape = self._dense_shape(node, kids)
                dense = out_shape is not None and _prod(out_shape) <= self.limit
            if dense:
                table, work = self._dense(node, kids)
                st.dense_nodes += 1
            else:
                kids = [_to_sparse(k, self.shape(ch)) for k, ch in zip(kids, node.children)]
                table, work = self._sparse(node, kids)
                if _prod(shape) <= self.limit:
                    table = _to_dense(table, shape)
                st.sparse_nodes += 1
            tables[node.index] = table
            st.nodes += 1
            st.work.append(work)
            involved = list(node.specials) + [v for ch in node.children for v in ch.specials]
            st.local_dmax.append(max(self.size(v) for v in involved))
        root = self.d.root
        table = tables.pop(root.index)
        nodes = self.tab.nodes
        s, t, b, c = root.specials
        if isinstance(table, np.ndarray):
            total = table
            for axis, v in enumerate(root.specials):
                sh = [1, 1, 1, 1]
                sh[axis] = -1
                total = costs.sat_add(total, nodes[v].reshape(sh))
            flat = int(np.argmin(total))
            x = np.unravel_index(flat, total.shape)
            return int(total.flat[flat]), tuple(int(i) for i in x)
        best, best_x = INF_CODE, (0, 0, 0, 0)
        for x in sorted(table):
            v = table[x] + nodes[s][x[0]] + nodes[t][x[1]] + nodes[b][x[2]] + nodes[c][x[3]]
            if v < best:
                best, best_x = v, x
        return (best if best < SAT else INF_CODE), best_x

    # ---- dense
    #
    # A dense table may have length 1 along the axis of a special vertex it
    # does not depend on (it is implicitly broadcast).  Loop tables, for
    # instance, never depend on their break and continue vertices.

    def _dense_shape(self, node, kids):
        S, T, B, C = self.shape(node)
        if node.kind == ATOM:
            return {AtomKind.EPS: (S, T, 1, 1), AtomKind.BREAK: (S, 1, B, 1),
                    AtomKind.CONTINUE: (S, 1, 1, C)}[node.atom]
        if node.kind == PARALLEL:
            return np.broadcast_shapes(kids[0].shape, kids[1].shape)
        if node.kind == SERIES:
            left, right = kids
            return (left.shape[0], right.shape[1], max(left.shape[2], right.shape[2]),
                    max(left.shape[3], right.shape[3]))
        return (S, T, 1, 1)

    def _dense(self, node, kids):
        tab = self.tab
        shape = self.shape(node)
        S, T, B, C = shape
        if node.kind == ATOM:
            (eid,) = node.edges
            m = tab.edges[eid]
            if node.atom is AtomKind.EPS:
                view = m[:, :, None, None]
            elif node.atom is AtomKind.BREAK:
                view = m[:, None, :, None]
            else:
                view = m[:, None, None, :]
            return view, view.size
        if node.kind == PARALLEL:
            out = costs.sat_add(kids[0], kids[1])
            return out, out.size
        if node.kind == SERIES:
            left, right = kids
            mid_v = node.children[0].t
            M = self.size(mid_v)
            s0, t0, b0, c0 = self._dense_shape(node, kids)
            left = np.ascontiguousarray(np.broadcast_to(left, (s0, M, b0, c0)))
            right = np.ascontiguousarray(np.broadcast_to(right, (M, t0, b0, c0)))
            table, arg = self.kern.series_dense(left, right, tab.nodes[mid_v])
            self.choice[node.index] = arg
            return table, s0 * M * t0 * b0 * c0
        # loop
        (body,) = kids
        child = node.children[0]
        edges = [tab.edges[e] for e in node.edges]  # enter, exit, back, cont, brk
        # Each child special meets exactly one loop edge.  Where the body does
        # not depend on it, minimize it out of that edge right away.
        couplings = ((0, 0), (1, 2), (2, 4), (3, 3))  # (body axis, edge index)
        free = {}
        w = body
        work = 0
        for axis, k in couplings:
            v = child.specials[axis]
            nc = tab.nodes[v]
            if body.shape[axis] == 1 and len(nc) > 1:
                mat = edges[k]
                # enter is (S, S1); the others are (child special, outer)
                cand = costs.sat_add(mat, nc[None, :]) if k == 0 else costs.sat_add(mat, nc[:, None])
                along = 1 if k == 0 else 0
                arg = np.argmin(cand, axis=along)
                red = np.min(cand, axis=along)
                edges[k] = np.ascontiguousarray(red[:, None] if k == 0 else red[None, :])
                free[axis] = arg
                work += cand.size
            else:
                sh = [1, 1, 1, 1]
                sh[axis] = -1
                w = costs.sat_add(w, nc.reshape(sh))
        w = np.ascontiguousarray(np.broadcast_to(w, tuple(1 if a in free else n
                                                          for a, n in enumerate(self.shape(child)))))
        enter, exit_, back, cont, brk = (np.ascontiguousarray(e) for e in edges)
        h, arg = self.kern.loop_dense(w, enter, exit_, back, cont, brk)
        self.choice[node.index] = ("dense", arg, w.shape, free)
        S1, T1, B1, C1 = w.shape
        work += S * (S1 * T1 * B1 * C1 + B1 * T)
        return h[:, :, None, None], work

    # ---- sparse

    def _sparse(self, node, kids):
        tab = self.tab
        S, T, B, C = self.shape(node)
        work = 0
        out: Dict = {}
        if node.kind == ATOM:
            (eid,) = node.edges
            m = tab.edges[eid]
            pos = {AtomKind.EPS: 1, AtomKind.BREAK: 2, AtomKind.CONTINUE: 3}[node.atom]
            sizes = (S, T, B, C)
            free = [k for k in (1, 2, 3) if k != pos]
            for i, j in zip(*np.nonzero(m < SAT)):
                v = int(m[i, j])
                for p in range(sizes[free[0]]):
                    for q in range(sizes[free[1]]):
                        work += 1
                        x = [int(i), 0, 0, 0]
                        x[pos], x[free[0]], x[free[1]] = int(j), p, q
                        out[tuple(x)] = v
            return out, max(work, 1)
        if node.kind == PARALLEL:
            left, right = kids
            for x in sorted(left):
                work += 1
                if x in right:
                    v = left[x] + right[x]
                    if v < SAT:
                        out[x] = v
            return out, max(work, 1)
        if node.kind == SERIES:
            left, right = kids
            mid = tab.nodes[node.children[0].t]
            by_head: Dict = {}
            for (m, t, b, c), v in sorted(right.items()):
                by_head.setdefault((m, b, c), []).append((t, v))
            arg: Dict = {}
            for (s, m, b, c), lv in sorted(left.items(), key=lambda kv: (kv[0][1], kv[0])):
                lv = lv + int(mid[m])
                if lv >= SAT:
                    continue
                for t, rv in by_head.get((m, b, c), ()):
                    work += 1
                    v = lv + rv
                    key = (s, t, b, c)
                    if v < SAT and v < out.get(key, INF_CODE):
                        out[key] = v
                        arg[key] = m
            self.choice[node.index] = arg
            return out, max(work, 1)
        # loop
        (body,) = kids
        child = node.children[0]
        enter, exit_, back, cont, brk = (tab.edges[e] for e in node.edges)
        ncs = [tab.nodes[v] for v in child.specials]
        g: Dict = {}  # (s, b1) -> (cost, child tuple)
        for x in sorted(body):
            s1, t1, b1, c1 = x
            base = body[x] + int(ncs[0][s1]) + int(ncs[1][t1]) + int(ncs[2][b1]) + int(ncs[3][c1])
            if base >= SAT:
                continue
            for s in range(S):
                work += 1
                v = base + int(enter[s, s1]) + int(back[t1, s]) + int(cont[c1, s])
                if v < SAT and v < g.get((s, b1), (INF_CODE,))[0]:
                    g[(s, b1)] = (v, x)
        arg: Dict = {}
        for (s, b1), (gv, x) in sorted(g.items()):
            for t in range(T):
                work += 1
                v = gv + int(brk[b1, t]) + int(exit_[s, t])
                if v < SAT and v < out.get((s, t, 0, 0), INF_CODE):
                    out[(s, t, 0, 0)] = v
                    arg[(s, t)] = x
        self.choice[node.index] = ("sparse", arg)
        full = {}
        for (s, t, _, _), v in out.items():
            for b in range(B):
                for c in range(C):
                    full[(s, t, b, c)] = v
        return full, max(work, 1)

    # ---- reconstruction

    def reconstruct(self, root_x) -> Dict[Any, int]:
        values: Dict[Any, int] = {}
        stack = [(self.d.root, tuple(root_x))]
        while stack:
            node, x = stack.pop()
            for v, i in zip(node.specials, x):
                values[v] = i
            s, t, b, c = x
            if node.kind == SERIES:
                arg = self.choice[node.index]
                m = int(arg[_clip(x, arg.shape)]) if isinstance(arg, np.ndarray) else arg[x]
                stack.append((node.children[0], (s, m, b, c)))
                stack.append((node.children[1], (m, t, b, c)))
            elif node.kind == PARALLEL:
                stack.append((node.children[0], x))
                stack.append((node.children[1], x))
            elif node.kind == LOOP:
                rec = self.choice[node.index]
                if rec[0] == "dense":
                    _, arg, body_shape, free = rec
                    child_x = [int(i) for i in np.unravel_index(int(arg[s, t]), body_shape)]
                    for axis, choice in free.items():
                        # S1, T1 and C1 were chosen per value of S; B1 per value of T
                        child_x[axis] = int(choice[t if axis == 2 else s])
                    child_x = tuple(child_x)
                else:
                    child_x = rec[1][(s, t)]
                stack.append((node.children[0], child_x))
        return values


def _prod(xs) -> int:
    n = 1
    for x in xs:
        n *= x
    return n


def _clip(x, shape):
    return tuple(i if n > 1 else 0 for i, n in zip(x, shape))


def _to_sparse(table, shape):
    if not isinstance(table, np.ndarray):
        return table
    table = np.broadcast_to(table, shape)
    idx = np.nonzero(table < SAT)
    vals = table[idx]
    return {tuple(int(i) for i in key): int(v) for key, v in zip(zip(*idx), vals)}


def _to_dense(table, shape):
    arr = np.full(shape, INF_CODE, dtype=np.int64)
    for x, v in table.items():
        arr[x] = v
    return arr
