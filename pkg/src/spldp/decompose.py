"""Programs to SPL decompositions and control-flow graphs.

The mapping is the usual homomorphism: ``skip``/assignments become
ε-atoms, ``break``/``continue`` their atoms, ``;`` series, ``if`` parallel and
``while`` loop.  Construction is top-down and iterative: a parent hands its
four special vertices to its children, so every vertex and edge id is
allocated exactly once and the whole pass is linear in the program size.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict, Iterator, List, Optional, Tuple

from . import lang
from .graph import AtomKind, Edge, SplGraph

SERIES, PARALLEL, LOOP, ATOM = "series", "parallel", "loop", "atom"
KIND_SYMBOL = {SERIES: "⨟", PARALLEL: "∥", LOOP: "⊙"}


@dataclass(frozen=True, slots=True)
class Payload:
    """What an edge carries: an optional command plus the branch conditions
    that must hold for control to take the edge."""

    tag: str
    command: Optional[lang.Stmt] = None  # an Assign, or None
    guards: Tuple = ()
    taken: bool = False

    def label(self) -> str:
        parts = [lang.format_expr(g) for g in self.guards]
        if isinstance(self.command, lang.Assign):
            parts.append(f"{self.command.var} = {lang.format_expr(self.command.expr)}")
        elif self.tag in ("break", "continue"):
            parts.append(self.tag)
        return ", ".join(parts)

    def uses(self) -> frozenset:
        out = set()
        for g in self.guards:
            out |= lang.variables(g)
        if isinstance(self.command, lang.Assign):
            out |= lang.variables(self.command.expr)
        return frozenset(out)

    def defs(self) -> frozenset:
        if isinstance(self.command, lang.Assign):
            return frozenset((self.command.var,))
        return frozenset()

    def expressions(self) -> Iterator:
        for g in self.guards:
            yield from lang.subexpressions(g)
        if isinstance(self.command, lang.Assign):
            yield from lang.subexpressions(self.command.expr)


PHANTOM = Payload("phantom")


@dataclass(eq=False, slots=True)
class DecompNode:
    kind: str
    s: Any
    t: Any
    b: Any
    c: Any
    children: List["DecompNode"] = field(default_factory=list)
    atom: Optional[AtomKind] = None
    # atom: (edge,); loop: (enter, exit, back, cont, brk)
    edges: Tuple = ()
    index: int = -1

    @property
    def specials(self) -> Tuple:
        return (self.s, self.t, self.b, self.c)

    def label(self) -> str:
        return f"A_{self.atom}" if self.kind == ATOM else KIND_SYMBOL[self.kind]

    def shape(self) -> str:
        """Term notation such as ``Loop(Parallel(Series(A_ε, A_break), ...))``."""
        parts: List[str] = []
        stack: List[Any] = [self]
        while stack:
            item = stack.pop()
            if isinstance(item, str):
                parts.append(item)
            elif item.kind == ATOM:
                parts.append(f"A_{item.atom}")
            else:
                parts.append(item.kind.capitalize() + "(")
                stack.append(")")
                for k, ch in enumerate(reversed(item.children)):
                    if k:
                        stack.append(", ")
                    stack.append(ch)
        return "".join(parts)


class DecompositionError(ValueError):
    pass


class SplDecomposition:
    """Parse tree of an SPL graph; nodes share the graph's vertex and edge ids."""

    def __init__(self, root: DecompNode, edges: Dict[Any, Edge], vertices, phantom_vertices=(),
                 phantom_edges=(), work: int = 0):
        self.root = root
        self.edges = edges
        self.vertices = list(vertices)
        # Vertices and edges added only to make a raw graph fit the grammar;
        # they carry no cost and their vertices admit a single dummy value.
        self.phantom_vertices = frozenset(phantom_vertices)
        self.phantom_edges = frozenset(phantom_edges)
        self.work = work
        self.nodes = self.preorder()
        for i, node in enumerate(self.nodes):
            node.index = i

    def preorder(self) -> List[DecompNode]:
        out, stack = [], [self.root]
        while stack:
            node = stack.pop()
            out.append(node)
            stack.extend(reversed(node.children))
        return out

    def postorder(self) -> List[DecompNode]:
        out, stack = [], [self.root]
        while stack:
            node = stack.pop()
            out.append(node)
            stack.extend(node.children)
        out.reverse()
        return out

    def __len__(self) -> int:
        return len(self.nodes)

    def shape(self) -> str:
        return self.root.shape()

    def subtree_edges(self, node: DecompNode) -> List[Any]:
        ids = []
        stack = [node]
        while stack:
            n = stack.pop()
            ids.extend(n.edges)
            stack.extend(n.children)
        return ids

    def graph_of(self, node: Optional[DecompNode] = None) -> SplGraph:
        node = node or self.root
        vertices = set()
        stack = [node]
        while stack:
            n = stack.pop()
            vertices.update(n.specials)
            stack.extend(n.children)
        return SplGraph(vertices, [self.edges[e] for e in sorted(self.subtree_edges(node), key=_sort_key)], *node.specials)

    def validate(self) -> None:
        """Check every node against the composition rule it claims."""
        for node in self.nodes:
            k = node.kind
            ch = node.children
            if k == ATOM:
                (eid,) = node.edges
                e = self.edges[eid]
                dst = {AtomKind.EPS: node.t, AtomKind.BREAK: node.b, AtomKind.CONTINUE: node.c}[node.atom]
                ok = not ch and e.src == node.s and e.dst == dst
            elif k == SERIES:
                a, b = ch
                ok = (a.s == node.s and a.t == b.s and b.t == node.t and a.b == b.b == node.b
                      and a.c == b.c == node.c and len({node.s, node.t, node.b, node.c, a.t}) == 5)
            elif k == PARALLEL:
                ok = len(ch) == 2 and ch[0].specials == ch[1].specials == node.specials
            elif k == LOOP:
                (body,) = ch
                ends = [(node.s, body.s), (node.s, node.t), (body.t, node.s), (body.c, node.s), (body.b, node.t)]
                ok = (len(set(node.specials) | set(body.specials)) == 8 and len(node.edges) == 5
                      and all((self.edges[e].src, self.edges[e].dst) == se for e, se in zip(node.edges, ends)))
            else:
                ok = False
            if not ok:
                raise DecompositionError(f"node {node.index} ({k}) violates its composition rule")
        owned = self.subtree_edges(self.root)
        if len(owned) != len(set(owned)) or set(owned) != set(self.edges):
            raise DecompositionError("edges must be owned by exactly one atom or loop node")


def _sort_key(x):
    return (0, x, "") if isinstance(x, int) else (1, 0, str(x))


def decompose(program: lang.Stmt) -> SplDecomposition:
    """Build the decomposition of a closed program.

    Vertex ids are 0, 1, 2, 3 for the root S, T, B, C and grow from there;
    edge ids count from 0 in preorder.
    """
    violations = lang.check_closed(program)
    if violations:
        raise DecompositionError("program is not closed: " + "; ".join(map(str, violations)))

    edges: Dict[int, Edge] = {}
    next_vertex = 4
    work = 0

    def new_edge(src, dst, payload) -> int:
        eid = len(edges)
        edges[eid] = Edge(eid, src, dst, payload)
        return eid

    holder: List[DecompNode] = []
    # (stmt, s, t, b, c, guards, taken, sink)
    stack = [(program, 0, 1, 2, 3, (), False, holder)]
    while stack:
        stmt, s, t, b, c, guards, taken, sink = stack.pop()
        work += 1
        if isinstance(stmt, lang.Seq):
            m = next_vertex
            next_vertex += 1
            node = DecompNode(SERIES, s, t, b, c)
            stack.append((stmt.second, m, t, b, c, (), False, node.children))
            stack.append((stmt.first, s, m, b, c, guards, taken, node.children))
        elif isinstance(stmt, lang.If):
            node = DecompNode(PARALLEL, s, t, b, c)
            stack.append((stmt.else_, s, t, b, c, guards + (lang.negate(stmt.cond),), True, node.children))
            stack.append((stmt.then, s, t, b, c, guards + (stmt.cond,), taken, node.children))
        elif isinstance(stmt, lang.While):
            s1, t1, b1, c1 = range(next_vertex, next_vertex + 4)
            next_vertex += 4
            loop_edges = (
                new_edge(s, s1, Payload("enter", None, guards + (stmt.cond,), taken)),
                new_edge(s, t, Payload("exit", None, guards + (lang.negate(stmt.cond),), taken)),
                new_edge(t1, s, Payload("loopback")),
                new_edge(c1, s, Payload("continue-dispatch")),
                new_edge(b1, t, Payload("break-dispatch")),
            )
            node = DecompNode(LOOP, s, t, b, c, edges=loop_edges)
            stack.append((stmt.body, s1, t1, b1, c1, (), False, node.children))
        else:
            if isinstance(stmt, lang.Break):
                kind, dst, payload = AtomKind.BREAK, b, Payload("break", None, guards, taken)
            elif isinstance(stmt, lang.Continue):
                kind, dst, payload = AtomKind.CONTINUE, c, Payload("continue", None, guards, taken)
            elif isinstance(stmt, lang.Assign):
                kind, dst, payload = AtomKind.EPS, t, Payload("assign", stmt, guards, taken)
            elif isinstance(stmt, lang.Skip):
                kind, dst, payload = AtomKind.EPS, t, Payload("skip", None, guards, taken)
            else:
                raise TypeError(f"not a statement: {stmt!r}")
            node = DecompNode(ATOM, s, t, b, c, atom=kind, edges=(new_edge(s, dst, payload),))
        sink.append(node)

    return SplDecomposition(holder[0], edges, range(next_vertex), work=work)


class Cfg:
    """The root graph of a decomposition with adjacency indexes."""

    def __init__(self, decomposition: SplDecomposition):
        d = decomposition
        self.decomposition = d
        self.vertices: List = list(d.vertices)
        self.edges: List[Edge] = [d.edges[k] for k in sorted(d.edges, key=_sort_key)]
        self.edge_by_id: Dict[Any, Edge] = dict(d.edges)
        self.s, self.t, self.b, self.c = d.root.specials
        self.phantom_vertices = d.phantom_vertices
        self.phantom_edges = d.phantom_edges
        self.succ: Dict[Any, List[Edge]] = {v: [] for v in self.vertices}
        self.pred: Dict[Any, List[Edge]] = {v: [] for v in self.vertices}
        for e in self.edges:
            self.succ[e.src].append(e)
            self.pred[e.dst].append(e)

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def specials(self) -> Tuple:
        return (self.s, self.t, self.b, self.c)

    @property
    def real_vertices(self) -> List:
        return [v for v in self.vertices if v not in self.phantom_vertices]

    @property
    def real_edges(self) -> List[Edge]:
        return [e for e in self.edges if e.id not in self.phantom_edges]

    def in_degree(self, v) -> int:
        return len(self.pred[v])

    def out_degree(self, v) -> int:
        return len(self.succ[v])

    def is_closed(self) -> bool:
        return not self.pred[self.b] and not self.pred[self.c]

    def to_graph(self) -> SplGraph:
        return SplGraph(self.vertices, self.edges, *self.specials)

    def __repr__(self) -> str:
        return f"Cfg(n={self.n}, |E|={len(self.edges)})"


def cfg_of(d: SplDecomposition) -> Cfg:
    return Cfg(d)


def program_cfg(source_or_stmt) -> Cfg:
    """Convenience: parse (if needed), decompose and index."""
    stmt = lang.parse(source_or_stmt) if isinstance(source_or_stmt, str) else source_or_stmt
    return cfg_of(decompose(stmt))


def rebuild_graph(node: DecompNode) -> SplGraph:
    """Re-derive a node's graph with the composition operators on fresh ids
    (independent of the id bookkeeping above; used to cross-check it)."""
    from . import graph as g

    results: Dict[int, SplGraph] = {}
    stack = [(node, False)]
    while stack:
        n, ready = stack.pop()
        if not ready:
            stack.append((n, True))
            stack.extend((ch, False) for ch in n.children)
            continue
        if n.kind == ATOM:
            results[id(n)] = g.atomic(n.atom)
        elif n.kind == SERIES:
            results[id(n)] = g.series(results.pop(id(n.children[0])), results.pop(id(n.children[1])))
        elif n.kind == PARALLEL:
            results[id(n)] = g.parallel(results.pop(id(n.children[0])), results.pop(id(n.children[1])))
        else:
            results[id(n)] = g.loop_(results.pop(id(n.children[0])))
    return results[id(node)]


def program_graph(program: lang.Stmt) -> SplGraph:
    """The program's graph built directly with the composition operators.
    Unlike :func:`decompose` this accepts programs that are not closed."""
    from . import graph as g

    values: List[SplGraph] = []
    stack = [(program, False)]
    while stack:
        st, ready = stack.pop()
        kids = lang.children(st)
        if not ready:
            stack.append((st, True))
            stack.extend((ch, False) for ch in reversed(kids))
            continue
        args = values[len(values) - len(kids):]
        del values[len(values) - len(kids):]
        if isinstance(st, lang.Break):
            out = g.atomic(AtomKind.BREAK)
        elif isinstance(st, lang.Continue):
            out = g.atomic(AtomKind.CONTINUE)
        elif isinstance(st, (lang.Skip, lang.Assign)):
            out = g.atomic(AtomKind.EPS)
        elif isinstance(st, lang.Seq):
            out = g.series(*args)
        elif isinstance(st, lang.If):
            out = g.parallel(*args)
        else:
            out = g.loop_(*args)
        values.append(out)
    return values[0]
