"""Random and synthetic program generators for tests and benchmarks."""

from __future__ import annotations

import random
from typing import List, Optional, Sequence

from . import graph, lang

VARS = ("a", "b", "c", "d", "e")
SHAPES = ("long-sequence", "nested-loops", "wide-ifs")


def cfg_vertex_count(stmt: lang.Stmt) -> int:
    """Vertices of the program's CFG: four specials, one per ``;``, four per loop."""
    n = 4
    for s in lang.walk(stmt):
        if isinstance(s, lang.Seq):
            n += 1
        elif isinstance(s, lang.While):
            n += 4
    return n


def _expr(rng: random.Random, variables: Sequence[str]) -> lang.Expr:
    kind = rng.random()
    if kind < 0.2:
        return lang.Num(rng.randint(0, 9))
    if kind < 0.45:
        return lang.Var(rng.choice(variables))
    op = rng.choice("+-*")
    left = lang.Var(rng.choice(variables))
    right = lang.Var(rng.choice(variables)) if rng.random() < 0.7 else lang.Num(rng.randint(1, 9))
    return lang.BinOp(op, left, right)


def _cond(rng: random.Random, variables: Sequence[str]) -> lang.BoolExpr:
    if rng.random() < 0.2:
        return lang.Nondet()
    return lang.Compare(rng.choice(("<", "<=", ">", ">=", "==", "!=")),
                        lang.Var(rng.choice(variables)), _expr(rng, variables))


def random_program(rng: random.Random, max_vertices: int = 14, variables: Sequence[str] = VARS,
                   jump_rate: float = 0.25, stray_rate: float = 0.0) -> lang.Stmt:
    """A random program whose CFG has at most ``max_vertices`` vertices.

    It is closed when ``stray_rate`` is zero; otherwise atoms outside every
    loop become ``break``/``continue`` with that probability.
    """
    if max_vertices < 4:
        raise ValueError("every CFG has at least four vertices")
    target = rng.randint(4, max_vertices)
    stmt, _ = _gen(rng, target - 4, False, variables, jump_rate, stray_rate)
    return stmt


def _gen(rng, budget: int, in_loop: bool, variables, jump_rate, stray_rate=0.0):
    """Returns (stmt, vertices used beyond the four specials)."""
    choices = ["atom"]
    if budget >= 1:
        choices += ["seq", "seq", "if"]
    if budget >= 4:
        choices += ["while"]
    kind = rng.choice(choices)
    if kind == "atom":
        if rng.random() < (jump_rate if in_loop else stray_rate):
            return (lang.Break() if rng.random() < 0.5 else lang.Continue()), 0
        if rng.random() < 0.2:
            return lang.Skip(), 0
        return lang.Assign(rng.choice(variables), _expr(rng, variables)), 0
    if kind == "seq":
        split = rng.randint(0, budget - 1)
        first, u1 = _gen(rng, split, in_loop, variables, jump_rate, stray_rate)
        second, u2 = _gen(rng, budget - 1 - u1, in_loop, variables, jump_rate, stray_rate)
        return lang.Seq(first, second), 1 + u1 + u2
    if kind == "if":
        split = rng.randint(0, budget)
        then, u1 = _gen(rng, split, in_loop, variables, jump_rate, stray_rate)
        else_, u2 = _gen(rng, budget - u1, in_loop, variables, jump_rate, stray_rate)
        return lang.If(_cond(rng, variables), then, else_), u1 + u2
    body, used = _gen(rng, budget - 4, True, variables, jump_rate, stray_rate)
    return lang.While(_cond(rng, variables), body), 4 + used


def _assign(k: int, variables: Sequence[str]) -> lang.Assign:
    n = len(variables)
    target = variables[k % n]
    return lang.Assign(target, lang.BinOp("+", lang.Var(variables[(k + 1) % n]), lang.Var(variables[(k + 2) % n])))


def long_sequence(size: int, variables: Sequence[str] = VARS) -> lang.Stmt:
    """``size`` assignments in a row; every third one recomputes ``a + b``."""
    stmts: List[lang.Stmt] = []
    for k in range(size):
        if k % 3 == 0:
            stmts.append(lang.Assign("t", lang.BinOp("+", lang.Var("a"), lang.Var("b"))))
        else:
            stmts.append(_assign(k, variables))
    return lang.sequence(stmts)


def nested_loops(size: int, variables: Sequence[str] = VARS) -> lang.Stmt:
    """Loops nested ``size // 2`` deep, each body an assignment followed by the next loop."""
    depth = max(1, size // 2)
    body: lang.Stmt = lang.Assign("t", lang.BinOp("+", lang.Var("a"), lang.Var("b")))
    for k in range(depth):
        cond = lang.Compare("<", lang.Var(variables[k % len(variables)]), lang.Num(k % 10))
        body = lang.While(cond, lang.Seq(_assign(k, variables), body))
    return body


def wide_ifs(size: int, variables: Sequence[str] = VARS) -> lang.Stmt:
    """An ``else if`` chain with ``size // 2`` arms of two assignments each."""
    arms = max(1, size // 2)
    stmt: lang.Stmt = lang.Assign("t", lang.BinOp("+", lang.Var("a"), lang.Var("b")))
    for k in range(arms):
        cond = lang.Compare("==", lang.Var(variables[k % len(variables)]), lang.Num(k % 10))
        stmt = lang.If(cond, lang.Seq(_assign(k, variables), _assign(k + 1, variables)), stmt)
    return stmt


def synthetic(shape: str, size: int) -> lang.Stmt:
    if shape == "long-sequence":
        return long_sequence(size)
    if shape == "nested-loops":
        return nested_loops(size)
    if shape == "wide-ifs":
        return wide_ifs(size)
    raise ValueError(f"unknown shape {shape!r}; expected one of {SHAPES}")


ATOMS = (graph.AtomKind.EPS, graph.AtomKind.BREAK, graph.AtomKind.CONTINUE)


def random_term(rng: random.Random, ops: int):
    """A random composition term with ``ops`` operators.

    Leaves are :class:`~spldp.graph.AtomKind` values; inner nodes are
    ``("series", l, r)``, ``("parallel", l, r)`` or ``("loop", body)``.
    """
    if ops == 0:
        return rng.choice(ATOMS)
    op = rng.choice(("series", "parallel", "loop"))
    if op == "loop":
        return ("loop", random_term(rng, ops - 1))
    split = rng.randint(0, ops - 1)
    return (op, random_term(rng, split), random_term(rng, ops - 1 - split))


def build_term(term) -> graph.SplGraph:
    """Build the graph of a term with fresh vertex and edge ids."""
    if isinstance(term, graph.AtomKind):
        return graph.atomic(term)
    if term[0] == "loop":
        return graph.loop_(build_term(term[1]))
    left, right = build_term(term[1]), build_term(term[2])
    return graph.series(left, right) if term[0] == "series" else graph.parallel(left, right)


def random_domains(rng: random.Random, vertices, max_size: int = 3):
    return {v: list(range(rng.randint(1, max_size))) for v in vertices}


def random_pcsp(rng: random.Random, max_vertices: int = 14, kind: str = "int", max_domain: int = 3,
                inf_rate: float = 0.1, node_costs: bool = True):
    """A random PCSP instance over the CFG of a random program.

    Edge costs are small integers (pairs for ``lex2``), infinite with
    probability ``inf_rate``; node costs are optional.
    """
    from .decompose import program_cfg
    from .pcsp import PcspInstance

    cfg = program_cfg(random_program(rng, max_vertices))
    doms = random_domains(rng, cfg.vertices, max_domain)

    def cost(hi):
        if kind == "lex2":
            return [rng.randint(0, hi), rng.randint(-hi, hi)]
        return rng.randint(0, hi)

    edges = {e.id: [["inf" if rng.random() < inf_rate else cost(9) for _ in doms[e.dst]] for _ in doms[e.src]]
             for e in cfg.edges}
    nodes = {v: [cost(3) for _ in doms[v]] for v in cfg.vertices} if node_costs else None
    return PcspInstance(cfg, doms, kind=kind, edge_tables=edges, node_tables=nodes)


def random_seed(seed: Optional[int]) -> random.Random:
    return random.Random(seed)
