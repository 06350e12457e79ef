"""Command line interface.

Exit codes: 0 success, 1 usage error, 2 parse or validation error,
3 the optimum is infinite (no feasible solution).
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Any, Dict, List, Optional

from . import bench, costs, kernels, lang
from .analysis import derive_lospre_sets, liveness
from .bankselect import BankInstance, build_bank_pcsp, naive_cost, solve_bank
from .costs import INF, Lex
from .decompose import DecompositionError, cfg_of, decompose
from .fileio import InstanceError, emit_dot, graph_to_json, load_instance
from .generate import SHAPES
from .graph import GraphError
from .lospre import LospreInstance, lospre_pcsp, solve_lospre
from .oracle import OracleLimitExceeded, brute_force, brute_force_lospre
from .pcsp import PcspError, PcspInstance, eval_cost, solve
from .regalloc import (SPILL_FREE, UNIT_SPILL, RegAllocInstance, build_interference,
                       min_spill_free_registers, solve_regalloc)

OK, USAGE, INVALID, INFEASIBLE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit with status 2
        raise UsageError(f"{self.prog}: error: {message}")


def _read_program(path: str) -> lang.Stmt:
    with open(path, encoding="utf-8") as fh:
        source = fh.read()
    program = lang.parse(source)
    problems = lang.check_closed(program)
    if problems:
        raise DecompositionError("; ".join(str(p) for p in problems))
    return program


def _cost_text(c) -> str:
    return costs.format_cost(c)


def _out(args, payload: Dict[str, Any], lines: List[str]) -> None:
    if getattr(args, "json", False):
        print(json.dumps(payload, ensure_ascii=False, default=_json_default))
    else:
        print("\n".join(lines))


def _json_default(x):
    if isinstance(x, (set, frozenset)):
        return sorted(x, key=str)
    if isinstance(x, tuple):
        return list(x)
    return str(x)


def _value_text(x) -> str:
    if isinstance(x, tuple) and all(isinstance(p, tuple) and len(p) == 2 for p in x):
        return "{" + ", ".join(f"{v}:{'⊥' if r is None else 'r' + str(r)}" for v, r in x) + "}"
    return "⊥" if x is None else str(x)


def _sorted(xs):
    return sorted(xs, key=lambda v: (not isinstance(v, int), v if isinstance(v, int) else str(v)))


# --------------------------------------------------------------------------- commands


def cmd_parse(args) -> int:
    print(lang.format_stmt(_read_program(args.file)))
    return OK


def cmd_decompose(args) -> int:
    d = decompose(_read_program(args.file))
    if args.dot:
        sys.stdout.write(emit_dot(d, "decomposition"))
    elif args.json:
        print(json.dumps(graph_to_json(cfg_of(d)), indent=1, ensure_ascii=False))
    else:
        print(d.shape())
    return OK


def cmd_cfg(args) -> int:
    cfg = cfg_of(decompose(_read_program(args.file)))
    if args.dot:
        sys.stdout.write(emit_dot(cfg, "cfg"))
        return OK
    print(f"S={cfg.s} T={cfg.t} B={cfg.b} C={cfg.c}  |V|={cfg.n} |E|={len(cfg.edges)}")
    for e in cfg.edges:
        print(f"{e.id}: {e.src} -> {e.dst}  {e.payload.label()}")
    return OK


def cmd_regalloc(args) -> int:
    cfg = cfg_of(decompose(_read_program(args.file)))
    live = liveness(cfg)
    graph = build_interference(live)
    result: Dict[str, Any] = {
        "live": {str(v): sorted(live[v]) for v in cfg.vertices},
        "interference": graph.sorted_edges(),
    }
    lines = ["live sets:"] + [f"  {v}: {{{', '.join(sorted(live[v]))}}}" for v in cfg.vertices]
    lines.append("interference: " + " ".join(f"{a}-{b}" for a, b in graph.sorted_edges()))
    status = OK
    if args.registers is None:
        r = min_spill_free_registers(cfg, live, args.max_regs, backend=args.backend)
        result["min_registers"] = r
        lines.append(f"min spill-free registers: {r if r is not None else f'more than {args.max_regs}'}")
        if r is None:
            status = INFEASIBLE
    else:
        oracle = SPILL_FREE if args.spill_free else UNIT_SPILL
        sol = solve_regalloc(RegAllocInstance(cfg, live, args.registers, oracle), backend=args.backend)
        result.update(registers=args.registers, cost=costs.to_json(sol.cost), spilled=sorted(sol.spilled))
        lines.append(f"registers: {args.registers}  cost: {_cost_text(sol.cost)}"
                     f"  spilled: {{{', '.join(sorted(sol.spilled))}}}")
        if sol.allocation is None:
            status = INFEASIBLE
        else:
            result["allocation"] = {str(v): [[x, r] for x, r in a] for v, a in sol.allocation.items()}
            lines += [f"  {v}: {_value_text(a)}" for v, a in sol.allocation.items()]
    _out(args, result, lines)
    return status


def _lospre_instance(args) -> LospreInstance:
    if args.instance:
        inst = load_instance(args.instance)
        if not isinstance(inst, LospreInstance):
            raise InstanceError("problem", "expected a lospre instance")
        return inst
    if not args.file or not args.expr:
        raise UsageError("lospre needs either --instance FILE or a program FILE with --expr EXPR")
    cfg = cfg_of(decompose(_read_program(args.file)))
    U, I = derive_lospre_sets(cfg, lang.parse_expr(args.expr))
    if args.lex:
        return LospreInstance(cfg, U, I, c=Lex(1, 0), l=Lex(0, 1), kind="lex2")
    return LospreInstance(cfg, U, I, c=1, l=0)


def cmd_lospre(args) -> int:
    inst = _lospre_instance(args)
    sol = solve_lospre(inst, backend=args.backend)
    calc = sorted(((inst.cfg.edge_by_id[i].src, inst.cfg.edge_by_id[i].dst) for i in sol.calc), key=str)
    life = _sorted(sol.life)
    _out(args, {"cost": costs.to_json(sol.cost), "life": life, "calc": calc},
         [f"cost: {_cost_text(sol.cost)}", f"life: {life}", f"calc: {calc}"])
    return INFEASIBLE if sol.cost is INF else OK


def cmd_bankselect(args) -> int:
    inst = load_instance(args.instance)
    if not isinstance(inst, BankInstance):
        raise InstanceError("problem", "expected a bank instance")
    sol = solve_bank(inst, backend=args.backend)
    naive = naive_cost(inst)
    if sol.assignment is None:
        _out(args, {"cost": "inf"}, ["cost: inf"])
        return INFEASIBLE
    switches = [(inst.cfg.edge_by_id[e].src, inst.cfg.edge_by_id[e].dst, b) for e, b in sol.switch_edges]
    _out(args, {"cost": sol.cost, "naive_cost": naive, "switches": switches,
                "assignment": {str(v): b for v, b in sol.assignment.items()}},
         [f"cost: {sol.cost}  (selecting before every use: {naive})"]
         + [f"  switch to {b} on {s} -> {d}" for s, d, b in switches]
         + [f"  {v}: {_value_text(b)}" for v, b in sol.assignment.items()])
    return OK


def _as_pcsp(inst) -> PcspInstance:
    if isinstance(inst, LospreInstance):
        return lospre_pcsp(inst)
    if isinstance(inst, BankInstance):
        return build_bank_pcsp(inst)
    return inst


def _report(args, cost, assignment) -> int:
    if assignment is None:
        _out(args, {"cost": "inf"}, ["cost: inf"])
        return INFEASIBLE
    _out(args, {"cost": costs.to_json(cost), "assignment": {str(v): a for v, a in assignment.items()}},
         [f"cost: {_cost_text(cost)}"] + [f"  {v}: {_value_text(a)}" for v, a in assignment.items()])
    return OK


def cmd_pcsp(args) -> int:
    inst = _as_pcsp(load_instance(args.instance))
    sol = solve(inst, backend=args.backend)
    return _report(args, sol.cost, sol.assignment)


def cmd_oracle(args) -> int:
    inst = load_instance(args.instance)
    if isinstance(inst, LospreInstance):
        cost, life = brute_force_lospre(inst)
        if life is None:
            return _report(args, INF, None)
        return _report(args, cost, {v: v in life for v in inst.cfg.real_vertices})
    pinst = _as_pcsp(inst)
    cost, assignment = brute_force(pinst, args.limit)
    if assignment is not None:
        assert eval_cost(pinst, assignment) == cost
    return _report(args, cost, assignment)


def cmd_bench(args) -> int:
    rows = bench.run_bench(args.shape, args.sizes, args.repeat, args.backend)
    sys.stdout.write(bench.format_tsv(rows))
    return OK


# --------------------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="spldp", description="SPL decompositions and PCSP solving for structured programs.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    def backend(sp):
        sp.add_argument("--backend", choices=kernels.available(), help="kernel implementation")

    sp = sub.add_parser("parse", help="parse a program and print it back")
    sp.add_argument("file")
    sp.set_defaults(fn=cmd_parse)

    sp = sub.add_parser("decompose", help="print the SPL decomposition of a program")
    sp.add_argument("file")
    fmt = sp.add_mutually_exclusive_group()
    fmt.add_argument("--dot", action="store_true", help="parse tree as DOT")
    fmt.add_argument("--json", action="store_true", help="graph and tree as an instance-file skeleton")
    sp.set_defaults(fn=cmd_decompose)

    sp = sub.add_parser("cfg", help="print the control-flow graph of a program")
    sp.add_argument("file")
    sp.add_argument("--dot", action="store_true")
    sp.set_defaults(fn=cmd_cfg)

    sp = sub.add_parser("regalloc", help="liveness, interference and register allocation")
    sp.add_argument("file")
    sp.add_argument("--max-regs", type=int, default=20, metavar="N",
                    help="search bound for the spill-free register count (default 20)")
    sp.add_argument("--registers", type=int, metavar="R", help="allocate with exactly R registers")
    sp.add_argument("--spill-free", action="store_true", help="with --registers: forbid spilling")
    sp.add_argument("--json", action="store_true")
    backend(sp)
    sp.set_defaults(fn=cmd_regalloc)

    sp = sub.add_parser("lospre", help="lifetime-optimal placement of an expression")
    sp.add_argument("file", nargs="?", help="program source (with --expr)")
    sp.add_argument("--expr", help="expression to place, e.g. 'a + b'")
    sp.add_argument("--instance", help="instance file instead of a program")
    sp.add_argument("--lex", action="store_true",
                    help="derived instance: minimize computations, then lifetime")
    sp.add_argument("--json", action="store_true")
    backend(sp)
    sp.set_defaults(fn=cmd_lospre)

    sp = sub.add_parser("bankselect", help="place bank selection instructions")
    sp.add_argument("--instance", required=True)
    sp.add_argument("--json", action="store_true")
    backend(sp)
    sp.set_defaults(fn=cmd_bankselect)

    sp = sub.add_parser("pcsp", help="solve an instance file by dynamic programming")
    sp.add_argument("--instance", required=True)
    sp.add_argument("--json", action="store_true")
    backend(sp)
    sp.set_defaults(fn=cmd_pcsp)

    sp = sub.add_parser("oracle", help="solve an instance file by exhaustive search")
    sp.add_argument("--instance", required=True)
    sp.add_argument("--limit", type=int, default=10 ** 7, help="largest search space to enumerate")
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(fn=cmd_oracle)

    sp = sub.add_parser("bench", help="scaling benchmark (tab-separated output)")
    sp.add_argument("--shape", choices=SHAPES, required=True)
    sp.add_argument("--sizes", type=int, nargs="+", required=True)
    sp.add_argument("--repeat", type=int, default=3)
    backend(sp)
    sp.set_defaults(fn=cmd_bench)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.fn(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return USAGE
    except OSError as exc:
        print(f"spldp: {exc}", file=sys.stderr)
        return USAGE
    except lang.SplSyntaxError as exc:
        print(f"syntax error: {exc}", file=sys.stderr)
        return INVALID
    except (InstanceError, DecompositionError, GraphError, PcspError, OracleLimitExceeded, ValueError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return INVALID


if __name__ == "__main__":
    sys.exit(main())
