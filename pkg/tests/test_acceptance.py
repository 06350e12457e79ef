"""Acceptance criteria, each timed against its limit.

Every test prints one ``[PASS]``/``[FAIL]`` line (shown even when output is
captured); a criterion fails when an assertion fails or it runs over time.
"""

import random
import time
from contextlib import contextmanager

import pytest

from spldp import graph, kernels, lang
from spldp.analysis import liveness
from spldp.bankselect import BankInstance, build_bank_pcsp, naive_cost, solve_bank, taken_from_payloads
from spldp.bench import run_interleaved
from spldp.costs import Lex
from spldp.decompose import cfg_of, decompose, program_cfg, program_graph
from spldp.fileio import load_instance
from spldp.generate import build_term, random_pcsp, random_program, random_term
from spldp.lospre import calc_set, edge_pairs, lospre_cost, solve_lospre
from spldp.oracle import brute_force, brute_force_lospre, min_spills_oracle, min_switches_oracle
from spldp.pcsp import PcspInstance, eval_cost, solve
from spldp.regalloc import (UNIT_SPILL, RegAllocInstance, build_interference, min_spill_free_registers,
                            solve_regalloc)

from conftest import DATA, GCD, if_vertex

WORK_CONSTANT = 6


@contextmanager
def criterion(capsys, number: int, title: str, limit: float):
    start = time.perf_counter()
    ok = False
    try:
        yield
        ok = True
    finally:
        elapsed = time.perf_counter() - start
        status = "PASS" if ok and elapsed < limit else "FAIL"
        with capsys.disabled():
            print(f"\n[{status}] criterion {number}: {title} ({elapsed:.2f} s, limit {limit:g} s)")
    assert elapsed < limit, f"criterion {number} took {elapsed:.2f} s (limit {limit} s)"


def test_1_decomposition_golden(capsys):
    with criterion(capsys, 1, "GCD decomposition and 10-vertex CFG", 1):
        d = decompose(lang.parse(GCD))
        assert d.shape() == "Loop(Parallel(Series(A_ε, A_break), Series(A_ε, A_continue)))"
        d.validate()
        cfg = cfg_of(d)
        assert cfg.n == 10 and len(cfg.edges) == 9 and cfg.is_closed()
        root = d.root
        body = root.children[0]
        # loop edges: enter, exit, back, continue, break around the body's specials
        ends = [(cfg.edge_by_id[e].src, cfg.edge_by_id[e].dst) for e in root.edges]
        assert ends == [(root.s, body.s), (root.s, root.t), (body.t, root.s), (body.c, root.s),
                        (body.b, root.t)]
        assert graph.isomorphic(cfg.to_graph(), program_graph(lang.parse(GCD)), payloads=False)
        with pytest.raises(lang.SplSyntaxError, match="unclosed"):
            lang.parse("if x {")


def test_2_lospre_golden(capsys):
    with criterion(capsys, 2, "LOSPRE diamond instance", 1):
        inst = load_instance(DATA / "lospre_diamond.json")
        assert inst.U == {2, 4, 5, 7} and inst.I == {1, 6, 8} and inst.kind == "lex2"
        cfg = inst.cfg
        assert edge_pairs(cfg, calc_set(cfg, inst.U, {2, 3}, inst.I)) == {(1, 2), (6, 7)}
        assert edge_pairs(cfg, calc_set(cfg, inst.U, {3}, inst.I)) == {(1, 2), (2, 3), (6, 7)}
        sol = solve_lospre(inst)
        assert sol.cost == Lex(2, 2) and sol.life == {2, 3}
        best, life = brute_force_lospre(inst)
        assert best == Lex(2, 2) and lospre_cost(inst, life) == best


def test_3_regalloc_golden(capsys):
    with criterion(capsys, 3, "six-variable register allocation", 5):
        cfg = program_cfg((DATA / "six_vars.spl").read_text())
        live = liveness(cfg)
        assert live[if_vertex(cfg)] == {"c", "d", "e", "f"}
        assert len(build_interference(live).edges) == 10
        assert min_spill_free_registers(cfg, live) == 4
        assert not solve_regalloc(RegAllocInstance(cfg, live, 3)).feasible
        spills = solve_regalloc(RegAllocInstance(cfg, live, 3, UNIT_SPILL))
        assert spills.cost == min_spills_oracle(cfg, live, 3) == 1
        assert len(spills.spilled) == 1


def test_4_oracle_equivalence(capsys):
    with criterion(capsys, 4, "DP equals brute force on 300 random instances", 60):
        rng = random.Random(2024)
        checked = 0
        for i in range(300):
            kind = "lex2" if i % 3 == 2 else "int"
            inst = random_pcsp(rng, 14, kind, max_domain=3, node_costs=bool(i % 2))
            assert inst.cfg.is_closed() and inst.cfg.n <= 14
            best, _ = brute_force(inst)
            for backend in kernels.available():
                sol = solve(inst, backend=backend)
                assert sol.cost == best, (i, backend)
                if sol.feasible:
                    assert eval_cost(inst, sol.assignment) == best
            checked += 1
        assert checked >= 200


def test_5_bank_selection(capsys):
    with criterion(capsys, 5, "bank selection path instance and random equivalence", 10):
        inst = load_instance(DATA / "bank_path.json")
        assert (inst.c0, inst.c1) == (3, 6)
        assert solve_bank(inst).cost == 3 and naive_cost(inst) == 6
        assert brute_force(build_bank_pcsp(inst))[0] == 3
        rng = random.Random(7)
        checked = 0
        while checked < 200:
            cfg = program_cfg(random_program(rng, 14))
            banks = ["x", "y", "z"][:rng.randint(1, 3)]
            pre = {v: rng.choice(banks) for v in cfg.real_vertices if rng.random() < 0.4}
            b = BankInstance(cfg, banks, pre, 3, 6, taken_from_payloads(cfg))
            pinst = build_bank_pcsp(b)
            if pinst.search_space() > 10 ** 5:
                continue
            sol = solve_bank(b)
            best, arg = brute_force(pinst)
            assert sol.cost == best
            assert eval_cost(pinst, sol.assignment) == best
            if checked % 4 == 0:
                flat = BankInstance(cfg, banks, pre, 3, 6)
                assert solve_bank(flat).cost == 3 * min_switches_oracle(flat)[0]
            checked += 1


def test_6_structural_properties(capsys):
    with criterion(capsys, 6, "1000 random compositions: counting, associativity, closedness", 30):
        rng = random.Random(6)

        def expect(t):
            if isinstance(t, graph.AtomKind):
                return 4, 1
            if t[0] == "loop":
                v, e = expect(t[1])
                return v + 4, e + 5
            (v1, e1), (v2, e2) = expect(t[1]), expect(t[2])
            return v1 + v2 - (3 if t[0] == "series" else 4), e1 + e2

        for _ in range(1000):
            term = random_term(rng, rng.randint(0, 10))
            g = build_term(term)
            assert (len(g.vertices), len(g.edges)) == expect(term)

            parts = [random_term(rng, rng.randint(0, 3)) for _ in range(3)]
            left = graph.series(graph.series(build_term(parts[0]), build_term(parts[1])), build_term(parts[2]))
            right = graph.series(build_term(parts[0]), graph.series(build_term(parts[1]), build_term(parts[2])))
            assert graph.isomorphic(left, right, payloads=False)

            p = random_program(rng, 16, stray_rate=0.1)
            closed = not lang.check_closed(p)
            assert graph.is_closed(program_graph(p)) == closed
            if closed:
                assert program_cfg(p).is_closed()


def test_7_scaling(capsys):
    with criterion(capsys, 7, "decompose and solve time grow at most 15x per 10x size", 120):
        worst = 0.0
        for shape in ("long-sequence", "nested-loops"):
            small, large = run_interleaved(shape, [1000, 10000], rounds=5)
            for field in ("decompose_us", "solve_us"):
                ratio = getattr(large, field) / getattr(small, field)
                with capsys.disabled():
                    print(f"\n    {shape} {field}: {getattr(small, field):.0f} -> "
                          f"{getattr(large, field):.0f} us (x{ratio:.1f})", end="")
                assert ratio <= 15, (shape, field, ratio)
            worst = max(worst, small.max_work_ratio, large.max_work_ratio)
        rng = random.Random(77)
        for _ in range(100):
            stats = solve(random_pcsp(rng, 30, max_domain=5)).stats
            worst = max(worst, stats.max_ratio())
        assert worst <= WORK_CONSTANT


def test_8_loop_generality(capsys):
    with criterion(capsys, 8, "loop with an inequality on its continue edge", 1):
        cfg = program_cfg("while ? { continue }")
        (cont,) = [e for e in cfg.edges if e.payload.tag == "continue-dispatch"]
        root, body = cfg.decomposition.root, cfg.decomposition.root.children[0]
        assert (cont.src, cont.dst) == (body.c, root.s)

        def cost(e, a, b):
            if e.id == cont.id:
                return 5 if a == b else 1
            return 0

        inst = PcspInstance(cfg, [0, 1], cost)
        sol = solve(inst)
        best, _ = brute_force(inst)
        assert sol.cost == best == 1
        assert sol.assignment[cont.src] != sol.assignment[cont.dst]
        assert eval_cost(inst, sol.assignment) == 1
