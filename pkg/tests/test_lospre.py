import random

import pytest
from hypothesis import given, strategies as st

from spldp import lospre as lp
from spldp.analysis import derive_lospre_sets
from spldp.costs import Lex
from spldp.decompose import program_cfg
from spldp.fileio import load_instance
from spldp.generate import random_program
from spldp.lang import parse_expr
from spldp.oracle import brute_force_lospre


@pytest.fixture
def diamond(data_dir):
    return load_instance(data_dir / "lospre_diamond.json")


@pytest.mark.parametrize("a,b,c,d,expected", [
    (False, False, True, False, True),
    (False, False, False, True, True),
    (True, False, True, True, False),   # value already held
    (True, True, True, True, True),     # held but invalidated
    (False, True, False, False, False),  # nothing needed downstream
])
def test_injection_rule(a, b, c, d, expected):
    assert lp.injects(a, b, c, d) is expected


def test_diamond_calc_sets(diamond):
    cfg = diamond.cfg
    assert lp.edge_pairs(cfg, lp.calc_set(cfg, diamond.U, {2, 3}, diamond.I)) == {(1, 2), (6, 7)}
    assert lp.lospre_cost(diamond, {2, 3}) == Lex(2, 2)
    assert lp.lospre_cost(diamond, {3}) == Lex(3, 1)
    assert len(lp.calc_set(cfg, diamond.U, set(), diamond.I)) == 4
    assert lp.lospre_cost(diamond, set()) == Lex(4, 0)


def test_diamond_optimum(diamond):
    sol = lp.solve_lospre(diamond)
    assert sol.cost == Lex(2, 2) == brute_force_lospre(diamond)[0]
    assert sol.life == {2, 3}
    assert lp.edge_pairs(diamond.cfg, sol.calc) == {(1, 2), (6, 7)}


def test_instance_validation():
    cfg = program_cfg("x = a + b")
    with pytest.raises(ValueError, match="invalidating"):
        lp.LospreInstance(cfg, {cfg.s}, set())
    with pytest.raises(ValueError, match="unknown vertices"):
        lp.LospreInstance(cfg, {99}, {cfg.s, cfg.t})
    with pytest.raises(ValueError):
        lp.LospreInstance(cfg, set(), {cfg.s, cfg.t}, kind="float")


def test_cost_specs():
    cfg = program_cfg("x = a + b; y = a + b")
    inst = lp.LospreInstance(cfg, {0, 4}, {0, 1}, c={0: 5}, l=lambda v: 2)
    assert inst.edge_cost(0) == 5 and inst.edge_cost(1) == 0
    assert inst.vertex_cost(4) == 2


def test_redundant_program(data_dir):
    cfg = program_cfg((data_dir / "redundant.spl").read_text())
    U, I = derive_lospre_sets(cfg, parse_expr("a + b"))
    inst = lp.LospreInstance(cfg, U, I, c=1, l=0)
    sol = lp.solve_lospre(inst)
    # y and z reuse the value computed for x; w needs a fresh one after the kill
    assert sol.cost == 2 == brute_force_lospre(inst)[0]
    assert len(sol.life) == 1


def test_kill_in_one_arm_blocks_reuse_in_the_other():
    # a branch vertex stands for the commands on all its outgoing edges
    cfg = program_cfg("x = a + b; if c > 0 { y = a + b } else { a = 0 }; z = a + b")
    U, I = derive_lospre_sets(cfg, parse_expr("a + b"))
    inst = lp.LospreInstance(cfg, U, I)
    assert lp.solve_lospre(inst).cost == 3 == brute_force_lospre(inst)[0]


@given(st.integers(0, 2 ** 32 - 1), st.sampled_from(["int", "lex2"]))
def test_random_instances_match_brute_force(seed, kind):
    rng = random.Random(seed)
    cfg = program_cfg(random_program(rng, 14))
    V = cfg.real_vertices
    U = {v for v in V if rng.random() < 0.3}
    I = {v for v in V if rng.random() < 0.3} | {cfg.s, cfg.t}
    if kind == "int":
        c = {e.id: rng.randint(0, 9) for e in cfg.edges}
        l = {v: rng.randint(0, 5) for v in V}
    else:
        c = {e.id: (rng.randint(0, 3), rng.randint(0, 3)) for e in cfg.edges}
        l = {v: (0, rng.randint(0, 3)) for v in V}
    inst = lp.LospreInstance(cfg, U, I, c, l, kind)
    sol = lp.solve_lospre(inst)
    assert sol.cost == brute_force_lospre(inst)[0]
    assert lp.lospre_cost(inst, sol.life) == sol.cost
