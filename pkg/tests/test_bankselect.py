import random

import pytest

from spldp import bankselect as bs
from spldp.decompose import program_cfg
from spldp.fileio import load_instance
from spldp.generate import random_program
from spldp.oracle import brute_force, min_switches_oracle


@pytest.fixture
def path(data_dir):
    return load_instance(data_dir / "bank_path.json")


def test_path_instance(path):
    sol = bs.solve_bank(path)
    assert sol.cost == 3
    assert bs.naive_cost(path) == 6
    assert sol.switch_edges == [(0, "beta")]
    assert brute_force(bs.build_bank_pcsp(path))[0] == 3
    assert min_switches_oracle(path)[0] * path.c0 == 3


def test_entry_starts_unknown(path):
    assert path.domain(path.cfg.s) == (None,)
    assert path.domain("v1") == ("beta",)
    assert path.domain("v2") == (None, "beta", "gamma")


def test_switch_costs(path):
    e = path.cfg.edges[0]
    assert path.switch_cost(e, None, "beta") == 3
    assert path.switch_cost(e, "beta", "beta") == 0
    assert path.switch_cost(e, "beta", None) == 0
    taken = bs.BankInstance(path.cfg, path.banks, path.precolored, 3, 6, {e.id})
    assert taken.switch_cost(e, "gamma", "beta") == 6


def test_taken_edges_come_from_else_branches():
    cfg = program_cfg("if x > 0 { a = 1 } else { b = 2 }")
    (eid,) = bs.taken_from_payloads(cfg)
    assert cfg.edge_by_id[eid].payload.label().startswith("x <= 0")


@pytest.mark.parametrize("kwargs,msg", [
    (dict(banks=["a", None]), "reserved"),
    (dict(banks=["a", "a"]), "duplicate"),
    (dict(banks=["a"], c0=2, c1=2), "c0 < c1"),
    (dict(banks=["a"], precolored={99: "a"}), "not in the graph"),
    (dict(banks=["a"], precolored={0: "z"}), "unknown bank"),
    (dict(banks=["a"], taken_edges={77}), "taken edges"),
])
def test_validation(kwargs, msg):
    cfg = program_cfg("x = 1")
    with pytest.raises(ValueError, match=msg):
        bs.BankInstance(cfg, **kwargs)


def test_random_instances():
    rng = random.Random(2)
    done = 0
    while done < 40:
        cfg = program_cfg(random_program(rng, 12))
        banks = ["x", "y", "z"][:rng.randint(1, 3)]
        pre = {v: rng.choice(banks) for v in cfg.real_vertices if rng.random() < 0.4}
        inst = bs.BankInstance(cfg, banks, pre, 3, 6, bs.taken_from_payloads(cfg))
        if bs.build_bank_pcsp(inst).search_space() > 10 ** 5:
            continue
        sol = bs.solve_bank(inst)
        assert sol.cost == brute_force(bs.build_bank_pcsp(inst))[0]
        assert sol.cost <= bs.naive_cost(inst)
        assert sum(inst.c1 if e in inst.taken_edges else inst.c0 for e, _ in sol.switch_edges) == sol.cost
        flat = bs.BankInstance(cfg, banks, pre, 3, 6)
        assert bs.solve_bank(flat).cost == 3 * min_switches_oracle(flat)[0]
        done += 1
