import random

from hypothesis import given, strategies as st

from spldp import lang
from spldp.analysis import computes, derive_lospre_sets, edge_defs, edge_uses, liveness, transfer
from spldp.decompose import program_cfg
from spldp.generate import random_program

from conftest import if_vertex


def test_six_variable_live_sets(six_vars_cfg):
    cfg = six_vars_cfg
    live = liveness(cfg)
    assert live[cfg.s] == {"b", "c", "f"}
    assert live[if_vertex(cfg)] == {"c", "d", "e", "f"}
    assert live[cfg.t] == frozenset()
    assert live.variables() == set("abcdef")
    assert live.max_pressure() == 4


def test_edge_live_set_is_union_of_endpoints(six_vars_cfg):
    cfg = six_vars_cfg
    live = liveness(cfg)
    for e in cfg.edges:
        assert live.edge[e.id] == live[e.src] | live[e.dst]


def test_guard_uses_precede_the_command():
    cfg = program_cfg("if x > 0 { x = 1 } else { skip }")
    (e,) = [e for e in cfg.edges if e.payload.tag == "assign"]
    assert edge_uses(e) == {"x"} and edge_defs(e) == {"x"}
    assert liveness(cfg)[cfg.s] == {"x"}


def test_extra_uses():
    cfg = program_cfg("x = 1; y = 2")
    last = max(cfg.edges, key=lambda e: e.id)
    live = liveness(cfg, {last.id: ["z"]})
    assert "z" in live[cfg.s]


@given(st.integers(0, 2 ** 32 - 1))
def test_liveness_is_a_fixpoint(seed):
    cfg = program_cfg(random_program(random.Random(seed), 30))
    live = liveness(cfg)
    assert transfer(cfg, live) == dict(live.vertex)


def test_lospre_sets_use_edge_sources():
    cfg = program_cfg("x = a + b; if c > 0 { y = a + b } else { a = 0 }; z = a + b")
    U, I = derive_lospre_sets(cfg, lang.parse_expr("a + b"))
    e = lang.parse_expr("a + b")
    assert U == {edge.src for edge in cfg.edges if computes(edge, e)}
    (kill,) = [edge for edge in cfg.edges if edge_defs(edge) == {"a"}]
    assert kill.src in I and kill.dst not in I
    assert {cfg.s, cfg.t} <= I


def test_guard_computations_count_as_uses():
    cfg = program_cfg("while a + b > 0 { a = a - 1 }")
    U, _ = derive_lospre_sets(cfg, lang.parse_expr("a + b"))
    assert cfg.s in U
