import random

import pytest
from hypothesis import given, strategies as st

from spldp import graph as g
from spldp.generate import build_term, random_term


def counts(x):
    return len(x.vertices), len(x.edges)


def test_atoms_target_their_special():
    for kind, attr in ((g.AtomKind.EPS, "t"), (g.AtomKind.BREAK, "b"), (g.AtomKind.CONTINUE, "c")):
        a = g.atomic(kind)
        (e,) = a.edges
        assert e.src == a.s and e.dst == getattr(a, attr)
        assert counts(a) == (4, 1)


def test_atomic_with_fixed_ids():
    a = g.atomic(g.AtomKind.EPS, "x = 1", ids=("s", "t", "b", "c"), edge_id="e")
    assert a.edges == (g.Edge("e", "s", "t", "x = 1"),)


def test_series_merges_three_pairs():
    a, b = g.atomic(g.AtomKind.EPS), g.atomic(g.AtomKind.BREAK)
    sab = g.series(a, b)
    assert counts(sab) == (5, 2)
    assert (sab.s, sab.t, sab.b, sab.c) == (a.s, b.t, a.b, a.c)
    assert {(e.src, e.dst) for e in sab.edges} == {(a.s, a.t), (a.t, a.b)}


def test_parallel_merges_all_specials():
    p = g.parallel(g.atomic(g.AtomKind.EPS), g.atomic(g.AtomKind.EPS))
    assert counts(p) == (4, 2)
    assert all((e.src, e.dst) == (p.s, p.t) for e in p.edges)


def test_loop_wraps_with_five_edges():
    body = g.atomic(g.AtomKind.CONTINUE)
    w = g.loop_(body, {"enter": "go"})
    assert counts(w) == (8, 6)
    ends = {(e.src, e.dst): e.payload for e in w.edges}
    assert ends[(w.s, body.s)] == "go"
    for pair in ((w.s, w.t), (body.t, w.s), (body.c, w.s), (body.b, w.t)):
        assert pair in ends
    assert g.is_closed(w)


def test_operands_must_be_disjoint():
    a = g.atomic(g.AtomKind.EPS)
    with pytest.raises(g.GraphError):
        g.series(a, a)
    with pytest.raises(g.GraphError):
        g.loop_(a, ids=(a.s, "x", "y", "z"))


def test_constructor_checks():
    with pytest.raises(g.GraphError, match="pairwise distinct"):
        g.SplGraph([1, 2, 3], [], 1, 2, 3, 3)
    with pytest.raises(g.GraphError, match="endpoint"):
        g.SplGraph([1, 2, 3, 4], [g.Edge(0, 1, 9)], 1, 2, 3, 4)
    with pytest.raises(g.GraphError, match="duplicate"):
        g.SplGraph([1, 2, 3, 4], [g.Edge(0, 1, 2), g.Edge(0, 1, 2)], 1, 2, 3, 4)


def test_closedness():
    assert g.is_closed(g.atomic(g.AtomKind.EPS))
    assert not g.is_closed(g.atomic(g.AtomKind.BREAK))
    assert not g.is_closed(g.series(g.atomic(g.AtomKind.EPS), g.atomic(g.AtomKind.CONTINUE)))


def test_isomorphism_distinguishes_shapes_and_payloads():
    eps = g.AtomKind.EPS
    a = g.series(g.atomic(eps, "x"), g.atomic(eps, "y"))
    b = g.series(g.atomic(eps, "x"), g.atomic(eps, "y"))
    c = g.series(g.atomic(eps, "y"), g.atomic(eps, "x"))
    assert g.isomorphic(a, b)
    assert not g.isomorphic(a, c)
    assert g.isomorphic(a, c, payloads=False)
    assert not g.isomorphic(a, g.parallel(g.atomic(eps), g.atomic(eps)), payloads=False)


def test_parallel_is_commutative_up_to_isomorphism():
    x = g.parallel(g.atomic(g.AtomKind.BREAK), g.atomic(g.AtomKind.EPS))
    y = g.parallel(g.atomic(g.AtomKind.EPS), g.atomic(g.AtomKind.BREAK))
    assert g.isomorphic(x, y)


@given(st.integers(0, 2 ** 32 - 1), st.integers(0, 12))
def test_counting_laws(seed, ops):
    term = random_term(random.Random(seed), ops)

    def expect(t):
        if isinstance(t, g.AtomKind):
            return 4, 1
        if t[0] == "loop":
            v, e = expect(t[1])
            return v + 4, e + 5
        (v1, e1), (v2, e2) = expect(t[1]), expect(t[2])
        return v1 + v2 - (3 if t[0] == "series" else 4), e1 + e2

    assert counts(build_term(term)) == expect(term)


@given(st.integers(0, 2 ** 32 - 1))
def test_series_is_associative(seed):
    rng = random.Random(seed)
    terms = [random_term(rng, rng.randint(0, 4)) for _ in range(3)]
    left = g.series(g.series(*map(build_term, terms[:2])), build_term(terms[2]))
    right = g.series(build_term(terms[0]), g.series(*map(build_term, terms[1:])))
    assert g.isomorphic(left, right, payloads=False)


def test_edges_between_and_adjacency():
    p = g.parallel(g.atomic(g.AtomKind.EPS, "a"), g.atomic(g.AtomKind.EPS, "b"))
    assert len(g.edges_between(p, p.s, p.t)) == 2
    succ, pred = g.adjacency(p)
    assert len(succ[p.s]) == 2 and len(pred[p.t]) == 2
