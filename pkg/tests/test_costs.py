import numpy as np
import pytest
from hypothesis import given, strategies as st

from spldp import costs
from spldp.costs import INF, INF_CODE, SAT, Codec, Lex


def test_infinity_absorbs_and_dominates():
    assert INF + 3 is INF and 3 + INF is INF
    assert Lex(1, 2) + INF is INF
    assert 10 ** 30 < INF and Lex(10 ** 9, 0) < INF
    assert not INF < INF and INF == INF
    assert max([3, INF, 4]) is INF


def test_infinity_is_a_singleton_through_pickle():
    import pickle

    assert pickle.loads(pickle.dumps(INF)) is INF


def test_lex_order_and_sum():
    assert Lex(1, 5) < Lex(2, -9)
    assert Lex(1, 5) + Lex(2, -9) == Lex(3, -4)
    assert sum([Lex(1, 1), Lex(2, 2)], Lex(0, 0)) == Lex(3, 3)
    assert sorted([Lex(2, 0), Lex(1, 3), Lex(1, -1)]) == [Lex(1, -1), Lex(1, 3), Lex(2, 0)]


@pytest.mark.parametrize("kind,value,expected", [
    ("int", 4, 4), ("int", "inf", INF), ("lex2", [1, 2], Lex(1, 2)), ("lex2", "∞", INF),
])
def test_coerce(kind, value, expected):
    assert costs.coerce(kind, value) == expected


@pytest.mark.parametrize("kind,value", [("int", 1.5), ("int", True), ("lex2", 3), ("lex2", [1, 2, 3])])
def test_coerce_rejects(kind, value):
    with pytest.raises(ValueError):
        costs.coerce(kind, value)


def test_unknown_kind():
    with pytest.raises(ValueError, match="unknown cost kind"):
        costs.zero("float")


def test_json_and_formatting():
    assert costs.to_json(INF) == "inf"
    assert costs.to_json(Lex(1, 2)) == [1, 2]
    assert costs.format_cost(INF) == "inf"
    assert costs.format_cost(Lex(1, 2)) == "(1, 2)"


@given(st.lists(st.tuples(st.integers(-50, 50), st.integers(-50, 50)), min_size=1, max_size=6))
def test_lex_codec_preserves_order_and_sums(pairs):
    values = [Lex(a, b) for a, b in pairs]
    m1, m2 = costs.magnitudes("lex2", values)
    codec = Codec.for_values("lex2", m1 * len(values), m2 * len(values))
    codes = [codec.encode(v) for v in values]
    assert codec.decode(sum(codes)) == costs.total("lex2", values)
    for x, cx in zip(values, codes):
        assert codec.decode(cx) == x
        for y, cy in zip(values, codes):
            assert (x < y) == (cx < cy)


def test_codec_overflow():
    with pytest.raises(costs.CodecOverflow):
        Codec.for_values("int", 1 << 58)
    with pytest.raises(costs.CodecOverflow):
        Codec.for_values("lex2", 1 << 40, 1 << 20)


def test_sat_add_saturates():
    a = np.array([1, SAT - 1, INF_CODE], dtype=np.int64)
    out = costs.sat_add(a, np.array([1, 5, INF_CODE], dtype=np.int64))
    assert out.tolist() == [2, INF_CODE, INF_CODE]
    assert Codec("int").decode(out[1]) is INF
