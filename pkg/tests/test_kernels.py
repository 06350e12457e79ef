import itertools

import numpy as np
import pytest

from spldp import kernels
from spldp.costs import INF_CODE, SAT

BACKENDS = kernels.available()


def random_codes(rng, shape, inf_rate=0.15):
    a = rng.integers(0, 20, size=shape).astype(np.int64)
    a[rng.random(shape) < inf_rate] = INF_CODE
    return a


def series_reference(left, right, mid):
    S, M, B, C = left.shape
    T = right.shape[1]
    out = np.full((S, T, B, C), INF_CODE, dtype=np.int64)
    for s, t, b, c, m in itertools.product(range(S), range(T), range(B), range(C), range(M)):
        v = min(INF_CODE, int(left[s, m, b, c]) + int(right[m, t, b, c]) + int(mid[m]))
        out[s, t, b, c] = min(out[s, t, b, c], v if v < SAT else INF_CODE)
    return out


def loop_reference(body, enter, exit_, back, cont, brk):
    S1, T1, B1, C1 = body.shape
    S, T = exit_.shape
    out = np.full((S, T), INF_CODE, dtype=np.int64)
    for s, t in itertools.product(range(S), range(T)):
        for s1, t1, b1, c1 in itertools.product(range(S1), range(T1), range(B1), range(C1)):
            v = sum(int(x) for x in (body[s1, t1, b1, c1], enter[s, s1], back[t1, s], cont[c1, s],
                                     brk[b1, t], exit_[s, t]))
            out[s, t] = min(out[s, t], v if v < SAT else INF_CODE)
    return out


def test_a_backend_is_selected():
    assert kernels.current() in BACKENDS
    assert "python" in BACKENDS


def test_unknown_backend():
    with pytest.raises(ValueError):
        kernels.use("fortran")


@pytest.mark.parametrize("backend", BACKENDS)
@pytest.mark.parametrize("seed", range(5))
def test_series_matches_reference(backend, seed):
    rng = np.random.default_rng(seed)
    S, M, T, B, C = rng.integers(1, 4, size=5)
    left, right = random_codes(rng, (S, M, B, C)), random_codes(rng, (M, T, B, C))
    mid = random_codes(rng, (M,), 0.1)
    table, arg = kernels.get(backend).series_dense(left, right, mid)
    ref = series_reference(left, right, mid)
    assert np.array_equal(table, ref)
    for s, t, b, c in zip(*np.nonzero(ref < SAT)):
        m = arg[s, t, b, c]
        assert left[s, m, b, c] + right[m, t, b, c] + mid[m] == ref[s, t, b, c]


@pytest.mark.parametrize("backend", BACKENDS)
@pytest.mark.parametrize("seed", range(5))
def test_loop_matches_reference(backend, seed):
    rng = np.random.default_rng(100 + seed)
    S, T, S1, T1, B1, C1 = rng.integers(1, 4, size=6)
    body = random_codes(rng, (S1, T1, B1, C1))
    parts = [random_codes(rng, sh) for sh in ((S, S1), (S, T), (T1, S), (C1, S), (B1, T))]
    h, arg = kernels.get(backend).loop_dense(body, *parts)
    ref = loop_reference(body, *parts)
    assert np.array_equal(h, ref)
    enter, exit_, back, cont, brk = parts
    for s, t in zip(*np.nonzero(ref < SAT)):
        s1, t1, b1, c1 = np.unravel_index(arg[s, t], body.shape)
        total = (body[s1, t1, b1, c1] + enter[s, s1] + back[t1, s] + cont[c1, s] + brk[b1, t] + exit_[s, t])
        assert total == ref[s, t]


def test_backends_agree_on_large_inputs():
    if len(BACKENDS) < 2:
        pytest.skip("compiled extension not built")
    rng = np.random.default_rng(7)
    left, right = random_codes(rng, (9, 11, 3, 2)), random_codes(rng, (11, 8, 3, 2))
    mid = random_codes(rng, (11,))
    a = kernels.get("python").series_dense(left, right, mid)[0]
    b = kernels.get("compiled").series_dense(left, right, mid)[0]
    assert np.array_equal(a, b)
