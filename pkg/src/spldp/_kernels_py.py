"""NumPy implementations of the two hot min-plus kernels.

Both operate on ``int64`` cost codes (see :mod:`spldp.costs`); any code at or
above ``SAT`` is infinity and results are clamped to ``INF_CODE``.
"""

import numpy as np

from .costs import INF_CODE, SAT


def _clamp(a):
    a[a >= SAT] = INF_CODE
    return a


def series_dense(left, right, mid):
    """Combine a series node's children over the shared middle vertex.

    left: (S, M, B, C), right: (M, T, B, C), mid: (M,) node costs of the middle
    vertex.  Returns (table (S, T, B, C), argmin over M as int32).
    """
    S, M, B, C = left.shape
    T = right.shape[1]
    best = np.full((S, T, B, C), INF_CODE, dtype=np.int64)
    arg = np.zeros((S, T, B, C), dtype=np.int32)
    for m in range(M):
        cand = left[:, m, None, :, :] + right[None, m, :, :, :] + mid[m]
        _clamp(cand)
        better = cand < best
        best[better] = cand[better]
        arg[better] = m
    return best, arg


def loop_dense(body, enter, exit_, back, cont, brk):
    """Close a loop around a child table in two phases.

    body: (S1, T1, B1, C1) child table with its specials' node costs included;
    enter: (S, S1), exit_: (S, T), back: (T1, S), cont: (C1, S), brk: (B1, T).
    Returns (h (S, T), flat child index (S, T) into ``body``).
    """
    S1, T1, B1, C1 = body.shape
    S, T = exit_.shape
    h = np.full((S, T), INF_CODE, dtype=np.int64)
    arg = np.zeros((S, T), dtype=np.int64)
    cols = np.arange(T)
    rows = np.arange(B1)
    for s in range(S):
        a = (body + enter[s][:, None, None, None] + back[:, s][None, :, None, None]
             + cont[:, s][None, None, None, :])
        _clamp(a)
        by_b = np.moveaxis(a, 2, 0).reshape(B1, -1)  # (b1, s1*t1*c1)
        idx = np.argmin(by_b, axis=1)
        g = by_b[rows, idx]
        H = _clamp(g[:, None] + brk)  # (B1, T)
        bi = np.argmin(H, axis=0)
        h[s] = _clamp(H[bi, cols] + exit_[s])
        s1, t1, c1 = np.unravel_index(idx[bi], (S1, T1, C1))
        arg[s] = np.ravel_multi_index((s1, t1, bi, c1), body.shape)
        arg[s][H[bi, cols] >= SAT] = 0
    return h, arg
