# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled min-plus kernels; same contracts as ``_kernels_py``."""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport int64_t, int32_t

cnp.import_array()

cdef int64_t INF_CODE = 1 << 60
cdef int64_t SAT = 1 << 59


cdef inline int64_t sat(int64_t x) nogil:
    return INF_CODE if x >= SAT else x


def series_dense(const int64_t[:, :, :, ::1] left, const int64_t[:, :, :, ::1] right,
                 const int64_t[::1] mid):
    cdef Py_ssize_t S = left.shape[0], M = left.shape[1], B = left.shape[2], C = left.shape[3]
    cdef Py_ssize_t T = right.shape[1]
    best_arr = np.full((S, T, B, C), INF_CODE, dtype=np.int64)
    arg_arr = np.zeros((S, T, B, C), dtype=np.int32)
    cdef int64_t[:, :, :, ::1] best = best_arr
    cdef int32_t[:, :, :, ::1] arg = arg_arr
    cdef Py_ssize_t s, m, t, b, c
    cdef int64_t lv, v
    with nogil:
        for s in range(S):
            for m in range(M):
                if mid[m] >= SAT:
                    continue
                for b in range(B):
                    for c in range(C):
                        lv = left[s, m, b, c]
                        if lv >= SAT:
                            continue
                        lv = lv + mid[m]
                        if lv >= SAT:
                            continue
                        for t in range(T):
                            v = sat(lv + right[m, t, b, c])
                            if v < best[s, t, b, c]:
                                best[s, t, b, c] = v
                                arg[s, t, b, c] = <int32_t>m
    return best_arr, arg_arr


def loop_dense(const int64_t[:, :, :, ::1] body, const int64_t[:, ::1] enter,
               const int64_t[:, ::1] exit_, const int64_t[:, ::1] back,
               const int64_t[:, ::1] cont, const int64_t[:, ::1] brk):
    cdef Py_ssize_t S1 = body.shape[0], T1 = body.shape[1], B1 = body.shape[2], C1 = body.shape[3]
    cdef Py_ssize_t S = exit_.shape[0], T = exit_.shape[1]
    h_arr = np.full((S, T), INF_CODE, dtype=np.int64)
    arg_arr = np.zeros((S, T), dtype=np.int64)
    g_arr = np.empty(B1, dtype=np.int64)
    gi_arr = np.empty(B1, dtype=np.int64)
    cdef int64_t[:, ::1] h = h_arr
    cdef int64_t[:, ::1] arg = arg_arr
    cdef int64_t[::1] g = g_arr
    cdef int64_t[::1] gi = gi_arr
    cdef Py_ssize_t s, s1, t1, b1, c1, t, bbest
    cdef int64_t v, es, bs, best
    with nogil:
        for s in range(S):
            for b1 in range(B1):
                g[b1] = INF_CODE
                gi[b1] = 0
            for s1 in range(S1):
                es = enter[s, s1]
                if es >= SAT:
                    continue
                for t1 in range(T1):
                    bs = es + back[t1, s]
                    if bs >= SAT:
                        continue
                    for b1 in range(B1):
                        for c1 in range(C1):
                            v = sat(bs + body[s1, t1, b1, c1])
                            if v < SAT:
                                v = sat(v + cont[c1, s])
                            if v < g[b1]:
                                g[b1] = v
                                gi[b1] = ((s1 * T1 + t1) * B1 + b1) * C1 + c1
            for t in range(T):
                best = INF_CODE
                bbest = 0
                for b1 in range(B1):
                    v = sat(g[b1] + brk[b1, t])
                    if v < best:
                        best = v
                        bbest = b1
                h[s, t] = sat(best + exit_[s, t])
                if best < SAT:
                    arg[s, t] = gi[bbest]
                else:
                    arg[s, t] = 0
    return h_arr, arg_arr
