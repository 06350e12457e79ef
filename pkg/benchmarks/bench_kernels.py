"""Compare the compiled kernels with the NumPy fallback.

Times the two min-plus kernels on random tables and a full LOSPRE solve on a
synthetic program, once per available backend.  Usage::

    python benchmarks/bench_kernels.py [--domain 8] [--repeat 5]
"""

import argparse
import time

import numpy as np

from spldp import kernels, lang
from spldp.analysis import derive_lospre_sets
from spldp.decompose import cfg_of, decompose
from spldp.generate import synthetic
from spldp.lospre import LospreInstance, solve_lospre


def timed(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--domain", type=int, default=8, help="domain size of every special vertex")
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--size", type=int, default=2000, help="program size for the end-to-end run")
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    d = args.domain
    left = rng.integers(0, 100, (d, d, d, d), dtype=np.int64)
    right = rng.integers(0, 100, (d, d, d, d), dtype=np.int64)
    mid = rng.integers(0, 10, d, dtype=np.int64)
    edges = [np.ascontiguousarray(rng.integers(0, 100, (d, d), dtype=np.int64)) for _ in range(5)]

    program = synthetic("nested-loops", args.size)
    cfg = cfg_of(decompose(program))
    U, I = derive_lospre_sets(cfg, lang.parse_expr("a + b"))
    inst = LospreInstance(cfg, U, I, c=1, l=1)

    print("backend\tseries_ms\tloop_ms\tlospre_solve_ms")
    results = {}
    for name in kernels.available():
        k = kernels.get(name)
        ts = timed(lambda: k.series_dense(left, right, mid), args.repeat)
        tl = timed(lambda: k.loop_dense(left, *edges), args.repeat)
        te = timed(lambda: solve_lospre(inst, backend=name), args.repeat)
        results[name] = (ts, tl, te)
        print(f"{name}\t{ts * 1e3:.3f}\t{tl * 1e3:.3f}\t{te * 1e3:.1f}")
    if len(results) == 2:
        (ps, pl, pe), (cs, cl, ce) = results["python"], results["compiled"]
        print(f"speedup\t{ps / cs:.1f}x\t{pl / cl:.1f}x\t{pe / ce:.1f}x")
    else:
        print("compiled backend not built; only the NumPy fallback was timed")


if __name__ == "__main__":
    main()
