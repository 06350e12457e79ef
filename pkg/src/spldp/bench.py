"""Scaling benchmark: decomposition and LOSPRE solve time on synthetic programs.

Program generation is not timed.  Each measurement is the best of
``repeat`` runs with the garbage collector paused, which keeps allocation
bursts from one size leaking into the next.
"""

from __future__ import annotations

import gc
import time
from dataclasses import dataclass
from typing import Callable, Iterable, List, Optional, Sequence, Tuple

from . import lang
from .analysis import derive_lospre_sets
from .decompose import cfg_of, decompose
from .generate import synthetic
from .lospre import LospreInstance, solve_lospre

EXPR = "a + b"
HEADER = ("shape", "size", "vertices", "decompose_us", "solve_us", "max_work_ratio")


@dataclass
class BenchRow:
    shape: str
    size: int
    vertices: int
    decompose_us: float
    solve_us: float
    max_work_ratio: float

    def tsv(self) -> str:
        return "\t".join((self.shape, str(self.size), str(self.vertices), f"{self.decompose_us:.1f}",
                          f"{self.solve_us:.1f}", f"{self.max_work_ratio:.4f}"))


def best_of(fn: Callable, repeat: int) -> Tuple[float, object]:
    """(fastest wall time in seconds, last result)."""
    times, result = [], None
    for _ in range(max(1, repeat)):
        gc.collect()
        gc.disable()
        try:
            start = time.perf_counter()
            result = fn()
            times.append(time.perf_counter() - start)
        finally:
            gc.enable()
    return min(times), result


def _instance(program: lang.Stmt) -> LospreInstance:
    cfg = cfg_of(decompose(program))
    U, I = derive_lospre_sets(cfg, lang.parse_expr(EXPR))
    return LospreInstance(cfg, U, I, c=1, l=1)


def run_one(shape: str, size: int, repeat: int = 3, backend: Optional[str] = None) -> BenchRow:
    program = synthetic(shape, size)
    td, _ = best_of(lambda: decompose(program), repeat)
    inst = _instance(program)
    ts, sol = best_of(lambda: solve_lospre(inst, backend=backend), repeat)
    return BenchRow(shape, size, inst.cfg.n, td * 1e6, ts * 1e6, sol.stats.max_ratio())


def run_interleaved(shape: str, sizes: Sequence[int], rounds: int = 3,
                    backend: Optional[str] = None, decompose_repeat: int = 3) -> List[BenchRow]:
    """Like :func:`run_bench`, but every round times each size before the
    next round starts, so slow phases of a shared machine hit all sizes
    alike.  Each entry is the best over the rounds; the cheap decomposition
    is timed ``decompose_repeat`` times per round."""
    programs = [synthetic(shape, n) for n in sizes]
    insts = [_instance(p) for p in programs]
    td = [float("inf")] * len(sizes)
    ts = [float("inf")] * len(sizes)
    ratio = [0.0] * len(sizes)
    for _ in range(max(1, rounds)):
        for k, (program, inst) in enumerate(zip(programs, insts)):
            t, _ = best_of(lambda: decompose(program), decompose_repeat)
            td[k] = min(td[k], t)
            t, sol = best_of(lambda: solve_lospre(inst, backend=backend), 1)
            ts[k] = min(ts[k], t)
            ratio[k] = sol.stats.max_ratio()
    return [BenchRow(shape, n, inst.cfg.n, a * 1e6, b * 1e6, r)
            for n, inst, a, b, r in zip(sizes, insts, td, ts, ratio)]


def run_bench(shape: str, sizes: Sequence[int], repeat: int = 3,
              backend: Optional[str] = None) -> List[BenchRow]:
    if list(sizes) != sorted(sizes):
        raise ValueError("sizes must be ascending")
    return [run_one(shape, n, repeat, backend) for n in sizes]


def format_tsv(rows: Iterable[BenchRow]) -> str:
    return "\n".join(["\t".join(HEADER)] + [r.tsv() for r in rows]) + "\n"
