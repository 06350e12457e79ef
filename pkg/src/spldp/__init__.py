"""SPL decompositions of structured programs and PCSP solving over them.

Programs built from assignments, ``if``, ``while``, ``break`` and
``continue`` have control-flow graphs generated by series, parallel and loop
composition.  Following that parse tree, binary partial constraint
satisfaction problems on the graph are solved exactly by dynamic
programming.  Register allocation, lifetime-optimal redundancy elimination
and bank selection are provided as instances.
"""

from .analysis import LiveMap, derive_lospre_sets, liveness
from .bankselect import BankInstance, BankSolution, build_bank_pcsp, naive_cost, solve_bank
from .costs import INF, Lex
from .decompose import Cfg, SplDecomposition, cfg_of, decompose, program_cfg
from .fileio import InstanceError, emit_dot, load_instance, save_instance
from .lang import parse
from .lospre import LospreInstance, LospreSolution, calc_set, lospre_cost, solve_lospre
from .oracle import brute_force, brute_force_lospre
from .pcsp import PcspInstance, PcspSolution, eval_cost, solve
from .recognize import recognize
from .regalloc import (InterferenceGraph, RegAllocInstance, build_interference, build_regalloc_pcsp,
                       min_spill_free_registers, solve_regalloc)

__version__ = "0.1.0"

__all__ = [
    "BankInstance", "BankSolution", "Cfg", "INF", "InstanceError", "InterferenceGraph", "Lex",
    "LiveMap", "LospreInstance", "LospreSolution", "PcspInstance", "PcspSolution",
    "RegAllocInstance", "SplDecomposition", "brute_force", "brute_force_lospre",
    "build_bank_pcsp", "build_interference", "build_regalloc_pcsp", "calc_set", "cfg_of",
    "decompose", "derive_lospre_sets", "emit_dot", "eval_cost", "liveness", "load_instance",
    "lospre_cost", "min_spill_free_registers", "naive_cost", "parse", "program_cfg",
    "recognize", "save_instance", "solve", "solve_bank", "solve_lospre", "solve_regalloc",
]
