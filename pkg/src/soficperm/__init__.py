"""Finite-degree experiments with tuples of permutations: Hamming geometry,
expansion, exhaustive counts, de-amplification and block constructions."""

__version__ = "0.1.0"

from .census import (CountReport, Satisfied, count_cycle_commuting, count_hamming_ball, count_K,
                     count_L, count_near_commuting, count_s_ball, count_T, in_K, in_L, in_T)
from .conjugacy import Mode, s_distance
from .convexity import convex_combine, cut, orbit_subsets, verify_decomposition
from .deamplify import DeamplifyResult, Guarantee, deamplify, intertwiner_defect
from .expansion import (ExpansionCertificate, Verdict, check_expander, check_expander_exact,
                        refute_expander_sampled, sample_expander_pair)
from .perm import (GenTuple, PartialPerm, Perm, Subset, compose, coxeter, cycle, fix_trace, hamming,
                   tensor_id)
from .strange import build_strange_candidate, build_T_candidate, pick_far_expanders
from .words import Word, eval_word, freeness_defect

__all__ = [
    "CountReport", "DeamplifyResult", "ExpansionCertificate", "GenTuple", "Guarantee", "Mode",
    "PartialPerm", "Perm", "Satisfied", "Subset", "Verdict", "Word", "build_T_candidate",
    "build_strange_candidate", "check_expander", "check_expander_exact", "compose", "convex_combine",
    "count_K", "count_L", "count_T", "count_cycle_commuting", "count_hamming_ball",
    "count_near_commuting", "count_s_ball", "coxeter", "cut", "cycle", "deamplify", "eval_word",
    "fix_trace", "freeness_defect", "hamming", "in_K", "in_L", "in_T", "intertwiner_defect",
    "orbit_subsets", "pick_far_expanders", "refute_expander_sampled", "s_distance",
    "sample_expander_pair", "tensor_id", "verify_decomposition", "__version__",
]
