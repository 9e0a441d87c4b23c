"""Enumeration ceilings.  Callers may pass larger limits explicitly."""
import os

MAX_DEGREE = 1 << 24

EXPANDER_EXACT = 20       # subsets of {0..n-1}
SINGLE_LOOP = 9           # census counts over P_n
DOUBLE_LOOP = 7           # L/K membership over P_n x P_n
SBALL = 5                 # d_S balls, (n!)^2 work
SDIST_EXACT = 8           # exact conjugacy distance
WORD_BALL_BUDGET = 200_000

THREADS_ENV = "SOFICPERM_THREADS"


def threads() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1
