"""Conjugacy distance ``d_S(x, y) = min_p sum_i d_H(x_i, p y_i p^-1)``.

Exact mode scans every conjugator in lexicographic order (first minimiser
wins).  Heuristic mode runs seeded simulated annealing over transposition
moves and only ever yields an upper bound.
"""
from __future__ import annotations

import enum
import math
import random
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from . import limits
from .enumeration import all_inverses, all_perms, check_limit
from .perm import GenTuple, Perm


class Mode(str, enum.Enum):
    EXACT = "EXACT"
    HEURISTIC = "HEURISTIC"


class Conjugacy(NamedTuple):
    value: Fraction
    witness: Perm
    mode: Mode


def _check_pair(x: GenTuple, y: GenTuple) -> None:
    if x.n != y.n or x.k != y.k:
        raise ValueError("tuples must share degree and length")


def conjugate_table(y: np.ndarray, n: int) -> np.ndarray:
    """Row ``r`` holds ``p y p^-1`` for the ``r``-th permutation ``p`` of P_n."""
    P = all_perms(n).astype(np.int64)
    Pinv = all_inverses(n).astype(np.int64)
    return np.take_along_axis(P, y[Pinv], axis=1)


def mismatch_table(x: GenTuple, y: GenTuple) -> np.ndarray:
    """``sum_i |{m : x_i(m) != (p y_i p^-1)(m)}|`` for every conjugator ``p``."""
    total = np.zeros(math.factorial(x.n), dtype=np.int64)
    for xi, yi in zip(x.perms, y.perms):
        total += np.count_nonzero(conjugate_table(yi.images, x.n) != xi.images, axis=1)
    return total


def s_distance_exact(x: GenTuple, y: GenTuple, limit: int = limits.SDIST_EXACT) -> Conjugacy:
    _check_pair(x, y)
    check_limit(x.n, limit, "exact d_S")
    table = mismatch_table(x, y)
    r = int(np.argmin(table))
    return Conjugacy(Fraction(int(table[r]), x.n), Perm(all_perms(x.n)[r], check=False), Mode.EXACT)


def conj_cost(x: GenTuple, y: GenTuple, p: Perm) -> int:
    """Integer cost ``n * sum_i d_H(x_i, p y_i p^-1)``."""
    total = 0
    for xi, yi in zip(x.perms, y.perms):
        conj = np.empty(x.n, dtype=np.int64)
        conj[p.images] = p.images[yi.images]
        total += int(np.count_nonzero(conj != xi.images))
    return total


def anneal(x: GenTuple, y: GenTuple, budget: int = 20_000, seed: int = 0,
           t_start: float = 1.0, t_end: float = 0.02, init: Perm | None = None) -> Conjugacy:
    """Simulated annealing over conjugators.

    Term ``j`` of generator ``i`` is ``[x_i(p(j)) != p(y_i(j))]``; swapping
    ``p(a), p(b)`` only touches ``j in {a, b, y_i^-1(a), y_i^-1(b)}``.
    """
    _check_pair(x, y)
    n = x.n
    rng = random.Random(seed)
    p = list(init.images.tolist()) if init is not None else list(range(n))
    xs = [xi.images.tolist() for xi in x.perms]
    ys = [yi.images.tolist() for yi in y.perms]
    yinv = [yi.inverse().images.tolist() for yi in y.perms]
    gens = range(x.k)

    def term(i, j):
        return xs[i][p[j]] != p[ys[i][j]]

    cost = sum(term(i, j) for i in gens for j in range(n))
    best, best_p = cost, p[:]
    if n < 2 or cost == 0:
        return Conjugacy(Fraction(best, n), Perm(best_p, check=False), Mode.HEURISTIC)
    ratio = (t_end / t_start) ** (1.0 / max(budget - 1, 1))
    temp = t_start
    for _ in range(budget):
        a = rng.randrange(n)
        b = rng.randrange(n - 1)
        if b >= a:
            b += 1
        touched = {(i, j) for i in gens for j in (a, b, yinv[i][a], yinv[i][b])}
        before = sum(term(i, j) for i, j in touched)
        p[a], p[b] = p[b], p[a]
        delta = sum(term(i, j) for i, j in touched) - before
        if delta <= 0 or rng.random() < math.exp(-delta / temp):
            cost += delta
            if cost < best:
                best, best_p = cost, p[:]
                if best == 0:
                    break
        else:
            p[a], p[b] = p[b], p[a]
        temp *= ratio
    return Conjugacy(Fraction(best, n), Perm(best_p, check=False), Mode.HEURISTIC)


def s_distance(x: GenTuple, y: GenTuple, mode: Mode | str = Mode.EXACT,
               limit: int = limits.SDIST_EXACT, budget: int = 20_000, seed: int = 0) -> Conjugacy:
    mode = Mode(mode)
    if mode is Mode.EXACT:
        return s_distance_exact(x, y, limit)
    return anneal(x, y, budget=budget, seed=seed)
