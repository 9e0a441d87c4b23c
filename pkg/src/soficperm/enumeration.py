"""Whole-group tables for exhaustive counts.

``all_perms(n)`` lists P_n in lexicographic image order, one permutation per
row.  Counting functions work on row ranges of this table so the work can be
split into disjoint chunks and summed.
"""
from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from functools import lru_cache
from typing import Callable

import numpy as np

from .limits import threads

ORDER = "lexicographic image order"


class DegreeOverLimit(ValueError):
    pass


def check_limit(n: int, limit: int, what: str) -> None:
    if n > limit:
        raise DegreeOverLimit(f"{what}: degree {n} exceeds exhaustive limit {limit}")


@lru_cache(maxsize=12)
def all_perms(n: int) -> np.ndarray:
    table = np.array(list(itertools.permutations(range(n))), dtype=np.int8 if n <= 127 else np.int16)
    table.flags.writeable = False
    return table


@lru_cache(maxsize=12)
def all_inverses(n: int) -> np.ndarray:
    P = all_perms(n).astype(np.int64)
    inv = np.empty_like(P)
    rows = np.arange(P.shape[0])[:, None]
    inv[rows, P] = np.arange(n)[None, :]
    inv = inv.astype(all_perms(n).dtype)
    inv.flags.writeable = False
    return inv


def lex_rank(images) -> int:
    """Position of a permutation in :func:`all_perms`."""
    images = list(images)
    n = len(images)
    rank, remaining = 0, sorted(images)
    for i, v in enumerate(images):
        j = remaining.index(v)
        rank += j * math.factorial(n - 1 - i)
        remaining.pop(j)
    return rank


def chunked_sum(total: int, fn: Callable[[int, int], int], chunk: int = 1 << 16) -> int:
    """Sum ``fn(lo, hi)`` over disjoint ranges covering ``[0, total)``."""
    ranges = [(lo, min(lo + chunk, total)) for lo in range(0, total, chunk)]
    workers = threads()
    if workers > 1 and len(ranges) > 1:
        with ThreadPoolExecutor(workers) as pool:
            return sum(pool.map(lambda r: fn(*r), ranges))
    return sum(fn(lo, hi) for lo, hi in ranges)


def chunked_concat(total: int, fn: Callable[[int, int], np.ndarray], chunk: int = 1 << 16) -> np.ndarray:
    ranges = [(lo, min(lo + chunk, total)) for lo in range(0, total, chunk)]
    workers = threads()
    if workers > 1 and len(ranges) > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(lambda r: fn(*r), ranges))
    else:
        parts = [fn(lo, hi) for lo, hi in ranges]
    return np.concatenate(parts) if parts else np.zeros(0, dtype=bool)


def mismatches(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Row-wise count of positions where two tables of maps differ."""
    return np.count_nonzero(A != B, axis=-1)


def left_compose(p: np.ndarray, table: np.ndarray) -> np.ndarray:
    """Rows ``p o c`` for every row ``c``."""
    return p[table]


def right_compose(table: np.ndarray, p: np.ndarray) -> np.ndarray:
    """Rows ``c o p`` for every row ``c``."""
    return table[:, p]
