"""Shared hypothesis strategies and brute-force oracles."""
import itertools
from fractions import Fraction

from hypothesis import strategies as st

from soficperm.perm import GenTuple, Perm


@st.composite
def perms(draw, min_n=1, max_n=12, n=None):
    n = n if n is not None else draw(st.integers(min_n, max_n))
    return Perm(draw(st.permutations(range(n))))


@st.composite
def perm_pairs(draw, min_n=1, max_n=12):
    n = draw(st.integers(min_n, max_n))
    return draw(perms(n=n)), draw(perms(n=n))


@st.composite
def tuples(draw, min_n=1, max_n=10, k=None, n=None):
    n = n if n is not None else draw(st.integers(min_n, max_n))
    k = k if k is not None else draw(st.integers(1, 3))
    return GenTuple([draw(perms(n=n)) for _ in range(k)])


def random_tuple(rng, n, k):
    return GenTuple([Perm(rng.permutation(n)) for _ in range(k)])


def brute_inversions(a):
    a = list(a)
    return sum(1 for i in range(len(a)) for j in range(i + 1, len(a)) if a[i] > a[j])


def mismatch(p, q):
    return sum(1 for x, y in zip(p, q) if x != y)


def comp(p, q):
    """``p o q`` on tuples (q first)."""
    return tuple(p[i] for i in q)


def all_perm_tuples(n):
    return list(itertools.permutations(range(n)))


def frac(a, b):
    return Fraction(a, b)
