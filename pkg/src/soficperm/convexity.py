"""Finite-level cuts and convex combinations of generator tuples.

At a single degree the cutting projections of a tuple are exactly the
unions of its orbits.  Cutting by such a set restricts every generator;
cutting by any other set needs rerouting, and the defect is reported.
Convex combinations with rational weights are direct sums of amplified
copies whose block sizes are proportional to the weights.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from . import limits
from .conjugacy import Conjugacy, anneal, s_distance_exact
from .expansion import boundary_sum
from .perm import (GenTuple, Perm, Subset, conjugate, direct_sum, direct_sum_all, relabel_perm,
                   tensor_id)


class UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))
        self.rank = [0] * n

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x, y):
        x, y = self.find(x), self.find(y)
        if x == y:
            return
        if self.rank[x] < self.rank[y]:
            x, y = y, x
        elif self.rank[x] == self.rank[y]:
            self.rank[x] += 1
        self.parent[y] = x


def orbit_subsets(t: GenTuple) -> list[Subset]:
    """Orbits of the group generated by ``t``, ordered by smallest member."""
    uf = UnionFind(t.n)
    for p in t.perms:
        for i, j in enumerate(p.images.tolist()):
            uf.union(i, j)
    groups: dict[int, list[int]] = {}
    for i in range(t.n):
        groups.setdefault(uf.find(i), []).append(i)
    return sorted((Subset(t.n, g) for g in groups.values()), key=lambda s: s.members[0])


def is_orbit_union(t: GenTuple, S: Subset) -> bool:
    return all(len(S & o) in (0, len(o)) for o in orbit_subsets(t))


@dataclass
class CutResult:
    restricted: GenTuple
    defect: Fraction
    patched: int
    support: Subset

    @property
    def exact(self) -> bool:
        return self.defect == 0


def cut(t: GenTuple, S: Subset) -> CutResult:
    """Restrict ``t`` to ``S``, relabelled order-preservingly to ``0..|S|-1``.

    Points whose image leaves ``S`` are sent, in ascending order, to the
    unused targets inside ``S`` (also ascending).
    """
    if S.n != t.n:
        raise ValueError("subset degree does not match tuple")
    members = np.flatnonzero(S.mask)
    m = members.size
    if m == 0:
        raise ValueError("cannot cut by the empty set")
    local = np.full(t.n, -1, dtype=np.int64)
    local[members] = np.arange(m)
    perms, patched = [], 0
    for p in t.perms:
        img = local[p.images[members]]
        escaping = np.flatnonzero(img < 0)
        if escaping.size:
            used = np.zeros(m, dtype=bool)
            used[img[img >= 0]] = True
            img[escaping] = np.flatnonzero(~used)
            patched += escaping.size
        perms.append(Perm(img, check=False))
    return CutResult(GenTuple(perms), boundary_sum(t, S), patched, S)


def pullback(S: Subset, T_local: Subset) -> Subset:
    """The subset of the big set corresponding to ``T_local`` inside the relabelled ``S``."""
    members = np.flatnonzero(S.mask)
    if T_local.n != members.size:
        raise ValueError("local subset has the wrong degree")
    return Subset(S.n, members[T_local.mask].tolist())


def verify_decomposition(t: GenTuple, S: Subset) -> bool:
    """``t`` equals ``cut(S) (+) cut(S^c)`` after the canonical relabel."""
    if boundary_sum(t, S) != 0:
        raise ValueError("subset is not invariant under the tuple")
    size = len(S)
    if size in (0, t.n):
        return True
    inner = cut(t, S).restricted
    outer = cut(t, S.complement()).restricted
    pi = relabel_perm(S)
    return all(conjugate(p, pi) == direct_sum(a, b)
               for p, a, b in zip(t.perms, inner.perms, outer.perms))


@dataclass
class Combination:
    """A direct sum realising a convex combination, with its cutting projections."""

    tuple: GenTuple
    weights: list[Fraction]
    blocks: list[Subset]
    copies: list[list[Subset]] = field(default_factory=list)
    multiplicity: list[int] = field(default_factory=list)

    def block_traces(self) -> list[Fraction]:
        return [b.trace() for b in self.blocks]


def convex_combine(ts: Sequence[GenTuple], weights: Sequence, scale: int) -> Combination:
    """``sum_i w_i [t_i]`` at degree ``lcm(n_i) * scale``.

    Tuple ``i`` contributes ``w_i * scale * lcm / n_i`` copies of itself, so
    its block has trace exactly ``w_i``.
    """
    if not ts:
        raise ValueError("need at least one tuple")
    weights = [Fraction(w) for w in weights]
    if len(weights) != len(ts):
        raise ValueError("one weight per tuple")
    if any(w <= 0 for w in weights) or sum(weights) != 1:
        raise ValueError("weights must be positive and sum to 1")
    k = ts[0].k
    if any(t.k != k for t in ts):
        raise ValueError("all tuples must have the same length")
    if scale < 1:
        raise ValueError("scale must be positive")
    counts = [w * scale for w in weights]
    if any(c.denominator != 1 for c in counts):
        raise ValueError(f"weights {weights} are not representable at scale {scale}")
    lcm = math.lcm(*(t.n for t in ts))
    mult = [int(c) * lcm // t.n for c, t in zip(counts, ts)]
    perms = [direct_sum_all([tensor_id(t.perms[g], r) for t, r in zip(ts, mult)]) for g in range(k)]
    total = lcm * scale
    blocks, copies, start = [], [], 0
    for t, r in zip(ts, mult):
        size = t.n * r
        blocks.append(Subset(total, range(start, start + size)))
        copies.append([Subset(total, range(start + c * t.n, start + (c + 1) * t.n)) for c in range(r)])
        start += size
    return Combination(GenTuple(perms), weights, blocks, copies, mult)


def amplification_base(t: GenTuple, r: int) -> Optional[GenTuple]:
    """``s`` with ``t == s (x) 1_r``, or None."""
    if r < 1 or t.n % r:
        return None
    n = t.n // r
    heads = [p.images[:n] for p in t.perms]
    if any(np.any(h >= n) for h in heads):
        return None
    base = GenTuple(Perm(h, check=False) for h in heads)
    if any(tensor_id(b, r) != p for b, p in zip(base.perms, t.perms)):
        return None
    return base


def conjugacy_search(x: GenTuple, y: GenTuple, budget: int = 20_000, seed: int = 0,
                     exact_limit: int = limits.SDIST_EXACT) -> Conjugacy:
    """Best conjugator found for ``x ~ p y p^-1``: exact below ``exact_limit``, annealed above."""
    if x.n != y.n or x.k != y.k:
        raise ValueError("tuples must share degree and length")
    if x.n <= exact_limit:
        return s_distance_exact(x, y, exact_limit)
    return anneal(x, y, budget=budget, seed=seed)
