"""Permutations, pieces of permutations, subsets and generator tuples.

Everything here is a map on ``{0, ..., n-1}``.  ``compose(p, q)`` is ``p after
q`` so products read like matrix products of permutation matrices.  Distances
are returned as :class:`fractions.Fraction` so threshold comparisons are exact.

Amplification convention: position ``(b, t)`` with block ``b < r`` and inner
index ``t < n`` is encoded as ``b * n + t``; ``p (x) 1_r`` acts inside blocks.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .limits import MAX_DEGREE

Dist = Fraction

UNDEFINED = -1


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


class Perm:
    """A bijection of ``{0..n-1}`` stored as its image array."""

    __slots__ = ("images",)

    def __init__(self, images, check: bool = True):
        arr = np.array(images, dtype=np.int64).reshape(-1)
        if check:
            n = arr.size
            if n == 0:
                raise ValueError("degree must be positive")
            seen = np.zeros(n, dtype=bool)
            if arr.min() < 0 or arr.max() >= n:
                raise ValueError("images out of range")
            seen[arr] = True
            if not seen.all():
                raise ValueError("not a permutation")
        self.images = _frozen(arr)

    @classmethod
    def identity(cls, n: int) -> "Perm":
        if n < 1:
            raise ValueError("degree must be positive")
        return cls(np.arange(n), check=False)

    @classmethod
    def reversal(cls, n: int) -> "Perm":
        return cls(np.arange(n)[::-1], check=False)

    @property
    def n(self) -> int:
        return self.images.size

    def __call__(self, i: int) -> int:
        return int(self.images[i])

    def __len__(self) -> int:
        return self.n

    def __eq__(self, other) -> bool:
        if not isinstance(other, Perm):
            return NotImplemented
        return self.n == other.n and bool(np.array_equal(self.images, other.images))

    def __hash__(self) -> int:
        return hash(self.images.tobytes())

    def __mul__(self, other: "Perm") -> "Perm":
        return compose(self, other)

    def __repr__(self) -> str:
        if self.n <= 16:
            return f"Perm({self.images.tolist()})"
        return f"Perm(n={self.n})"

    def inverse(self) -> "Perm":
        inv = np.empty_like(self.images)
        inv[self.images] = np.arange(self.n)
        return Perm(inv, check=False)

    def is_identity(self) -> bool:
        return bool(np.array_equal(self.images, np.arange(self.n)))

    def to_list(self) -> list[int]:
        return self.images.tolist()

    def as_partial(self) -> "PartialPerm":
        return PartialPerm(self.images, check=False)


class PartialPerm:
    """An injective partial map; undefined points carry ``-1``."""

    __slots__ = ("images",)

    def __init__(self, images, check: bool = True):
        arr = np.array(images, dtype=np.int64).reshape(-1)
        if check:
            n = arr.size
            if n == 0:
                raise ValueError("degree must be positive")
            defined = arr[arr != UNDEFINED]
            if defined.size and (defined.min() < 0 or defined.max() >= n):
                raise ValueError("images out of range")
            if np.unique(defined).size != defined.size:
                raise ValueError("partial map is not injective")
        self.images = _frozen(arr)

    @classmethod
    def empty(cls, n: int) -> "PartialPerm":
        return cls(np.full(n, UNDEFINED), check=False)

    @property
    def n(self) -> int:
        return self.images.size

    @property
    def defined(self) -> np.ndarray:
        return self.images != UNDEFINED

    def defined_count(self) -> int:
        return int(np.count_nonzero(self.defined))

    def is_total(self) -> bool:
        return self.defined_count() == self.n

    def adjoint(self) -> "PartialPerm":
        """Relational inverse: the transpose of the 0/1 matrix."""
        adj = np.full(self.n, UNDEFINED, dtype=np.int64)
        dom = np.flatnonzero(self.defined)
        adj[self.images[dom]] = dom
        return PartialPerm(adj, check=False)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PartialPerm):
            return NotImplemented
        return bool(np.array_equal(self.images, other.images))

    def __hash__(self) -> int:
        return hash(self.images.tobytes())

    def __repr__(self) -> str:
        if self.n <= 16:
            return "PartialPerm([%s])" % ", ".join(
                "_" if v == UNDEFINED else str(v) for v in self.images.tolist()
            )
        return f"PartialPerm(n={self.n}, defined={self.defined_count()})"


class Subset:
    """A subset of ``{0..n-1}``, i.e. a diagonal projection."""

    __slots__ = ("n", "mask")

    def __init__(self, n: int, members: Iterable[int] = ()):
        if n < 1:
            raise ValueError("degree must be positive")
        mask = np.zeros(n, dtype=bool)
        idx = np.fromiter(members, dtype=np.int64)
        if idx.size and (idx.min() < 0 or idx.max() >= n):
            raise ValueError("member out of range")
        mask[idx] = True
        self.n = n
        self.mask = _frozen(mask)

    @classmethod
    def from_mask(cls, mask) -> "Subset":
        mask = np.array(mask, dtype=bool)
        s = cls.__new__(cls)
        s.n = mask.size
        s.mask = _frozen(mask)
        return s

    @classmethod
    def full(cls, n: int) -> "Subset":
        return cls.from_mask(np.ones(n, dtype=bool))

    @property
    def members(self) -> list[int]:
        return np.flatnonzero(self.mask).tolist()

    def __len__(self) -> int:
        return int(np.count_nonzero(self.mask))

    def __contains__(self, i: int) -> bool:
        return bool(self.mask[i])

    def __iter__(self):
        return iter(self.members)

    def trace(self) -> Dist:
        return Fraction(len(self), self.n)

    def complement(self) -> "Subset":
        return Subset.from_mask(~self.mask)

    def __and__(self, other: "Subset") -> "Subset":
        return Subset.from_mask(self.mask & other.mask)

    def __or__(self, other: "Subset") -> "Subset":
        return Subset.from_mask(self.mask | other.mask)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Subset):
            return NotImplemented
        return self.n == other.n and bool(np.array_equal(self.mask, other.mask))

    def __hash__(self) -> int:
        return hash((self.n, self.mask.tobytes()))

    def __repr__(self) -> str:
        return f"Subset(n={self.n}, members={self.members if self.n <= 32 else len(self)})"


class GenTuple:
    """``k >= 1`` permutations of a common degree: a finite-level map of F_k."""

    __slots__ = ("perms",)

    def __init__(self, perms: Sequence[Perm]):
        perms = tuple(perms)
        if not perms:
            raise ValueError("a generator tuple needs at least one permutation")
        n = perms[0].n
        if any(p.n != n for p in perms):
            raise ValueError("degree mismatch inside tuple")
        self.perms = perms

    @property
    def n(self) -> int:
        return self.perms[0].n

    @property
    def k(self) -> int:
        return len(self.perms)

    def __len__(self) -> int:
        return self.k

    def __getitem__(self, i: int) -> Perm:
        return self.perms[i]

    def __iter__(self):
        return iter(self.perms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, GenTuple):
            return NotImplemented
        return self.perms == other.perms

    def __hash__(self) -> int:
        return hash(self.perms)

    def __repr__(self) -> str:
        return f"GenTuple(n={self.n}, k={self.k})"

    def conjugate(self, q: Perm) -> "GenTuple":
        """``(q x_i q^-1)_i``."""
        return GenTuple(conjugate(p, q) for p in self.perms)

    def to_json(self) -> dict:
        return {"n": self.n, "perms": [p.to_list() for p in self.perms]}

    @classmethod
    def from_json(cls, obj: dict) -> "GenTuple":
        perms = [Perm(p) for p in obj["perms"]]
        if "n" in obj and any(p.n != obj["n"] for p in perms):
            raise ValueError("declared degree does not match permutations")
        return cls(perms)


def _check_same_degree(p, q) -> None:
    if p.n != q.n:
        raise ValueError(f"degree mismatch: {p.n} != {q.n}")


def compose(p, q):
    """``p after q``.  Either argument may be partial; the result is total only if both are."""
    _check_same_degree(p, q)
    if isinstance(p, Perm) and isinstance(q, Perm):
        return Perm(p.images[q.images], check=False)
    qi = q.images
    out = np.full(q.n, UNDEFINED, dtype=np.int64)
    dom = qi != UNDEFINED
    out[dom] = p.images[qi[dom]]
    return PartialPerm(out, check=False)


def inverse(p: Perm) -> Perm:
    return p.inverse()


def conjugate(p: Perm, q: Perm) -> Perm:
    """``q p q^-1``."""
    _check_same_degree(p, q)
    out = np.empty_like(p.images)
    out[q.images] = q.images[p.images]
    return Perm(out, check=False)


def cycle(n: int) -> Perm:
    """The long cycle ``i -> i+1 mod n``."""
    if n < 1:
        raise ValueError("degree must be positive")
    out = np.arange(1, n + 1, dtype=np.int64)
    out[-1] = 0
    return Perm(out, check=False)


def power(p: Perm, e: int) -> Perm:
    if e < 0:
        p, e = p.inverse(), -e
    out = np.arange(p.n)
    base = p.images
    while e:
        if e & 1:
            out = base[out]
        base = base[base]
        e >>= 1
    return Perm(out, check=False)


def tensor_id(p: Perm, r: int) -> Perm:
    """``p (x) 1_r`` on degree ``n r``: ``(b, t) -> (b, p(t))``."""
    if r < 1:
        raise ValueError("r must be positive")
    if p.n * r > MAX_DEGREE:
        raise ValueError(f"degree {p.n * r} exceeds maximum {MAX_DEGREE}")
    offsets = (np.arange(r, dtype=np.int64) * p.n)[:, None]
    return Perm((offsets + p.images[None, :]).reshape(-1), check=False)


def direct_sum(p: Perm, q: Perm) -> Perm:
    return Perm(np.concatenate([p.images, q.images + p.n]), check=False)


def direct_sum_all(perms: Sequence[Perm]) -> Perm:
    parts, shift = [], 0
    for p in perms:
        parts.append(p.images + shift)
        shift += p.n
    return Perm(np.concatenate(parts), check=False)


def hamming(p: Perm, q: Perm) -> Dist:
    """Normalised Hamming distance ``|{i : p(i) != q(i)}| / n``."""
    _check_same_degree(p, q)
    return Fraction(int(np.count_nonzero(p.images != q.images)), p.n)


def hamming_rows(x, y) -> Dist:
    """Fraction of points where two (partial) maps disagree, definedness included."""
    _check_same_degree(x, y)
    return Fraction(int(np.count_nonzero(x.images != y.images)), x.n)


def fix_trace(p: Perm) -> Dist:
    """Normalised matrix trace: the fraction of fixed points."""
    return Fraction(int(np.count_nonzero(p.images == np.arange(p.n))), p.n)


def _reverse_descending(a: np.ndarray, d: np.ndarray):
    # reverse every maximal strictly decreasing segment; count the inversions inside them
    n = a.size
    edges = np.flatnonzero(np.diff(np.concatenate(([0], d.view(np.int8), [0]))))
    starts, stops = edges[0::2], edges[1::2] + 1
    lens = stops - starts
    inside = int((lens * (lens - 1) // 2).sum())
    mark = np.zeros(n + 1, dtype=np.int64)
    mark[starts] = starts + stops - 1
    mark[stops] -= starts + stops - 1
    offs = np.cumsum(mark[:-1])
    idx = np.arange(n)
    return a[np.where(offs != 0, offs - idx, idx)], inside


def inversion_count(images) -> int:
    """Number of pairs ``i < j`` with ``a[i] > a[j]``.

    Bottom-up natural merge: descending segments are reversed first, then the
    ascending runs are merged pairwise, counting cross inversions with a
    vectorised ``searchsorted``.
    """
    a = np.asarray(images, dtype=np.int64)
    n = a.size
    if n < 2:
        return 0
    d = a[1:] < a[:-1]
    nd = int(np.count_nonzero(d))
    if nd == 0:
        return 0
    if nd == n - 1:
        return n * (n - 1) // 2
    total = 0
    if nd > 2:
        a, total = _reverse_descending(a, d)
        d = a[1:] < a[:-1]
    starts = np.flatnonzero(d) + 1
    if starts.size == 1:
        s = int(starts[0])
        return total + s * (n - s) - int(np.searchsorted(a[:s], a[s:], side="right").sum())
    span = int(a.max()) + 1
    while starts.size:
        run_id = np.zeros(n, dtype=np.int64)
        run_id[starts] = 1
        np.cumsum(run_id, out=run_id)
        pair = run_id >> 1
        right = (run_id & 1).astype(bool)
        left = ~right
        key = pair * span + a
        lend = np.searchsorted(pair[left], pair[right], side="right")
        pos = np.searchsorted(key[left], key[right], side="right")
        total += int((lend - pos).sum())
        key.sort()
        a = key - pair * span
        starts = np.flatnonzero(np.diff(pair)) + 1
    return total


def coxeter(p: Perm) -> Dist:
    """Normalised inversion count ``2 inv(p) / (n (n-1))``; 0 in degree 1."""
    n = p.n
    if n < 2:
        return Fraction(0)
    return Fraction(2 * inversion_count(p.images), n * (n - 1))


def block(u: Perm, i: int, j: int, n: int, r: int) -> PartialPerm:
    """The ``(i, j)`` piece of ``u`` on degree ``n r``: ``t -> t'`` where ``u(j n + t) = i n + t'``."""
    if n < 1 or r < 1 or u.n != n * r:
        raise ValueError(f"degree {u.n} is not {n} x {r}")
    if not (0 <= i < r and 0 <= j < r):
        raise ValueError("block index out of range")
    seg = u.images[j * n:(j + 1) * n]
    out = np.where(seg // n == i, seg - i * n, UNDEFINED)
    return PartialPerm(out, check=False)


def complete(q: PartialPerm) -> Perm:
    """Extend ``q`` to a permutation; undefined points take unused values in ascending order."""
    images = q.images.copy()
    undefined = np.flatnonzero(images == UNDEFINED)
    if undefined.size:
        used = np.zeros(q.n, dtype=bool)
        used[images[images != UNDEFINED]] = True
        images[undefined] = np.flatnonzero(~used)
    return Perm(images, check=False)


def range_projection(q: PartialPerm) -> Subset:
    mask = np.zeros(q.n, dtype=bool)
    mask[q.images[q.defined]] = True
    return Subset.from_mask(mask)


def relabel_perm(S: Subset) -> Perm:
    """Canonical relabel: members of ``S`` ascending to ``0..|S|-1``, the rest after them."""
    order = np.concatenate([np.flatnonzero(S.mask), np.flatnonzero(~S.mask)])
    out = np.empty(S.n, dtype=np.int64)
    out[order] = np.arange(S.n)
    return Perm(out, check=False)
