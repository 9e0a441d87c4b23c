"""Exhaustive small-degree counts behind the counting propositions.

Every count walks P_n in lexicographic image order (see
:mod:`soficperm.enumeration`) and returns a :class:`CountReport` comparing
the exact count with the stated bound.  Bounds that are asymptotic ("for n
large enough") are labelled ``ASYMPTOTIC_REGIME_ONLY`` unless the explicit
inequalities used in their proofs already hold at this ``n``; the raw
comparison is always kept in ``comparison``.
"""
from __future__ import annotations

import enum
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Optional

import mpmath
import numpy as np

from . import limits
from .enumeration import ORDER, all_inverses, all_perms, check_limit, chunked_concat
from .perm import GenTuple, Perm, coxeter, cycle, hamming
from .serialize import fmt_rational, to_jsonable
from .words import BudgetExceeded, ball_size

_PREC_BITS = 128
WITNESS_CAP = 64


class Satisfied(str, enum.Enum):
    STRICT = "STRICT"
    EQUAL = "EQUAL"
    VIOLATED = "VIOLATED"
    ASYMPTOTIC_REGIME_ONLY = "ASYMPTOTIC_REGIME_ONLY"


@dataclass(frozen=True)
class Bound:
    """A right-hand side: exact when rational, otherwise a 128-bit float string."""

    exact: Optional[Fraction]
    approx: str
    formula: str
    mp: object = field(default=None, compare=False, repr=False)

    def __str__(self) -> str:
        return fmt_rational(self.exact) if self.exact is not None else self.approx

    def to_json(self) -> dict:
        return {"value": str(self), "exact": self.exact is not None, "formula": self.formula}


def _mp(x) -> mpmath.mpf:
    with mpmath.workprec(_PREC_BITS):
        if isinstance(x, Fraction):
            return mpmath.mpf(x.numerator) / x.denominator
        return mpmath.mpf(x)


def _exact_root(n: int, q: int) -> Optional[int]:
    r = round(n ** (1.0 / q))
    for cand in (r - 1, r, r + 1):
        if cand >= 0 and cand ** q == n:
            return cand
    return None


def rational_power(n: int, e: Fraction):
    """``n ** e`` as a Fraction when rational, else an mpf at 128 bits."""
    e = Fraction(e)
    root = _exact_root(n, e.denominator)
    if root is not None:
        return Fraction(root) ** e.numerator
    with mpmath.workprec(_PREC_BITS):
        return mpmath.power(n, _mp(e))


def _bound(value, formula: str) -> Bound:
    if isinstance(value, (int, Fraction)):
        value = Fraction(value)
        with mpmath.workprec(_PREC_BITS):
            approx = mpmath.nstr(_mp(value), 25)
        return Bound(value, approx, formula)
    with mpmath.workprec(_PREC_BITS):
        return Bound(None, mpmath.nstr(value, 25), formula, mp=value)


def compare(count: int, bound: Bound, direction: str) -> Satisfied:
    """``direction='upper'``: the claim is ``count < bound``; ``'lower'``: ``count > bound``."""
    if bound.exact is not None:
        diff = Fraction(count) - bound.exact
    else:
        # an irrational bound can never be met with equality
        with mpmath.workprec(_PREC_BITS):
            diff = mpmath.mpf(count) - (bound.mp if bound.mp is not None else mpmath.mpf(bound.approx))
            diff = Fraction(1 if diff > 0 else -1)
    if diff == 0:
        return Satisfied.EQUAL
    ok = diff < 0 if direction == "upper" else diff > 0
    return Satisfied.STRICT if ok else Satisfied.VIOLATED


@dataclass
class CountReport:
    prop: str
    n: int
    parameter: Fraction
    count: int
    bound: Bound
    satisfied: Satisfied
    elapsed: float = 0.0
    comparison: Optional[Satisfied] = None
    direction: str = "upper"
    hypothesis: Optional[bool] = None
    regime: Optional[bool] = None
    witnesses: list = field(default_factory=list)
    witness_total: int = 0
    notes: str = ""
    enumeration: str = ORDER

    def csv_row(self) -> dict:
        return {
            "n": self.n,
            "parameter": fmt_rational(self.parameter),
            "count": self.count,
            "bound": str(self.bound),
            "verdict": self.satisfied.value,
            "seconds": f"{self.elapsed:.4f}",
        }

    def to_json(self) -> dict:
        # timing is left out so repeated runs are byte-identical
        return {
            "prop": self.prop,
            "n": self.n,
            "parameter": fmt_rational(self.parameter),
            "count": self.count,
            "bound": self.bound.to_json(),
            "satisfied": self.satisfied.value,
            "comparison": (self.comparison or self.satisfied).value,
            "direction": self.direction,
            "hypothesis": self.hypothesis,
            "regime": self.regime,
            "witnesses": to_jsonable(self.witnesses),
            "witness_total": self.witness_total,
            "notes": self.notes,
            "enumeration": self.enumeration,
        }


def _finish(prop, n, param, count, bound, direction, start, asymptotic=False, regime=None,
            hypothesis=None, witnesses=(), total=0, notes="") -> CountReport:
    raw = compare(count, bound, direction)
    verdict = raw
    if asymptotic and not regime:
        verdict = Satisfied.ASYMPTOTIC_REGIME_ONLY
    return CountReport(prop, n, Fraction(param), count, bound, verdict, time.perf_counter() - start,
                       comparison=raw, direction=direction, hypothesis=hypothesis, regime=regime,
                       witnesses=list(witnesses), witness_total=total, notes=notes)


def _gt(arr, x: Fraction):
    """Elementwise ``arr > x`` for an integer array and an exact rational."""
    x = Fraction(x)
    return arr * x.denominator > x.numerator


def _lt(arr, x: Fraction):
    x = Fraction(x)
    return arr * x.denominator < x.numerator


def _strict_threshold(n: int, eps: Fraction) -> int:
    """Largest mismatch count ``m`` with ``m / n < eps``."""
    return math.ceil(eps * n) - 1


def _members(mask: np.ndarray, n: int) -> list:
    rows = np.flatnonzero(mask)[:WITNESS_CAP]
    P = all_perms(n)
    return [Perm(P[r], check=False) for r in rows]


# -- Hamming balls -----------------------------------------------------------

def count_hamming_ball(x: Perm, eps, limit: int = limits.SINGLE_LOOP) -> CountReport:
    """``|{y : d_H(x, y) < eps}|`` against ``n^floor(n eps)``."""
    start = time.perf_counter()
    eps = Fraction(eps)
    n = x.n
    check_limit(n, limit, "Hamming ball")
    P = all_perms(n)
    thr = _strict_threshold(n, eps)
    xi = x.images.astype(P.dtype)
    mask = chunked_concat(P.shape[0], lambda lo, hi: np.count_nonzero(P[lo:hi] != xi, axis=1) <= thr)
    count = int(np.count_nonzero(mask))
    bound = _bound(Fraction(n) ** math.floor(n * eps), "n^floor(n eps)")
    return _finish("P5.12", n, eps, count, bound, "upper", start,
                   witnesses=_members(mask, n), total=count)


def count_cycle_commuting(n: int, eps, limit: int = limits.SINGLE_LOOP) -> CountReport:
    """``|{y : d_H(a y, y a) < eps}|`` against ``n^(floor(n eps) + 1)``."""
    start = time.perf_counter()
    eps = Fraction(eps)
    check_limit(n, limit, "cycle near-commutant")
    mask = near_commutant_mask(cycle(n), eps)
    count = int(np.count_nonzero(mask))
    bound = _bound(Fraction(n) ** (math.floor(n * eps) + 1), "n^(floor(n eps)+1)")
    return _finish("P5.13", n, eps, count, bound, "upper", start,
                   witnesses=_members(mask, n), total=count)


def commutator_mismatch(b: Perm, lo: int = 0, hi: Optional[int] = None) -> np.ndarray:
    """``n d_H(b c, c b)`` for rows ``c`` of P_n in ``[lo, hi)``."""
    P = all_perms(b.n)[lo:hi]
    bi = b.images.astype(P.dtype)
    return np.count_nonzero(bi[P] != P[:, bi], axis=1)


def near_commutant_mask(b: Perm, delta) -> np.ndarray:
    thr = _strict_threshold(b.n, Fraction(delta))
    return chunked_concat(math.factorial(b.n), lambda lo, hi: commutator_mismatch(b, lo, hi) <= thr)


def near_commuting_regime(n: int, delta: Fraction) -> bool:
    """Whether the explicit inequality closing the commuting-count proof holds at ``n``:
    ``(5 delta n - 1) ln((1 - 11 delta) n) > 4 n delta ln n``."""
    base = (1 - 11 * delta) * n
    if base <= 1:
        return False
    with mpmath.workprec(_PREC_BITS):
        lhs = (5 * _mp(delta) * n - 1) * mpmath.log(_mp(base))
        rhs = 4 * n * _mp(delta) * mpmath.log(n)
        return bool(lhs > rhs)


def count_near_commuting(b: Perm, delta, limit: int = limits.SINGLE_LOOP) -> CountReport:
    """``|{c : d_H(b c, c b) < delta}|`` against ``n! / n^(4 n delta)``."""
    start = time.perf_counter()
    delta = Fraction(delta)
    n = b.n
    check_limit(n, limit, "near-commutant")
    mask = near_commutant_mask(b, delta)
    count = int(np.count_nonzero(mask))
    hyp = hamming(b, Perm.identity(n)) > 11 * delta
    power = rational_power(n, 4 * n * delta)
    if isinstance(power, Fraction):
        rhs = Fraction(math.factorial(n)) / power
    else:
        with mpmath.workprec(_PREC_BITS):
            rhs = mpmath.factorial(n) / power
    bound = _bound(rhs, "n!/n^(4 n delta)")
    vacuous = compare(math.factorial(n), bound, "upper") is not Satisfied.STRICT
    regime = bool(hyp) and not vacuous and near_commuting_regime(n, delta)
    notes = "" if hyp else "hypothesis d_H(b,1) > 11 delta fails"
    return _finish("P3.5", n, delta, count, bound, "upper", start, asymptotic=True, regime=regime,
                   hypothesis=bool(hyp), witnesses=_members(mask, n), total=count, notes=notes)


# -- conjugacy-distance balls -------------------------------------------------

def s_ball(b: Perm, lam, limit: int = limits.SBALL):
    """Members ``c`` with ``d_S((a, b), (a, c)) < lam``, each with a conjugator and its value.

    Only conjugators ``p`` with ``d_H(a, p a p^-1) < lam`` can contribute, so
    the outer loop runs over that near-centraliser.
    """
    lam = Fraction(lam)
    n = b.n
    check_limit(n, limit, "d_S ball")
    P = all_perms(n).astype(np.int64)
    Pinv = all_inverses(n).astype(np.int64)
    a = cycle(n).images
    bi = b.images
    a_conj = np.take_along_axis(P, a[Pinv], axis=1)
    a_cost = np.count_nonzero(a_conj != a, axis=1)
    best = np.full(P.shape[0], np.iinfo(np.int64).max, dtype=np.int64)
    arg = np.zeros(P.shape[0], dtype=np.int64)
    for r in np.flatnonzero(_lt(a_cost, lam * n)):
        p, pinv = P[r], Pinv[r]
        # row c: p c p^-1
        conj = p[P[:, pinv]]
        cost = a_cost[r] + np.count_nonzero(conj != bi, axis=1)
        better = cost < best
        best[better] = cost[better]
        arg[better] = r
    hits = np.flatnonzero(_lt(best, lam * n))
    return [(Perm(P[c], check=False), Perm(P[arg[c]], check=False), Fraction(int(best[c]), n))
            for c in hits]


def count_s_ball(b: Perm, lam, limit: int = limits.SBALL) -> CountReport:
    """``|{c : d_S((a, b), (a, c)) < lam}|`` against ``n^(2 floor(n lam) + 1)``."""
    start = time.perf_counter()
    lam = Fraction(lam)
    n = b.n
    members = s_ball(b, lam, limit)
    bound = _bound(Fraction(n) ** (2 * math.floor(n * lam) + 1), "n^(2 floor(n lam)+1)")
    witnesses = [{"c": c, "conjugator": p, "value": v} for c, p, v in members]
    return _finish("S-distance", n, lam, len(members), bound, "upper", start,
                   witnesses=witnesses, total=len(members),
                   notes=f"b={b.to_list()}")


# -- L, K, T ------------------------------------------------------------------

class Membership(NamedTuple):
    member: bool
    witness: Optional[Perm]


def _moved(P: np.ndarray) -> np.ndarray:
    return np.count_nonzero(P != np.arange(P.shape[1], dtype=P.dtype), axis=1)


def l_candidates(n: int, delta) -> np.ndarray:
    """Rows ``b`` with ``d_H(b, 1) > 11 delta`` and ``d_H(a b, b a) < delta``, independent of ``c``."""
    delta = Fraction(delta)
    P = all_perms(n)
    far = _gt(_moved(P), 11 * delta * n)
    near = commutator_mismatch(cycle(n)) <= _strict_threshold(n, delta)
    return np.flatnonzero(far & near)


def in_L(c: Perm, delta, limit: int = limits.DOUBLE_LOOP) -> Membership:
    """No ``b`` far from 1 nearly commutes with both ``a`` and ``c``."""
    delta = Fraction(delta)
    n = c.n
    check_limit(n, limit, "L membership")
    P = all_perms(n)
    cand = P[l_candidates(n, delta)]
    if cand.size == 0:
        return Membership(True, None)
    ci = c.images.astype(P.dtype)
    bad = np.count_nonzero(ci[cand] != cand[:, ci], axis=1) <= _strict_threshold(n, delta)
    hits = np.flatnonzero(bad)
    if hits.size:
        return Membership(False, Perm(cand[hits[0]], check=False))
    return Membership(True, None)


def l_mask(n: int, delta, limit: int = limits.DOUBLE_LOOP) -> np.ndarray:
    """Membership of every ``c`` in P_n (lexicographic rows)."""
    delta = Fraction(delta)
    check_limit(n, limit, "L set")
    P = all_perms(n)
    thr = _strict_threshold(n, delta)
    out = np.ones(P.shape[0], dtype=bool)
    for r in l_candidates(n, delta):
        out &= commutator_mismatch(Perm(P[r], check=False)) > thr
    return out


def _k_ints(n: int, delta: Fraction):
    # d_H(b,1) <= 22 max{v/n, w/n, delta}  <=>  u q <= 22 max(v q, w q, p n)
    return delta.numerator, delta.denominator


def k_candidates(n: int, delta) -> np.ndarray:
    """Rows ``b`` that could violate the K inequality for some ``c``."""
    delta = Fraction(delta)
    p, q = _k_ints(n, delta)
    P = all_perms(n)
    u = _moved(P)
    v = commutator_mismatch(cycle(n))
    return np.flatnonzero(u * q > 22 * np.maximum(v * q, p * n))


def in_K(c: Perm, delta, limit: int = limits.DOUBLE_LOOP) -> Membership:
    """``d_H(b,1) <= 22 max{d_H(ab,ba), d_H(bc,cb), delta}`` for every ``b``."""
    delta = Fraction(delta)
    n = c.n
    check_limit(n, limit, "K membership")
    P = all_perms(n)
    cand = P[k_candidates(n, delta)]
    if cand.size == 0:
        return Membership(True, None)
    ci = c.images.astype(P.dtype)
    u = _moved(cand)
    w = np.count_nonzero(ci[cand] != cand[:, ci], axis=1)
    hits = np.flatnonzero(u > 22 * w)
    if hits.size:
        return Membership(False, Perm(cand[hits[0]], check=False))
    return Membership(True, None)


def k_mask(n: int, delta, limit: int = limits.DOUBLE_LOOP) -> np.ndarray:
    delta = Fraction(delta)
    check_limit(n, limit, "K set")
    P = all_perms(n)
    u = _moved(P)
    out = np.ones(P.shape[0], dtype=bool)
    for r in k_candidates(n, delta):
        w = commutator_mismatch(Perm(P[r], check=False))
        out &= ~(u[r] > 22 * w)
    return out


def k_mask_direct(n: int, delta, limit: int = limits.DOUBLE_LOOP) -> np.ndarray:
    """K membership straight from the definition: every ``c`` against every ``b``."""
    delta = Fraction(delta)
    check_limit(n, limit, "K set")
    p, q = _k_ints(n, delta)
    P = all_perms(n)
    u = _moved(P)
    v = commutator_mismatch(cycle(n))
    out = np.empty(P.shape[0], dtype=bool)
    for r in range(P.shape[0]):
        c = P[r]
        w = np.count_nonzero(c[P] != P[:, c], axis=1)
        out[r] = bool(np.all(u * q <= 22 * np.maximum(np.maximum(v, w) * q, p * n)))
    return out


def l_mask_direct(n: int, delta, limit: int = limits.DOUBLE_LOOP) -> np.ndarray:
    delta = Fraction(delta)
    check_limit(n, limit, "L set")
    P = all_perms(n)
    thr = _strict_threshold(n, delta)
    far = _gt(_moved(P), 11 * delta * n)
    near_a = commutator_mismatch(cycle(n)) <= thr
    out = np.empty(P.shape[0], dtype=bool)
    for r in range(P.shape[0]):
        c = P[r]
        near_c = np.count_nonzero(c[P] != P[:, c], axis=1) <= thr
        out[r] = not bool(np.any(far & near_a & near_c))
    return out


def k_depth(delta: Fraction) -> int:
    """Minimal ``k`` with ``2^(k+2) delta > 1``."""
    k = 0
    while Fraction(2) ** (k + 2) * delta <= 1:
        k += 1
    return k


def l_chain_mask(n: int, delta, limit: int = limits.DOUBLE_LOOP) -> np.ndarray:
    """``L^delta  &  L^(2 delta)  & ... &  L^(2^k delta)``."""
    delta = Fraction(delta)
    out = np.ones(math.factorial(n), dtype=bool)
    for j in range(k_depth(delta) + 1):
        out &= l_mask(n, delta * 2 ** j, limit)
    return out


def _l_regime(n: int, delta: Fraction) -> bool:
    return near_commuting_regime(n, delta) and n * delta > 1


def count_L(n: int, delta, limit: int = limits.DOUBLE_LOOP) -> CountReport:
    """``|L_n^delta|`` against ``(1 - n^(-2 delta n)) n!``."""
    start = time.perf_counter()
    delta = Fraction(delta)
    mask = l_mask(n, delta, limit)
    count = int(np.count_nonzero(mask))
    bound = _one_minus_power_bound(n, 2 * delta * n, "(1 - n^(-2 delta n)) n!")
    return _finish("L", n, delta, count, bound, "lower", start, asymptotic=True,
                   regime=_l_regime(n, delta), witnesses=_members(~mask, n), total=math.factorial(n) - count,
                   notes="witnesses are non-members")


def count_K(n: int, delta, limit: int = limits.DOUBLE_LOOP) -> CountReport:
    """``|K_n^delta|`` against ``(1 - n^(-delta n)) n!``."""
    start = time.perf_counter()
    delta = Fraction(delta)
    mask = k_mask(n, delta, limit)
    count = int(np.count_nonzero(mask))
    bound = _one_minus_power_bound(n, delta * n, "(1 - n^(-delta n)) n!")
    k = k_depth(delta)
    regime = all(_l_regime(n, delta * 2 ** j) for j in range(k + 1))
    if regime:
        regime = compare(k + 1, _bound(rational_power(n, delta * n), "n^(delta n)"), "upper") is Satisfied.STRICT
    return _finish("K", n, delta, count, bound, "lower", start, asymptotic=True, regime=regime,
                   witnesses=_members(~mask, n), total=math.factorial(n) - count,
                   notes="witnesses are non-members")


def _one_minus_power_bound(n: int, exponent: Fraction, formula: str) -> Bound:
    power = rational_power(n, exponent)
    f = math.factorial(n)
    if isinstance(power, Fraction):
        return _bound((1 - 1 / power) * f, formula)
    with mpmath.workprec(_PREC_BITS):
        return _bound((1 - 1 / power) * f, formula)


def t_radius(delta: Fraction) -> int:
    return math.floor(1 / Fraction(delta))


class TMembership(NamedTuple):
    member: bool
    coxeter: Fraction
    coxeter_ok: bool
    worst_word: object
    worst_fix: Fraction


def in_T(p: Perm, delta, budget: int = limits.WORD_BALL_BUDGET) -> TMembership:
    """``l_C(p) < 2 delta`` and every nontrivial word of length <= 1/delta in ``(a, p)``
    moves more than a ``1 - delta`` fraction of points."""
    from .words import freeness_worst

    delta = Fraction(delta)
    cox = coxeter(p)
    worst = freeness_worst(GenTuple([cycle(p.n), p]), t_radius(delta), budget)
    cox_ok = cox < 2 * delta
    # d_H(w, 1) > 1 - delta  <=>  fixed fraction < delta
    return TMembership(cox_ok and worst.defect < delta, cox, cox_ok, worst.word, worst.defect)


def t_mask(n: int, delta, limit: int = limits.SINGLE_LOOP) -> np.ndarray:
    delta = Fraction(delta)
    check_limit(n, limit, "T set")
    P = all_perms(n).astype(np.int64)
    N = P.shape[0]
    radius = t_radius(delta)
    if ball_size(2, radius) > limits.WORD_BALL_BUDGET:
        raise BudgetExceeded(f"ball of radius {radius} exceeds budget {limits.WORD_BALL_BUDGET}")
    inv = np.zeros(N, dtype=np.int64)
    for i in range(n):
        for j in range(i + 1, n):
            inv += P[:, i] > P[:, j]
    # l_C < 2 delta  <=>  inv < delta n (n-1)
    ok = _lt(inv, delta * n * (n - 1)) if n > 1 else np.full(N, True)
    a = cycle(n).images
    a_inv = np.roll(np.arange(n), 1)
    Pinv = all_inverses(n).astype(np.int64)
    rows = np.arange(N)[:, None]
    letters = {(0, 1): np.broadcast_to(a, (N, n)), (0, -1): np.broadcast_to(a_inv, (N, n)),
               (1, 1): P, (1, -1): Pinv}
    fix_lim = delta * n   # need fixed count < delta n
    ar = np.arange(n)
    stack = [((), np.broadcast_to(ar, (N, n)))]
    while stack:
        word, img = stack.pop()
        if len(word) >= radius:
            continue
        for letter, L in letters.items():
            if word and word[-1] == (letter[0], -letter[1]):
                continue
            new = img[rows, L]
            fixed = np.count_nonzero(new == ar, axis=1)
            ok &= _lt(fixed, fix_lim)
            stack.append((word + (letter,), new))
    return ok


def count_T(n: int, delta, limit: int = limits.SINGLE_LOOP) -> CountReport:
    """``|T_n^delta|`` against ``delta^n n!``."""
    start = time.perf_counter()
    delta = Fraction(delta)
    mask = t_mask(n, delta, limit)
    count = int(np.count_nonzero(mask))
    bound = _bound(delta ** n * math.factorial(n), "delta^n n!")
    return _finish("T", n, delta, count, bound, "lower", start, asymptotic=True, regime=False,
                   witnesses=_members(mask, n), total=count,
                   notes="no explicit threshold for n is available; comparison is informative only")
