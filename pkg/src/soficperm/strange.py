"""Builders for pairwise-far expander families and strange candidates.

A strange candidate is a block-diagonal permutation ``p`` with small Coxeter
length such that ``(a_n, p)`` is nearly free on short words (membership in
T), together with evidence that every ``b`` nearly commuting with ``a_n``
and ``p`` is close to the identity (membership in K).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from . import limits
from .census import TMembership, in_K, in_T, t_radius
from .conjugacy import anneal, s_distance_exact
from .expansion import ExpansionCertificate, Verdict, check_expander
from .perm import GenTuple, Perm, coxeter, cycle, power
from .serialize import to_jsonable
from .words import Word, freeness_defect


# -- almost disjoint sets -----------------------------------------------------

def almost_disjoint_set(t, length: int) -> list[int]:
    """The first ``length`` elements of ``{floor(10^k t) : k >= 1}``."""
    t = Fraction(t)
    if not Fraction(1, 10) <= t < 1:
        raise ValueError("t must lie in [1/10, 1)")
    return [math.floor(10 ** k * t) for k in range(1, length + 1)]


def almost_disjoint_family(count: int, seed: int = 0, length: int = 8, digits: int = 6):
    """``count`` distinct seeded parameters ``t`` with their truncated sets.

    Parameters are decimals with ``digits`` digits drawn uniformly from
    [1/10, 1).  Returns a list of ``(t, set)`` pairs sorted by ``t``.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    lo, hi = 10 ** (digits - 1), 10 ** digits
    if count > hi - lo:
        raise ValueError(f"only {hi - lo} parameters with {digits} digits")
    rng = np.random.default_rng(seed)
    chosen: set[int] = set()
    while len(chosen) < count:
        chosen.add(int(rng.integers(lo, hi)))
    ts = sorted(Fraction(c, hi) for c in chosen)
    return [(t, almost_disjoint_set(t, length)) for t in ts]


def level_index(F, k: int) -> Optional[int]:
    """``max{i in F : i <= k}``, or None when ``F`` has nothing below ``k``."""
    below = [i for i in F if i <= k]
    return max(below) if below else None


# -- far expander families ----------------------------------------------------

@dataclass
class FarExpanderFamily:
    n: int
    members: list[Perm]
    lambda_: Fraction
    separation: Fraction
    radius: int
    pairwise_evidence: list
    expander_certs: list[ExpansionCertificate]
    freeness: list[Fraction]
    requested: int
    attempts: int
    seed: int
    complete: bool

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "members": [m.to_list() for m in self.members],
            "lambda": to_jsonable(self.lambda_),
            "separation": to_jsonable(self.separation),
            "radius": self.radius,
            "pairwise_evidence": to_jsonable(self.pairwise_evidence),
            "expander_certs": [c.to_json() for c in self.expander_certs],
            "freeness": to_jsonable(self.freeness),
            "requested": self.requested,
            "attempts": self.attempts,
            "seed": self.seed,
            "complete": self.complete,
        }


def _pair_distance(x: GenTuple, y: GenTuple, exact_limit: int, budget: int, seed: int) -> dict:
    if x.n <= exact_limit:
        res = s_distance_exact(x, y, exact_limit)
    else:
        res = anneal(x, y, budget=budget, seed=seed)
    return {"value": res.value, "mode": res.mode.value, "conjugator": res.witness}


def pick_far_expanders(n: int, k: int, lam=Fraction(1, 10), radius: int = 2, seed: int = 0,
                       budget: int = 200, separation=None, exact_limit: int = limits.SDIST_EXACT,
                       anneal_budget: int = 20_000, expander_trials: int = 64) -> FarExpanderFamily:
    """Rejection-sample ``c_1..c_k`` with ``(a_n, c_i)`` expanding, nearly free
    (defect below ``1/k``) and pairwise ``d_S`` above ``separation``.

    ``budget`` caps the number of candidates drawn; on exhaustion the family
    found so far comes back with ``complete = False``.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    lam = Fraction(lam)
    sep = lam if separation is None else Fraction(separation)
    rng = np.random.default_rng(seed)
    a = cycle(n)
    members: list[Perm] = []
    certs, frees, rows = [], [], []
    attempts = 0
    while len(members) < k and attempts < budget:
        attempts += 1
        c = Perm(rng.permutation(n), check=False)
        if any(c == m for m in members):
            continue
        t = GenTuple([a, c])
        cert = check_expander(t, lam, seed=seed + attempts, trials=expander_trials)
        if cert.verdict is Verdict.REFUTED:
            continue
        fd = freeness_defect(t, radius)
        if fd >= Fraction(1, k):
            continue
        dists = [_pair_distance(GenTuple([a, m]), t, exact_limit, anneal_budget, seed + attempts)
                 for m in members]
        if any(d["value"] <= sep for d in dists):
            continue
        members.append(c)
        certs.append(cert)
        frees.append(fd)
        rows.append(dists)
    size = len(members)
    matrix: list = [[None] * size for _ in range(size)]
    for j, dists in enumerate(rows):
        for i, d in enumerate(dists):
            matrix[i][j] = matrix[j][i] = d
    return FarExpanderFamily(n, members, lam, sep, radius, matrix, certs, frees, k, attempts,
                             seed, size == k)


# -- T candidates -------------------------------------------------------------

class TriesExhausted(RuntimeError):
    pass


def block_sizes(n: int, delta) -> list[int]:
    """``k = floor(1/delta)`` blocks of size ``floor(n/k)``; the last one takes the remainder."""
    k = t_radius(Fraction(delta))
    if k < 1 or n < k:
        raise ValueError(f"need n >= floor(1/delta) = {k}")
    m = n // k
    return [m] * (k - 1) + [n - m * (k - 1)]


def is_block_diagonal(p: Perm, sizes) -> bool:
    start = 0
    for s in sizes:
        seg = p.images[start:start + s]
        if np.any(seg < start) or np.any(seg >= start + s):
            return False
        start += s
    return True


def coxeter_block_bound(n: int, sizes) -> Fraction:
    """Largest Coxeter length of a permutation preserving the given blocks."""
    if n < 2:
        return Fraction(0)
    return Fraction(sum(s * (s - 1) for s in sizes), n * (n - 1))


@dataclass
class TCandidate:
    p: Perm
    sizes: list[int]
    membership: TMembership
    tries: int


def build_T_candidate(n: int, delta, seed: int = 0, tries: int = 100) -> TCandidate:
    delta = Fraction(delta)
    sizes = block_sizes(n, delta)
    rng = np.random.default_rng(seed)
    for attempt in range(1, tries + 1):
        parts, start = [], 0
        for s in sizes:
            parts.append(rng.permutation(s) + start)
            start += s
        p = Perm(np.concatenate(parts), check=False)
        mem = in_T(p, delta)
        if mem.member:
            return TCandidate(p, sizes, mem, attempt)
    raise TriesExhausted(f"no T candidate in {tries} tries (n={n}, delta={delta})")


# -- K refutation -------------------------------------------------------------

CATEGORIES = ("powers_of_a", "near_powers_of_a", "powers_of_p", "small_cycles",
              "block_supported", "block_swaps", "uniform")


def _structured(n: int, p: Perm, sizes, rng: np.random.Generator) -> dict:
    ar = np.arange(n)
    a = cycle(n)
    out: dict[str, list[np.ndarray]] = {c: [] for c in CATEGORIES}
    for e in range(1, n):
        out["powers_of_a"].append(power(a, e).images)
    for e in range(n):
        img = power(a, e).images.copy()
        i, j = rng.choice(n, size=2, replace=False)
        img[[i, j]] = img[[j, i]]
        out["near_powers_of_a"].append(img)
    for e in range(1, min(n, 64)):
        out["powers_of_p"].append(power(p, e).images)
    for s in range(2, min(n, 8) + 1):
        for _ in range(32):
            pts = rng.choice(n, size=s, replace=False)
            img = ar.copy()
            img[pts] = np.roll(pts, 1)
            out["small_cycles"].append(img)
    starts = np.cumsum([0] + list(sizes[:-1]))
    for start, s in zip(starts, sizes):
        for _ in range(32):
            img = ar.copy()
            img[start:start + s] = rng.permutation(s) + start
            out["block_supported"].append(img)
    for x in range(len(sizes)):
        for y in range(x + 1, len(sizes)):
            m = min(sizes[x], sizes[y])
            img = ar.copy()
            lo, hi = starts[x] + np.arange(m), starts[y] + np.arange(m)
            img[lo], img[hi] = hi, lo
            out["block_swaps"].append(img)
    return out


@dataclass
class KRefutation:
    mode: str                     # "exhaustive" or "sampled"
    verdict: str                  # MEMBER / NON_MEMBER / NO_REFUTATION / REFUTED
    trials: int
    seed: Optional[int]
    witness: Optional[Perm] = None
    categories: dict = field(default_factory=dict)
    probe_count: int = 0
    probe_failures: int = 0

    def to_json(self) -> dict:
        return {
            "mode": self.mode,
            "verdict": self.verdict,
            "trials": self.trials,
            "seed": self.seed,
            "witness": to_jsonable(self.witness),
            "categories": dict(self.categories),
            "probe_count": self.probe_count,
            "probe_failures": self.probe_failures,
        }


def k_sample(n: int, p: Perm, sizes, trials: int, seed: int):
    """The seeded batch of ``b``'s used for sampled K refutation: rows and category labels."""
    rng = np.random.default_rng([seed, 1])
    structured = _structured(n, p, sizes, rng)
    rows, labels = [], []
    for cat in CATEGORIES[:-1]:
        rows.extend(structured[cat])
        labels.extend([cat] * len(structured[cat]))
    extra = max(trials - len(rows), 0)
    if extra:
        uni = np.argsort(rng.random((extra, n)), axis=1)
        rows.extend(uni)
        labels.extend(["uniform"] * extra)
    return np.asarray(rows, dtype=np.int64), labels


def k_evaluate(B: np.ndarray, p: Perm, delta: Fraction):
    """Per-row (violates K, in the commutant probe, probe failure) for a batch of ``b``'s."""
    n = p.n
    ar = np.arange(n)
    a = cycle(n).images
    pi = p.images
    u = np.count_nonzero(B != ar, axis=1)
    v = np.count_nonzero(a[B] != B[:, a], axis=1)
    w = np.count_nonzero(pi[B] != B[:, pi], axis=1)
    num, den = delta.numerator, delta.denominator
    violate = u * den > 22 * np.maximum(np.maximum(v, w) * den, num * n)
    probe = (v * den < num * n) & (w * den < num * n)
    fail = probe & (u * den > 22 * num * n)
    return violate, probe, fail


def k_refute_sampled(p: Perm, delta, sizes, trials: int, seed: int) -> KRefutation:
    delta = Fraction(delta)
    B, labels = k_sample(p.n, p, sizes, trials, seed)
    violate, probe, fail = k_evaluate(B, p, delta)
    cats: dict[str, int] = {}
    for lab in labels:
        cats[lab] = cats.get(lab, 0) + 1
    hits = np.flatnonzero(violate)
    witness = Perm(B[hits[0]], check=False) if hits.size else None
    return KRefutation("sampled", "REFUTED" if hits.size else "NO_REFUTATION", len(labels), seed,
                       witness, cats, int(np.count_nonzero(probe)), int(np.count_nonzero(fail)))


def k_exhaustive(p: Perm, delta, limit: int = limits.DOUBLE_LOOP) -> KRefutation:
    mem = in_K(p, delta, limit)
    return KRefutation("exhaustive", "MEMBER" if mem.member else "NON_MEMBER",
                       math.factorial(p.n), None, mem.witness)


# -- strange candidates -------------------------------------------------------

@dataclass
class StrangeCandidate:
    p: Perm
    delta: Fraction
    coxeter: Fraction
    coxeter_bound: Fraction
    sizes: list[int]
    block_diagonal: bool
    freeness_word: Word
    freeness_value: Fraction
    t_member: bool
    t_tries: int
    k_refutation: KRefutation
    seed: int

    @property
    def accepted(self) -> bool:
        return self.t_member and self.k_refutation.verdict in ("MEMBER", "NO_REFUTATION")

    def to_json(self) -> dict:
        return {
            "p": self.p.to_list(),
            "n": self.p.n,
            "delta": to_jsonable(self.delta),
            "coxeter": to_jsonable(self.coxeter),
            "coxeter_bound": to_jsonable(self.coxeter_bound),
            "sizes": list(self.sizes),
            "block_diagonal": self.block_diagonal,
            "freeness_worst": {"word": str(self.freeness_word), "fix_trace": to_jsonable(self.freeness_value)},
            "radius": t_radius(self.delta),
            "t_member": self.t_member,
            "t_tries": self.t_tries,
            "k_refutation": self.k_refutation.to_json(),
            "seed": self.seed,
            "accepted": self.accepted,
        }


def build_strange_candidate(n: int, delta, seed: int = 0, t_tries: int = 100,
                            k_trials: int = 10_000, k_limit: int = limits.DOUBLE_LOOP) -> StrangeCandidate:
    delta = Fraction(delta)
    cand = build_T_candidate(n, delta, seed, t_tries)
    p = cand.p
    if n <= k_limit:
        kref = k_exhaustive(p, delta, k_limit)
    else:
        kref = k_refute_sampled(p, delta, cand.sizes, k_trials, seed)
    mem = cand.membership
    return StrangeCandidate(
        p=p, delta=delta, coxeter=coxeter(p), coxeter_bound=coxeter_block_bound(n, cand.sizes),
        sizes=cand.sizes, block_diagonal=is_block_diagonal(p, cand.sizes),
        freeness_word=mem.worst_word, freeness_value=mem.worst_fix, t_member=mem.member,
        t_tries=cand.tries, k_refutation=kref, seed=seed,
    )
