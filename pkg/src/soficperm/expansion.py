"""Lambda-expander checks for tuples of permutations.

A tuple ``(p_1..p_s)`` is a lambda-expander when every nonempty ``S`` with
``|S| <= n/2`` satisfies ``lambda |S| / n < sum_i |S xor p_i(S)| / n`` (strict).
Small degrees are decided by enumerating all subsets as bitmasks; larger
degrees only get a one-sided, seeded refutation search.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Optional

import numpy as np

from . import limits
from .enumeration import DegreeOverLimit
from .perm import GenTuple, Perm, Subset, cycle
from .serialize import tuple_digest
from .words import freeness_defect


class Verdict(str, enum.Enum):
    EXACT_PASS = "EXACT_PASS"
    REFUTED = "REFUTED"
    SAMPLED_NO_REFUTATION = "SAMPLED_NO_REFUTATION"


@dataclass
class ExpansionCertificate:
    lambda_: Fraction
    verdict: Verdict
    witness: Optional[Subset] = None
    min_ratio: Optional[Fraction] = None
    trials: int = 0
    seed: Optional[int] = None
    n: int = 0
    digest: str = ""
    mode: str = "exact"

    def to_json(self) -> dict:
        from .serialize import to_jsonable

        return {
            "lambda": to_jsonable(self.lambda_),
            "verdict": self.verdict.value,
            "witness": to_jsonable(self.witness),
            "min_ratio": to_jsonable(self.min_ratio),
            "trials": self.trials,
            "seed": self.seed,
            "n": self.n,
            "digest": self.digest,
            "mode": self.mode,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ExpansionCertificate":
        from .serialize import parse_rational, subset_from_json

        return cls(
            lambda_=parse_rational(obj["lambda"]),
            verdict=Verdict(obj["verdict"]),
            witness=subset_from_json(obj["witness"]) if obj.get("witness") else None,
            min_ratio=parse_rational(obj["min_ratio"]) if obj.get("min_ratio") is not None else None,
            trials=obj.get("trials", 0),
            seed=obj.get("seed"),
            n=obj.get("n", 0),
            digest=obj.get("digest", ""),
            mode=obj.get("mode", "exact"),
        )


def _boundary_count(t: GenTuple, mask: np.ndarray) -> int:
    total = 0
    for p in t.perms:
        image = np.zeros_like(mask)
        image[p.images[mask]] = True
        total += int(np.count_nonzero(mask ^ image))
    return total


def boundary_sum(t: GenTuple, S: Subset):
    """``sum_i |S xor p_i(S)| / n`` (the Hamming distance between the projections)."""
    if S.n != t.n:
        raise ValueError(f"degree mismatch: subset {S.n}, tuple {t.n}")
    return Fraction(_boundary_count(t, S.mask), t.n)


def violates(t: GenTuple, S: Subset, lam: Fraction) -> bool:
    """True when ``S`` is admissible and breaks the strict expander inequality."""
    size = len(S)
    if size == 0 or 2 * size > t.n:
        return False
    return lam * Fraction(size, t.n) >= boundary_sum(t, S)


def _image_masks(p: Perm, masks: np.ndarray) -> np.ndarray:
    out = np.zeros_like(masks)
    one = masks.dtype.type(1)
    for i, target in enumerate(p.images.tolist()):
        out |= ((masks >> masks.dtype.type(i)) & one) << masks.dtype.type(target)
    return out


def check_expander_exact(t: GenTuple, lam, limit: int = limits.EXPANDER_EXACT,
                         chunk: int = 1 << 18) -> ExpansionCertificate:
    """Decide expansion by enumerating every nonempty subset of size <= n/2.

    Subsets are bitmasks visited in increasing integer order; the first
    violating one is the witness.
    """
    lam = Fraction(lam)
    n = t.n
    if n > limit:
        raise DegreeOverLimit(f"exact expander check: degree {n} exceeds limit {limit}")
    if n > 62:
        raise DegreeOverLimit("bitmask enumeration needs n <= 62")
    dtype = np.uint32 if n <= 31 else np.uint64
    half = n // 2
    a, b = lam.numerator, lam.denominator
    # per subset size, the smallest boundary count seen
    best = np.full(half + 1, np.iinfo(np.int64).max, dtype=np.int64)
    total = 1 << n
    for lo in range(1, total, chunk):
        masks = np.arange(lo, min(lo + chunk, total), dtype=dtype)
        sizes = np.bitwise_count(masks).astype(np.int64)
        keep = sizes <= half
        masks, sizes = masks[keep], sizes[keep]
        if masks.size == 0:
            continue
        bnd = np.zeros(masks.size, dtype=np.int64)
        for p in t.perms:
            bnd += np.bitwise_count(masks ^ _image_masks(p, masks)).astype(np.int64)
        bad = np.flatnonzero(a * sizes >= b * bnd)
        if bad.size:
            m = int(masks[bad[0]])
            witness = Subset(n, [i for i in range(n) if m >> i & 1])
            return ExpansionCertificate(lam, Verdict.REFUTED, witness=witness, n=n,
                                        digest=tuple_digest(t), mode="exact")
        np.minimum.at(best, sizes, bnd)
    ratios = [Fraction(int(best[s]), s) for s in range(1, half + 1) if best[s] != np.iinfo(np.int64).max]
    min_ratio = min(ratios) if ratios else None
    # n == 1 has no admissible subset: vacuously an expander
    return ExpansionCertificate(lam, Verdict.EXACT_PASS, min_ratio=min_ratio, n=n,
                                digest=tuple_digest(t), mode="exact")


def _schreier_ball(t: GenTuple, root: int, size: int) -> np.ndarray:
    nbrs = [p.images for p in t.perms] + [p.inverse().images for p in t.perms]
    mask = np.zeros(t.n, dtype=bool)
    mask[root] = True
    frontier, count = [root], 1
    while frontier and count < size:
        nxt = []
        for v in frontier:
            for img in nbrs:
                w = int(img[v])
                if not mask[w]:
                    mask[w] = True
                    nxt.append(w)
                    count += 1
                    if count == size:
                        return mask
        frontier = nxt
    return mask


def _descend(t: GenTuple, mask: np.ndarray, lam: Fraction, max_steps: int, stop: bool = True):
    """Steepest single-point add/remove descent on boundary/size.  Returns (mask, boundary, violated).

    With ``stop`` the walk ends at the first violating set, otherwise at a local minimum.
    """
    n = t.n
    half = n // 2
    a, b = lam.numerator, lam.denominator
    ar = np.arange(n)
    fwd = [p.images for p in t.perms]
    bwd = [p.inverse().images for p in t.perms]
    size = int(np.count_nonzero(mask))
    bnd = _boundary_count(t, mask)
    for _ in range(max_steps):
        if stop and a * size >= b * bnd:
            return mask, bnd, True
        delta = np.zeros(n, dtype=np.int64)
        for f, g in zip(fwd, bwd):
            out_f = ~mask[f]
            in_g = mask[g]
            add = (out_f & (f != ar)).astype(np.int64) - in_g
            rem = -out_f.astype(np.int64) + (in_g & (g != ar))
            delta += np.where(mask, rem, add)
        delta *= 2
        new_size = size + np.where(mask, -1, 1)
        ok = (new_size >= 1) & (new_size <= half)
        if not ok.any():
            break
        new_bnd = bnd + delta
        ratio = np.where(ok, new_bnd / np.maximum(new_size, 1), np.inf)
        v = int(np.argmin(ratio))
        # strict improvement, checked in integers
        if not ok[v] or new_bnd[v] * size >= bnd * new_size[v]:
            break
        mask = mask.copy()
        mask[v] = ~mask[v]
        size, bnd = int(new_size[v]), int(new_bnd[v])
    return mask, bnd, a * size >= b * bnd


def _pieces(t: GenTuple, mask: np.ndarray) -> list[np.ndarray]:
    """Connected pieces of ``S`` in the Schreier graph restricted to ``S``."""
    nbrs = [p.images for p in t.perms] + [p.inverse().images for p in t.perms]
    seen = ~mask.copy()
    out = []
    for root in np.flatnonzero(mask).tolist():
        if seen[root]:
            continue
        piece = np.zeros_like(mask)
        seen[root] = piece[root] = True
        stack = [root]
        while stack:
            v = stack.pop()
            for img in nbrs:
                w = int(img[v])
                if not seen[w]:
                    seen[w] = piece[w] = True
                    stack.append(w)
        out.append(piece)
    return out


def _refine(t: GenTuple, mask: np.ndarray, lam: Fraction, max_steps: int):
    """Sharpen a violating set.

    Boundary mass is additive over the pieces of ``S`` (no generator joins two
    pieces), so the piece of least ratio still violates; it is then grown or
    trimmed to a local minimum of the ratio.
    """
    best = min(_pieces(t, mask), key=lambda m: Fraction(_boundary_count(t, m), int(m.sum())))
    return _descend(t, best, lam, max_steps, stop=False)


def refute_expander_sampled(t: GenTuple, lam, trials: int, seed: int,
                            max_steps: Optional[int] = None) -> ExpansionCertificate:
    """Seeded search for a subset breaking expansion.

    Even trials start from a uniform random subset of random size <= n/2, odd
    trials from a ball in the Schreier graph; each start is then improved by
    local descent.  Trial ``i`` draws from its own stream ``(seed, i)``.  A
    violating set is sharpened before it is reported (see ``_refine``).
    """
    lam = Fraction(lam)
    if trials < 1:
        raise ValueError("trials must be >= 1")
    n = t.n
    half = n // 2
    digest = tuple_digest(t)
    if half == 0:
        return ExpansionCertificate(lam, Verdict.SAMPLED_NO_REFUTATION, trials=trials, seed=seed,
                                    n=n, digest=digest, mode="sampled")
    steps = max_steps if max_steps is not None else 4 * n
    best = None
    for trial in range(trials):
        rng = np.random.default_rng([seed, trial])
        size = int(rng.integers(1, half + 1))
        if trial % 2 == 0:
            mask = np.zeros(n, dtype=bool)
            mask[rng.choice(n, size=size, replace=False)] = True
        else:
            mask = _schreier_ball(t, int(rng.integers(n)), size)
        mask, bnd, violated = _descend(t, mask, lam, steps)
        if violated:
            mask, bnd, violated = _refine(t, mask, lam, steps)
        sz = int(np.count_nonzero(mask))
        ratio = Fraction(bnd, sz)
        if best is None or ratio < best:
            best = ratio
        if violated:
            return ExpansionCertificate(lam, Verdict.REFUTED, witness=Subset.from_mask(mask),
                                        min_ratio=ratio, trials=trial + 1, seed=seed, n=n,
                                        digest=digest, mode="sampled")
    return ExpansionCertificate(lam, Verdict.SAMPLED_NO_REFUTATION, min_ratio=best, trials=trials,
                                seed=seed, n=n, digest=digest, mode="sampled")


def check_expander(t: GenTuple, lam, seed: int = 0, trials: int = 64,
                   limit: int = limits.EXPANDER_EXACT) -> ExpansionCertificate:
    if t.n <= limit:
        return check_expander_exact(t, lam, limit=limit)
    return refute_expander_sampled(t, lam, trials, seed)


def recheck(t: GenTuple, cert: ExpansionCertificate, limit: int = limits.EXPANDER_EXACT) -> bool:
    """Independent re-validation of a certificate against its tuple."""
    if cert.digest and cert.digest != tuple_digest(t):
        return False
    if cert.verdict is Verdict.REFUTED:
        return cert.witness is not None and violates(t, cert.witness, cert.lambda_)
    if cert.verdict is Verdict.EXACT_PASS:
        if t.n > limit:
            return False
        again = check_expander_exact(t, cert.lambda_, limit=limit)
        return again.verdict is Verdict.EXACT_PASS and again.min_ratio == cert.min_ratio and (
            cert.min_ratio is None or cert.min_ratio > cert.lambda_)
    return True


class SamplingExhausted(RuntimeError):
    def __init__(self, tries: int, failures: dict):
        super().__init__(f"no admissible sample in {tries} tries: {failures}")
        self.tries = tries
        self.failures = failures


class ExpanderSample(NamedTuple):
    tuple: GenTuple
    certificate: ExpansionCertificate
    tries: int
    freeness: Fraction


def sample_expander_pair(n: int, lam=Fraction(1, 10), radius: int = 2, max_tries: int = 20,
                         seed: int = 0, limit: int = limits.EXPANDER_EXACT,
                         freeness_target=Fraction(1, 2), sampled_trials: int = 64) -> ExpanderSample:
    """Draw uniform ``c`` until ``(a_n, c)`` expands and is free up to ``radius``."""
    if n < 2:
        raise ValueError("n must be >= 2")
    lam = Fraction(lam)
    rng = np.random.default_rng(seed)
    a = cycle(n)
    failures = {"expansion": 0, "freeness": 0}
    for attempt in range(1, max_tries + 1):
        c = Perm(rng.permutation(n), check=False)
        t = GenTuple([a, c])
        cert = check_expander(t, lam, seed=seed + attempt, trials=sampled_trials, limit=limit)
        if cert.verdict is Verdict.REFUTED:
            failures["expansion"] += 1
            continue
        fd = freeness_defect(t, radius)
        if fd >= freeness_target:
            failures["freeness"] += 1
            continue
        return ExpanderSample(t, cert, attempt, fd)
    raise SamplingExhausted(max_tries, failures)
