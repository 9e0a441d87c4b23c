"""Monte-Carlo rate tables: how often random ``c`` makes ``(a_n, c)`` expand or look free."""
from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import limits
from .expansion import Verdict, check_expander
from .perm import GenTuple, Perm, cycle
from .serialize import fmt_rational
from .words import freeness_defect


@dataclass
class RateRow:
    table: str
    n: int
    parameter: Fraction
    samples: int
    hits: int
    mode: str
    seed: int
    elapsed: float = 0.0

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.hits, self.samples)

    def csv_row(self) -> dict:
        return {
            "table": self.table,
            "n": self.n,
            "parameter": fmt_rational(self.parameter),
            "samples": self.samples,
            "hits": self.hits,
            "fraction": f"{float(self.fraction):.6f}",
            "mode": self.mode,
            "seed": self.seed,
            "seconds": f"{self.elapsed:.4f}",
        }

    def to_json(self) -> dict:
        return {
            "table": self.table, "n": self.n, "parameter": fmt_rational(self.parameter),
            "samples": self.samples, "hits": self.hits, "fraction": fmt_rational(self.fraction),
            "mode": self.mode, "seed": self.seed,
        }


def expander_rate(n: int, lam=Fraction(1, 10), samples: int = 100, seed: int = 0,
                  limit: int = limits.EXPANDER_EXACT) -> RateRow:
    """Fraction of uniform ``c`` for which ``(a_n, c)`` is a lambda-expander.

    Exact when ``n <= limit``; above it a hit only means no refutation was found.
    """
    start = time.perf_counter()
    lam = Fraction(lam)
    rng = np.random.default_rng([seed, n])
    a = cycle(n)
    hits = 0
    for i in range(samples):
        c = Perm(rng.permutation(n), check=False)
        cert = check_expander(GenTuple([a, c]), lam, seed=seed + i, limit=limit)
        hits += cert.verdict is not Verdict.REFUTED
    mode = "exact" if n <= limit else "sampled"
    return RateRow("P5.11-rate", n, lam, samples, hits, mode, seed, time.perf_counter() - start)


def freeness_rate(n: int, radius: int = 3, target=Fraction(1, 10), samples: int = 100,
                  seed: int = 0) -> RateRow:
    """Fraction of uniform ``c`` with ``freeness_defect((a_n, c), radius) < target``."""
    start = time.perf_counter()
    target = Fraction(target)
    rng = np.random.default_rng([seed, n])
    a = cycle(n)
    hits = 0
    for _ in range(samples):
        c = Perm(rng.permutation(n), check=False)
        hits += freeness_defect(GenTuple([a, c]), radius) < target
    return RateRow("T5.20-rate", n, target, samples, hits, f"radius={radius}", seed,
                   time.perf_counter() - start)
