"""Rounding an amplified approximate intertwiner down to degree n.

Given ``u`` in P_{nr} with ``d_H(u (x_t (x) 1_r), (y_t (x) 1_r) u) < eps`` and
``y`` a lambda-expander, one of the r^2 pieces of ``u`` is almost a
permutation and its completion ``v`` satisfies
``d_H(v x_t, y_t v) < 20 k^2 eps / lambda``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .expansion import ExpansionCertificate, Verdict
from .perm import (GenTuple, Perm, block, complete, compose, hamming, hamming_rows,
                   range_projection, tensor_id)
from .serialize import tuple_digest


class Guarantee(str, enum.Enum):
    CERTIFIED = "CERTIFIED"
    NO_GUARANTEE = "NO_GUARANTEE"


@dataclass
class DeamplifyResult:
    v: Perm
    eps: Fraction
    chosen_row: int
    chosen_col: int
    tr_pj: Fraction
    achieved: Fraction
    certified_bound: Fraction
    guarantee: Guarantee
    n: int
    r: int
    k: int
    lambda_: Fraction
    block_sums_ok: bool
    trace_floor: Fraction
    reasons: list[str] = field(default_factory=list)
    # E[t][i][j] = n * eps^t_{i,j},  D[t][j][i] = n * delta^t_{j,i}
    eps_matrix: Optional[list] = None
    delta_matrix: Optional[list] = None

    def to_json(self, verbose: bool = False) -> dict:
        from .serialize import to_jsonable

        out = {
            "v": self.v.to_list(),
            "eps": to_jsonable(self.eps),
            "chosen_row": self.chosen_row,
            "chosen_col": self.chosen_col,
            "tr_pj": to_jsonable(self.tr_pj),
            "achieved": to_jsonable(self.achieved),
            "certified_bound": to_jsonable(self.certified_bound),
            "guarantee": self.guarantee.value,
            "n": self.n, "r": self.r, "k": self.k,
            "lambda": to_jsonable(self.lambda_),
            "block_sums_ok": self.block_sums_ok,
            "trace_floor": to_jsonable(self.trace_floor),
            "reasons": list(self.reasons),
        }
        if verbose:
            out["eps_matrix"] = self.eps_matrix
            out["delta_matrix"] = self.delta_matrix
            out["matrix_denominator"] = self.n
        return out


def _split(x: GenTuple, y: GenTuple, u: Perm) -> tuple[int, int]:
    if x.n != y.n or x.k != y.k:
        raise ValueError("x and y must share degree and length")
    if x.k == 0:
        raise ValueError("empty tuple")
    n = x.n
    if u.n % n:
        raise ValueError(f"degree {u.n} is not a multiple of {n}")
    return n, u.n // n


def intertwiner_defect(x: GenTuple, y: GenTuple, u: Perm) -> Fraction:
    """``max_t d_H(u (x_t (x) 1_r), (y_t (x) 1_r) u)``."""
    n, r = _split(x, y, u)
    return max(hamming(compose(u, tensor_id(xt, r)), compose(tensor_id(yt, r), u))
               for xt, yt in zip(x.perms, y.perms))


def block_defects(x: GenTuple, y: GenTuple, u: Perm):
    """Integer matrices ``E[t, i, j] = n eps^t_{i,j}`` and ``D[t, j, i] = n delta^t_{j,i}``."""
    n, r = _split(x, y, u)
    E = np.zeros((x.k, r, r), dtype=np.int64)
    D = np.zeros((x.k, r, r), dtype=np.int64)
    for i in range(r):
        for j in range(r):
            q = block(u, i, j, n, r)
            qa = q.adjoint()
            for t, (xt, yt) in enumerate(zip(x.perms, y.perms)):
                E[t, i, j] = hamming_rows(compose(q, xt), compose(yt, q)) * n
                D[t, j, i] = hamming_rows(compose(xt, qa), compose(qa, yt)) * n
    return E, D


def certificate_applies(cert: Optional[ExpansionCertificate], y: GenTuple, lam: Fraction) -> bool:
    if cert is None or cert.verdict is not Verdict.EXACT_PASS:
        return False
    if cert.digest and cert.digest != tuple_digest(y):
        return False
    # expansion at a larger lambda implies it at every smaller one
    return cert.lambda_ >= lam


def deamplify(x: GenTuple, y: GenTuple, u: Perm, lam, y_cert: Optional[ExpansionCertificate] = None
              ) -> DeamplifyResult:
    lam = Fraction(lam)
    if lam <= 0:
        raise ValueError("lambda must be positive")
    n, r = _split(x, y, u)
    k = x.k
    eps = intertwiner_defect(x, y, u)
    E, D = block_defects(x, y, u)

    # row i: worst (over t) of the two block sums; ties go to the lowest index
    row_sum_e = E.sum(axis=2)           # [t, i] = n sum_j eps^t_{i,j}
    row_sum_d = D.sum(axis=1)           # [t, i] = n sum_j delta^t_{j,i}
    worst = np.maximum(row_sum_e, row_sum_d).max(axis=0)
    i = int(np.argmin(worst))

    pieces = [block(u, i, j, n, r) for j in range(r)]
    sizes = [q.defined_count() for q in pieces]
    j = int(np.argmax(sizes))
    tr_pj = range_projection(pieces[j]).trace()
    v = complete(pieces[j])
    achieved = max(hamming(compose(v, xt), compose(yt, v)) for xt, yt in zip(x.perms, y.perms))
    bound = 20 * k * k * eps / lam

    limit = 4 * k * eps * n
    block_sums_ok = bool(np.all(row_sum_e[:, i] <= limit) and np.all(row_sum_d[:, i] <= limit))

    reasons = []
    if not certificate_applies(y_cert, y, lam):
        reasons.append("no exact expander certificate for y at this lambda")
    if tr_pj < Fraction(1, 2):
        reasons.append("largest piece has trace below 1/2")
    if achieved > bound:
        reasons.append("achieved defect exceeds 20 k^2 eps / lambda")
    if not block_sums_ok:
        reasons.append("selected row breaks the 4 k eps block-sum inequality")
    guarantee = Guarantee.NO_GUARANTEE if reasons else Guarantee.CERTIFIED

    return DeamplifyResult(
        v=v, eps=eps, chosen_row=i, chosen_col=j, tr_pj=tr_pj, achieved=achieved,
        certified_bound=bound, guarantee=guarantee, n=n, r=r, k=k, lambda_=lam,
        block_sums_ok=block_sums_ok, trace_floor=1 - 8 * k * k * eps / lam, reasons=reasons,
        eps_matrix=E.tolist(), delta_matrix=D.tolist(),
    )


def block_shuffle(n: int, order) -> Perm:
    """Permutation of ``n r`` points moving block ``b`` onto block ``order[b]``."""
    order = np.asarray(order, dtype=np.int64)
    return Perm((order[:, None] * n + np.arange(n)[None, :]).reshape(-1))


def perturb(u: Perm, m: int, rng: np.random.Generator) -> Perm:
    """Rotate the images of ``max(m, 2)`` random points (changes ``u`` at exactly that many)."""
    m = max(2, min(m, u.n))
    pts = rng.choice(u.n, size=m, replace=False)
    img = u.images.copy()
    img[pts] = img[np.roll(pts, 1)]
    return Perm(img, check=False)
