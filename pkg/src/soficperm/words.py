"""Reduced words in the free group F_k and their evaluation on generator tuples."""
from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterator, NamedTuple

import numpy as np

from .limits import WORD_BALL_BUDGET
from .perm import GenTuple, Perm

_LETTER = re.compile(r"x(\d+)(?:\^(-?1))?")


class BudgetExceeded(RuntimeError):
    pass


class Word(tuple):
    """A reduced word: a tuple of ``(generator, +1 | -1)`` letters, generators 0-based."""

    def __new__(cls, letters=()):
        letters = tuple((int(g), int(e)) for g, e in letters)
        for g, e in letters:
            if g < 0 or e not in (1, -1):
                raise ValueError(f"bad letter {(g, e)}")
        for (g1, e1), (g2, e2) in zip(letters, letters[1:]):
            if g1 == g2 and e1 == -e2:
                raise ValueError("word is not reduced")
        return super().__new__(cls, letters)

    @classmethod
    def parse(cls, text: str) -> "Word":
        """Parse ``"x1 x2^-1"`` (1-based generator names, as printed)."""
        text = text.replace(" ", "")
        if text in ("", "1", "e"):
            return cls()
        letters, pos = [], 0
        while pos < len(text):
            m = _LETTER.match(text, pos)
            if not m:
                raise ValueError(f"cannot parse word {text!r}")
            letters.append((int(m.group(1)) - 1, int(m.group(2) or 1)))
            pos = m.end()
        return cls(letters)

    def __str__(self) -> str:
        if not self:
            return "1"
        return "".join(f"x{g + 1}" + ("^-1" if e < 0 else "") for g, e in self)

    def inverse(self) -> "Word":
        return Word((g, -e) for g, e in reversed(self))


def reduce_concat(w1: Word, w2: Word) -> Word:
    out = list(w1)
    for g, e in w2:
        if out and out[-1] == (g, -e):
            out.pop()
        else:
            out.append((g, e))
    return Word(out)


def ball_size(k: int, radius: int) -> int:
    """Number of reduced words of length at most ``radius`` in F_k."""
    if radius <= 0:
        return 1
    return 1 + sum(2 * k * (2 * k - 1) ** (l - 1) for l in range(1, radius + 1))


def eval_word(t: GenTuple, w: Word) -> Perm:
    """``g_{w_1} g_{w_2} ... g_{w_m}`` as a composition (rightmost letter acts first)."""
    out = np.arange(t.n)
    for g, e in w:
        if g >= t.k:
            raise ValueError(f"generator x{g + 1} out of range for k={t.k}")
    inverses = {}
    for g, e in w:
        if e > 0:
            img = t.perms[g].images
        else:
            if g not in inverses:
                inverses[g] = t.perms[g].inverse().images
            img = inverses[g]
        out = out[img]
    return Perm(out, check=False)


def iter_ball(t: GenTuple, radius: int, budget: int = WORD_BALL_BUDGET) -> Iterator[tuple[Word, Perm]]:
    """All nontrivial reduced words of length <= radius with their evaluations (depth first)."""
    if ball_size(t.k, radius) > budget:
        raise BudgetExceeded(f"ball of radius {radius} in F_{t.k} exceeds budget {budget}")
    letters = [(g, e) for g in range(t.k) for e in (1, -1)]
    images = {(g, 1): t.perms[g].images for g in range(t.k)}
    images.update({(g, -1): t.perms[g].inverse().images for g in range(t.k)})

    stack = [((), np.arange(t.n))]
    while stack:
        word, img = stack.pop()
        if len(word) >= radius:
            continue
        last = word[-1] if word else None
        for g, e in reversed(letters):
            if last == (g, -e):
                continue
            w = word + ((g, e),)
            new = img[images[(g, e)]]
            yield Word(w), Perm(new, check=False)
            stack.append((w, new))


class Freeness(NamedTuple):
    defect: Fraction
    word: Word


def freeness_worst(t: GenTuple, radius: int, budget: int = WORD_BALL_BUDGET) -> Freeness:
    """The nontrivial word of length <= radius with the most fixed points."""
    if radius < 1:
        raise ValueError("radius must be positive")
    best, best_word = -1, Word()
    ar = np.arange(t.n)
    for w, p in iter_ball(t, radius, budget):
        fixed = int(np.count_nonzero(p.images == ar))
        if fixed > best:
            best, best_word = fixed, w
            if fixed == t.n:
                break
    return Freeness(Fraction(best, t.n), best_word)


def freeness_defect(t: GenTuple, radius: int, budget: int = WORD_BALL_BUDGET) -> Fraction:
    """Max normalised trace over nontrivial reduced words of length <= radius."""
    return freeness_worst(t, radius, budget).defect
