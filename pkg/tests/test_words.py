
import pytest
from hypothesis import given, strategies as st

from helpers import tuples
from soficperm.perm import GenTuple, Perm, compose, cycle, power
from soficperm.words import (BudgetExceeded, Word, ball_size, eval_word, freeness_defect, freeness_worst,
                             iter_ball, reduce_concat)


def test_parse_and_print_round_trip():
    w = Word.parse("x1 x2^-1 x1")
    assert w == Word([(0, 1), (1, -1), (0, 1)])
    assert Word.parse(str(w)) == w
    assert str(Word()) == "1"


def test_unreduced_word_rejected():
    with pytest.raises(ValueError):
        Word([(0, 1), (0, -1)])


def test_reduce_concat_cancels():
    w = Word.parse("x1 x2")
    assert reduce_concat(w, w.inverse()) == Word()


def test_eval_order():
    a, b = Perm([1, 2, 0]), Perm([1, 0, 2])
    t = GenTuple([a, b])
    # leftmost letter is applied last
    assert eval_word(t, Word.parse("x1 x2")) == compose(a, b)
    assert eval_word(t, Word.parse("x1^-1")) == a.inverse()


@given(tuples(max_n=8, k=2), st.integers(0, 3))
def test_ball_enumerates_every_reduced_word(t, radius):
    words = [w for w, _ in iter_ball(t, radius)]
    assert len(words) == len(set(words)) == ball_size(2, radius) - 1
    for w, p in iter_ball(t, min(radius, 2)):
        assert p == eval_word(t, w)


def test_ball_budget():
    with pytest.raises(BudgetExceeded):
        list(iter_ball(GenTuple([cycle(4), cycle(4)]), 20, budget=1000))


def test_freeness_of_cycle_pair():
    a = cycle(5)
    assert freeness_defect(GenTuple([a, a]), 2) == 1
    # (a, a^2): no short word fixes a point until x2 x1^-2 at length 3
    t = GenTuple([a, power(a, 2)])
    assert freeness_defect(t, 1) == 0
    assert freeness_defect(t, 2) == 0
    worst = freeness_worst(t, 3)
    assert worst.defect == 1
    assert eval_word(t, worst.word).is_identity()
