from collections import Counter
from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, strategies as st

from singbv.dyadic import (
    DigitCounts,
    DyadicInterval,
    DyadicRational,
    decompose,
    digit_counts,
    halves,
    intervals_at_level,
    make_dyadic,
)
from singbv.errors import DomainError


@st.composite
def dyadics(draw, max_level=40, below_one=True):
    n = draw(st.integers(0, max_level))
    hi = (1 << n) - 1 if below_one else 1 << n
    if hi < 0:
        n, hi = 1, 1
    return DyadicRational(draw(st.integers(0, hi)), n)


def test_make_dyadic():
    assert make_dyadic(0, 1).value == 0 and make_dyadic(0, 1).level == 1
    assert make_dyadic(1, 2).value == Fraction(1, 4)
    with pytest.raises(DomainError):
        make_dyadic(5, 2)
    with pytest.raises(DomainError):
        make_dyadic(0, -1)
    with pytest.raises(DomainError):
        make_dyadic(-1, 3)


def test_not_normalized():
    assert make_dyadic(1, 1).value == make_dyadic(2, 2).value
    assert make_dyadic(1, 1) != make_dyadic(2, 2)
    assert digit_counts(make_dyadic(1, 1)) == DigitCounts(0, 1)
    assert digit_counts(make_dyadic(2, 2)) == DigitCounts(1, 1)


def test_digit_counts_examples():
    assert digit_counts(make_dyadic(0, 1)) == DigitCounts(1, 0)
    assert digit_counts(make_dyadic(1, 1)) == DigitCounts(0, 1)
    assert digit_counts(make_dyadic(1, 2)) == DigitCounts(1, 1)
    with pytest.raises(DomainError):
        digit_counts(make_dyadic(4, 2))


def test_digit_counts_against_binary_strings():
    for n in range(0, 9):
        for k in range(1 << n):
            digits = format(k, f"0{n}b") if n else ""
            c = digit_counts(make_dyadic(k, n))
            assert (c.zeros, c.ones) == (digits.count("0"), digits.count("1"))


def test_large_levels_do_not_overflow():
    t = make_dyadic((1 << 199) + 1, 200)
    assert digit_counts(t) == DigitCounts(198, 2)


@given(dyadics())
def test_counts_sum_to_level(t):
    c = digit_counts(t)
    assert c.zeros + c.ones == t.level


def test_halves_examples():
    root = DyadicInterval.at(0, 0)
    left, right = halves(root)
    assert (left.left.value, left.right.value) == (0, Fraction(1, 2))
    assert (right.left.value, right.right.value) == (Fraction(1, 2), 1)
    left, right = halves(DyadicInterval.at(1, 1))
    assert (left.left.value, left.right.value) == (Fraction(1, 2), Fraction(3, 4))
    assert (right.left.value, right.right.value) == (Fraction(3, 4), 1)


def test_halves_digit_counts_to_level_6():
    for n in range(7):
        for I in intervals_at_level(n):
            c = digit_counts(I.left)
            left, right = halves(I)
            assert digit_counts(left.left) == DigitCounts(c.zeros + 1, c.ones)
            assert digit_counts(right.left) == DigitCounts(c.zeros, c.ones + 1)
            assert left.level == right.level == n + 1


@pytest.mark.parametrize("n", range(0, 13))
def test_binomial_class_sizes(n):
    counts = Counter(digit_counts(I.left).zeros for I in intervals_at_level(n))
    assert counts == {j: comb(n, j) for j in range(n + 1)}


def test_interval_inside_unit():
    with pytest.raises(DomainError):
        DyadicInterval.at(4, 2)
    assert DyadicInterval.at(3, 2).right.value == 1


def test_serialization_round_trip():
    t = make_dyadic(3, 4)
    assert str(t) == "3/2^4"
    assert DyadicRational.parse("3/2^4") == t
    assert DyadicRational.parse(" 0 / 2 ^ 1 ") == make_dyadic(0, 1)
    with pytest.raises(DomainError):
        DyadicRational.parse("3/4")
    with pytest.raises(DomainError):
        DyadicRational.parse("9/2^3")


def test_from_fraction():
    assert DyadicRational.from_fraction(Fraction(3, 8)) == make_dyadic(3, 3)
    assert DyadicRational.from_fraction(Fraction(1, 2), 3) == make_dyadic(4, 3)
    with pytest.raises(DomainError):
        DyadicRational.from_fraction(Fraction(1, 3))
    with pytest.raises(DomainError):
        DyadicRational.from_fraction(Fraction(1, 2), 0)


@given(dyadics(max_level=12, below_one=False), dyadics(max_level=12, below_one=False))
def test_decompose_tiles(a, b):
    if a.value > b.value:
        a, b = b, a
    pieces = decompose(a, b)
    assert sum((I.width for I in pieces), Fraction(0)) == b.value - a.value
    if pieces:
        assert pieces[0].left.value == a.value
        assert pieces[-1].right.value == b.value
    for I, J in zip(pieces, pieces[1:]):
        assert I.right.value == J.left.value
