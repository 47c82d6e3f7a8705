"""Dyadic rationals ``k / 2**n`` that remember their level.

A dyadic rational here is deliberately *not* normalized: ``(1, 1)`` and
``(2, 2)`` are the same real number 1/2, but the first has the one-digit
expansion ``.1`` and the second the two-digit expansion ``.10``.  Digit counts,
and hence Bernoulli interval measures, depend on that choice.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

from singbv.errors import DomainError

_DYADIC_RE = re.compile(r"^\s*(\d+)\s*/\s*2\s*\^\s*(\d+)\s*$")


@dataclass(frozen=True, order=False)
class DyadicRational:
    numerator: int
    level: int

    def __post_init__(self):
        if self.level < 0:
            raise DomainError(f"negative level {self.level}")
        if not 0 <= self.numerator <= 1 << self.level:
            raise DomainError(
                f"numerator {self.numerator} outside [0, 2^{self.level}]"
            )

    @property
    def value(self) -> Fraction:
        return Fraction(self.numerator, 1 << self.level)

    def at_level(self, level: int) -> DyadicRational:
        """Re-express at a finer (or equal) level by appending zero digits."""
        if level < self.level:
            raise DomainError(f"cannot coarsen level {self.level} to {level}")
        return DyadicRational(self.numerator << (level - self.level), level)

    def __float__(self) -> float:
        return float(self.value)

    def __str__(self) -> str:
        return f"{self.numerator}/2^{self.level}"

    @classmethod
    def parse(cls, text: str) -> DyadicRational:
        """Parse ``"k/2^n"``."""
        m = _DYADIC_RE.match(text)
        if m is None:
            raise DomainError(f"not a dyadic literal of the form k/2^n: {text!r}")
        return make_dyadic(int(m.group(1)), int(m.group(2)))

    @classmethod
    def from_fraction(cls, x: Fraction, level: int | None = None) -> DyadicRational:
        """Convert a rational with power-of-two denominator.

        Without ``level`` the coarsest level is used.
        """
        x = Fraction(x)
        den = x.denominator
        if den & (den - 1):
            raise DomainError(f"{x} is not dyadic")
        n = den.bit_length() - 1
        d = cls(x.numerator, n)
        return d if level is None else d.at_level(level)


@dataclass(frozen=True)
class DigitCounts:
    zeros: int
    ones: int


@dataclass(frozen=True)
class DyadicInterval:
    """The closed interval ``[t, t + 2**-n]`` where ``t = left`` has level n."""

    left: DyadicRational

    def __post_init__(self):
        if self.left.numerator >= 1 << self.left.level:
            raise DomainError(f"interval starting at {self.left} leaves [0, 1]")

    @classmethod
    def at(cls, k: int, n: int) -> DyadicInterval:
        return cls(make_dyadic(k, n))

    @property
    def level(self) -> int:
        return self.left.level

    @property
    def right(self) -> DyadicRational:
        return DyadicRational(self.left.numerator + 1, self.left.level)

    @property
    def width(self) -> Fraction:
        return Fraction(1, 1 << self.level)

    def contains(self, x) -> bool:
        x = x.value if isinstance(x, DyadicRational) else x
        return self.left.value <= x <= self.right.value

    def __contains__(self, x) -> bool:
        return self.contains(x)

    def __str__(self) -> str:
        return f"[{self.left}, {self.right}]"


def make_dyadic(k: int, n: int) -> DyadicRational:
    return DyadicRational(k, n)


def digit_counts(t: DyadicRational) -> DigitCounts:
    """Numbers of zeros and ones among the ``t.level`` binary digits of t."""
    if t.numerator >= 1 << t.level:
        raise DomainError(f"{t} has no {t.level}-digit binary expansion")
    ones = t.numerator.bit_count()
    return DigitCounts(t.level - ones, ones)


def halves(interval: DyadicInterval) -> tuple[DyadicInterval, DyadicInterval]:
    k, n = interval.left.numerator, interval.level
    return DyadicInterval.at(2 * k, n + 1), DyadicInterval.at(2 * k + 1, n + 1)


def intervals_at_level(n: int) -> Iterator[DyadicInterval]:
    for k in range(1 << n):
        yield DyadicInterval.at(k, n)


def decompose(alpha: DyadicRational, beta: DyadicRational) -> list[DyadicInterval]:
    """Tile ``[alpha, beta]`` by dyadic intervals with disjoint interiors.

    Greedy from the left: at each step take the largest dyadic interval that
    starts at the current point and fits.  The pieces are listed left to right.
    """
    a, b = alpha.value, beta.value
    if a > b:
        raise DomainError(f"empty range [{alpha}, {beta}]")
    n = max(alpha.level, beta.level)
    lo, hi = alpha.at_level(n).numerator, beta.at_level(n).numerator
    pieces = []
    while lo < hi:
        # largest 2^s dividing lo with lo + 2^s <= hi
        s = (lo & -lo).bit_length() - 1 if lo else n
        while (1 << s) > hi - lo:
            s -= 1
        pieces.append(DyadicInterval.at(lo >> s, n - s))
        lo += 1 << s
    return pieces
