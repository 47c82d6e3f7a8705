"""Moving dyadic intervals without changing any Bernoulli measure.

Given a coarse interval ``I0`` and a finer ``I1`` whose left endpoint has at
least as many zero digits and at least as many one digits, halve ``I0``
``m`` times to the left and then ``k`` times to the right.  The result J has
the same level and the same digit counts as ``I1``, so ``mu_p(J) = mu_p(I1)``
for every p at once.  Translating by ``min J - min I1`` then carries every
subinterval of ``I1`` to a subinterval of J of equal measure.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from singbv.bernoulli import cdf
from singbv.dyadic import DyadicInterval, DyadicRational, decompose, digit_counts
from singbv.errors import DomainError

#: Tolerance of the float fallback for non-dyadic endpoints.
FLOAT_TOLERANCE = 1e-12


@dataclass(frozen=True)
class TransportProblem:
    I0: DyadicInterval
    I1: DyadicInterval

    def __post_init__(self):
        c0, c1 = digit_counts(self.I0.left), digit_counts(self.I1.left)
        if self.I1.level < self.I0.level:
            raise DomainError(f"level n1 = {self.I1.level} < n0 = {self.I0.level}")
        if c1.zeros < c0.zeros:
            raise DomainError(f"zero digits l(t1) = {c1.zeros} < l(t0) = {c0.zeros}")
        if c1.ones < c0.ones:
            raise DomainError(f"one digits r(t1) = {c1.ones} < r(t0) = {c0.ones}")

    @property
    def left_steps(self) -> int:
        return digit_counts(self.I1.left).zeros - digit_counts(self.I0.left).zeros

    @property
    def right_steps(self) -> int:
        return digit_counts(self.I1.left).ones - digit_counts(self.I0.left).ones


def match_interval(prob: TransportProblem) -> DyadicInterval:
    """The interval reached from I0 by m left halvings then k right halvings.

    Its left endpoint is ``t0 + 2**-(n0+m) - 2**-(n0+m+k)``, at level n1.
    """
    m, k = prob.left_steps, prob.right_steps
    # m zero digits then k one digits appended to t0's expansion
    numerator = (prob.I0.left.numerator << (m + k)) + (1 << k) - 1
    return DyadicInterval.at(numerator, prob.I0.level + m + k)


def shift(prob: TransportProblem) -> Fraction:
    """``x = min J - min I1``."""
    return match_interval(prob).left.value - prob.I1.left.value


def translate_subinterval(prob: TransportProblem, alpha, beta):
    """Translate ``[alpha, beta]`` inside I1 to an equal-measure range inside J.

    Dyadic endpoints give dyadic results (each kept at the finer of its own
    level and n1).  Float endpoints fall back to float arithmetic.
    """
    floats = isinstance(alpha, float) or isinstance(beta, float)
    a = float(alpha) if floats else _as_dyadic(alpha).value
    b = float(beta) if floats else _as_dyadic(beta).value
    if not a < b:
        raise DomainError(f"need alpha < beta, got [{alpha}, {beta}]")
    lo, hi = prob.I1.left.value, prob.I1.right.value
    if not (lo <= a and b <= hi):
        raise DomainError(f"[{alpha}, {beta}] not inside I1 = {prob.I1}")
    x = shift(prob)
    if floats:
        return a + float(x), b + float(x)
    return _moved(_as_dyadic(alpha), x, prob.I1.level), _moved(_as_dyadic(beta), x, prob.I1.level)


def _as_dyadic(value) -> DyadicRational:
    if isinstance(value, DyadicRational):
        return value
    if isinstance(value, str):
        return DyadicRational.parse(value)
    return DyadicRational.from_fraction(Fraction(value))


def _moved(point: DyadicRational, x: Fraction, n1: int) -> DyadicRational:
    level = max(point.level, n1)
    return DyadicRational.from_fraction(point.value + x, level)


def measures_agree(prob: TransportProblem, alpha, beta, p) -> bool:
    """Check ``mu_p([alpha+x, beta+x]) == mu_p([alpha, beta])`` via cdf differences."""
    a1, b1 = translate_subinterval(prob, alpha, beta)
    if isinstance(a1, float):
        moved = cdf(p, b1) - cdf(p, a1)
        orig = cdf(p, float(beta)) - cdf(p, float(alpha))
        return abs(moved - orig) <= FLOAT_TOLERANCE
    a, b = _as_dyadic(alpha), _as_dyadic(beta)
    return cdf(p, b1) - cdf(p, a1) == cdf(p, b) - cdf(p, a)


def translated_pieces(prob: TransportProblem, alpha, beta) -> list[tuple[DyadicInterval, DyadicInterval]]:
    """Pair each dyadic piece of ``[alpha, beta]`` (of level >= n1) with its translate.

    The pieces come from :func:`~singbv.dyadic.decompose`; a translate keeps
    the piece's level and, since ``x`` only rewrites the leading n1 digits,
    its digit counts.
    """
    translate_subinterval(prob, alpha, beta)
    a, b = _as_dyadic(alpha), _as_dyadic(beta)
    x = shift(prob)
    out = []
    for piece in decompose(a, b):
        # pieces inside I1 are never wider than I1, so piece.level >= n1
        moved = DyadicInterval(DyadicRational.from_fraction(piece.left.value + x, piece.level))
        out.append((piece, moved))
    return out
