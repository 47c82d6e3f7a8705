"""Total variation of finite combinations ``f = sum a_i F_{p_i}``.

Every ``F_p`` gives a level-n dyadic interval a mass that depends only on the
digit counts of its left endpoint, so the signed mass ``sum a_i mu_{p_i}(I)``
is constant on each of the ``n + 1`` digit classes.  Partition variations and
the nonvanishing scan therefore collapse from ``2**n`` intervals to ``n + 1``
classes weighted by binomial coefficients.  The literal interval-by-interval
path is kept (``method="enumerate"``) as a cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, lcm
from typing import Iterable, Iterator, Optional

from singbv.bernoulli import BernoulliParam, interval_measure, support_separation
from singbv.dyadic import DyadicInterval, intervals_at_level
from singbv.errors import DomainError


@dataclass(frozen=True)
class LinearCombination:
    """``f = sum a_i F_{p_i}`` with nonzero exact coefficients, sorted by p.

    The empty combination is the zero function.
    """

    terms: tuple[tuple[Fraction, BernoulliParam], ...] = ()

    def __post_init__(self):
        terms = tuple((Fraction(a), BernoulliParam.of(p)) for a, p in self.terms)
        for a, _ in terms:
            if a == 0:
                raise DomainError("zero coefficient in linear combination")
        ps = [p.p for _, p in terms]
        if any(x >= y for x, y in zip(ps, ps[1:])):
            raise DomainError(f"parameters must be strictly increasing, got {ps}")
        object.__setattr__(self, "terms", terms)

    @classmethod
    def of(cls, pairs: Iterable) -> LinearCombination:
        """Build from ``(a, p)`` pairs in any order, merging repeated p."""
        acc: dict[BernoulliParam, Fraction] = {}
        for a, p in pairs:
            if isinstance(a, float):
                raise DomainError(f"coefficient {a!r} must be exact")
            p = BernoulliParam.of(p)
            acc[p] = acc.get(p, Fraction(0)) + Fraction(a)
        return cls(tuple(sorted(((a, p) for p, a in acc.items() if a != 0), key=lambda t: t[1].p)))

    @classmethod
    def single(cls, p, a=1) -> LinearCombination:
        return cls.of([(a, p)])

    @classmethod
    def difference(cls, p, q) -> LinearCombination:
        """``F_p - F_q``."""
        if BernoulliParam.of(p) == BernoulliParam.of(q):
            raise DomainError("F_p - F_q needs distinct parameters")
        return cls.of([(1, p), (-1, q)])

    def __add__(self, other: LinearCombination) -> LinearCombination:
        return LinearCombination.of(self.terms + other.terms)

    def __neg__(self) -> LinearCombination:
        return self.scale(-1)

    def __sub__(self, other: LinearCombination) -> LinearCombination:
        return self + (-other)

    def scale(self, c) -> LinearCombination:
        c = Fraction(c)
        if c == 0:
            return LinearCombination()
        return LinearCombination(tuple((c * a, p) for a, p in self.terms))

    def __rmul__(self, c) -> LinearCombination:
        return self.scale(c)

    @property
    def coefficient_mass(self) -> Fraction:
        """``sum |a_i|``, an upper bound for the total variation."""
        return sum((abs(a) for a, _ in self.terms), Fraction(0))

    def at_zero(self) -> Fraction:
        # every F_p vanishes at 0
        return Fraction(0)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(f"({a})F_{{{p}}}" for a, p in self.terms)


@dataclass(frozen=True)
class VariationEstimate:
    level: int
    value: Fraction
    upper_bound: Fraction

    def __float__(self) -> float:
        return float(self.value)


class _ScaledClasses:
    """Integer form of the class sums ``S_j = sum_i a_i p_i**j (1-p_i)**(n-j)``.

    With C the lcm of coefficient denominators and L that of the parameter
    denominators, ``S_j = T_j / (C * L**n)`` for integers ``T_j``.
    """

    def __init__(self, f: LinearCombination):
        self.C = lcm(*(a.denominator for a, _ in f.terms)) if f.terms else 1
        self.L = lcm(*(p.p.denominator for _, p in f.terms)) if f.terms else 1
        self.rows = [
            (int(a * self.C), int(p.p * self.L), self.L - int(p.p * self.L))
            for a, p in f.terms
        ]

    def numerators(self, n: int) -> list[int]:
        """``T_j`` for ``j = 0..n`` (j = number of zero digits)."""
        out = [0] * (n + 1)
        for A, u, v in self.rows:
            up = [1] * (n + 1)
            vp = [1] * (n + 1)
            for j in range(1, n + 1):
                up[j] = up[j - 1] * u
                vp[j] = vp[j - 1] * v
            for j in range(n + 1):
                out[j] += A * up[j] * vp[n - j]
        return out

    def denominator(self, n: int) -> int:
        return self.C * self.L**n


def combination_measure(f: LinearCombination, interval: DyadicInterval) -> Fraction:
    """Signed mass ``sum a_i mu_{p_i}(I)``; the increment of f across I."""
    return sum((a * interval_measure(p, interval) for a, p in f.terms), Fraction(0))


def partition_variation(f: LinearCombination, n: int, method: str = "binomial") -> VariationEstimate:
    """``V_n = sum over level-n intervals I of |sum a_i mu_{p_i}(I)|``, exactly."""
    if n < 0:
        raise DomainError(f"level must be >= 0, got {n}")
    if method == "binomial":
        sc = _ScaledClasses(f)
        total = sum(comb(n, j) * abs(t) for j, t in enumerate(sc.numerators(n)))
        value = Fraction(total, sc.denominator(n))
    elif method == "enumerate":
        value = sum((abs(combination_measure(f, I)) for I in intervals_at_level(n)), Fraction(0))
    else:
        raise DomainError(f"unknown method {method!r}")
    return VariationEstimate(n, value, f.coefficient_mass)


def norm_lower_bound(f: LinearCombination, n: int, method: str = "binomial") -> VariationEstimate:
    """``|f(0)| + V_n``, a lower bound for the norm ``|f(0)| + Var(f)``.

    Every ``F_p`` vanishes at 0, so ``|f(0)|`` contributes nothing here; the
    term is kept so the quantity matches the norm's definition.
    """
    est = partition_variation(f, n, method)
    return VariationEstimate(n, abs(f.at_zero()) + est.value, abs(f.at_zero()) + est.upper_bound)


def distance(p, q, n: int, method: str = "binomial") -> VariationEstimate:
    """Level-n lower bound for ``||F_p - F_q||`` (which equals 2)."""
    return norm_lower_bound(LinearCombination.difference(p, q), n, method)


def variation_table(f: LinearCombination, max_depth: int, min_depth: int = 0) -> Iterator[VariationEstimate]:
    for n in range(min_depth, max_depth + 1):
        yield norm_lower_bound(f, n)


def concentration_lower_bound(p, q, n: int) -> Fraction:
    """Closed-form bound ``V_n(F_p - F_q) >= 2 (mu_p(A) - mu_q(A))``.

    A is the p-typical set of :func:`~singbv.bernoulli.support_separation`;
    the bound is the variation collected by the two-block partition {A, A^c}.
    """
    mp, mq = support_separation(p, q, n)
    return 2 * (mp - mq)


def critical_depth(p, q, target, start: int = 1, limit: int = 10_000) -> int:
    """Smallest n >= start whose concentration bound reaches ``target``."""
    target = Fraction(target)
    for n in range(start, limit + 1):
        if concentration_lower_bound(p, q, n) >= target:
            return n
    raise DomainError(f"bound stays below {target} up to n = {limit}")


@dataclass(frozen=True)
class NonvanishingReport:
    passed: bool
    depth: int
    intervals_checked: int
    first_vanishing: Optional[DyadicInterval] = None
    #: (level, zero-digit count) of every class with zero signed mass
    vanishing_classes: tuple[tuple[int, int], ...] = ()
    #: every vanishing interval has a left half of nonzero mass, so f is
    #: still certified nonconstant on it
    nonconstancy_certified: bool = True


def nonvanishing_check(f: LinearCombination, n: int, backend: str = "exact",
                       method: str = "classes", min_level: int = 1) -> NonvanishingReport:
    """Check ``sum a_i mu_{p_i}(I) != 0`` on every dyadic I of level 1..n.

    Exact arithmetic only.  ``method="classes"`` evaluates one representative
    per (level, zero count) class, which decides every interval of that class;
    ``method="enumerate"`` walks all intervals.  The first vanishing interval
    is the one of lowest level, then smallest left endpoint.

    Whenever I vanishes the report also checks its left half: the left-half
    mass is ``sum a_i p_i mu_{p_i}(I)``, and f is nonconstant on I as long as
    that is nonzero.
    """
    if backend != "exact":
        raise DomainError("nonvanishing_check runs on the exact backend only")
    if n < min_level:
        raise DomainError(f"depth must be >= {min_level}, got {n}")
    sc = _ScaledClasses(f)
    vanishing: list[tuple[int, int]] = []
    first = None
    certified = True
    checked = 0
    for m in range(min_level, n + 1):
        checked += 1 << m
        if method == "classes":
            T = sc.numerators(m)
            zero_classes = [j for j in range(m + 1) if T[j] == 0]
            if zero_classes and first is None:
                # smallest numerator with r ones at level m is 2**r - 1
                r = min(m - j for j in zero_classes)
                first = DyadicInterval.at((1 << r) - 1, m)
        elif method == "enumerate":
            zero_classes = set()
            for I in intervals_at_level(m):
                if combination_measure(f, I) == 0:
                    if first is None:
                        first = I
                    zero_classes.add(m - I.left.numerator.bit_count())
            zero_classes = sorted(zero_classes)
        else:
            raise DomainError(f"unknown method {method!r}")
        if zero_classes:
            T_next = sc.numerators(m + 1)
            for j in zero_classes:
                vanishing.append((m, j))
                if T_next[j + 1] == 0:
                    certified = False
    return NonvanishingReport(
        passed=not vanishing,
        depth=n,
        intervals_checked=checked,
        first_vanishing=first,
        vanishing_classes=tuple(vanishing),
        nonconstancy_certified=certified,
    )
