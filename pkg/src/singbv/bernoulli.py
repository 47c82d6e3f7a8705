"""Bernoulli measures ``mu_p`` and their distribution functions ``F_p``.

``mu_p`` is the law of ``X = sum_k X_k / 2**k`` with independent digits,
``Pr(X_k = 0) = p``.  A level-n dyadic interval whose left endpoint has
``l`` zero digits and ``r`` one digits carries mass ``p**l * (1-p)**r``.

Two numeric backends are used.  Exact: ``p`` and the query point are
rationals and results are :class:`~fractions.Fraction`.  Float: the query is a
Python/numpy float and ``p`` is replaced by its float shadow.
"""

from __future__ import annotations

import numbers
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

import numpy as np

from singbv.dyadic import DyadicInterval, DyadicRational, digit_counts
from singbv.errors import DomainError

#: Sampler truncation; below double resolution.
DEFAULT_TRUNCATION = 53
#: Step cap for float cdf evaluation.  Finite doubles in (0, 1) are dyadic
#: with at most 1074 fractional bits but random() draws terminate within 53.
FLOAT_DEPTH = 64


@dataclass(frozen=True)
class BernoulliParam:
    """A parameter ``0 < p < 1/2`` held exactly, with a float shadow."""

    p: Fraction
    shadow: float = field(default=None, compare=False)

    def __post_init__(self):
        p = Fraction(self.p)
        if not 0 < p < Fraction(1, 2):
            raise DomainError(f"p = {p} not in (0, 1/2)")
        object.__setattr__(self, "p", p)
        if self.shadow is None:
            object.__setattr__(self, "shadow", float(p))

    @classmethod
    def of(cls, value) -> BernoulliParam:
        """Coerce a param, Fraction, int, float or ``"a/b"`` string."""
        if isinstance(value, cls):
            return value
        if isinstance(value, float):
            return cls(Fraction(value), value)
        try:
            return cls(Fraction(value))
        except (ValueError, ZeroDivisionError) as exc:
            raise DomainError(f"cannot read {value!r} as a rational p") from exc

    @property
    def q(self) -> Fraction:
        return 1 - self.p

    def __str__(self) -> str:
        return str(self.p)


def _is_float(x) -> bool:
    return isinstance(x, (float, np.floating))


def interval_measure(p, interval: DyadicInterval, backend: str = "exact"):
    """``mu_p(I) = p**l * (1-p)**r`` for the digit counts of ``min I``."""
    p = BernoulliParam.of(p)
    counts = digit_counts(interval.left)
    if backend == "float":
        return p.shadow**counts.zeros * (1.0 - p.shadow) ** counts.ones
    if backend != "exact":
        raise DomainError(f"unknown backend {backend!r}")
    return p.p**counts.zeros * p.q**counts.ones


def cdf(p, x, depth: int = 200):
    """Evaluate ``F_p(x)`` by the self-similar recursion.

    ``F(x) = p F(2x)`` for ``x < 1/2`` and ``F(x) = p + (1-p) F(2x-1)`` for
    ``x >= 1/2``.  The loop stops exactly as soon as the running point leaves
    ``(0, 1)``, which happens for every dyadic ``x``.  Otherwise it stops after
    ``depth`` steps and returns a lower bound within ``max(p, 1-p)**depth``.

    Exact for rational or :class:`DyadicRational` ``x``; a float ``x`` selects
    the float backend.
    """
    if depth < 1:
        raise DomainError(f"depth must be >= 1, got {depth}")
    p = BernoulliParam.of(p)
    if _is_float(x):
        return _cdf_float(p.shadow, float(x), depth)
    if isinstance(x, DyadicRational):
        x = x.value
    x = Fraction(x)
    den = x.denominator
    if not den & (den - 1):
        depth = max(depth, den.bit_length())
    pp, qq = p.p, p.q
    acc, scale = Fraction(0), Fraction(1)
    half = Fraction(1, 2)
    for _ in range(depth):
        if x <= 0:
            return acc
        if x >= 1:
            return acc + scale
        if x < half:
            scale *= pp
            x = 2 * x
        else:
            acc += scale * pp
            scale *= qq
            x = 2 * x - 1
    return acc + scale if x >= 1 else acc


def _cdf_float(p: float, x: float, depth: int) -> float:
    acc, scale, q = 0.0, 1.0, 1.0 - p
    for _ in range(depth):
        if x <= 0.0:
            return acc
        if x >= 1.0:
            return acc + scale
        if x < 0.5:
            scale *= p
            x = 2.0 * x
        else:
            acc += scale * p
            scale *= q
            x = 2.0 * x - 1.0
    return acc + scale if x >= 1.0 else acc


def cdf_array(p, xs, depth: int = FLOAT_DEPTH) -> np.ndarray:
    """Vectorized float backend of :func:`cdf`."""
    p = BernoulliParam.of(p).shadow
    x = np.array(xs, dtype=float, copy=True)
    acc = np.zeros_like(x)
    scale = np.ones_like(x)
    done = np.zeros(x.shape, dtype=bool)
    for _ in range(depth):
        low = ~done & (x <= 0.0)
        high = ~done & (x >= 1.0)
        acc[high] += scale[high]
        done |= low | high
        if done.all():
            break
        left = ~done & (x < 0.5)
        right = ~done & ~left
        scale[left] *= p
        x[left] *= 2.0
        acc[right] += scale[right] * p
        scale[right] *= 1.0 - p
        x[right] = 2.0 * x[right] - 1.0
    acc[~done & (x >= 1.0)] += scale[~done & (x >= 1.0)]
    return acc


def cdf_grid(p, n: int) -> list[Fraction]:
    """Exact ``F_p(k / 2**n)`` for ``k = 0..2**n``, by cumulative interval mass."""
    p = BernoulliParam.of(p)
    pows_p = [p.p**j for j in range(n + 1)]
    pows_q = [p.q**j for j in range(n + 1)]
    by_ones = [pows_p[n - r] * pows_q[r] for r in range(n + 1)]
    out = [Fraction(0)]
    total = Fraction(0)
    for k in range(1 << n):
        total += by_ones[k.bit_count()]
        out.append(total)
    return out


def antiderivative(p, x) -> Fraction:
    """``A_p(x) = integral of F_p over [0, x]``, exact for dyadic ``x``.

    Uses ``A(x) = (p/2) A(2x)`` on ``[0, 1/2]`` and
    ``A(x) = p**2/2 + p (x - 1/2) + ((1-p)/2) A(2x - 1)`` on ``[1/2, 1]``,
    with ``A(0) = 0`` and ``A(1) = p``.
    """
    p = BernoulliParam.of(p)
    if isinstance(x, DyadicRational):
        y = x.value
    elif isinstance(x, (numbers.Rational, str)) and not isinstance(x, bool):
        y = Fraction(x)
        if y.denominator & (y.denominator - 1):
            raise DomainError(f"{y} is not dyadic; use smoothing grids instead")
    else:
        raise DomainError(f"antiderivative needs a dyadic point, got {x!r}")
    if not 0 <= y <= 1:
        raise DomainError(f"x = {y} outside [0, 1]")
    pp, qq = p.p, p.q
    half = Fraction(1, 2)
    # A(x) = offset + factor * A(y)
    offset, factor = Fraction(0), Fraction(1)
    while 0 < y < 1:
        if y < half:
            factor *= pp / 2
            y = 2 * y
        else:
            offset += factor * (pp * pp / 2 + pp * (y - half))
            factor *= qq / 2
            y = 2 * y - 1
    return offset + (factor * pp if y == 1 else 0)


def sample(p, truncation: int = DEFAULT_TRUNCATION, count: int = 1, seed=0) -> np.ndarray:
    """Draw ``count`` values of ``sum_{k <= truncation} X_k / 2**k``.

    Deterministic in ``seed``.  Each draw sits below the untruncated sum by
    less than ``2**-truncation``.
    """
    if truncation < 1 or count < 1:
        raise DomainError("truncation and count must be >= 1")
    p = BernoulliParam.of(p)
    rng = np.random.default_rng(seed)
    out = np.empty(count, dtype=float)
    # integer accumulation keeps 53-digit sums exact in a double
    chunk = max(1, (1 << 20) // truncation)
    weights_exact = truncation <= 53
    for start in range(0, count, chunk):
        stop = min(count, start + chunk)
        ones = rng.random((stop - start, truncation)) >= p.shadow
        if weights_exact:
            w = np.left_shift(np.uint64(1), np.arange(truncation - 1, -1, -1, dtype=np.uint64))
            ints = (ones.astype(np.uint64) * w).sum(axis=1, dtype=np.uint64)
            out[start:stop] = np.ldexp(ints.astype(float), -truncation)
        else:
            w = np.ldexp(1.0, -np.arange(1, truncation + 1))
            out[start:stop] = ones @ w
    return out


def binomial_class_masses(p, n: int) -> list[Fraction]:
    """``mu_p`` mass of the level-n intervals with exactly j zero digits, j = 0..n."""
    p = BernoulliParam.of(p)
    return [comb(n, j) * p.p**j * p.q ** (n - j) for j in range(n + 1)]


def separating_classes(p, q, n: int) -> list[int]:
    """Zero-digit counts j whose frequency ``j/n`` is at least as close to p as to q."""
    p, q = BernoulliParam.of(p), BernoulliParam.of(q)
    if p == q:
        raise DomainError("support separation needs distinct parameters")
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    mid = (p.p + q.p) / 2
    if p.p < q.p:
        return [j for j in range(n + 1) if Fraction(j, n) <= mid]
    return [j for j in range(n + 1) if Fraction(j, n) >= mid]


def support_separation(p, q, n: int) -> tuple[Fraction, Fraction]:
    """Masses ``(mu_p(A), mu_q(A))`` of the p-typical level-n set A.

    A collects every level-n interval whose zero-digit frequency is closer to
    p than to q (ties go to p).  Computed as binomial sums over digit classes.
    """
    classes = separating_classes(p, q, n)
    mp = binomial_class_masses(p, n)
    mq = binomial_class_masses(q, n)
    return sum((mp[j] for j in classes), Fraction(0)), sum((mq[j] for j in classes), Fraction(0))
