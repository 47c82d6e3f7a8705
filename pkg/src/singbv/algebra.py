"""Exponential-like functions composed with ``F_p``.

An exponential-like function of range m is ``f(x) = sum_{i<=m} a_i e^{b_i x}``
with nonzero ``a_i`` and distinct nonzero ``b_i``.  For generators
``r_1, ..., r_n`` that are linearly independent over Q, any polynomial without
constant term in ``e^{r_j F(x)}`` collapses to ``f(F(x))`` with ``f``
exponential-like: the monomial with exponent row ``k_i`` contributes
``a_i e^{F(x) sum_j r_j k_ij}``, and distinct nonzero rows give distinct
nonzero exponents.

Root counting follows the derivative recursion: multiplying by ``e^{-b_1 x}``
does not move roots and creates a constant term, which differentiation
removes, so each derivative has one term fewer.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence

import numpy as np
from scipy.optimize import brentq

from singbv.bernoulli import BernoulliParam, cdf, cdf_array
from singbv.dyadic import DyadicInterval, DyadicRational
from singbv.errors import DomainError, NoWitnessError, RootClusterError

#: Default absolute tolerance for float comparisons.
TOLERANCE = 1e-9
#: The distribution function used for compositions unless told otherwise.
DEFAULT_P = Fraction(1, 4)


@dataclass(frozen=True)
class ExpLike:
    """``x -> sum a_i exp(b_i x)``, terms sorted by exponent.

    ``labels`` optionally carries a symbolic identity per term (for reduced
    polynomials: the integer exponent row).
    """

    terms: tuple[tuple[float, float], ...]
    labels: Optional[tuple] = field(default=None, compare=False)

    def __post_init__(self):
        terms = [(float(a), float(b)) for a, b in self.terms]
        if not terms:
            raise DomainError("an exponential-like function needs at least one term")
        labels = list(self.labels) if self.labels is not None else None
        if labels is not None and len(labels) != len(terms):
            raise DomainError("one label per term")
        order = sorted(range(len(terms)), key=lambda i: terms[i][1])
        terms = [terms[i] for i in order]
        for a, b in terms:
            if a == 0:
                raise DomainError("zero coefficient")
            if b == 0:
                raise DomainError("zero exponent")
        for (_, b1), (_, b2) in zip(terms, terms[1:]):
            if b1 == b2:
                raise DomainError(f"repeated exponent {b1}")
        object.__setattr__(self, "terms", tuple(terms))
        if labels is not None:
            object.__setattr__(self, "labels", tuple(labels[i] for i in order))

    @property
    def range(self) -> int:
        return len(self.terms)

    @property
    def coefficients(self) -> tuple[float, ...]:
        return tuple(a for a, _ in self.terms)

    @property
    def exponents(self) -> tuple[float, ...]:
        return tuple(b for _, b in self.terms)

    def __call__(self, x):
        if isinstance(x, np.ndarray):
            return _eval_array(self.terms, x)
        return eval_explike(self, x)

    def to_json(self) -> dict:
        out = {"terms": [[a, b] for a, b in self.terms], "range": self.range}
        if self.labels is not None:
            out["rows"] = [list(r) for r in self.labels]
        return out


def eval_explike(f: ExpLike, x: float) -> float:
    total = 0.0
    for i, (a, b) in enumerate(f.terms):
        try:
            total += a * math.exp(b * x)
        except OverflowError:
            raise OverflowError(f"term {i} ({a} * exp({b} * x)) overflows at x = {x}") from None
    if math.isinf(total):
        raise OverflowError(f"sum overflows at x = {x}")
    return total


def _eval_array(terms, x: np.ndarray) -> np.ndarray:
    with np.errstate(over="raise"):
        out = np.zeros_like(x, dtype=float)
        for a, b in terms:
            out += a * np.exp(b * x)
    return out


# ---------------------------------------------------------------- root counting

def _eval_terms(terms, x: float) -> tuple[float, float]:
    """Value and magnitude scale of ``sum a e^{bx}`` (b may be 0 here)."""
    vals = [a * math.exp(b * x) for a, b in terms]
    return math.fsum(vals), math.fsum(abs(v) for v in vals)


def _isolate(terms, lo: float, hi: float, xtol: float, zero_rel: float, strict: bool = False) -> list[float]:
    """Roots of ``sum a e^{bx}`` on [lo, hi]; exponents distinct, b = 0 allowed.

    A numerically zero value at an interior critical point is a tangency or a
    pair of roots too close to separate.  Derivatives only need it as a knot;
    with ``strict`` the caller wants a count, so it raises instead.
    """
    terms = [(a, b) for a, b in terms if a != 0]
    if not terms:
        raise DomainError("identically zero exponential sum has no isolated roots")
    if len(terms) == 1:
        return []
    terms.sort(key=lambda t: t[1])
    b0 = terms[0][1]
    shifted = [(a, b - b0) for a, b in terms]
    derivative = [(a * b, b) for a, b in shifted if b != 0]
    critical = _isolate(derivative, lo, hi, xtol, zero_rel)
    knots = [lo] + [c for c in critical if lo < c < hi] + [hi]

    def g(x):
        return _eval_terms(shifted, x)[0]

    values = []
    for i, x in enumerate(knots):
        v, scale = _eval_terms(shifted, x)
        if abs(v) <= zero_rel * scale:
            if strict and 0 < i < len(knots) - 1:
                raise RootClusterError(f"tangency or clustered roots near x = {x:.15g}")
            v = 0.0
        values.append(v)
    roots = []
    for x, v in zip(knots, values):
        if v == 0.0:
            roots.append(x)
    for (u, gu), (w, gw) in zip(zip(knots, values), zip(knots[1:], values[1:])):
        if gu != 0.0 and gw != 0.0 and (gu < 0) != (gw < 0):
            roots.append(brentq(g, u, w, xtol=xtol, rtol=4 * np.finfo(float).eps))
    return sorted(roots)


def isolate_preimage(f: ExpLike, c: float, lo: float, hi: float, tol: float = TOLERANCE) -> list[float]:
    """Points of [lo, hi] where f takes the value c, located to within tol/4.

    Raises :class:`RootClusterError` when two located roots lie within tol of
    each other, or when a critical point is numerically a root, since such
    roots cannot be told apart at that resolution.
    """
    if not lo < hi:
        raise DomainError(f"need lo < hi, got [{lo}, {hi}]")
    if not tol > 0:
        raise DomainError("tol must be positive")
    terms = list(f.terms)
    if c != 0:
        terms.append((-float(c), 0.0))
    roots = _isolate(terms, float(lo), float(hi), xtol=min(tol / 4, 1e-12), zero_rel=1e-13, strict=True)
    for r1, r2 in zip(roots, roots[1:]):
        if r2 - r1 <= tol:
            raise RootClusterError(
                f"roots near {r1:.15g} and {r2:.15g} are closer than tol = {tol:g}; retry with a smaller tol"
            )
    return roots


def count_preimage(f: ExpLike, c: float, lo: float, hi: float, tol: float = TOLERANCE) -> int:
    """Number of solutions of ``f(x) = c`` on [lo, hi]; never more than the range."""
    return len(isolate_preimage(f, c, lo, hi, tol))


# ------------------------------------------------------------------ generators

@dataclass(frozen=True)
class GeneratorSet:
    """Square roots of distinct primes; ``tags`` are the primes."""

    values: tuple[float, ...]
    tags: tuple[int, ...]

    def __post_init__(self):
        if len(self.values) != len(self.tags):
            raise DomainError("one tag per generator")
        if len(set(self.tags)) != len(self.tags) or len(set(self.values)) != len(self.values):
            raise DomainError("generators must be pairwise distinct")

    def __len__(self) -> int:
        return len(self.values)

    def symbolic(self, row: Sequence[int]):
        """The exact exponent ``sum_j k_j sqrt(prime_j)`` as a sympy expression."""
        import sympy

        return sum((k * sympy.sqrt(t) for k, t in zip(row, self.tags)), sympy.Integer(0))


def make_generators(n: int) -> GeneratorSet:
    if n < 1:
        raise DomainError(f"need at least one generator, got {n}")
    from sympy import prime

    primes = tuple(int(prime(i)) for i in range(1, n + 1))
    return GeneratorSet(tuple(math.sqrt(q) for q in primes), primes)


@dataclass(frozen=True)
class MonomialMatrix:
    """A polynomial without constant term: ``sum_i a_i prod_j u_j**k_ij``."""

    rows: tuple[tuple[int, ...], ...]
    coeffs: tuple

    def __post_init__(self):
        rows = tuple(tuple(int(k) for k in row) for row in self.rows)
        coeffs = tuple(self.coeffs)
        if not rows:
            raise DomainError("empty polynomial")
        if len(coeffs) != len(rows):
            raise DomainError(f"{len(rows)} rows but {len(coeffs)} coefficients")
        widths = {len(r) for r in rows}
        if len(widths) != 1 or 0 in widths:
            raise DomainError("rows must share one positive length")
        for row, a in zip(rows, coeffs):
            if any(k < 0 for k in row):
                raise DomainError(f"negative exponent in row {row}")
            if not any(row):
                raise DomainError("all-zero row: the polynomial has a constant term")
            if a == 0:
                raise DomainError(f"zero coefficient on row {row}")
        if len(set(rows)) != len(rows):
            raise DomainError("repeated row: monomials must be merged first")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def n_vars(self) -> int:
        return len(self.rows[0])

    @classmethod
    def from_polynomial(cls, poly: dict) -> MonomialMatrix:
        """From ``{exponent tuple: coefficient}``; zero coefficients dropped."""
        items = [(tuple(k), a) for k, a in poly.items() if a != 0]
        return cls(tuple(k for k, _ in items), tuple(a for _, a in items))

    @classmethod
    def from_json(cls, obj) -> MonomialMatrix:
        if isinstance(obj, str):
            obj = json.loads(obj)
        coeffs = tuple(Fraction(c) if isinstance(c, str) else c for c in obj["coeffs"])
        return cls(tuple(tuple(r) for r in obj["rows"]), coeffs)

    def evaluate(self, point: Sequence[float]) -> float:
        """``P(u_1, ..., u_n)``, the direct (unreduced) evaluation."""
        return math.fsum(
            float(a) * math.prod(u**k for u, k in zip(point, row)) for row, a in zip(self.rows, self.coeffs)
        )


def reduce_polynomial(M: MonomialMatrix, H: GeneratorSet) -> ExpLike:
    """Rewrite ``P(e^{r_1 t}, ..., e^{r_n t})`` as ``sum a_i e^{b_i t}``, ``b_i = sum_j r_j k_ij``.

    Distinct nonzero rows give distinct nonzero exponents because H is
    linearly independent over Q; the row checks in :class:`MonomialMatrix`
    certify that.  The float exponents are then checked for a separation of
    at least ``TOLERANCE`` as a guard against rounding.
    """
    if M.n_vars != len(H):
        raise DomainError(f"polynomial in {M.n_vars} variables but {len(H)} generators")
    betas = [math.fsum(r * k for r, k in zip(H.values, row)) for row in M.rows]
    ordered = sorted(betas)
    if any(abs(b) < TOLERANCE for b in betas):
        raise ArithmeticError("a reduced exponent is numerically zero")
    for b1, b2 in zip(ordered, ordered[1:]):
        if b2 - b1 < TOLERANCE:
            raise ArithmeticError(f"exponents {b1!r} and {b2!r} separated by less than {TOLERANCE}")
    return ExpLike(tuple((float(a), b) for a, b in zip(M.coeffs, betas)), labels=M.rows)


# ------------------------------------------------------- compositions with F_p

def compose_with_F(f: ExpLike, p=DEFAULT_P, x=0, depth: int = 200) -> float:
    """``f(F_p(x))``.  Dyadic or rational x uses the exact cdf before rounding once."""
    return eval_explike(f, float(cdf(p, x, depth)))


def nonconstancy_witness(f: ExpLike, p=DEFAULT_P, interval: DyadicInterval = DyadicInterval.at(0, 0),
                         threshold: float = TOLERANCE, max_refine: int = 16):
    """Two dyadic points of ``interval`` where ``f o F_p`` differs by more than threshold.

    Searches dyadic grids on the interval, refining one level at a time from
    the endpoints alone.  Returns ``(x, y, gap)`` with ``x < y`` for the pair
    of extreme values on the first grid that shows a gap.
    """
    k, n = interval.left.numerator, interval.level
    values: dict[int, float] = {}
    for j in range(max_refine + 1):
        level = n + j
        step = 1 << (max_refine - j)
        for i in range(0, (1 << max_refine) + 1, step):
            if i not in values:
                point = DyadicRational((k << max_refine) + i, n + max_refine)
                values[i] = compose_with_F(f, p, point)
        lo_i = min(values, key=values.get)
        hi_i = max(values, key=values.get)
        gap = values[hi_i] - values[lo_i]
        if gap > threshold:
            a, b = sorted((lo_i, hi_i))
            shift = max_refine - j
            return (
                DyadicRational(((k << max_refine) + a) >> shift, level),
                DyadicRational(((k << max_refine) + b) >> shift, level),
                gap,
            )
    raise NoWitnessError(
        f"f o F_p looks constant on {interval} down to level {n + max_refine}"
    )


def nonzero_witness(f: ExpLike, p=DEFAULT_P, interval: DyadicInterval = DyadicInterval.at(0, 0),
                    threshold: float = TOLERANCE, max_refine: int = 16):
    """A dyadic point of ``interval`` where ``|f o F_p|`` exceeds threshold."""
    k, n = interval.left.numerator, interval.level
    for j in range(max_refine + 1):
        for i in range(0, (1 << j) + 1):
            point = DyadicRational((k << j) + i, n + j)
            v = compose_with_F(f, p, point)
            if abs(v) > threshold:
                return point, v
    raise NoWitnessError(f"f o F_p looks identically zero on {interval}")


@dataclass(frozen=True)
class ProbeTable:
    levels: tuple[int, ...]
    medians: tuple[float, ...]

    def nonincreasing(self, slack: float = 0.0) -> bool:
        """Each median at most ``(1 + slack)`` times its predecessor."""
        return all(b <= a * (1 + slack) for a, b in zip(self.medians, self.medians[1:]))

    def rows(self):
        return list(zip(self.levels, self.medians))


def quotient_medians(func: Callable[[np.ndarray], np.ndarray], xs: np.ndarray, levels: Iterable[int]) -> ProbeTable:
    """Medians of ``|func(x+h) - func(x-h)| / 2h`` over xs, for ``h = 2**-level``."""
    levels = tuple(levels)
    meds = []
    for level in levels:
        h = math.ldexp(1.0, -level)
        q = np.abs(func(xs + h) - func(xs - h)) / (2 * h)
        meds.append(float(np.median(q)))
    return ProbeTable(levels, tuple(meds))


def singularity_probe(f: Optional[ExpLike], p=DEFAULT_P, samples: int = 1000,
                      levels: Iterable[int] = range(10, 21), seed=0) -> ProbeTable:
    """Median symmetric difference quotients of ``f o F_p`` at uniform random points.

    ``f=None`` probes ``F_p`` itself.  For a function with derivative zero
    almost everywhere the medians shrink as the step shrinks; for a smooth
    function they settle at ``|g'|``.
    """
    if samples < 100:
        raise DomainError(f"need at least 100 samples, got {samples}")
    rng = np.random.default_rng(seed)
    xs = rng.random(samples)
    p = BernoulliParam.of(p)
    if f is None:
        def func(x):
            return cdf_array(p, x)
    else:
        def func(x):
            return f(cdf_array(p, x))
    return quotient_medians(func, xs, levels)


def constant_approx_error(c: float, r: float) -> float:
    """``sup_x |c e^{r F_p(x)} - c| = |c| |e^r - 1|``.

    ``F_p`` runs over all of [0, 1] and ``u -> e^{ru}`` is monotone, so the
    supremum sits at ``F_p = 1`` and does not depend on p.
    """
    if r == 0:
        raise DomainError("r must be nonzero")
    return abs(c) * abs(math.expm1(r))
