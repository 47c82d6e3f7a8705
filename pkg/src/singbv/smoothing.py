"""Iterated antiderivatives ``G_n`` of ``F_p`` on dyadic grids.

``G_1(x) = integral_0^x F_p`` and ``G_{n+1}(x) = integral_0^x G_n``.  Each
``G_n`` has n continuous derivatives with ``G_n^(n) = F_p``.  ``G_1`` is exact
on the grid: on a level-d interval ``I = [t, t + h]`` self-similarity gives
``F_p(t + hs) = F_p(t) + mu_p(I) F_p(s)``, hence
``integral_I F_p = h (F_p(t) + p mu_p(I))``.  Higher orders use the trapezoid
rule in exact rational arithmetic, with a running error bound.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from statistics import median
from typing import Optional

from singbv.bernoulli import BernoulliParam, cdf_grid
from singbv.errors import DomainError


@dataclass(frozen=True)
class SmoothGrid:
    order: int
    depth: int
    values: tuple[Fraction, ...]
    #: True when ``values`` are the exact integrals (order 1 only)
    exact: bool
    #: bound on ``|values[j] - G_order(j / 2**depth)|``
    error_bound: Fraction

    @property
    def step(self) -> Fraction:
        return Fraction(1, 1 << self.depth)

    def floats(self) -> list[float]:
        return [float(v) for v in self.values]


def _trapezoid(values: tuple[Fraction, ...], h: Fraction) -> tuple[Fraction, ...]:
    out = [Fraction(0)]
    acc = Fraction(0)
    half_h = h / 2
    for a, b in zip(values, values[1:]):
        acc += half_h * (a + b)
        out.append(acc)
    return tuple(out)


def iterated_integral(p, order: int, depth: int) -> SmoothGrid:
    """``G_order`` at the ``2**depth + 1`` points ``j / 2**depth``.

    Error bound per trapezoid step is ``h * Var(integrand) / 2``; integrands
    are nondecreasing, so their variation is their value at 1.  Errors in the
    integrand carry through integration over [0, 1] undiminished, so the
    bounds add up.
    """
    if order < 1:
        raise DomainError(f"order must be >= 1, got {order}")
    if depth < order + 2:
        raise DomainError(f"depth must be >= order + 2 = {order + 2}, got {depth}")
    p = BernoulliParam.of(p)
    h = Fraction(1, 1 << depth)
    F = cdf_grid(p, depth)
    G = [Fraction(0)]
    acc = Fraction(0)
    for j in range(1 << depth):
        acc += h * (F[j] + p.p * (F[j + 1] - F[j]))
        G.append(acc)
    values = tuple(G)
    err = Fraction(0)
    for _ in range(order - 1):
        err += h * (values[-1] - values[0]) / 2
        values = _trapezoid(values, h)
    return SmoothGrid(order, depth, values, order == 1, err)


def _difference(values, index: int, order: int, spacing: int) -> Fraction:
    """n-th finite difference of ``values`` centred at ``index``."""
    from math import comb

    half = order * spacing // 2
    total = Fraction(0)
    for i in range(order + 1):
        total += (-1) ** (order - i) * comb(order, i) * values[index - half + i * spacing]
    return total


@dataclass(frozen=True)
class FiniteDiffReport:
    order: int
    depth: int
    max_deviation: float
    #: ``max_I mu_p(I) / 2`` over level-depth intervals I
    trapezoid_bound: float
    #: median and max of the order+1 difference quotient; informational only
    next_order_median: Optional[float] = None
    next_order_max: Optional[float] = None


def finite_diff_check(g: SmoothGrid, p) -> FiniteDiffReport:
    """Compare the centred n-th difference quotient of ``G_n`` with ``F_p``.

    Odd orders use spacing ``2h`` so the stencil stays centred on a grid
    point.  Deviations are taken at every interior point where the stencil
    fits.

    The trapezoid bound: the centred first difference of the exact ``G_1``
    averages ``F_p`` over ``[x - h, x + h]``, which can differ from ``F_p(x)``
    by at most half the mass of one adjacent cell.
    """
    if g.depth < g.order + 2:
        raise DomainError("grid too coarse for this order")
    p = BernoulliParam.of(p)
    F = cdf_grid(p, g.depth)
    h = g.step
    n = g.order
    N = 1 << g.depth

    def quotients(order):
        spacing = 2 if order % 2 else 1
        half = order * spacing // 2
        scale = (spacing * h) ** order
        return {j: _difference(g.values, j, order, spacing) / scale for j in range(half, N - half + 1)
                if 0 < j < N}

    q = quotients(n)
    max_dev = max(abs(v - F[j]) for j, v in q.items())
    bound = max(p.p, p.q) ** g.depth / 2
    nxt = quotients(n + 1) if N > 2 * (n + 2) else {}
    nxt_abs = [abs(float(v)) for v in nxt.values()]
    return FiniteDiffReport(
        order=n,
        depth=g.depth,
        max_deviation=float(max_dev),
        trapezoid_bound=float(bound),
        next_order_median=median(nxt_abs) if nxt_abs else None,
        next_order_max=max(nxt_abs) if nxt_abs else None,
    )
