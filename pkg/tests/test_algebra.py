import math
import random
from fractions import Fraction

import numpy as np
import pytest
import sympy

from conftest import random_monomial_matrix
from singbv.algebra import (
    ExpLike,
    GeneratorSet,
    MonomialMatrix,
    compose_with_F,
    constant_approx_error,
    count_preimage,
    eval_explike,
    isolate_preimage,
    make_generators,
    nonconstancy_witness,
    nonzero_witness,
    quotient_medians,
    reduce_polynomial,
    singularity_probe,
)
from singbv.bernoulli import cdf, cdf_grid
from singbv.dyadic import DyadicInterval
from singbv.errors import DomainError, NoWitnessError, RootClusterError

HAND = ExpLike(((1, 2), (-3, 1)))


def random_integer_explike(rng: random.Random, max_range: int = 4) -> ExpLike:
    m = rng.randint(1, max_range)
    exps = rng.sample([b for b in range(-4, 5) if b], m)
    return ExpLike(tuple((rng.choice([-1, 1]) * rng.uniform(0.2, 3.0), b) for b in exps))


def polynomial_roots_oracle(f: ExpLike, c: float, lo: float, hi: float):
    """Roots of f(x) = c via y = e^x, for integer exponents.

    Returns None when a root sits too close to an endpoint or to another root
    for the comparison to be meaningful.
    """
    exps = [int(b) for b in f.exponents] + [0]
    coeffs = list(f.coefficients) + [-c]
    shift = min(exps)
    poly = np.zeros(max(exps) - shift + 1)
    for a, b in zip(coeffs, exps):
        poly[b - shift] += a
    ys = np.roots(poly[::-1])
    real = sorted(y.real for y in ys if abs(y.imag) < 1e-9 and y.real > 0)
    xs = [math.log(y) for y in real]
    if any(abs(x - lo) < 1e-6 or abs(x - hi) < 1e-6 for x in xs):
        return None
    if any(b - a < 1e-6 for a, b in zip(xs, xs[1:])):
        return None
    if any(abs(y.imag) < 1e-3 and y.real > 0 and abs(y.imag) >= 1e-9 for y in ys):
        return None
    return [x for x in xs if lo < x < hi]


class TestExpLike:
    def test_eval_examples(self):
        assert eval_explike(HAND, 0) == -2
        assert eval_explike(HAND, math.log(2)) == pytest.approx(-2, abs=1e-12)
        assert HAND(np.array([0.0, 1.0])) == pytest.approx([-2, math.e**2 - 3 * math.e])

    def test_sorted_and_validated(self):
        f = ExpLike(((5, 3), (1, -1)), labels=("a", "b"))
        assert f.exponents == (-1, 3) and f.labels == ("b", "a")
        for bad in [(), ((0, 1),), ((1, 0),), ((1, 2), (2, 2))]:
            with pytest.raises(DomainError):
                ExpLike(bad)

    def test_overflow_names_term(self):
        with pytest.raises(OverflowError, match="term 1"):
            eval_explike(ExpLike(((1, 1), (1, 800))), 1.0)

    def test_json(self):
        assert HAND.to_json() == {"terms": [[-3.0, 1.0], [1.0, 2.0]], "range": 2}


class TestRootCounting:
    def test_hand_case(self):
        roots = isolate_preimage(HAND, -2, -1, 1)
        assert len(roots) == 2
        assert abs(roots[0]) <= 1e-9 and abs(roots[1] - math.log(2)) <= 1e-9

    def test_no_roots(self):
        assert count_preimage(ExpLike(((1, 1),)), 0, -5, 5) == 0
        assert count_preimage(ExpLike(((1, 1), (1, 2))), -1, -5, 5) == 0

    def test_root_at_endpoint(self):
        assert isolate_preimage(HAND, -2, 0, 0.5) == pytest.approx([0.0], abs=1e-12)

    def test_close_pair_is_resolved_or_flagged(self):
        # (e^x - 1)(e^x - (1 + eps)) has roots 0 and log1p(eps)
        eps = 1e-4
        f = ExpLike(((1, 2), (-(2 + eps), 1)))
        roots = isolate_preimage(f, -(1 + eps), -1, 1)
        assert roots == pytest.approx([0.0, math.log1p(eps)], abs=1e-9)
        with pytest.raises(RootClusterError):
            isolate_preimage(f, -(1 + eps), -1, 1, tol=1e-3)

    def test_unresolvable_pair_raises(self):
        # at eps = 1e-7 the dip between the roots is below float resolution
        eps = 1e-7
        f = ExpLike(((1, 2), (-(2 + eps), 1)))
        with pytest.raises(RootClusterError):
            isolate_preimage(f, -(1 + eps), -1, 1)

    def test_tangency_raises(self):
        # (e^x - 1)^2 touches zero at x = 0
        with pytest.raises(RootClusterError):
            isolate_preimage(ExpLike(((1, 2), (-2, 1))), -1, -1, 1)

    def test_bad_interval(self):
        with pytest.raises(DomainError):
            count_preimage(HAND, 0, 1, 1)

    def test_polynomial_oracle(self, rng):
        compared = 0
        for _ in range(300):
            f = random_integer_explike(rng)
            c = rng.uniform(-5, 5)
            expected = polynomial_roots_oracle(f, c, 0.0, 1.0)
            if expected is None:
                continue
            got = isolate_preimage(f, c, 0.0, 1.0)
            assert len(got) == len(expected) <= f.range
            assert got == pytest.approx(expected, abs=1e-7)
            compared += 1
        assert compared > 250

    def test_dense_sign_change_oracle(self, rng):
        xs = np.linspace(0, 1, 20001)
        for _ in range(100):
            m = rng.randint(1, 4)
            f = ExpLike(tuple((rng.uniform(-3, 3), b) for b in rng.sample([0.5, -1.3, 2.7, math.pi, -math.e, 1.9], m)))
            c = rng.uniform(-5, 5)
            v = f(xs) - c
            changes = int(np.sum(np.sign(v[1:]) * np.sign(v[:-1]) < 0))
            got = count_preimage(f, c, 0, 1, tol=1e-12)
            # the grid can only miss roots (tangencies, near pairs), never invent them
            assert changes <= got <= m


class TestGenerators:
    def test_primes(self):
        H = make_generators(3)
        assert H.tags == (2, 3, 5)
        assert H.values == pytest.approx((math.sqrt(2), math.sqrt(3), math.sqrt(5)))
        assert H.symbolic((1, 0, 2)) == sympy.sqrt(2) + 2 * sympy.sqrt(5)

    def test_validation(self):
        with pytest.raises(DomainError):
            make_generators(0)
        with pytest.raises(DomainError):
            GeneratorSet((1.0, 1.0), (2, 2))


class TestReduction:
    H = make_generators(2)

    def test_product(self):
        f = reduce_polynomial(MonomialMatrix(((1, 1),), (1,)), self.H)
        assert f.terms == ((1.0, pytest.approx(math.sqrt(2) + math.sqrt(3))),)
        assert f.labels == ((1, 1),)

    def test_square_minus_linear(self):
        f = reduce_polynomial(MonomialMatrix.from_polynomial({(2, 0): 1, (1, 0): -1}), self.H)
        r1 = math.sqrt(2)
        assert f.terms == ((-1.0, pytest.approx(r1)), (1.0, pytest.approx(2 * r1)))
        assert f.labels == ((1, 0), (2, 0))

    @pytest.mark.parametrize(
        "rows, coeffs",
        [
            (((0, 0),), (1,)),
            (((1, 0), (1, 0)), (1, 2)),
            (((1, 0),), (0,)),
            (((1, -1),), (1,)),
            ((), ()),
        ],
    )
    def test_invalid_matrices(self, rows, coeffs):
        with pytest.raises(DomainError):
            MonomialMatrix(rows, coeffs)

    def test_variable_count_mismatch(self):
        with pytest.raises(DomainError):
            reduce_polynomial(MonomialMatrix(((1, 0, 0),), (1,)), self.H)

    def test_reduced_matches_direct_evaluation(self, rng):
        H = make_generators(3)
        for _ in range(50):
            M = random_monomial_matrix(rng)
            f = reduce_polynomial(M, H)
            assert f.range == len(M.rows)
            for t in (0.0, 0.3, 1.0):
                direct = M.evaluate([math.exp(r * t) for r in H.values])
                assert f(t) == pytest.approx(direct, rel=1e-12, abs=1e-12)

    def test_symbolic_distinctness(self, rng):
        H = make_generators(3)
        for _ in range(20):
            M = random_monomial_matrix(rng)
            exprs = [H.symbolic(row) for row in M.rows]
            assert len({sympy.nsimplify(e) for e in exprs}) == len(exprs)

    def test_json_round_trip(self):
        M = MonomialMatrix.from_json('{"rows": [[1, 0], [0, 2]], "coeffs": [2, "-1/3"]}')
        assert M.coeffs == (2, Fraction(-1, 3))


class TestComposition:
    def test_anchors(self):
        f = ExpLike(((2, 1),))
        assert compose_with_F(f, "1/4", 0) == 2
        assert compose_with_F(f, "1/4", Fraction(1, 2)) == pytest.approx(2 * math.exp(0.25))
        assert compose_with_F(f, "1/4", 1) == pytest.approx(2 * math.e)

    def test_nonconstancy_witness_exp(self):
        f = ExpLike(((1, 1),))
        x, y, gap = nonconstancy_witness(f, "1/4")
        assert x.value < y.value
        assert gap == pytest.approx(math.e - 1)

    def test_witness_on_small_interval(self, rng):
        H = make_generators(3)
        I = DyadicInterval.at(2, 3)
        for _ in range(50):
            f = reduce_polynomial(random_monomial_matrix(rng), H)
            x, y, gap = nonconstancy_witness(f, "1/4", I)
            assert I.contains(x) and I.contains(y)
            assert gap > 1e-9
            assert abs(compose_with_F(f, "1/4", y) - compose_with_F(f, "1/4", x)) == pytest.approx(gap)

    def test_no_witness(self):
        # e^{x} - e^{x + tiny} stays below threshold
        f = ExpLike(((1e-12, 1),))
        with pytest.raises(NoWitnessError):
            nonconstancy_witness(f, "1/4", max_refine=3)

    def test_nonzero_witness(self):
        point, v = nonzero_witness(HAND, "1/4")
        assert abs(v) > 1e-9
        assert v == pytest.approx(HAND(float(cdf("1/4", point))))


class TestProbe:
    def test_identity_control(self):
        xs = np.random.default_rng(0).random(1000) * 0.9 + 0.05
        table = quotient_medians(lambda x: x, xs, range(10, 21))
        assert table.medians == pytest.approx([1.0] * 11, rel=1e-6)

    def test_cdf_medians_shrink(self):
        table = singularity_probe(None, "1/4", samples=1000, seed=0)
        assert table.levels == tuple(range(10, 21))
        assert table.medians[-1] < table.medians[0] / 2
        # two levels at a time the decrease is monotone
        assert all(b < a for a, b in zip(table.medians, table.medians[2:]))

    def test_population_medians(self):
        # odd level 2k+1 gives median 0.75**k; even levels sit a little above
        # the preceding odd level, so the full sequence is not monotone
        table = singularity_probe(None, "1/4", samples=100_000, levels=range(17, 22), seed=9)
        med = dict(table.rows())
        for level in (17, 19, 21):
            assert med[level] == pytest.approx(0.75 ** ((level - 1) // 2), rel=0.02)
        assert med[18] > med[17] and med[20] > med[19]
        assert med[20] > 0.05

    def test_composition_probe(self):
        table = singularity_probe(ExpLike(((1, 1),)), "1/4", samples=200, seed=1)
        assert table.medians[-1] < table.medians[0]

    def test_min_samples(self):
        with pytest.raises(DomainError):
            singularity_probe(None, samples=10)


class TestConstantApprox:
    def test_examples(self):
        assert constant_approx_error(1, 1) == pytest.approx(math.e - 1)
        assert constant_approx_error(-2, 1) == pytest.approx(2 * (math.e - 1))
        assert constant_approx_error(1, -1) == pytest.approx(1 - math.exp(-1))

    def test_matches_grid_supremum(self):
        grid = np.array([float(v) for v in cdf_grid("1/3", 10)])
        for c, r in [(1, 0.5), (3, -0.2), (-1, 2)]:
            assert np.max(np.abs(c * np.exp(r * grid) - c)) == pytest.approx(constant_approx_error(c, r))

    def test_zero_rate(self):
        with pytest.raises(DomainError):
            constant_approx_error(1, 0)
