import random
from fractions import Fraction

import pytest

from singbv.algebra import MonomialMatrix
from singbv.dyadic import DyadicInterval, digit_counts
from singbv.transport import TransportProblem
from singbv.variation import LinearCombination

#: criterion number -> (title, "PASS" | "FAIL"); filled by test_acceptance
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE):
        title, status = ACCEPTANCE[num]
        terminalreporter.write_line(f"{status}  criterion {num:>2}: {title}")


def random_param(rng: random.Random) -> Fraction:
    den = rng.randint(3, 60)
    num = rng.randint(1, (den - 1) // 2)
    return Fraction(num, den)


def random_combination(rng: random.Random, max_terms: int = 3) -> LinearCombination:
    k = rng.randint(1, max_terms)
    ps = set()
    while len(ps) < k:
        ps.add(random_param(rng))
    pairs = []
    for p in ps:
        a = 0
        while a == 0:
            a = rng.randint(-9, 9)
        pairs.append((Fraction(a, rng.randint(1, 5)), p))
    return LinearCombination.of(pairs)


def random_transport_problem(rng: random.Random, max_n0: int = 5, max_extra: int = 6) -> TransportProblem:
    while True:
        n0 = rng.randint(0, max_n0)
        I0 = DyadicInterval.at(rng.randrange(1 << n0), n0)
        n1 = n0 + rng.randint(0, max_extra)
        I1 = DyadicInterval.at(rng.randrange(1 << n1), n1)
        c0, c1 = digit_counts(I0.left), digit_counts(I1.left)
        if c1.zeros >= c0.zeros and c1.ones >= c0.ones:
            return TransportProblem(I0, I1)


def random_monomial_matrix(rng: random.Random, n_vars: int = 3, max_rows: int = 5,
                           max_exp: int = 4) -> MonomialMatrix:
    m = rng.randint(1, max_rows)
    rows = set()
    while len(rows) < m:
        row = tuple(rng.randint(0, max_exp) for _ in range(n_vars))
        if any(row):
            rows.add(row)
    rows = sorted(rows)
    coeffs = []
    for _ in rows:
        a = 0
        while a == 0:
            a = rng.randint(-5, 5)
        coeffs.append(a)
    return MonomialMatrix(tuple(rows), tuple(coeffs))


@pytest.fixture
def rng():
    return random.Random(20261015)
