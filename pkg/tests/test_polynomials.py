from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from dunklhardy.polynomials import MultiPoly, monomial_basis, nullspace, random_poly


def test_arithmetic_and_evaluation():
    x, y = MultiPoly.variable(2, 0), MultiPoly.variable(2, 1)
    p = (x + y) ** 2 - x * y * 2
    assert p == x**2 + y**2
    assert p([Fraction(1, 2), 3]) == Fraction(37, 4)
    assert np.allclose(p.evaluate(np.array([[1.0, 2.0], [0.5, -1.0]])), [5.0, 1.25])


def test_diff_and_laplacian():
    x, y, z = (MultiPoly.variable(3, i) for i in range(3))
    p = x**3 * y + z**2
    assert p.diff(0) == x**2 * y * 3
    assert p.laplacian() == x * y * 6 + 2


def test_exact_linear_division():
    x, y = MultiPoly.variable(2, 0), MultiPoly.variable(2, 1)
    q = x**2 + x * y * 3 - 7
    assert (q * (x - y)).divide_linear((1, -1)) == q
    with pytest.raises(ArithmeticError):
        (x**2 + 1).divide_linear((1, -1))


def test_json_round_trip():
    p = MultiPoly(2, {(1, 0): Fraction(3, 7), (0, 2): Fraction(-1)})
    assert MultiPoly.from_json(p.to_json()) == p
    doc = p.to_dict()
    assert doc["dim"] == 2 and {"exp", "num", "den"} <= set(doc["terms"][0])


def test_monomial_basis_size():
    assert len(monomial_basis(3, 4)) == 15
    assert len(monomial_basis(1, 5)) == 1


def test_nullspace_exact():
    rows = [[Fraction(1), Fraction(2), Fraction(3)], [Fraction(2), Fraction(4), Fraction(6)]]
    basis = nullspace(rows, 3)
    assert len(basis) == 2
    for v in basis:
        assert all(sum(r[j] * v[j] for j in range(3)) == 0 for r in rows)


@given(st.integers(0, 10_000))
def test_compose_linear_matches_evaluation(seed):
    rng = np.random.default_rng(seed)
    p = random_poly(3, 4, rng)
    m = [[Fraction(int(v)) for v in row] for row in rng.integers(-2, 3, (3, 3))]
    q = p.compose_linear(m)
    pt = [Fraction(int(v), 3) for v in rng.integers(-5, 6, 3)]
    image = [sum(m[i][j] * pt[j] for j in range(3)) for i in range(3)]
    assert q(pt) == p(image)
