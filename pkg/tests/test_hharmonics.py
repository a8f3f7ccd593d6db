import json

import numpy as np
import pytest

from dunklhardy.fields import gaussian
from dunklhardy.hharmonics import (
    chebyshev_radii, eigenvalue, eigenvalue_residual, expand, gram_matrix, hharmonic_space, reconstruction_error,
)
from dunklhardy.roots import make_context


def test_degree_zero():
    ctx = make_context("A", 2, 0.5)
    basis = hharmonic_space(ctx, 0)
    assert basis.dimension == 1 and basis.eigenvalue == 0
    assert eigenvalue_residual(ctx, basis.polys[0], 0) == 0.0


def test_classical_dimension():
    ctx = make_context("Z2", 3, 0)
    for n in range(5):
        assert hharmonic_space(ctx, n).dimension == 2 * n + 1
    assert eigenvalue(ctx, 2) == -6


def test_rank_one_dimensions():
    ctx = make_context("Z2", 1, 0.5)
    assert [hharmonic_space(ctx, n).dimension for n in range(5)] == [1, 1, 0, 0, 0]


def test_eigenvalue_formula():
    assert eigenvalue(make_context("A", 2, 1), 1) == -8


def test_negative_degree():
    with pytest.raises(ValueError):
        hharmonic_space(make_context("A", 2, 1), -1)


@pytest.mark.parametrize("family,n,k", [("A", 2, 0.5), ("B", 2, (0.3, 0.7)), ("Z2", 2, (1.0, 0.25))])
def test_orthogonal_across_degrees(family, n, k):
    ctx = make_context(family, n, k)
    polys = [p for d in range(5) for p in hharmonic_space(ctx, d).polys]
    gram = gram_matrix(ctx, polys)
    assert np.max(np.abs(gram - np.eye(len(polys)))) < 1e-8


def test_eigenvalue_residual_small_on_basis():
    ctx = make_context("B", 2, (0.3, 0.7))
    for d in range(1, 5):
        for p in hharmonic_space(ctx, d).polys:
            assert eigenvalue_residual(ctx, p, d) < 1e-8 * max(1.0, abs(eigenvalue(ctx, d)))


def test_expand_radial_and_zero():
    ctx = make_context("A", 2, 0.5)
    radii = chebyshev_radii(6, 2.0)
    radial = expand(ctx, gaussian([0, 0, 0], 1.0), 3, radii)
    for (n, i), v in radial.coefficients.items():
        if n > 0:
            assert np.max(np.abs(v)) < 1e-8
    zero = expand(ctx, lambda x: np.zeros(len(x)), 2, radii)
    assert all(np.all(v == 0) for v in zero.coefficients.values())


def test_expand_recovers_profile():
    ctx = make_context("B", 2, (0.3, 0.7))
    y = hharmonic_space(ctx, 1).polys[0].to_float()
    g = lambda r: np.exp(-r**2) * (1 + r)

    def f(x):
        r = np.linalg.norm(x, axis=1)
        return g(r) * y.evaluate(x / r[:, None])

    radii = chebyshev_radii(5, 2.0)
    coeffs = expand(ctx, f, 3, radii).coefficients
    assert np.allclose(coeffs[(1, 0)], g(radii), atol=1e-6)
    for key, v in coeffs.items():
        if key != (1, 0):
            assert np.max(np.abs(v)) < 1e-8
    assert np.all(expand(ctx, f, 3, radii).parseval_gap() > -1e-12)


def test_reconstruction_error_decreases():
    ctx = make_context("Z2", 2, (0.5, 0.25))
    f = gaussian([0.4, -0.2], 0.9)
    errs = [reconstruction_error(ctx, f, n, 3.0) for n in range(0, 5)]
    assert all(a > b for a, b in zip(errs, errs[1:]))


def test_basis_json():
    doc = json.loads(hharmonic_space(make_context("A", 2, 0.5), 2).to_json())
    assert doc["degree"] == 2 and doc["dimension"] == len(doc["polys"]) and doc["gram_residual"] < 1e-8
