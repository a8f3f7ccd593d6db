import csv
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.special import beta as beta_fn, gamma as gamma_fn

from dunklhardy.fields import gaussian, random_test_field, zero_field
from dunklhardy.quadrature import (
    Ball, Box, box_rule, integrate_mu_k, integration_by_parts_residual, macdonald_mehta,
    macdonald_mehta_rank1, polar_rule, radial_moment, radial_rule, resolution_levels, sphere_constant,
    sphere_rule,
)
from dunklhardy.roots import make_context, reflect

# invariant degrees for the product-formula oracle
DEGREES = {("A", 2): (1, 2, 3), ("A", 3): (1, 2, 3, 4), ("B", 2): (2, 4), ("B", 3): (2, 4, 6),
           ("D", 4): (2, 4, 4, 6), ("Z2", 2): (2, 2), ("Z2", 3): (2, 2, 2)}


def mehta_product(family, n, k):
    """(2 pi)^(N/2) prod Gamma(1 + d k)/Gamma(1 + k), all roots of squared length 2."""
    degs = DEGREES[(family, n)]
    return (2 * math.pi) ** (len(degs) / 2) * math.prod(gamma_fn(1 + d * k) / gamma_fn(1 + k) for d in degs)


def sphere_oracle(family, n, k):
    ctx = make_context(family, n, k)
    return mehta_product(family, n, k) / radial_moment(ctx, 0.0)


def test_resolution_levels():
    assert resolution_levels(8) == (8, 16)
    assert resolution_levels((6, 10)) == (6, 10)
    with pytest.raises(ValueError):
        resolution_levels((10, 10))


def test_degenerate_domains():
    with pytest.raises(ValueError):
        Box((0, 0), (1, 0))
    with pytest.raises(ValueError):
        Ball(0.0)


def test_unit_box_flat():
    ctx = make_context("Z2", 2, 0)
    est = integrate_mu_k(ctx, lambda x: np.ones(len(x)), Box((0, 0), (1, 1)), 4)
    assert est.value == pytest.approx(1.0, abs=1e-14)


def test_rank_one_box_weight():
    ctx = make_context("Z2", 1, 0.5)
    est = integrate_mu_k(ctx, lambda x: np.ones(len(x)), Box((-1,), (1,)), 6)
    assert est.value == pytest.approx(math.sqrt(2), rel=1e-13)


@pytest.mark.parametrize("k,expected", [(0.0, math.sqrt(2 * math.pi)), (0.5, 2 * math.sqrt(2)),
                                        (1.0, 4 * math.sqrt(2) * gamma_fn(1.5))])
def test_rank_one_mehta(k, expected):
    assert macdonald_mehta_rank1(k) == pytest.approx(expected, rel=1e-14)
    est = macdonald_mehta(make_context("Z2", 1, k), n=16)
    assert est.value == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("family,n,k", [("A", 2, 0.5), ("B", 2, 0.5), ("B", 3, 0.5), ("Z2", 2, 1.5),
                                        ("A", 2, 2.0)])
def test_mehta_against_degree_product(family, n, k):
    est = macdonald_mehta(make_context(family, n, k), n=12)
    assert est.value == pytest.approx(mehta_product(family, n, k), rel=1e-9)


def test_sphere_area_and_beta_oracle():
    flat = make_context("Z2", 3, 0)
    assert sphere_constant(flat, 8).value == pytest.approx(4 * math.pi, rel=1e-13)
    for k1, k2 in [(0.5, 0.25), (1.0, 0.0), (0.3, 1.7)]:
        ctx = make_context("Z2", 2, (k1, k2))
        truth = 2 ** (1 + k1 + k2) * beta_fn(k1 + 0.5, k2 + 0.5)
        assert sphere_constant(ctx, 16).value == pytest.approx(truth, rel=1e-12)


@pytest.mark.parametrize("family,n,k", [("A", 2, 0.5), ("B", 2, (0.3, 0.7)), ("Z2", 3, (0.5, 0.2, 1.0))])
def test_sphere_constant_self_convergence(family, n, k):
    est = sphere_constant(make_context(family, n, k), 16)
    assert est.error < 1e-6 * est.value


@pytest.mark.parametrize("family,n,res,tol", [("A", 3, 16, 1e-6), ("B", 3, 16, 1e-6)])
def test_rank_three_sphere_constant(family, n, res, tol):
    est = sphere_constant(make_context(family, n, 0.5), res)
    assert est.error < tol * est.value
    assert est.value == pytest.approx(sphere_oracle(family, n, 0.5), rel=tol)


def test_d4_sphere_constant_achieved_level():
    # generic product rule: algebraic convergence, 7.3e-3 relative at n = 16, 1.9e-3 at n = 32
    ctx = make_context("D", 4, 0.5)
    truth = sphere_oracle("D", 4, 0.5)
    errs = [abs(sphere_rule(ctx, n).weights.sum() / truth - 1) for n in (8, 16, 32)]
    assert errs[0] > errs[1] > errs[2]
    assert errs[1] < 1e-2 and errs[2] < 2.5e-3


@pytest.mark.parametrize("family,n,k", [("A", 2, 0.5), ("B", 3, 1.0), ("D", 4, 0.5), ("Z2", 2, (1.0, 0.5))])
def test_weights_nonnegative(family, n, k):
    ctx = make_context(family, n, k)
    assert np.all(sphere_rule(ctx, 8).weights >= 0)
    assert np.all(radial_rule(ctx, 8, 3.0).weights >= 0)
    if ctx.dim <= 3:
        _, w = box_rule(ctx, Box((-1,) * ctx.dim, (1.5,) * ctx.dim), 6)
        assert np.all(w >= 0)


@given(st.integers(0, 10_000), st.sampled_from([("A", 2, 0.5), ("B", 2, (0.3, 0.7)), ("Z2", 2, (0.5, 1.0))]))
def test_reflection_invariance_of_measure(seed, spec):
    ctx = make_context(*spec)
    rng = np.random.default_rng(seed)
    f = random_test_field(ctx.dim, rng)
    a = ctx.system.roots[rng.integers(len(ctx.system.roots))]
    plain = integrate_mu_k(ctx, f, Ball(7.0), 8)
    moved = integrate_mu_k(ctx, lambda x: f(reflect(a, x)), Ball(7.0), 8)
    assert abs(plain.value - moved.value) <= 10 * (plain.error + moved.error) + 1e-11


@pytest.mark.parametrize("family,n,k", [("A", 2, 0.5), ("Z2", 2, (0.5, 0.25))])
def test_polar_factorisation(family, n, k):
    ctx = make_context(family, n, k)
    radius = 2.0
    g = lambda r: np.exp(-r**2) * (1 + r)
    y = lambda xi: 1 + xi[:, 0] ** 2 - 0.5 * xi[:, -1]

    def field(x):
        r = np.linalg.norm(x, axis=1)
        return g(r) * y(x / r[:, None])

    full = integrate_mu_k(ctx, field, Ball(radius), 16)
    product = radial_rule(ctx, 64, radius).integrate(g) * sphere_rule(ctx, 32).integrate(y)
    assert full.value == pytest.approx(product, rel=1e-10)


def test_group_invariant_integral_splits_over_chambers():
    ctx = make_context("A", 2, 0.5)
    f = gaussian([0, 0, 0], 1.0)
    total = integrate_mu_k(ctx, f, Ball(7.0), 12).value
    pts, wts = polar_rule(ctx, 7.0, 24)
    signs = np.sign(pts @ ctx.system.positive_roots.T)
    chamber = np.all(signs == signs[0], axis=1)
    one = float(np.dot(wts[chamber], f(pts[chamber])))
    assert total == pytest.approx(ctx.group.order * one, rel=1e-9)


def test_integration_by_parts():
    f0 = zero_field(1)
    g = gaussian([0.3], 0.6)
    assert integration_by_parts_residual(make_context("Z2", 1, 0.5), 0, f0, g).value == 0.0
    ctx = make_context("Z2", 1, 0.5)
    f = gaussian([0.4], 0.5)
    res = integration_by_parts_residual(ctx, 0, f, g, radius=6.0, n=1024)
    assert res.value < 1e-6
    flat = make_context("Z2", 2, 0)
    bf, bg = gaussian([0.2, -0.1], 0.7), gaussian([0.0, 0.5], 0.5)
    assert integration_by_parts_residual(flat, 1, bf, bg, radius=5.0, n=32).value < 1e-8


@pytest.mark.parametrize("spec", [("A", 2, 0.5), ("B", 2, (0.3, 0.7))])
def test_integration_by_parts_weighted(spec):
    ctx = make_context(*spec)
    rng = np.random.default_rng(5)
    f, g = random_test_field(ctx.dim, rng), random_test_field(ctx.dim, rng)
    for i in range(ctx.dim):
        assert integration_by_parts_residual(ctx, i, f, g, radius=7.0, n=16).value < 1e-6


def test_sphere_rule_csv(tmp_path):
    ctx = make_context("B", 2, 0.5)
    rule = sphere_rule(ctx, 6)
    path = tmp_path / "rule.csv"
    rule.to_csv(path)
    rows = list(csv.reader(open(path)))
    assert rows[0] == ["x0", "x1", "weight"] and len(rows) == len(rule.weights) + 1
    assert sum(float(r[-1]) for r in rows[1:]) == pytest.approx(rule.weights.sum(), rel=1e-15)


def test_non_finite_samples_rejected():
    ctx = make_context("Z2", 1, 0)
    with pytest.raises(FloatingPointError):
        integrate_mu_k(ctx, lambda x: np.full(len(x), np.nan), Box((0,), (1,)), 4)
