from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from dunklhardy.fields import bump, gaussian, polynomial_field, product
from dunklhardy.many_particle import (
    ChamberSupport, HyperplaneError, a_type_constants, b_type_constants, chamber_bumps, chamber_extend, cms_apply,
    conjugation_residual, cross_term_identity, interaction_coefficient, many_particle_check, many_particle_check_a,
    many_particle_check_b, validate_support,
)
from dunklhardy.polynomials import MultiPoly
from dunklhardy.quadrature import Box, integrate_mu_k
from dunklhardy.roots import make_context, reflect

from conftest import off_walls


def _const(dim, c=1.0):
    return polynomial_field(MultiPoly.constant(dim, c))


def test_cms_examples():
    flat = make_context("A", 2, 0)
    sq = polynomial_field(sum((MultiPoly.variable(3, i) ** 2 for i in range(3)), MultiPoly(3)).to_float())
    assert cms_apply(flat, sq, [0.3, 1.0, -2.0]) == pytest.approx(6.0)
    assert cms_apply(make_context("Z2", 1, 1), _const(1), [1.0]) == pytest.approx(0.0)
    assert cms_apply(make_context("Z2", 1, 0.5), _const(1), [1.0]) == pytest.approx(0.25)


def test_cms_rejects_hyperplane():
    with pytest.raises(HyperplaneError):
        cms_apply(make_context("A", 2, 0.5), gaussian([0, 0, 0]), [1.0, 1.0, 0.0])


def test_conjugation_rank_one_example():
    ctx = make_context("Z2", 1, 0.5)
    assert conjugation_residual(ctx, gaussian([0.0], 1.0), [[1.0]])[0] < 1e-8


@pytest.mark.parametrize("family,n", [("Z2", 1), ("A", 2), ("B", 2)])
@pytest.mark.parametrize("kset", [0, 1, 2])
def test_conjugation_residual(family, n, kset):
    orbits = 1 if family != "B" else 2
    k = [(0.5,), (0.3, 0.7), (1.5, 0.25)][kset][:orbits]
    ctx = make_context(family, n, k if len(k) > 1 else k[0])
    rng = np.random.default_rng(kset)
    g = product(gaussian(rng.uniform(-0.5, 0.5, ctx.dim), 1.2),
                polynomial_field(MultiPoly.linear(list(rng.uniform(-1, 1, ctx.dim))) + 0.7))
    x = off_walls(ctx.system, rng, 100)
    assert np.max(conjugation_residual(ctx, g, x)) < 1e-8


def test_conjugation_flat_is_zero():
    ctx = make_context("B", 2, 0)
    g = gaussian([0.2, 0.1], 1.0)
    x = off_walls(ctx.system, np.random.default_rng(0), 20)
    assert np.max(conjugation_residual(ctx, g, x)) < 1e-12
    assert np.allclose(cms_apply(ctx, g, x), g.laplacian(x))


def test_cross_term_examples():
    assert cross_term_identity(make_context("Z2", 1, 0.5), [Fraction(3)]) == 0
    assert cross_term_identity(make_context("A", 2, 1), [1, 2, 4]) == 0
    assert cross_term_identity(make_context("B", 2, (1, 2)), [1, 3]) == 0
    with pytest.raises(HyperplaneError):
        cross_term_identity(make_context("A", 2, 1), [1, 1, 4])


@given(st.lists(st.fractions(min_value=-5, max_value=5, max_denominator=20), min_size=4, max_size=4),
       st.sampled_from([("A", 2), ("A", 3), ("B", 2), ("B", 3), ("Z2", 3), ("D", 4)]),
       st.fractions(0, 3, max_denominator=10), st.fractions(0, 3, max_denominator=10))
def test_cross_term_exact_zero(pt, system, k1, k2):
    family, n = system
    ctx = make_context(family, n, (k1, k2) if family == "B" else k1)
    x = pt[:ctx.dim]
    if any(sum(Fraction(d) * v for d, v in zip(a, x)) == 0 for a in ctx.system.positive_directions()):
        return
    assert cross_term_identity(ctx, x) == 0


def test_cross_term_float_route():
    ctx = make_context("I2", 5, 0.7)
    x = off_walls(ctx.system, np.random.default_rng(1), 1)[0]
    assert abs(cross_term_identity(ctx, x)) < 1e-10


def test_interaction_coefficient_maximum():
    assert interaction_coefficient(0.5) == 0.5
    assert interaction_coefficient(0.4) < 0.5 and interaction_coefficient(0.6) < 0.5
    assert interaction_coefficient(1.0) == 0.0
    grid = np.linspace(0, 1, 1001)
    assert grid[np.argmax([interaction_coefficient(k) for k in grid])] == pytest.approx(0.5)


def test_coordinate_constants():
    a = a_type_constants(3, 0.5)
    assert a["pair"] == 0.5 and a["radial"] == pytest.approx(4.0)
    for n in (2, 3, 5):
        b = b_type_constants(n, 0.5, 0.0)
        assert b["single"] == 0.25 and b["radial"] == pytest.approx((n - 1) ** 2)
    assert b_type_constants(3, 1.0, 1.0)["pair"] == 0.0


def test_support_validation():
    a2 = make_context("A", 2, 0.5).system
    with pytest.raises(HyperplaneError):
        validate_support(a2, ChamberSupport(((1.0, 1.1, 3.0),), (0.5,)))
    with pytest.raises(ValueError):
        validate_support(a2, ChamberSupport(((0.0, 1.0, 3.0), (0.0, 1.1, 3.0)), (0.2, 0.2)))


def test_chamber_extend_rank_one():
    system = make_context("Z2", 1, 0).system
    f = bump([1.5], 0.5)
    ext = chamber_extend(system, f, ChamberSupport(((1.5,),), (0.5,)))
    x = np.linspace(-3, 3, 61)[:, None]
    assert np.allclose(ext(x), ext(-x)) and np.allclose(ext(x[x[:, 0] > 0]), f(x[x[:, 0] > 0]))


def test_chamber_extend_a2():
    ctx = make_context("A", 2, 0.0)
    c = np.array([0.0, 1.0, 2.5])
    f, support = bump(c, 0.4), ChamberSupport((tuple(c),), (0.4,))
    ext = chamber_extend(ctx.system, f, support)
    rng = np.random.default_rng(3)
    x = rng.uniform(-3, 3, (100, 3))
    for a in ctx.system.positive_roots:
        assert np.allclose(ext(reflect(a, x)), ext(x))
    ball = Box(tuple(c - 0.4), tuple(c + 0.4))
    one = integrate_mu_k(ctx, lambda y: f(y) ** 2, ball, 24, weighted=False).value
    whole = sum(integrate_mu_k(ctx, lambda y: ext(y) ** 2, Box(tuple(g @ c - 0.4), tuple(g @ c + 0.4)), 24,
                               weighted=False).value for g in ctx.group.elements)
    assert whole == pytest.approx(6 * one, rel=1e-10)
    with pytest.raises(ValueError):
        chamber_extend(ctx.system, f, ChamberSupport((tuple(c), (0.0, 2.5, 1.0)), (0.4, 0.4)))


@pytest.mark.parametrize("family,n,k", [("A", 2, 0.5), ("A", 2, 0.2), ("B", 2, (0.5, 0.0)), ("B", 2, (0.3, 0.7)),
                                        ("A", 3, 0.5), ("Z2", 2, (0.5, 1.0))])
def test_many_particle_margins(family, n, k):
    ctx = make_context(family, n, k)
    f, support = chamber_bumps(ctx.system, np.random.default_rng(7))
    rep = many_particle_check(ctx, f, support, 16 if ctx.dim > 3 else 24)
    assert rep.as_report().passed


def test_all_k_one_drops_interaction():
    ctx = make_context("A", 2, 1.0)
    f, support = chamber_bumps(ctx.system, np.random.default_rng(2))
    rep = many_particle_check(ctx, f, support, 16)
    assert rep.interaction_term.value == 0.0 and rep.margin >= -rep.as_report().quadrature_error


def test_coordinate_forms_agree_with_root_form():
    rng = np.random.default_rng(9)
    ctx = make_context("A", 2, 0.5)
    f, support = chamber_bumps(ctx.system, rng)
    generic, coord = many_particle_check(ctx, f, support, 20), many_particle_check_a(3, 0.5, f, support, 20)
    assert coord.interaction_term.value == pytest.approx(generic.interaction_term.value, rel=1e-12)
    assert coord.radial_constant == pytest.approx(generic.radial_constant)
    ctx = make_context("B", 2, (0.5, 0.2))
    f, support = chamber_bumps(ctx.system, rng)
    generic, coord = many_particle_check(ctx, f, support, 20), many_particle_check_b(2, 0.5, 0.2, f, support, 20)
    assert coord.interaction_term.value == pytest.approx(generic.interaction_term.value, rel=1e-12)
    assert coord.radial_constant == pytest.approx(generic.radial_constant)
    assert coord.as_report().passed


def test_unweighted_measure():
    # a k = 0 and a k > 0 context give the same Lebesgue integrals
    sys_rng = np.random.default_rng(4)
    a = make_context("A", 2, 0.0)
    f, support = chamber_bumps(a.system, sys_rng)
    plain = many_particle_check(a, f, support, 16)
    weighted = many_particle_check(make_context("A", 2, 0.7), f, support, 16)
    assert plain.gradient_term.value == weighted.gradient_term.value
    assert plain.radial_term.value == weighted.radial_term.value

