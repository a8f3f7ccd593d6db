"""Inverse-square many-particle operators and their Hardy inequalities.

The CMS-type operator attached to a root system is

    F_k g(x) = Delta g(x) - 2 sum_a k_a / <a, x>^2 (k_a g(x) - g(sigma_a x)),

and conjugating it by w_k^(1/2) gives back the Dunkl Laplacian.  The Hardy
inequalities here are in plain Lebesgue measure on the complement of the
reflection hyperplanes; test functions are sums of bumps whose supports stay
inside open Weyl chambers.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

import numpy as np

from .dunkl import DEFAULT_TAU
from .fields import ScalarField, bump
from .inequalities import RayleighReport, hardy_constant
from .quadrature import Box, IntegralEstimate, integrate_many
from .roots import DunklContext, RootSystem, as_fraction, chamber_info, generate_group, make_context


class HyperplaneError(ValueError):
    """A point or a support meets a reflection hyperplane."""


def _hyperplane_guard(ctx: DunklContext, x: np.ndarray, tau: float) -> np.ndarray:
    dots = x @ ctx.system.positive_roots.T
    if np.any(np.abs(dots) / math.sqrt(2.0) <= tau):
        raise HyperplaneError(f"point within {tau} of a reflection hyperplane")
    return dots


def cms_apply(ctx: DunklContext, g: ScalarField, x, tau: float = DEFAULT_TAU):
    """F_k g at points off the hyperplanes."""
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    x = np.atleast_2d(x)
    dots = _hyperplane_guard(ctx, x, tau)
    gx = g(x)
    out = g.laplacian(x)
    for j, (a, k) in enumerate(zip(ctx.system.positive_roots, ctx.k_positive)):
        if k == 0:
            continue
        t = dots[:, j]
        out = out - 2.0 * k / t**2 * (k * gx - g(x - t[:, None] * a))
    return out[0] if single else out


def weight_sqrt_field(ctx: DunklContext) -> ScalarField:
    """w_k^(1/2) = prod |<a, x>|^(k_a) with its analytic gradient and Hessian (off hyperplanes)."""
    roots, ks = ctx.system.positive_roots, ctx.k_positive

    def value(x):
        return np.prod(np.abs(x @ roots.T) ** ks, axis=-1)

    def log_grad(x):
        return (ks / (x @ roots.T)) @ roots

    def grad(x):
        return value(x)[..., None] * log_grad(x)

    def hess(x):
        lg = log_grad(x)
        curv = np.einsum("mj,ja,jb->mab", ks / (x @ roots.T) ** 2, roots, roots)
        return value(x)[..., None, None] * (lg[..., :, None] * lg[..., None, :] - curv)

    return ScalarField(value, grad, hess, None, "sqrt(w_k)")


def conjugation_residual(ctx: DunklContext, g: ScalarField, x, tau: float = DEFAULT_TAU):
    """|w_k^(-1/2) F_k (w_k^(1/2) g) - Delta_k g| pointwise."""
    from .dunkl import dunkl_laplacian_formula

    x = np.atleast_2d(np.asarray(x, dtype=float))
    h = weight_sqrt_field(ctx)
    lhs = cms_apply(ctx, h * g, x, tau) / h(x)
    return np.abs(lhs - dunkl_laplacian_formula(ctx, g, x))


def cross_term_identity(ctx: DunklContext, x):
    """sum over ordered pairs a != b of k_a k_b <a, b> / (<a, x> <b, x>).

    Exact (a Fraction) for rational x on systems with rational directions;
    every term is invariant under rescaling a root, so primitive directions
    stand in for the normalised roots.
    """
    system = ctx.system
    exact = system.exact and all(isinstance(v, (int, Fraction)) for v in x)
    if exact:
        xs = [as_fraction(v) for v in x]
        dirs = system.positive_directions()
        ks = ctx.k_exact_positive

        def dot(u, v):
            return sum((Fraction(p) * q for p, q in zip(u, v)), Fraction(0))

        dots = [dot(d, xs) for d in dirs]
        total = Fraction(0)
    else:
        xs = np.asarray(x, dtype=float)
        dirs = list(system.positive_roots)
        ks = list(ctx.k_positive)
        dots = [float(d @ xs) for d in dirs]
        total = 0.0

        def dot(u, v):
            return float(np.dot(u, v))

    if any(d == 0 for d in dots):
        raise HyperplaneError("x lies on a reflection hyperplane")
    for i, j in combinations(range(len(dirs)), 2):
        # ordered pairs (i, j) and (j, i) contribute equally
        total += 2 * ks[i] * ks[j] * dot(dirs[i], dirs[j]) / (dots[i] * dots[j])
    return total


# -----------------------------------------------------------------------------
# chamber-supported test functions
# -----------------------------------------------------------------------------

@dataclass(frozen=True)
class ChamberSupport:
    """Disjoint balls containing the support of a test function."""

    centers: tuple
    radii: tuple

    def boxes(self):
        for c, r in zip(self.centers, self.radii):
            c = np.asarray(c, dtype=float)
            yield Box(tuple(c - r), tuple(c + r))


def validate_support(system: RootSystem, support: ChamberSupport, avoid_origin: bool = True) -> None:
    cs = [np.asarray(c, dtype=float) for c in support.centers]
    for c, r in zip(cs, support.radii):
        _, dist = chamber_info(system, c)
        if dist <= r:
            raise HyperplaneError(f"ball around {np.round(c, 4).tolist()} of radius {r} meets a wall")
        if avoid_origin and np.linalg.norm(c) <= r:
            raise HyperplaneError("support must avoid the origin")
    for (c1, r1), (c2, r2) in combinations(zip(cs, support.radii), 2):
        if np.linalg.norm(c1 - c2) <= r1 + r2:
            raise ValueError("support balls must be disjoint")


def chamber_bumps(system: RootSystem, rng: np.random.Generator, count: int = 2,
                  fill: float = 0.8) -> tuple:
    """Sum of ``count`` bumps at random points, each strictly inside its chamber."""
    centers, radii, amps = [], [], []
    while len(centers) < count:
        c = rng.standard_normal(system.dim)
        c *= rng.uniform(0.8, 2.0) / np.linalg.norm(c)
        _, dist = chamber_info(system, c)
        r = fill * min(float(dist), float(np.linalg.norm(c)))
        if r < 0.05:
            continue
        if any(np.linalg.norm(c - c2) <= r + r2 for c2, r2 in zip(centers, radii)):
            continue
        centers.append(c)
        radii.append(r)
        amps.append(rng.uniform(0.5, 1.5) * rng.choice([-1.0, 1.0]))
    f = bump(centers[0], radii[0], amps[0])
    for c, r, a in zip(centers[1:], radii[1:], amps[1:]):
        f = f + bump(c, r, a)
    support = ChamberSupport(tuple(tuple(c) for c in centers), tuple(radii))
    validate_support(system, support)
    return f, support


def chamber_extend(system: RootSystem, f: ScalarField, support: ChamberSupport) -> ScalarField:
    """G-invariant field equal to f on its chamber, copied to every other chamber."""
    validate_support(system, support, avoid_origin=False)
    signs, _ = chamber_info(system, np.array(support.centers, dtype=float))
    if len({tuple(s) for s in signs}) != 1:
        raise ValueError("support must lie in a single chamber")
    mats = generate_group(system).matrices

    def value(x):
        return sum(f(x @ g.T) for g in mats)

    def grad(x):
        return sum(f.gradient(x @ g.T) @ g for g in mats)

    def hess(x):
        return sum(np.einsum("ji,...jk,kl->...il", g, f.hessian(x @ g.T), g) for g in mats)

    return ScalarField(value, grad, hess, f.support_radius, f"G-copies({f.name})")


# -----------------------------------------------------------------------------
# many-particle Hardy checks
# -----------------------------------------------------------------------------

@dataclass(frozen=True)
class ManyParticleReport:
    theorem: str
    ctx_descriptor: str
    gradient_term: IntegralEstimate
    interaction_term: IntegralEstimate  # already multiplied by its coefficients
    radial_term: IntegralEstimate  # int f^2 / |x|^2 dx
    radial_constant: float
    interaction_constants: tuple

    @property
    def rhs(self) -> IntegralEstimate:
        c = self.radial_constant
        return IntegralEstimate(self.interaction_term.value + c * self.radial_term.value,
                                self.interaction_term.error + abs(c) * self.radial_term.error,
                                self.radial_term.resolution)

    @property
    def margin(self) -> float:
        return self.gradient_term.value - self.rhs.value

    def as_report(self) -> RayleighReport:
        extra = {
            "interaction": self.interaction_term.value,
            "radial": self.radial_term.value,
            "radial_constant": self.radial_constant,
        }
        return RayleighReport(self.theorem, self.ctx_descriptor, self.gradient_term, self.rhs, 1.0, extra)


def interaction_coefficient(k: float) -> float:
    """2 (k - k^2): largest (1/2) at k = 1/2."""
    return 2.0 * (k - k * k)


def _sum_over_balls(ctx, pointwise, support: ChamberSupport, n: int) -> dict:
    total: dict = {}
    for box in support.boxes():
        est = integrate_many(ctx, pointwise, box, n, weighted=False)
        for key, e in est.items():
            prev = total.get(key)
            total[key] = e if prev is None else IntegralEstimate(prev.value + e.value, prev.error + e.error,
                                                                 e.resolution)
    return total


def _inside(f, x):
    fx = f(x)
    return fx, fx != 0.0


def many_particle_check(ctx: DunklContext, f: ScalarField, support: ChamberSupport,
                        n: int = 24) -> ManyParticleReport:
    """int |grad f|^2 dx >= 2 sum (k_a - k_a^2) int f^2/<a,x>^2 dx + (N+2g-2)^2/4 int f^2/|x|^2 dx."""
    validate_support(ctx.system, support)
    roots = ctx.system.positive_roots
    coeff = np.array([interaction_coefficient(k) for k in ctx.k_positive])

    def pointwise(x):
        fx, mask = _inside(f, x)
        dots = np.where(mask[:, None], x @ roots.T, 1.0)
        r2 = np.where(mask, np.sum(x * x, axis=1), 1.0)
        return {
            "grad": np.sum(f.gradient(x) ** 2, axis=1),
            "inter": fx**2 * np.sum(coeff / dots**2, axis=1),
            "radial": fx**2 / r2,
        }

    est = _sum_over_balls(ctx, pointwise, support, n)
    return ManyParticleReport("many_particle_hardy", ctx.descriptor, est["grad"], est["inter"], est["radial"],
                              hardy_constant(ctx), tuple(interaction_coefficient(float(k)) for k in ctx.k))


def a_type_constants(particles: int, k: float) -> dict:
    """Coefficients for the particle-pair form on A_(N-1) in R^N."""
    n = particles
    return {"pair": interaction_coefficient(k), "radial": (n + k * n * (n - 1) - 2.0) ** 2 / 4.0}


def b_type_constants(particles: int, k1: float, k2: float) -> dict:
    """Coefficients for the B_N form.

    gamma = N k1 + N (N - 1) k2, so the radial coefficient is
    (N + 2 N k1 + 2 N (N - 1) k2 - 2)^2 / 4.
    """
    n = particles
    return {
        "single": k1 - k1 * k1,
        "pair": interaction_coefficient(k2),
        "radial": (n + 2.0 * k1 * n + 2.0 * k2 * n * (n - 1) - 2.0) ** 2 / 4.0,
    }


def _coordinate_report(tag, ctx, f, support, n, terms, radial_constant, consts):
    validate_support(ctx.system, support)

    def pointwise(x):
        fx, mask = _inside(f, x)
        inter = np.zeros(len(x))
        radial = np.zeros(len(x))
        inter[mask] = fx[mask] ** 2 * terms(x[mask])
        radial[mask] = fx[mask] ** 2 / np.sum(x[mask] ** 2, axis=1)
        return {"grad": np.sum(f.gradient(x) ** 2, axis=1), "inter": inter, "radial": radial}

    est = _sum_over_balls(ctx, pointwise, support, n)
    return ManyParticleReport(tag, ctx.descriptor, est["grad"], est["inter"], est["radial"], radial_constant,
                              consts)


def many_particle_check_a(particles: int, k: float, f: ScalarField, support: ChamberSupport,
                          n: int = 24) -> ManyParticleReport:
    """Pair-distance form: 2(k - k^2) sum_(i<j) 1/(x_i - x_j)^2 plus the radial term."""
    ctx = make_context("A", particles - 1, k)
    c = a_type_constants(particles, k)
    pairs = list(combinations(range(particles), 2))

    def terms(x):
        return c["pair"] * sum(1.0 / (x[:, i] - x[:, j]) ** 2 for i, j in pairs)

    return _coordinate_report("many_particle_hardy_a", ctx, f, support, n, terms, c["radial"], (c["pair"],))


def many_particle_check_b(particles: int, k1: float, k2: float, f: ScalarField, support: ChamberSupport,
                          n: int = 24) -> ManyParticleReport:
    """Coordinate form with 1/x_i^2 and 1/(x_i -+ x_j)^2 terms."""
    ctx = make_context("B", particles, (k1, k2)) if particles > 1 else make_context("Z2", 1, k1)
    c = b_type_constants(particles, k1, k2)
    pairs = list(combinations(range(particles), 2))

    def terms(x):
        out = c["single"] * np.sum(1.0 / x**2, axis=1)
        for i, j in pairs:
            out = out + c["pair"] * (1.0 / (x[:, i] - x[:, j]) ** 2 + 1.0 / (x[:, i] + x[:, j]) ** 2)
        return out

    return _coordinate_report("many_particle_hardy_b", ctx, f, support, n, terms, c["radial"],
                              (c["single"], c["pair"]))


def many_particle_constants(ctx: DunklContext) -> dict:
    return {
        "many_particle_interaction": [interaction_coefficient(float(k)) for k in ctx.k],
        "many_particle_radial": hardy_constant(ctx),
    }
