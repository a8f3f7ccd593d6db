"""Evaluate both sides of Hardy-type inequalities for the Dunkl gradient.

Every verifier returns a ``RayleighReport``: the two integrals with their
two-resolution errors, the constant being tested, the achieved ratio and the
margin ``lhs - constant * rhs``.  An instance passes when the margin is at
least minus the combined quadrature error.  Where only existence of a
constant is known, the constant is 0 (so positivity is what is asserted) and
the ratio is kept as an empirical witness.

Test functions are real-valued: a complex f splits into real and imaginary
parts, and each side of every inequality here adds up over that split.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad
from scipy.special import gammaln

from .dunkl import dunkl_gradient, dunkl_laplacian_formula
from .fields import ScalarField, radial_profile
from .kernel import DunklTransform1D, _half_line_rule, fractional_constant
from .quadrature import Ball, IntegralEstimate, _graded_rule, _rule, integrate_many, resolution_levels
from .roots import DunklContext

DEFAULT_N = 16
DEFAULT_RADIUS = 8.0
ROUNDOFF = 1e-12


class HypothesisError(ValueError):
    """Parameters outside the range where an inequality is claimed."""


# -----------------------------------------------------------------------------
# reports
# -----------------------------------------------------------------------------

def _combine(value: float, error: float, res=None) -> IntegralEstimate:
    return IntegralEstimate(float(value), float(abs(error)), res)


def power_estimate(est: IntegralEstimate, e: float) -> IntegralEstimate:
    """est^e with first-order error propagation."""
    v = max(est.value, 0.0)
    if v == 0.0:
        return IntegralEstimate(0.0, est.error ** e if e < 1 else 0.0, est.resolution)
    return IntegralEstimate(v**e, abs(e) * v ** (e - 1.0) * est.error, est.resolution)


def difference(a: IntegralEstimate, b: IntegralEstimate, cb: float = 1.0) -> IntegralEstimate:
    return IntegralEstimate(a.value - cb * b.value, a.error + abs(cb) * b.error, a.resolution)


@dataclass(frozen=True)
class RayleighReport:
    theorem: str
    ctx_descriptor: str
    lhs: IntegralEstimate
    rhs: IntegralEstimate
    constant: float
    extra: dict = field(default_factory=dict)
    informational: bool = False
    equality: bool = False  # identities pass when |margin| is within the error

    @property
    def ratio(self) -> float:
        return self.lhs.value / self.rhs.value if self.rhs.value != 0 else math.nan

    @property
    def margin(self) -> float:
        return self.lhs.value - self.constant * self.rhs.value

    @property
    def quadrature_error(self) -> float:
        scale = abs(self.lhs.value) + abs(self.constant * self.rhs.value)
        return self.lhs.error + abs(self.constant) * self.rhs.error + ROUNDOFF * scale

    @property
    def passed(self) -> bool:
        if self.equality:
            return abs(self.margin) <= self.quadrature_error
        return self.margin >= -self.quadrature_error

    def as_dict(self) -> dict:
        def num(v):
            v = float(v)
            return v if math.isfinite(v) else None

        out = {
            "theorem": self.theorem,
            "ctx_descriptor": self.ctx_descriptor,
            "lhs": num(self.lhs.value),
            "rhs": num(self.rhs.value),
            "constant": num(self.constant),
            "ratio": num(self.ratio),
            "margin": num(self.margin),
            "quad_error": num(self.quadrature_error),
            "pass": bool(self.passed),
        }
        if self.informational:
            out["informational"] = True
        if self.extra:
            out["extra"] = {k: (num(v) if isinstance(v, (int, float)) and not isinstance(v, bool) else v)
                            for k, v in sorted(self.extra.items())}
        return out

    def to_json_line(self) -> str:
        return json.dumps(self.as_dict(), allow_nan=False)


# -----------------------------------------------------------------------------
# helpers
# -----------------------------------------------------------------------------

def hardy_constant(ctx_or_nbar) -> float:
    nbar = _nbar(ctx_or_nbar)
    return (nbar - 2.0) ** 2 / 4.0


def rellich_constant(ctx_or_nbar) -> float:
    nbar = _nbar(ctx_or_nbar)
    return nbar**2 * (nbar - 4.0) ** 2 / 16.0


def sobolev_exponent(ctx_or_nbar) -> float:
    nbar = _nbar(ctx_or_nbar)
    return 2.0 * nbar / (nbar - 2.0)


def _nbar(ctx_or_nbar) -> float:
    if isinstance(ctx_or_nbar, DunklContext):
        return ctx_or_nbar.homogeneous_dim
    return float(ctx_or_nbar)


def _radius(f, radius=None) -> float:
    if radius is not None:
        return float(radius)
    return f.support_radius if f.support_radius is not None else DEFAULT_RADIUS


def _norm(x):
    return np.sqrt(np.sum(x * x, axis=1))


def _singular_power_ok(ctx: DunklContext, s: float) -> bool:
    """Can |x|^s be folded into the radial Gauss-Jacobi weight?"""
    return ctx.homogeneous_dim - 1.0 + s > -1.0 + 1e-12


def vanishes_near_origin(ctx: DunklContext, f, radius: float = 1e-2) -> bool:
    rng = np.random.default_rng(0)
    pts = rng.standard_normal((256, ctx.dim))
    pts *= (radius * rng.uniform(0, 1, 256) / _norm(pts))[:, None]
    return bool(np.all(f(pts) == 0.0))


def _integrals(ctx, pointwise, radius, n, r_power=0.0):
    return integrate_many(ctx, pointwise, Ball(radius), n, r_power)


def _powered(ctx, f, pointwise, radius, n, s):
    """Integrate entries of ``pointwise`` against |x|^s d mu_k, folding s when possible."""
    if _singular_power_ok(ctx, s):
        return _integrals(ctx, pointwise, radius, n, s)
    if not vanishes_near_origin(ctx, f):
        raise HypothesisError(f"|x|^{s} is not integrable against mu_k unless f vanishes near 0")

    def explicit(x):
        scale = _norm(x) ** s
        return {k: v * scale for k, v in pointwise(x).items()}

    return _integrals(ctx, explicit, radius, n, 0.0)


# -----------------------------------------------------------------------------
# Hardy-type inequalities for the Euler operator
# -----------------------------------------------------------------------------

@dataclass(frozen=True)
class IdentityResidual:
    coarse: float
    fine: float
    resolution: tuple

    @property
    def value(self) -> float:
        return self.fine

    @property
    def reduction(self) -> float:
        return self.coarse / self.fine if self.fine > 0 else math.inf


def hardy_type_identity_residual(ctx: DunklContext, p: float, f, n: int = DEFAULT_N,
                                 radius: float | None = None) -> IdentityResidual:
    """|(N + 2 gamma) int |f|^p d mu_k + p int f |f|^(p-2) <x, grad f> d mu_k| at n and 2n."""
    if p <= 1:
        raise HypothesisError("need p > 1")
    nbar = ctx.homogeneous_dim
    ball = Ball(_radius(f, radius))
    levels = resolution_levels(n)
    values = []
    for m in levels:
        pts, wts = _rule(ctx, ball, m, 0.0, True)
        fx = f(pts)
        euler = np.sum(pts * f.gradient(pts), axis=1)
        a = np.abs(fx)
        mass = float(np.dot(wts, a**p))
        flux = float(np.dot(wts, np.sign(fx) * a ** (p - 1.0) * euler))
        values.append(abs(nbar * mass + p * flux))
    return IdentityResidual(values[0], values[1], levels)


def hardy_type_identity_check(ctx: DunklContext, p: float, f, n: int = DEFAULT_N,
                              radius: float | None = None) -> RayleighReport:
    """The two sides (N + 2 gamma) int |f|^p and -p int f |f|^(p-2) <x, grad f> as an equality report."""
    if p <= 1:
        raise HypothesisError("need p > 1")

    def pointwise(x):
        fx = f(x)
        a = np.abs(fx)
        return {"mass": a**p, "flux": np.sign(fx) * a ** (p - 1.0) * np.sum(x * f.gradient(x), axis=1)}

    est = _integrals(ctx, pointwise, _radius(f, radius), n)
    nbar = ctx.homogeneous_dim
    lhs = IntegralEstimate(nbar * est["mass"].value, nbar * est["mass"].error, est["mass"].resolution)
    rhs = IntegralEstimate(-p * est["flux"].value, p * est["flux"].error, est["flux"].resolution)
    return RayleighReport("hardy_type_identity", ctx.descriptor, lhs, rhs, 1.0, {"p": p}, equality=True)


def hardy_type_check(ctx: DunklContext, p: float, f, variant: str = "gradient", n: int = DEFAULT_N,
                     radius: float | None = None) -> RayleighReport:
    """int |<x, grad f>|^p >= ((N+2g)/p)^p int |f|^p, or the Dunkl-gradient form."""
    nbar, gam = ctx.homogeneous_dim, ctx.gamma
    if p <= 1:
        raise HypothesisError("need p > 1")
    if variant == "gradient":
        const = (nbar / p) ** p
    elif variant == "dunkl_gradient":
        if gam > 0 and not p < nbar / (2.0 * gam):
            raise HypothesisError(f"need p < (N + 2 gamma) / (2 gamma) = {nbar / (2 * gam):.6g}")
        const = ((nbar - 2.0 * p * gam) / p) ** p
    else:
        raise ValueError(f"unknown variant {variant!r}")

    def pointwise(x):
        g = f.gradient(x) if variant == "gradient" else dunkl_gradient(ctx, f, x)
        return {"lhs": np.abs(np.sum(x * g, axis=1)) ** p, "rhs": np.abs(f(x)) ** p}

    est = _integrals(ctx, pointwise, _radius(f, radius), n)
    tag = "hardy_type_gradient" if variant == "gradient" else "hardy_type_dunkl_gradient"
    return RayleighReport(tag, ctx.descriptor, est["lhs"], est["rhs"], const, {"p": p})


def lp_hardy_range(ctx: DunklContext) -> tuple:
    """Open interval of admissible p for the L^p Hardy inequality."""
    return 1.0, ctx.homogeneous_dim / (1.0 + 2.0 * ctx.gamma)


def lp_hardy_check(ctx: DunklContext, p: float, f, n: int = DEFAULT_N,
                   radius: float | None = None) -> RayleighReport:
    """int |grad_k f|^p d mu_k >= ((N+2g-2pg-p)/p)^p int |f|^p / |x|^p d mu_k."""
    lo, hi = lp_hardy_range(ctx)
    if not lo < p < hi:
        raise HypothesisError(f"need 1 < p < (N + 2 gamma)/(1 + 2 gamma) = {hi:.6g}")
    nbar, gam = ctx.homogeneous_dim, ctx.gamma
    const = ((nbar - 2.0 * p * gam - p) / p) ** p
    r = _radius(f, radius)
    lhs = _integrals(ctx, lambda x: {"v": np.sum(dunkl_gradient(ctx, f, x) ** 2, axis=1) ** (p / 2.0)}, r, n)["v"]
    rhs = _powered(ctx, f, lambda x: {"v": np.abs(f(x)) ** p}, r, n, -p)["v"]
    return RayleighReport("lp_hardy", ctx.descriptor, lhs, rhs, const, {"p": p})


def lp_gradient_comparison(ctx: DunklContext, p: float, f, n: int = DEFAULT_N,
                           radius: float | None = None) -> RayleighReport:
    """||grad_k f||_p^p against ||grad f||_p^p; reported only (it may fail for p != 2)."""
    r = _radius(f, radius)

    def pointwise(x):
        return {
            "dk": np.sum(dunkl_gradient(ctx, f, x) ** 2, axis=1) ** (p / 2.0),
            "d": np.sum(f.gradient(x) ** 2, axis=1) ** (p / 2.0),
        }

    est = _integrals(ctx, pointwise, r, n)
    return RayleighReport("lp_gradient_comparison", ctx.descriptor, est["dk"], est["d"], 1.0,
                          {"p": p}, informational=True)


def l2_hardy_check(ctx: DunklContext, f, n: int = DEFAULT_N, radius: float | None = None) -> RayleighReport:
    """int |grad_k f|^2 d mu_k >= (N+2g-2)^2/4 int f^2/|x|^2 d mu_k."""
    if not ctx.homogeneous_dim > 2:
        raise HypothesisError("need N + 2 gamma > 2")
    r = _radius(f, radius)
    lhs = _integrals(ctx, lambda x: {"v": np.sum(dunkl_gradient(ctx, f, x) ** 2, axis=1)}, r, n)["v"]
    rhs = _powered(ctx, f, lambda x: {"v": f(x) ** 2}, r, n, -2.0)["v"]
    return RayleighReport("l2_hardy", ctx.descriptor, lhs, rhs, hardy_constant(ctx))


def dirichlet_form_check(ctx: DunklContext, f, n: int = DEFAULT_N, radius: float | None = None,
                         domain=None) -> RayleighReport:
    """int |grad_k f|^2 d mu_k >= int |grad f|^2 d mu_k."""

    def pointwise(x):
        gx = f.gradient(x)
        return {
            "dk": np.sum(dunkl_gradient(ctx, f, x, gx=gx) ** 2, axis=1),
            "d": np.sum(gx ** 2, axis=1),
        }

    dom = domain if domain is not None else Ball(_radius(f, radius))
    est = integrate_many(ctx, pointwise, dom, n)
    return RayleighReport("dirichlet_form", ctx.descriptor, est["dk"], est["d"], 1.0)


# -----------------------------------------------------------------------------
# sharpness of the L^2 Hardy constant
# -----------------------------------------------------------------------------

@dataclass(frozen=True)
class HardySharpnessPoint:
    n: int
    c_n: float
    numerator: float
    denominator: float
    ratio: float  # exact piecewise integration
    ratio_quadrature: float  # adaptive quadrature of the same pieces
    closed_form_displayed: float  # (n/2) / [(1/c^2)(1/(N+2g) + n/2)]
    closed_form_exact: float  # (n/2) / [(1/c^2)(1/(N+2g-2) + n/2)]


def hardy_sequence_parameter(nbar: float, n: int) -> float:
    return -1.0 / n - (nbar - 2.0) / 2.0


def hardy_sharpness(ctx_or_nbar, n: int) -> HardySharpnessPoint:
    """Rayleigh ratio of f_n(x) = h_n(|x|), h_n = 1/c_n on [0, 1], r^(c_n)/c_n beyond.

    The N-dimensional ratio reduces to int h'^2 r^(N+2g-1) / int h^2 r^(N+2g-3);
    each piece is a pure power integral and is evaluated in closed form.
    """
    if n < 1:
        raise ValueError("n >= 1")
    nbar = _nbar(ctx_or_nbar)
    if not nbar > 2:
        raise HypothesisError("need N + 2 gamma > 2")
    c = hardy_sequence_parameter(nbar, n)
    tail = 2.0 * c + nbar - 2.0  # exponent + 1 of the outer pieces, negative
    numer = -1.0 / tail  # int_1^inf (r^(c-1))^2 r^(nbar-1) dr
    denom = (1.0 / (nbar - 2.0) - 1.0 / tail) / (c * c)
    ratio = numer / denom

    def tail(a):
        # int_1^inf r^a dr with r = e^u, so the integrand decays exponentially
        return quad(lambda u: math.exp((a + 1.0) * u), 0.0, np.inf, epsabs=0, epsrel=1e-13, limit=200)[0]

    num_q = tail(2 * c - 2 + nbar - 1)
    inner = quad(lambda r: r ** (nbar - 3.0), 0.0, 1.0, epsabs=0, epsrel=1e-13, limit=200)[0]
    ratio_q = num_q / ((inner + tail(2 * c + nbar - 3.0)) / (c * c))

    displayed = (n / 2.0) / ((1.0 / c**2) * (1.0 / nbar + n / 2.0))
    exact = (n / 2.0) / ((1.0 / c**2) * (1.0 / (nbar - 2.0) + n / 2.0))
    return HardySharpnessPoint(n, c, numer, denom, ratio, ratio_q, displayed, exact)


def hardy_sharpness_sequence(ctx_or_nbar, n_max: int) -> list:
    return [hardy_sharpness(ctx_or_nbar, n) for n in range(1, n_max + 1)]


def hardy_extremal_profile(ctx_or_nbar, width: float) -> ScalarField:
    """f(x) = |x|^(-(N+2g-2)/2) phi(log |x|), phi a smooth bump on [-width, width].

    In t = log r the Rayleigh quotient becomes Lambda + int phi'^2 / int phi^2,
    so the ratio approaches the Hardy constant like width^-2.  f vanishes
    outside exp(-width) < |x| < exp(width).
    """
    nbar = _nbar(ctx_or_nbar)
    a = (nbar - 2.0) / 2.0
    L = float(width)

    def parts(r):
        t = np.log(np.where(r > 0, r, 1.0))
        u = (t / L) ** 2
        inside = (u < 1.0) & (r > 0)
        w = np.where(inside, 1.0 - u, 1.0)
        phi = np.where(inside, np.exp(1.0 - 1.0 / w), 0.0)
        g = -2.0 * t / (L * L * w * w)  # phi'/phi
        dg = -2.0 / (L * L * w * w) - 8.0 * t * t / (L**4 * w**3)
        return t, phi, phi * g, phi * (g * g + dg)

    def h(r):
        _, phi, _, _ = parts(r)
        return np.where(r > 0, r, 1.0) ** (-a) * phi

    def dh(r):
        _, phi, d1, _ = parts(r)
        rs = np.where(r > 0, r, 1.0)
        return rs ** (-a - 1.0) * (d1 - a * phi)

    def d2h(r):
        _, phi, d1, d2 = parts(r)
        rs = np.where(r > 0, r, 1.0)
        return rs ** (-a - 2.0) * (d2 - (2.0 * a + 1.0) * d1 + a * (a + 1.0) * phi)

    return radial_profile(h, dh, d2h, math.exp(L), f"hardy_profile(width={L:g})")


# -----------------------------------------------------------------------------
# fractional Hardy inequality in rank one
# -----------------------------------------------------------------------------

def fractional_hardy_check_rank1(k: float, s: float, f, length: float = 12.0, freq: float = 14.0,
                                 n: int = 160) -> RayleighReport:
    """int |xi|^(2s) |D_k f|^2 d mu_k >= C(s)^2 int |f|^2 / |x|^(2s) d mu_k on the line."""
    h = 0.5 + k
    if not 0.0 <= s < h:
        raise HypothesisError(f"need 0 <= s < (1 + 2k)/2 = {h:.6g}")
    const = fractional_constant(1, k, s) ** 2
    if isinstance(f, ScalarField):
        field_1d = f
        f = lambda t: field_1d(np.asarray(t, dtype=float)[:, None])  # noqa: E731
    tr = DunklTransform1D(k, length=length, freq=freq, n=n)

    def sides(m):
        lhs = tr.transform_norm_squared(f, m, power=2.0 * s)
        x, w = _half_line_rule(m, length, 2.0 * k - 2.0 * s)
        rhs = 2.0**k * float(np.dot(w, f(x) ** 2 + f(-x) ** 2))
        return lhs, rhs

    lc, rc = sides(n // 2)
    lf, rf = sides(n)
    desc = f"Z2^1;k={k:.12g}"
    return RayleighReport("fractional_hardy_rank1", desc, IntegralEstimate(lf, abs(lf - lc), (n // 2, n)),
                          IntegralEstimate(rf, abs(rf - rc), (n // 2, n)), const, {"s": s})


# -----------------------------------------------------------------------------
# improved Hardy, the 1-D weighted lemma, Poincare
# -----------------------------------------------------------------------------

def log_weight(t):
    """X(t) = 1 / (1 - log t) on (0, 1], extended by X(0) = 0."""
    t = np.asarray(t, dtype=float)
    safe = np.where(t > 0, t, 1.0)
    return np.where(t > 0, 1.0 / (1.0 - np.log(safe)), 0.0)


def _check_support(f, delta):
    if f.support_radius is None or f.support_radius > delta * (1 + 1e-12):
        raise HypothesisError(f"support of f must lie in the ball of radius {delta}")


def _remainder(ctx, f, r, n):
    lhs = _integrals(ctx, lambda x: {"v": np.sum(dunkl_gradient(ctx, f, x) ** 2, axis=1)}, r, n)["v"]
    pot = _powered(ctx, f, lambda x: {"v": f(x) ** 2}, r, n, -2.0)["v"]
    return lhs, pot


def improved_hardy_check(ctx: DunklContext, f, delta: float, n: int = DEFAULT_N) -> RayleighReport:
    """Hardy remainder against (int |f|^q X^(1+q/2)(|x|/delta) d mu_k)^(2/q)."""
    if not ctx.homogeneous_dim > 2:
        raise HypothesisError("need N + 2 gamma > 2")
    _check_support(f, delta)
    q = sobolev_exponent(ctx)
    lhs, pot = _remainder(ctx, f, delta, n)
    remainder = difference(lhs, pot, hardy_constant(ctx))

    def functional(x):
        return {"v": np.abs(f(x)) ** q * log_weight(_norm(x) / delta) ** (1.0 + q / 2.0)}

    rhs = power_estimate(_integrals(ctx, functional, delta, n)["v"], 2.0 / q)
    return RayleighReport("improved_hardy", ctx.descriptor, remainder, rhs, 0.0, {"delta": delta, "q": q})


def weighted_hardy_1d(g, dg, q: float, delta: float, n: int = 32) -> RayleighReport:
    """int_0^delta t g'^2 dt against (int_0^delta |g|^q X^(1+q/2)(t/delta) / t dt)^(2/q)."""
    if q < 2 or delta <= 0:
        raise HypothesisError("need q >= 2 and delta > 0")

    def sides(m):
        v, w = _graded_rule(m)
        t, w = delta * v, delta * w
        lhs = float(np.dot(w, t * dg(t) ** 2))
        rhs = float(np.dot(w, np.abs(g(t)) ** q * log_weight(t / delta) ** (1.0 + q / 2.0) / t))
        return lhs, rhs

    levels = resolution_levels(n)
    (lc, rc), (lf, rf) = sides(levels[0]), sides(levels[1])
    lhs = IntegralEstimate(lf, abs(lf - lc), levels)
    rhs = power_estimate(IntegralEstimate(rf, abs(rf - rc), levels), 2.0 / q)
    return RayleighReport("weighted_hardy_1d", f"interval;delta={delta:.12g}", lhs, rhs, 0.0, {"q": q})


def poincare_check(ctx: DunklContext, f, domain=None, n: int = DEFAULT_N) -> RayleighReport:
    """int |grad_k f|^2 d mu_k against int f^2 d mu_k on a bounded domain (ratio = witness)."""
    dom = domain if domain is not None else Ball(_radius(f))

    def pointwise(x):
        return {"dk": np.sum(dunkl_gradient(ctx, f, x) ** 2, axis=1), "f2": f(x) ** 2}

    est = integrate_many(ctx, pointwise, dom, n)
    return RayleighReport("poincare", ctx.descriptor, est["dk"], est["f2"], 0.0)


def hardy_poincare_check(ctx: DunklContext, f, radius: float | None = None, n: int = DEFAULT_N) -> RayleighReport:
    """Hardy remainder against int f^2 d mu_k on a ball (ratio = witness for C(Omega))."""
    if not ctx.homogeneous_dim > 2:
        raise HypothesisError("need N + 2 gamma > 2")
    r = _radius(f, radius)
    lhs, pot = _remainder(ctx, f, r, n)
    remainder = difference(lhs, pot, hardy_constant(ctx))
    mass = _integrals(ctx, lambda x: {"v": f(x) ** 2}, r, n)["v"]
    return RayleighReport("hardy_poincare", ctx.descriptor, remainder, mass, 0.0)


# -----------------------------------------------------------------------------
# Rellich
# -----------------------------------------------------------------------------

def rellich_check(ctx: DunklContext, f, n: int = DEFAULT_N, radius: float | None = None) -> RayleighReport:
    """int |Delta_k f|^2 d mu_k >= (N+2g)^2 (N+2g-4)^2 / 16 int f^2 / |x|^4 d mu_k."""
    if abs(ctx.homogeneous_dim - 2.0) < 1e-12:
        raise HypothesisError("need N + 2 gamma != 2")
    if not vanishes_near_origin(ctx, f):
        raise HypothesisError("f must vanish near the origin")
    r = _radius(f, radius)
    lhs = _integrals(ctx, lambda x: {"v": dunkl_laplacian_formula(ctx, f, x) ** 2}, r, n)["v"]
    rhs = _powered(ctx, f, lambda x: {"v": f(x) ** 2}, r, n, -4.0)["v"]
    return RayleighReport("rellich", ctx.descriptor, lhs, rhs, rellich_constant(ctx))


def smoothstep(t):
    """C^2 quintic step: 0 for t <= 0, 1 for t >= 1."""
    t = np.clip(t, 0.0, 1.0)
    return t**3 * (10.0 - 15.0 * t + 6.0 * t * t)


def _dsmooth(t):
    inside = (t > 0) & (t < 1)
    return np.where(inside, 30.0 * t**2 * (1.0 - t) ** 2, 0.0)


def _d2smooth(t):
    inside = (t > 0) & (t < 1)
    return np.where(inside, 60.0 * t * (1.0 - t) * (1.0 - 2.0 * t), 0.0)


SMOOTHSTEP_C1 = 30.0 / 16.0  # max |S'|
SMOOTHSTEP_C2 = 10.0 / math.sqrt(3.0)  # max |S''|


def rellich_profile(n: int):
    """h_n and its derivatives: 0 below 1, 1 on [2, n], 0 beyond 2n."""

    def h(r):
        return np.where(r < n, smoothstep(r - 1.0), smoothstep((2.0 * n - r) / n))

    def dh(r):
        return np.where(r < n, _dsmooth(r - 1.0), -_dsmooth((2.0 * n - r) / n) / n)

    def d2h(r):
        return np.where(r < n, _d2smooth(r - 1.0), _d2smooth((2.0 * n - r) / n) / n**2)

    return h, dh, d2h


@dataclass(frozen=True)
class RellichSharpnessPoint:
    n: int
    ratio: float
    numerator: float
    denominator: float
    c1: float = SMOOTHSTEP_C1
    c2: float = SMOOTHSTEP_C2


def rellich_sharpness(ctx_or_nbar, n: int) -> RellichSharpnessPoint:
    """Ratio for f_n = |x|^(2 - (N+2g)/2) h_n(|x|) via the radial reduction.

    On the plateau [2, n] the integrands are C/r and 1/r exactly and are
    integrated in closed form; the two transition layers use adaptive quadrature.
    """
    if n < 2:
        raise ValueError("n >= 2")
    nbar = _nbar(ctx_or_nbar)
    if abs(nbar - 2.0) < 1e-12:
        raise HypothesisError("need N + 2 gamma != 2")
    beta = 2.0 - nbar / 2.0
    h, dh, d2h = rellich_profile(n)

    def lap(r):
        f0, f1, f2 = h(r), dh(r), d2h(r)
        d1 = beta * r ** (beta - 1) * f0 + r**beta * f1
        d2 = beta * (beta - 1) * r ** (beta - 2) * f0 + 2 * beta * r ** (beta - 1) * f1 + r**beta * f2
        return d2 + (nbar - 1.0) * d1 / r

    def num(r):
        return float(lap(r) ** 2 * r ** (nbar - 1.0))

    def den(r):
        return float(h(r) ** 2 / r)

    opts = dict(epsabs=0.0, epsrel=1e-12, limit=200)
    plateau = math.log(n / 2.0)
    top = quad(num, 1.0, 2.0, **opts)[0] + quad(num, n, 2.0 * n, **opts)[0] + rellich_constant(nbar) * plateau
    bottom = quad(den, 1.0, 2.0, **opts)[0] + quad(den, n, 2.0 * n, **opts)[0] + plateau
    return RellichSharpnessPoint(n, top / bottom, top, bottom)


# -----------------------------------------------------------------------------
# Caffarelli-Kohn-Nirenberg, case r = 2, theta = 1
# -----------------------------------------------------------------------------

def ckn_exponent(ctx_or_nbar, a: float, b: float) -> float:
    nbar = _nbar(ctx_or_nbar)
    return 2.0 * nbar / (nbar - 2.0 + 2.0 * (b - a))


def ckn_interpolation(ctx_or_nbar, a: float, b: float) -> dict:
    """theta with p = 2 theta + q (1 - theta) and the residuals of the two bookkeeping identities."""
    nbar = _nbar(ctx_or_nbar)
    p = ckn_exponent(nbar, a, b)
    q = sobolev_exponent(nbar)
    theta = (q - p) / (q - 2.0)
    b_from_theta = a + theta * (nbar - 2.0) / (nbar - 2.0 * theta)
    pb_split = 2.0 * (a + 1.0) * theta + q * a * (1.0 - theta)
    return {
        "p": p,
        "q": q,
        "theta": theta,
        "b_residual": abs(b_from_theta - b),
        "pb_residual": abs(pb_split - p * b),
    }


def ckn_step1_constant(ctx_or_nbar, a: float) -> float:
    """a^2 (1 - eps) + (1 - 1/eps) Lambda at eps = (N+2g-2)/(2a); Lambda itself at a = 0."""
    lam = hardy_constant(ctx_or_nbar)
    if a == 0:
        return lam
    eps = (_nbar(ctx_or_nbar) - 2.0) / (2.0 * a)
    return a * a * (1.0 - eps) + (1.0 - 1.0 / eps) * lam


def sobolev_constant_euclidean(dim: int) -> float:
    """Sharp constant S_N in int |grad f|^2 >= S_N (int |f|^(2N/(N-2)))^((N-2)/N) (k = 0)."""
    return math.pi * dim * (dim - 2.0) * math.exp(2.0 / dim * (gammaln(dim / 2.0) - gammaln(dim)))


def ckn_check(ctx: DunklContext, a: float, b: float, f, n: int = DEFAULT_N,
              radius: float | None = None) -> RayleighReport:
    """int |grad_k f|^2 / |x|^(2a) d mu_k against (int |f|^p / |x|^(pb) d mu_k)^(2/p)."""
    nbar = ctx.homogeneous_dim
    if not a <= b <= a + 1:
        raise HypothesisError("need a <= b <= a + 1")
    if not a < (nbar - 2.0) / 2.0:
        raise HypothesisError("need a < (N + 2 gamma - 2)/2")
    info = ckn_interpolation(ctx, a, b)
    p = info["p"]
    if b == a + 1:
        const = ckn_step1_constant(ctx, a)
    elif a == 0 and b == 0 and ctx.gamma == 0 and ctx.dim >= 3:
        const = sobolev_constant_euclidean(ctx.dim)
    else:
        const = 0.0
    r = _radius(f, radius)
    lhs = _powered(ctx, f, lambda x: {"v": np.sum(dunkl_gradient(ctx, f, x) ** 2, axis=1)}, r, n, -2.0 * a)["v"]
    raw = _powered(ctx, f, lambda x: {"v": np.abs(f(x)) ** p}, r, n, -p * b)["v"]
    rhs = power_estimate(raw, 2.0 / p)
    extra = {"a": a, "b": b, **info}
    return RayleighReport("ckn", ctx.descriptor, lhs, rhs, const, extra)


# -----------------------------------------------------------------------------
# constants summary
# -----------------------------------------------------------------------------

def sharp_constants(ctx: DunklContext) -> dict:
    """Constants of every inequality at this context (or the failing hypothesis)."""
    nbar, gam = ctx.homogeneous_dim, ctx.gamma
    out = {
        "hardy_type_gradient_p2": (nbar / 2.0) ** 2,
        "hardy_type_dunkl_gradient_p2": ((nbar - 4.0 * gam) / 2.0) ** 2 if gam == 0 or 2 < nbar / (2 * gam)
        else "hypothesis fails: p < (N+2gamma)/(2gamma)",
        "lp_hardy_p_range": [1.0, nbar / (1.0 + 2.0 * gam)],
        "l2_hardy": hardy_constant(nbar) if nbar > 2 else "hypothesis fails: N+2gamma > 2",
        "rellich": rellich_constant(nbar) if abs(nbar - 2) > 1e-12 else "hypothesis fails: N+2gamma != 2",
        "fractional_C1": fractional_constant(ctx.dim, gam, 1.0) if 1.0 < nbar / 2 else "hypothesis fails: s < (N+2gamma)/2",
        "sobolev_exponent": sobolev_exponent(nbar) if nbar > 2 else None,
    }
    from .many_particle import many_particle_constants

    out.update(many_particle_constants(ctx))
    return out
