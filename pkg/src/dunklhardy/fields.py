"""Black-box smooth fields with analytic first and second derivatives.

A field maps points of shape (M, N) to values (M,), gradients (M, N) and
Hessians (M, N, N).  The constructors below build the test functions used by
the verifiers: Gaussians, compactly supported bumps, polynomials, and
products/sums of those, all with exact derivatives.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .polynomials import MultiPoly


@dataclass(frozen=True)
class ScalarField:
    value: Callable
    grad: Callable | None = None
    hess: Callable | None = None
    support_radius: float | None = None
    name: str = "field"

    def __call__(self, x):
        return self.value(np.asarray(x, dtype=float))

    def gradient(self, x):
        if self.grad is None:
            raise ValueError(f"{self.name}: no analytic gradient")
        return self.grad(np.asarray(x, dtype=float))

    def hessian(self, x):
        if self.hess is None:
            raise ValueError(f"{self.name}: no analytic Hessian")
        return self.hess(np.asarray(x, dtype=float))

    def laplacian(self, x):
        return np.trace(self.hessian(x), axis1=-2, axis2=-1)

    # combinators --------------------------------------------------------------
    def __mul__(self, other):
        if isinstance(other, ScalarField):
            return product(self, other)
        return scaled(self, float(other))

    __rmul__ = __mul__

    def __add__(self, other):
        return add(self, other)

    def __neg__(self):
        return scaled(self, -1.0)

    def __sub__(self, other):
        return add(self, scaled(other, -1.0))

    def dilate(self, lam: float) -> "ScalarField":
        """x -> f(lam x)."""
        return dilate(self, lam)


def _support(a, b, mode):
    if mode == "min":
        vals = [v for v in (a, b) if v is not None]
        return min(vals) if vals else None
    if a is None or b is None:
        return None
    return max(a, b)


def product(f: ScalarField, g: ScalarField) -> ScalarField:
    def value(x):
        return f.value(x) * g.value(x)

    def grad(x):
        return f.grad(x) * g.value(x)[..., None] + g.grad(x) * f.value(x)[..., None]

    def hess(x):
        fg, gg = f.grad(x), g.grad(x)
        cross = fg[..., :, None] * gg[..., None, :]
        return (
            f.hess(x) * g.value(x)[..., None, None]
            + g.hess(x) * f.value(x)[..., None, None]
            + cross
            + np.swapaxes(cross, -1, -2)
        )

    has_g = f.grad is not None and g.grad is not None
    has_h = has_g and f.hess is not None and g.hess is not None
    return ScalarField(value, grad if has_g else None, hess if has_h else None,
                       _support(f.support_radius, g.support_radius, "min"),
                       f"({f.name})*({g.name})")


def add(f: ScalarField, g: ScalarField) -> ScalarField:
    has_g = f.grad is not None and g.grad is not None
    has_h = has_g and f.hess is not None and g.hess is not None
    return ScalarField(
        lambda x: f.value(x) + g.value(x),
        (lambda x: f.grad(x) + g.grad(x)) if has_g else None,
        (lambda x: f.hess(x) + g.hess(x)) if has_h else None,
        _support(f.support_radius, g.support_radius, "max"),
        f"{f.name}+{g.name}",
    )


def scaled(f: ScalarField, c: float) -> ScalarField:
    return ScalarField(
        lambda x: c * f.value(x),
        (lambda x: c * f.grad(x)) if f.grad is not None else None,
        (lambda x: c * f.hess(x)) if f.hess is not None else None,
        f.support_radius,
        f"{c}*{f.name}",
    )


def dilate(f: ScalarField, lam: float) -> ScalarField:
    return ScalarField(
        lambda x: f.value(lam * x),
        (lambda x: lam * f.grad(lam * x)) if f.grad is not None else None,
        (lambda x: lam**2 * f.hess(lam * x)) if f.hess is not None else None,
        None if f.support_radius is None else f.support_radius / lam,
        f"{f.name}(lam={lam})",
    )


def linear_change(f: ScalarField, matrix) -> ScalarField:
    """x -> f(A x)."""
    a = np.asarray(matrix, dtype=float)
    return ScalarField(
        lambda x: f.value(x @ a.T),
        (lambda x: f.grad(x @ a.T) @ a) if f.grad is not None else None,
        (lambda x: np.einsum("ji,...jk,kl->...il", a, f.hess(x @ a.T), a)) if f.hess is not None else None,
        f.support_radius,
        f"{f.name}o A",
    )


def profile_field(g, dg, d2g, center, scale: float, support: float | None, name: str) -> ScalarField:
    """x -> g(s) with s = |x - c|^2 / scale^2; g, g', g'' act on arrays of s."""
    c = np.asarray(center, dtype=float)
    s2 = float(scale) ** 2

    def _s(x):
        d = x - c
        return d, np.sum(d * d, axis=-1) / s2

    def value(x):
        return g(_s(x)[1])

    def grad(x):
        d, s = _s(x)
        return (2.0 / s2) * dg(s)[..., None] * d

    def hess(x):
        d, s = _s(x)
        n = x.shape[-1]
        outer = d[..., :, None] * d[..., None, :]
        return (4.0 / s2**2) * d2g(s)[..., None, None] * outer + (2.0 / s2) * dg(s)[..., None, None] * np.eye(n)

    rad = None if support is None else float(np.linalg.norm(c)) + support
    return ScalarField(value, grad, hess, rad, name)


def gaussian(center, scale: float = 1.0, amplitude: float = 1.0) -> ScalarField:
    """amplitude * exp(-|x - c|^2 / scale^2)."""
    a = float(amplitude)
    return profile_field(
        lambda s: a * np.exp(-s),
        lambda s: -a * np.exp(-s),
        lambda s: a * np.exp(-s),
        center, scale, None, f"gauss(c={list(np.round(center, 3))},s={scale})",
    )


def _bump_parts(s):
    inside = s < 1.0
    t = np.where(inside, 1.0 - s, 1.0)
    phi = np.where(inside, np.exp(1.0 - 1.0 / t), 0.0)
    return inside, t, phi


def _bump(s):
    return _bump_parts(s)[2]


def _dbump(s):
    inside, t, phi = _bump_parts(s)
    return np.where(inside, -phi / t**2, 0.0)


def _d2bump(s):
    inside, t, phi = _bump_parts(s)
    return np.where(inside, phi * (1.0 / t**4 - 2.0 / t**3), 0.0)


def bump(center, radius: float, amplitude: float = 1.0) -> ScalarField:
    """C^infinity bump exp(1 - 1/(1 - |x-c|^2/r^2)), supported in the ball B(c, r)."""
    a = float(amplitude)
    return profile_field(
        lambda s: a * _bump(s), lambda s: a * _dbump(s), lambda s: a * _d2bump(s),
        center, radius, float(radius), f"bump(c={list(np.round(center, 3))},r={radius})",
    )


def radial_annulus_bump(r_in: float, r_out: float, dim: int, amplitude: float = 1.0) -> ScalarField:
    """Radial bump supported in the annulus r_in < |x| < r_out (vanishes near 0)."""
    mid, half = 0.5 * (r_in + r_out), 0.5 * (r_out - r_in)

    def parts(x):
        r = np.sqrt(np.sum(x * x, axis=-1))
        u = ((r - mid) / half) ** 2
        return r, u

    def value(x):
        return amplitude * _bump(parts(x)[1])

    def grad(x):
        r, u = parts(x)
        du_dr = 2.0 * (r - mid) / half**2
        rs = np.where(r > 0, r, 1.0)
        return amplitude * (_dbump(u) * du_dr / rs)[..., None] * x

    def hess(x):
        r, u = parts(x)
        rs = np.where(r > 0, r, 1.0)
        du = 2.0 * (r - mid) / half**2
        d2u = 2.0 / half**2
        g1 = _dbump(u) * du
        g2 = _d2bump(u) * du**2 + _dbump(u) * d2u
        xhat = x / rs[..., None]
        outer = xhat[..., :, None] * xhat[..., None, :]
        eye = np.eye(x.shape[-1])
        return amplitude * (g2[..., None, None] * outer + (g1 / rs)[..., None, None] * (eye - outer))

    return ScalarField(value, grad, hess, float(r_out), f"annulus({r_in},{r_out})")


def radial_profile(h, dh, d2h, support: float | None = None, name: str = "radial") -> ScalarField:
    """x -> h(|x|) for a profile h with h'(0) = 0 (so the field is smooth)."""

    def value(x):
        return h(np.sqrt(np.sum(x * x, axis=-1)))

    def grad(x):
        r = np.sqrt(np.sum(x * x, axis=-1))
        rs = np.where(r > 0, r, 1.0)
        return (dh(r) / rs)[..., None] * x

    def hess(x):
        r = np.sqrt(np.sum(x * x, axis=-1))
        rs = np.where(r > 0, r, 1.0)
        xhat = x / rs[..., None]
        outer = xhat[..., :, None] * xhat[..., None, :]
        eye = np.eye(x.shape[-1])
        tang = np.where(r > 0, dh(r) / rs, d2h(r))
        return d2h(r)[..., None, None] * outer + tang[..., None, None] * (eye - outer)

    return ScalarField(value, grad, hess, support, name)


def polynomial_field(p: MultiPoly) -> ScalarField:
    """A polynomial seen as a field (float evaluation, exact derivative polynomials)."""
    grads = [p.diff(i) for i in range(p.dim)]
    hess = [[g.diff(j) for j in range(p.dim)] for g in grads]

    def grad(x):
        return np.stack([g.evaluate(x) for g in grads], axis=-1)

    def hessian(x):
        return np.stack([np.stack([h.evaluate(x) for h in row], axis=-1) for row in hess], axis=-2)

    return ScalarField(p.evaluate, grad, hessian, None, f"poly(deg={p.degree})")


def constant_field(dim: int, c: float = 1.0) -> ScalarField:
    return ScalarField(
        lambda x: np.full(np.shape(x)[:-1], float(c)),
        lambda x: np.zeros(np.shape(x)),
        lambda x: np.zeros(np.shape(x) + (dim,)),
        None,
        f"const({c})",
    )


def zero_field(dim: int) -> ScalarField:
    return constant_field(dim, 0.0)


def random_test_field(dim: int, rng: np.random.Generator, kind: str = "gauss_poly") -> ScalarField:
    """Random smooth rapidly decaying field, generically not G-invariant.

    ``gauss_poly``: a shifted Gaussian times a random affine factor.
    ``bumps``: a sum of two smooth bumps with random centres.
    """
    if kind == "bumps":
        f = bump(rng.uniform(-0.8, 0.8, dim), rng.uniform(0.9, 1.6), rng.uniform(0.5, 1.5))
        g = bump(rng.uniform(-0.8, 0.8, dim), rng.uniform(0.9, 1.6), rng.uniform(-1.0, 1.0))
        return f + g
    center = rng.uniform(-0.7, 0.7, dim)
    g = gaussian(center, rng.uniform(0.7, 1.3))
    coeffs = rng.uniform(-1.0, 1.0, dim)
    lin = MultiPoly.linear([float(c) for c in coeffs]) + float(rng.uniform(0.2, 1.0))
    return product(g, polynomial_field(lin))
