"""Spherical h-harmonics: exact kernels of Delta_k, orthonormal bases, expansions.

The degree-n space is the kernel of the exact linear map Delta_k : P_n -> P_(n-2)
on monomials.  Orthonormalisation happens in floating point against a sphere
rule, but the resulting coefficients are converted back to exact fractions,
so every basis polynomial is an exact rational combination of kernel vectors
and Delta_k annihilates it exactly.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .dunkl import _laplacian_formula_poly, dunkl_laplacian_formula
from .fields import polynomial_field
from .polynomials import MultiPoly, monomial_basis, nullspace
from .quadrature import Ball, integrate_rule, sphere_rule
from .roots import DunklContext

SPHERE_N = 24
SINGULAR_TOL = 1e-10


@dataclass(frozen=True)
class HHarmonicBasis:
    degree: int
    polys: tuple
    gram_residual: float
    eigenvalue: float
    kernel: tuple = field(repr=False, default=())

    @property
    def dimension(self) -> int:
        return len(self.polys)

    def evaluate(self, x) -> np.ndarray:
        """Values of all basis elements at points x, shape (M, d)."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        if not self.polys:
            return np.zeros((len(x), 0))
        return np.stack([p.evaluate(x) for p in self._float_polys], axis=1)

    @property
    def _float_polys(self):
        return tuple(p.to_float() for p in self.polys)

    def to_json(self) -> str:
        return json.dumps({
            "degree": self.degree,
            "dimension": self.dimension,
            "eigenvalue": self.eigenvalue,
            "gram_residual": self.gram_residual,
            "polys": [p.to_dict() for p in self.polys],
        })


def eigenvalue(ctx: DunklContext, n: int) -> float:
    """lambda_n = -n (n + N + 2 gamma - 2)."""
    return -n * (n + ctx.dim + 2.0 * ctx.gamma - 2.0)


@lru_cache(maxsize=None)
def _kernel_vectors(ctx: DunklContext, n: int) -> tuple:
    src = monomial_basis(ctx.dim, n)
    if n < 2:
        return tuple(MultiPoly.monomial(e) for e in src)
    dst = monomial_basis(ctx.dim, n - 2)
    cols = [_laplacian_formula_poly(ctx, MultiPoly.monomial(e)).coefficient_vector(dst) for e in src]
    rows = [list(r) for r in zip(*cols)]
    if not ctx.system.exact:
        rows = [[float(v) for v in r] for r in rows]
    return tuple(MultiPoly.from_coefficients(src, v) for v in nullspace(rows, len(src)))


def _gram(values: np.ndarray, weights: np.ndarray) -> np.ndarray:
    return values.T @ (weights[:, None] * values)


def _orthonormal_coefficients(values: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """C with (values @ C) orthonormal in the weighted inner product (MGS, twice)."""
    d = values.shape[1]
    coef = np.eye(d)
    for _ in range(2):
        cur = values @ coef
        for j in range(d):
            v = cur[:, j]
            for i in range(j):
                proj = np.dot(weights * cur[:, i], v)
                v = v - proj * cur[:, i]
                coef[:, j] -= proj * coef[:, i]
            nrm = math.sqrt(max(np.dot(weights * v, v), 0.0))
            base = math.sqrt(abs(np.dot(weights * cur[:, j], cur[:, j]))) or 1.0
            if nrm < SINGULAR_TOL * base:
                raise np.linalg.LinAlgError("Gram matrix numerically singular; refine the sphere rule")
            cur[:, j] = v / nrm
            coef[:, j] /= nrm
    return coef


def _combine_exact(kernel: tuple, coef: np.ndarray, exact: bool) -> tuple:
    out = []
    for j in range(coef.shape[1]):
        p = MultiPoly(kernel[0].dim)
        for i, q in enumerate(kernel):
            c = coef[i, j]
            if c != 0.0:
                p = p + q * (Fraction(c) if exact else float(c))
        out.append(p)
    return tuple(out)


def gram_matrix(ctx: DunklContext, polys, resolution: int = 2 * SPHERE_N) -> np.ndarray:
    rule = sphere_rule(ctx, resolution)
    vals = np.stack([p.to_float().evaluate(rule.nodes) for p in polys], axis=1)
    return _gram(vals, rule.weights)


@lru_cache(maxsize=None)
def hharmonic_space(ctx: DunklContext, n: int, resolution: int = SPHERE_N) -> HHarmonicBasis:
    """Orthonormal basis of the degree-n h-harmonics under int P Q w_k d sigma."""
    if n < 0:
        raise ValueError("degree must be nonnegative")
    kernel = _kernel_vectors(ctx, n)
    lam = eigenvalue(ctx, n)
    if not kernel:
        return HHarmonicBasis(n, (), 0.0, lam, ())
    rule = sphere_rule(ctx, resolution)
    values = np.stack([q.to_float().evaluate(rule.nodes) for q in kernel], axis=1)
    coef = _orthonormal_coefficients(values, rule.weights)
    polys = _combine_exact(kernel, coef, ctx.system.exact)
    gram = gram_matrix(ctx, polys, 2 * resolution)
    residual = float(np.max(np.abs(gram - np.eye(len(polys)))))
    return HHarmonicBasis(n, polys, residual, lam, kernel)


def eigenvalue_residual(ctx: DunklContext, poly: MultiPoly, degree: int | None = None,
                        resolution: int = SPHERE_N, clearance: float = 1e-2) -> float:
    """sup over sphere nodes of |Delta_(k,0) Y - lambda_n Y| via the polar form of Delta_k.

    Delta_k is evaluated pointwise on the polynomial as a field, then the radial
    part n(n-1) Y + (N + 2 gamma - 1) n Y is removed.
    """
    n = poly.degree if degree is None else degree
    if n <= 0:
        return 0.0
    rule = sphere_rule(ctx, resolution)
    nodes = rule.nodes
    roots = ctx.system.positive_roots
    if len(roots):
        dist = np.min(np.abs(nodes @ roots.T), axis=1) / math.sqrt(2.0)
        nodes = nodes[dist >= clearance]
    fp = poly.to_float()
    y = fp.evaluate(nodes)
    lap = dunkl_laplacian_formula(ctx, polynomial_field(fp), nodes)
    spherical = lap - n * (n - 1) * y - (ctx.dim + 2.0 * ctx.gamma - 1.0) * n * y
    return float(np.max(np.abs(spherical - eigenvalue(ctx, n) * y)))


@dataclass(frozen=True)
class ExpansionCoefficients:
    radii: np.ndarray
    coefficients: dict  # (n, i) -> samples of f_(n,i) on ``radii``
    sphere_norms: np.ndarray  # int f(r xi)^2 w_k d sigma on ``radii``

    def parseval_gap(self) -> np.ndarray:
        """sphere norm minus the captured energy at each radius (>= 0 up to rounding)."""
        captured = sum(v**2 for v in self.coefficients.values())
        return self.sphere_norms - captured


def chebyshev_radii(count: int, radius: float) -> np.ndarray:
    j = np.arange(count)
    return 0.5 * radius * (1.0 - np.cos((j + 0.5) * math.pi / count))


def expand(ctx: DunklContext, f, n_max: int, radii, resolution: int = SPHERE_N) -> ExpansionCoefficients:
    """f_(n,i)(r) = int f(r xi) Y_i^n(xi) w_k(xi) d sigma(xi) for n <= n_max."""
    radii = np.asarray(radii, dtype=float)
    rule = sphere_rule(ctx, resolution)
    bases = [hharmonic_space(ctx, n, resolution) for n in range(n_max + 1)]
    if sum(b.dimension for b in bases) > len(rule.nodes):
        raise ValueError("sphere rule too coarse for the requested degree")
    samples = np.stack([f(r * rule.nodes) for r in radii])  # (R, M)
    weighted = samples * rule.weights
    coeffs = {}
    for b in bases:
        vals = b.evaluate(rule.nodes)
        proj = weighted @ vals  # (R, d)
        for i in range(b.dimension):
            coeffs[(b.degree, i)] = proj[:, i]
    norms = (samples**2) @ rule.weights
    return ExpansionCoefficients(radii, coeffs, norms)


def reconstruction_error(ctx: DunklContext, f, n_max: int, radius: float,
                         resolution: int = SPHERE_N) -> float:
    """|| f - sum_(n <= n_max) f_(n,i)(|x|) Y_i^n(x/|x|) ||_(L^2(mu_k, B_R))."""
    bases = [hharmonic_space(ctx, n, resolution) for n in range(n_max + 1)]
    rule = sphere_rule(ctx, resolution)
    sph_vals = [b.evaluate(rule.nodes) for b in bases]

    def residual_sq(x):
        r = np.linalg.norm(x, axis=1)
        xi = x / np.where(r > 0, r, 1.0)[:, None]
        approx = np.zeros(len(x))
        # coefficients by projection at each sample radius
        for b, sv in zip(bases, sph_vals):
            if not b.dimension:
                continue
            ur, inv = np.unique(r, return_inverse=True)
            samples = np.stack([f(rr * rule.nodes) for rr in ur]) * rule.weights
            proj = samples @ sv  # (U, d)
            approx += np.sum(proj[inv] * b.evaluate(xi), axis=1)
        return (f(x) - approx) ** 2

    return math.sqrt(max(integrate_rule(ctx, residual_sq, Ball(radius), resolution // 2), 0.0))
