"""Dunkl operators, gradients and Laplacians.

Two routes are provided.  On ``MultiPoly`` the operators are exact: the
reflection difference ``p - p o sigma_a`` is divided by the linear form
``<a, x>`` with no remainder.  On ``ScalarField`` they are evaluated
pointwise, with the difference quotient replaced by its directional limit
within ``tau`` of a reflection hyperplane.

Axis indices are 0-based.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

import numpy as np

from .fields import ScalarField
from .polynomials import MultiPoly, monomial_basis, solve_columns
from .roots import DunklContext

DEFAULT_TAU = 1e-7


# -----------------------------------------------------------------------------
# exact polynomial route
# -----------------------------------------------------------------------------

def _root_data(ctx: DunklContext) -> list:
    """(k, direction, |direction|^2, reflection matrix) for roots with k != 0."""
    return _root_data_cached(ctx)


@lru_cache(maxsize=None)
def _root_data_cached(ctx: DunklContext) -> list:
    out = []
    if ctx.system.exact:
        dirs = ctx.system.positive_directions()
        ks = ctx.k_exact_positive
    else:
        dirs = [tuple(float(c) for c in a) for a in ctx.system.positive_roots]
        ks = tuple(float(v) for v in ctx.k_positive)
    n = ctx.dim
    for kk, d in zip(ks, dirs):
        if kk == 0:
            continue
        norm2 = sum(c * c for c in d)
        refl = tuple(
            tuple((1 if i == j else 0) - 2 * d[i] * d[j] / norm2 for j in range(n)) for i in range(n)
        )
        out.append((kk, d, norm2, refl))
    return out


@lru_cache(maxsize=200_000)
def _monomial_quotient(ctx: DunklContext, root: int, exp: tuple) -> MultiPoly:
    """(m - m o sigma) / <d, x> for one monomial m."""
    _, d, _, refl = _root_data(ctx)[root]
    m = MultiPoly.monomial(exp)
    return (m - m.compose_linear(refl)).divide_linear(d)


def difference_quotient(ctx: DunklContext, root: int, p: MultiPoly) -> MultiPoly:
    out = MultiPoly(p.dim)
    for e, c in p.terms.items():
        out = out + _monomial_quotient(ctx, root, e) * c
    return out


def dunkl_apply_poly(ctx: DunklContext, i: int, p: MultiPoly) -> MultiPoly:
    """T_i p computed exactly."""
    if not 0 <= i < ctx.dim:
        raise IndexError(f"axis {i} outside 0..{ctx.dim - 1}")
    out = p.diff(i)
    for r, (kk, d, _, _) in enumerate(_root_data(ctx)):
        if d[i] != 0:
            out = out + difference_quotient(ctx, r, p) * (kk * d[i])
    return out


def dunkl_gradient_poly(ctx: DunklContext, p: MultiPoly) -> list:
    quots = [difference_quotient(ctx, r, p) for r in range(len(_root_data(ctx)))]
    out = []
    for i in range(ctx.dim):
        t = p.diff(i)
        for (kk, d, _, _), q in zip(_root_data(ctx), quots):
            if d[i] != 0:
                t = t + q * (kk * d[i])
        out.append(t)
    return out


def _laplacian_sum_poly(ctx, p):
    out = MultiPoly(p.dim)
    for i in range(ctx.dim):
        out = out + dunkl_apply_poly(ctx, i, dunkl_apply_poly(ctx, i, p))
    return out


def _laplacian_formula_poly(ctx, p):
    out = p.laplacian()
    grad = p.gradient()
    for kk, d, norm2, refl in _root_data(ctx):
        directional = MultiPoly(p.dim)
        for gi, di in zip(grad, d):
            if di != 0:
                directional = directional + gi * di
        lin = MultiPoly.linear(list(d))
        half = norm2 / 2
        numer = directional * lin - (p - p.compose_linear(refl)) * half
        out = out + numer.divide_linear(d).divide_linear(d) * (2 * kk)
    return out


def leibniz_apply(ctx: DunklContext, i: int, f: MultiPoly, g: MultiPoly) -> MultiPoly:
    """T_i(fg) assembled from T_i f, T_i g and the reflection correction."""
    out = dunkl_apply_poly(ctx, i, f) * g + f * dunkl_apply_poly(ctx, i, g)
    for kk, d, _, refl in _root_data(ctx):
        if d[i] == 0:
            continue
        df = f - f.compose_linear(refl)
        dg = g - g.compose_linear(refl)
        out = out - (df * dg).divide_linear(d) * (kk * d[i])
    return out


@lru_cache(maxsize=None)
def _dunkl_matrix(ctx: DunklContext, n: int) -> list:
    """Rows: the stacked map q -> (T_1 q, ..., T_N q) from P_n to P_{n-1}^N."""
    src = monomial_basis(ctx.dim, n)
    dst = monomial_basis(ctx.dim, n - 1)
    cols = []
    for e in src:
        grads = dunkl_gradient_poly(ctx, MultiPoly.monomial(e))
        col = []
        for g in grads:
            col.extend(g.coefficient_vector(dst))
        cols.append(col)
    return [list(r) for r in zip(*cols)]


@lru_cache(maxsize=None)
def _intertwiner_degree(ctx: DunklContext, n: int) -> dict:
    """V_k on the degree-n monomials: exponent -> image polynomial."""
    src = monomial_basis(ctx.dim, n)
    if n == 0:
        return {src[0]: MultiPoly.constant(ctx.dim, 1)}
    prev = _intertwiner_degree(ctx, n - 1)
    dst = monomial_basis(ctx.dim, n - 1)
    rhs_cols = []
    for e in src:
        m = MultiPoly.monomial(e)
        col = []
        for i in range(ctx.dim):
            dm = m.diff(i)
            img = MultiPoly(ctx.dim)
            for de, c in dm.terms.items():
                img = img + prev[de] * c
            col.extend(img.coefficient_vector(dst))
        rhs_cols.append(col)
    a = _dunkl_matrix(ctx, n)
    b = [list(r) for r in zip(*rhs_cols)]
    if not ctx.system.exact:
        a = [[float(v) for v in r] for r in a]
        b = [[float(v) for v in r] for r in b]
    sol = solve_columns(a, b)
    out = {}
    for j, e in enumerate(src):
        out[e] = MultiPoly.from_coefficients(src, [row[j] for row in sol])
    return out


def intertwine(ctx: DunklContext, p: MultiPoly) -> MultiPoly:
    """V_k p, built degree by degree from T_i V_k = V_k d_i and V_k(1) = 1."""
    out = MultiPoly(p.dim)
    for n in sorted({sum(e) for e in p.terms}):
        table = _intertwiner_degree(ctx, n)
        for e, c in p.homogeneous_part(n).terms.items():
            out = out + table[e] * c
    return out


# -----------------------------------------------------------------------------
# numeric field route
# -----------------------------------------------------------------------------

def _pos(ctx):
    return ctx.system.positive_roots, ctx.k_positive


def difference_terms(ctx: DunklContext, f: ScalarField, x: np.ndarray, tau: float = DEFAULT_TAU,
                     fx: np.ndarray | None = None, gx: np.ndarray | None = None) -> np.ndarray:
    """q_a(x) = (f(x) - f(sigma_a x)) / <a, x> for every positive root, shape (M, R+).

    Within ``tau`` of a hyperplane the quotient is replaced by <a, grad f(x)>.
    """
    x = np.atleast_2d(np.asarray(x, dtype=float))
    roots, _ = _pos(ctx)
    fx = f.value(x) if fx is None else fx
    dots = x @ roots.T
    out = np.empty(dots.shape)
    near = np.abs(dots) <= tau
    if near.any() and gx is None:
        if f.grad is None:
            raise ValueError("gradient required for the on-hyperplane limit")
        gx = f.grad(x)
    for j, a in enumerate(roots):
        t = dots[:, j]
        fs = f.value(x - t[:, None] * a)
        safe = np.where(near[:, j], 1.0, t)
        out[:, j] = np.where(near[:, j], 0.0, (fx - fs) / safe)
        if near[:, j].any():
            out[near[:, j], j] = gx[near[:, j]] @ a
    return out


def dunkl_apply_field(ctx: DunklContext, i: int, f: ScalarField, x, tau: float = DEFAULT_TAU):
    """T_i f at the points ``x`` (shape (M, N) or (N,))."""
    return dunkl_gradient(ctx, f, x, tau)[..., i]


def dunkl_gradient(ctx: DunklContext, f, x=None, tau: float = DEFAULT_TAU, gx=None):
    """Dunkl gradient: list of exact polynomials, or an (M, N) array for a field.

    ``gx`` may carry the classical gradient at ``x`` when the caller already has it.
    """
    if isinstance(f, MultiPoly):
        return dunkl_gradient_poly(ctx, f)
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    x = np.atleast_2d(x)
    gx = f.gradient(x) if gx is None else np.atleast_2d(gx)
    q = difference_terms(ctx, f, x, tau, gx=gx)
    roots, ks = _pos(ctx)
    out = gx + (q * ks) @ roots
    return out[0] if single else out


def dunkl_laplacian_formula(ctx: DunklContext, f, x=None, tau: float = DEFAULT_TAU):
    """Delta f + 2 sum k_a [<grad f, a>/<a, x> - (f - f o sigma_a)/<a, x>^2].

    Exact on polynomials; pointwise on fields, using the second-order limit
    a^T H a / 2 for the bracket within ``tau`` of a hyperplane.
    """
    if isinstance(f, MultiPoly):
        return _laplacian_formula_poly(ctx, f)
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    x = np.atleast_2d(x)
    roots, ks = _pos(ctx)
    fx = f.value(x)
    gx = f.gradient(x)
    hx = f.hessian(x)
    out = np.trace(hx, axis1=-2, axis2=-1)
    dots = x @ roots.T
    for j, a in enumerate(roots):
        if ks[j] == 0:
            continue
        t = dots[:, j]
        near = np.abs(t) <= tau
        safe = np.where(near, 1.0, t)
        fs = f.value(x - t[:, None] * a)
        bracket = (gx @ a) / safe - (fx - fs) / safe**2
        limit = ((hx @ a) @ a) / 2.0
        out = out + 2.0 * ks[j] * np.where(near, limit, bracket)
    return out[0] if single else out


def _dunkl_component_field(ctx: DunklContext, i: int, f: ScalarField, tau: float) -> ScalarField:
    """T_i f as a field with an analytic gradient (needs f's Hessian)."""
    roots, ks = _pos(ctx)

    def value(y):
        return dunkl_gradient(ctx, f, y, tau)[..., i]

    def grad(y):
        y = np.atleast_2d(y)
        out = f.hessian(y)[..., i, :]
        fy = f.value(y)
        gy = f.gradient(y)
        dots = y @ roots.T
        for j, a in enumerate(roots):
            if ks[j] == 0 or a[i] == 0:
                continue
            t = dots[:, j]
            sig = np.eye(ctx.dim) - np.outer(a, a)
            ys = y - t[:, None] * a
            gs = f.gradient(ys) @ sig
            near = np.abs(t) <= tau
            safe = np.where(near, 1.0, t)
            dq = (gy - gs) / safe[:, None] - ((fy - f.value(ys)) / safe**2)[:, None] * a
            if near.any():
                # derivative of the quotient on the wall: H a - (a^T H a / 2) a
                h = f.hessian(y[near])
                ha = h @ a
                dq[near] = ha - 0.5 * (ha @ a)[:, None] * a
            out = out + ks[j] * a[i] * dq
        return out

    return ScalarField(value, grad, None, f.support_radius, f"T{i}({f.name})")


def dunkl_laplacian_sum(ctx: DunklContext, f, x=None, tau: float = DEFAULT_TAU):
    """sum_i T_i(T_i f): exact on polynomials, composed pointwise on fields."""
    if isinstance(f, MultiPoly):
        return _laplacian_sum_poly(ctx, f)
    x = np.atleast_2d(np.asarray(x, dtype=float))
    total = np.zeros(len(x))
    for i in range(ctx.dim):
        ti = _dunkl_component_field(ctx, i, f, tau)
        total = total + dunkl_apply_field(ctx, i, ti, x, tau)
    return total


def euler_dunkl(ctx: DunklContext, f: ScalarField, x, tau: float = DEFAULT_TAU) -> np.ndarray:
    """<x, grad_k f(x)>."""
    x = np.atleast_2d(x)
    return np.sum(x * dunkl_gradient(ctx, f, x, tau), axis=-1)


def dunkl_sum_xi(ctx: DunklContext) -> Fraction:
    """sum_i T_i(x_i) = N + 2 gamma, computed exactly."""
    total = MultiPoly(ctx.dim)
    for i in range(ctx.dim):
        total = total + dunkl_apply_poly(ctx, i, MultiPoly.variable(ctx.dim, i))
    return total.terms.get((0,) * ctx.dim, Fraction(0))
