"""Quadrature against d mu_k = w_k(x) dx.

Sphere rules are assembled from the orthogonal decomposition of R^N into the
spans of the irreducible components of R plus the fixed subspace:

* a rank-1 component or a fixed direction contributes S^0 = {+1, -1};
* a rank-2 component contributes a circle split at its reflection lines, with
  Gauss-Jacobi nodes on every arc so the endpoint factors |<a, x>|^(2k) are
  part of the rule weight;
* two blocks are joined by xi = (sqrt(1-u) eta_A, sqrt(u) eta_B), with
  Gauss-Jacobi in u carrying (1-u)^(dA/2+gA-1) u^(dB/2+gB-1).

A rank-3 component is sliced along one of its roots: xi = t u + sqrt(1-t^2) e(theta)
with d sigma = dt d theta.  The t-range is cut where a latitude circle becomes
tangent to a reflection plane or passes through an intersection line, each
piece gets a graded Gauss-Legendre rule, and every latitude circle
is split at its zeros with Gauss-Jacobi arcs.  Rank >= 4 components (D4) fall
back to a product rule with w_k sampled pointwise, which converges only
algebraically.  Radial integrals use
Gauss-Jacobi on [0, R] with weight r^(N + 2 gamma - 1 + s).

Every estimate is computed at two resolutions n and 2n; the difference is
reported as the error.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.special import gamma as gamma_fn
from scipy.special import roots_jacobi

from .roots import DunklContext, weight

DEFAULT_N = 16


@dataclass(frozen=True)
class IntegralEstimate:
    value: float
    error: float
    resolution: tuple

    def __float__(self):
        return float(self.value)


@dataclass(frozen=True)
class Box:
    lo: tuple
    hi: tuple

    def __post_init__(self):
        lo, hi = tuple(map(float, self.lo)), tuple(map(float, self.hi))
        if len(lo) != len(hi) or any(h <= l for l, h in zip(lo, hi)):
            raise ValueError("degenerate box")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)


@dataclass(frozen=True)
class Ball:
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("degenerate ball")


# -----------------------------------------------------------------------------
# one-dimensional rules
# -----------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _jacobi(n: int, a: float, b: float):
    """Nodes/weights on [-1, 1] for weight (1 - t)^a (1 + t)^b."""
    t, w = roots_jacobi(n, a, b)
    return t, w


@dataclass(frozen=True)
class RadialRule:
    """Nodes and weights for int_0^R g(r) r^beta dr."""

    nodes: np.ndarray
    weights: np.ndarray
    beta: float
    radius: float

    @classmethod
    def gauss_jacobi(cls, n: int, radius: float, beta: float) -> "RadialRule":
        if beta <= -1:
            raise ValueError("radial power must exceed -1 for integrability")
        t, w = _jacobi(n, 0.0, float(beta))
        r = 0.5 * radius * (1.0 + t)
        return cls(r, w * (0.5 * radius) ** (beta + 1.0), float(beta), float(radius))

    def integrate(self, g: Callable) -> float:
        return float(np.dot(self.weights, g(self.nodes)))


def radial_rule(ctx: DunklContext, n: int, radius: float, r_power: float = 0.0) -> RadialRule:
    return RadialRule.gauss_jacobi(n, radius, ctx.dim + 2.0 * ctx.gamma - 1.0 + r_power)


# -----------------------------------------------------------------------------
# sphere rules
# -----------------------------------------------------------------------------

@dataclass(frozen=True)
class SphereRule:
    """int over S^(N-1) of F(xi) w_k(xi) d sigma ~ sum weights * F(nodes)."""

    nodes: np.ndarray
    weights: np.ndarray
    clearance: float

    def integrate(self, func: Callable) -> float:
        return float(np.dot(self.weights, func(self.nodes)))

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow([f"x{i}" for i in range(self.nodes.shape[1])] + ["weight"])
            for x, w in zip(self.nodes, self.weights):
                writer.writerow([repr(float(v)) for v in x] + [repr(float(w))])


@dataclass
class _Block:
    dim: int
    gamma: float
    nodes: np.ndarray  # (M, dim) local coordinates
    weights: np.ndarray


def _components(roots: np.ndarray) -> list:
    m = len(roots)
    parent = list(range(m))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(m):
        for j in range(i + 1, m):
            if abs(roots[i] @ roots[j]) > 1e-12:
                parent[find(j)] = find(i)
    groups: dict = {}
    for i in range(m):
        groups.setdefault(find(i), []).append(i)
    return [g for _, g in sorted(groups.items())]


def _span_basis(vectors: np.ndarray) -> np.ndarray:
    """Orthonormal rows spanning the given vectors (deterministic orientation)."""
    u, s, vt = np.linalg.svd(vectors, full_matrices=False)
    rank = int(np.sum(s > 1e-10))
    basis = vt[:rank]
    for i in range(rank):
        j = int(np.argmax(np.abs(basis[i]) > 1e-12))
        if basis[i, j] < 0:
            basis[i] = -basis[i]
    return basis


def _s0_block(c: float, gamma: float) -> _Block:
    return _Block(1, gamma, np.array([[1.0], [-1.0]]), np.array([c, c]))


def _circle_block(local_roots: np.ndarray, ks: np.ndarray, n: int) -> _Block:
    angles, owners = [], []
    for j, a in enumerate(local_roots):
        base = math.atan2(a[1], a[0]) + 0.5 * math.pi
        for shift in (0.0, math.pi):
            angles.append((base + shift) % (2 * math.pi))
            owners.append(j)
    order = np.argsort(angles)
    angles = [angles[i] for i in order]
    owners = [owners[i] for i in order]
    nodes, weights = [], []
    for idx in range(len(angles)):
        ta, ja = angles[idx], owners[idx]
        tb, jb = angles[(idx + 1) % len(angles)], owners[(idx + 1) % len(angles)]
        if tb <= ta:
            tb += 2 * math.pi
        length = tb - ta
        ea, eb = 2.0 * ks[ja], 2.0 * ks[jb]
        t, w = _jacobi(n, eb, ea)
        theta = ta + 0.5 * length * (1.0 + t)
        pts = np.stack([np.cos(theta), np.sin(theta)], axis=1)
        wk = np.prod(np.abs(pts @ local_roots.T) ** (2.0 * ks), axis=1)
        sing = (theta - ta) ** ea * (tb - theta) ** eb
        weights.append(w * (0.5 * length) ** (1.0 + ea + eb) * wk / sing)
        nodes.append(pts)
    return _Block(2, float(np.sum(ks)), np.concatenate(nodes), np.concatenate(weights))


def _direct_sum(a: _Block, b: _Block, n: int) -> _Block:
    alpha = 0.5 * a.dim + a.gamma - 1.0  # exponent of (1 - u)
    beta = 0.5 * b.dim + b.gamma - 1.0  # exponent of u
    t, w = _jacobi(n, alpha, beta)
    u = 0.5 * (1.0 + t)
    wu = 0.5 * w * 2.0 ** (-alpha - beta - 1.0)
    ma, mb = len(a.nodes), len(b.nodes)
    ca = np.sqrt(1.0 - u)
    cb = np.sqrt(u)
    na = ca[:, None, None, None] * a.nodes[None, :, None, :]
    nb = cb[:, None, None, None] * b.nodes[None, None, :, :]
    na = np.broadcast_to(na, (n, ma, mb, a.dim))
    nb = np.broadcast_to(nb, (n, ma, mb, b.dim))
    nodes = np.concatenate([na, nb], axis=-1).reshape(-1, a.dim + b.dim)
    weights = (wu[:, None, None] * a.weights[None, :, None] * b.weights[None, None, :]).reshape(-1)
    return _Block(a.dim + b.dim, a.gamma + b.gamma, nodes, weights)


def _combine(blocks: list, n: int) -> _Block:
    """Balanced binary joining keeps the node count low."""
    while len(blocks) > 1:
        nxt = []
        for i in range(0, len(blocks) - 1, 2):
            nxt.append(_direct_sum(blocks[i], blocks[i + 1], n))
        if len(blocks) % 2:
            nxt.append(blocks[-1])
        blocks = nxt
    return blocks[0]


def _graded_rule(n: int):
    """Gauss-Legendre on (0, 1) pushed through the quintic smoothstep.

    The Jacobian 30 v^2 (1 - v)^2 turns an endpoint factor |t - c|^b into
    v^(3b + 2), so endpoint singularities of any order are flattened.
    """
    t, w = _legendre(n)
    v = 0.5 * (1.0 + t)
    s = v**3 * (10.0 - 15.0 * v + 6.0 * v * v)
    ds = 30.0 * v**2 * (1.0 - v) ** 2
    return s, 0.5 * w * ds


def _arc_rule(zeros, owners, ks, n):
    """Angles/weights on the circle split at ``zeros`` absorbing |theta - z|^(2k)."""
    if not len(zeros):
        m = 4 * n
        theta = 2.0 * math.pi * (np.arange(m) + 0.5) / m
        return theta, np.full(m, 2.0 * math.pi / m), np.zeros(m)
    order = np.argsort(zeros)
    zeros, owners = np.asarray(zeros)[order], np.asarray(owners)[order]
    thetas, weights, sings = [], [], []
    for idx in range(len(zeros)):
        ta, tb = zeros[idx], zeros[(idx + 1) % len(zeros)]
        if tb <= ta:
            tb += 2.0 * math.pi
        ea, eb = 2.0 * ks[owners[idx]], 2.0 * ks[owners[(idx + 1) % len(zeros)]]
        length = tb - ta
        t, w = _jacobi(n, eb, ea)
        theta = ta + 0.5 * length * (1.0 + t)
        thetas.append(theta)
        weights.append(w * (0.5 * length) ** (1.0 + ea + eb))
        sings.append(ea * np.log(theta - ta) + eb * np.log(tb - theta))
    return np.concatenate(thetas), np.concatenate(weights), np.concatenate(sings)


def _rank3_block(local_roots: np.ndarray, ks: np.ndarray, n: int) -> _Block:
    norms = np.linalg.norm(local_roots, axis=1)
    u = local_roots[0] / norms[0]
    _, _, vt = np.linalg.svd(u[None, :])
    e1, e2 = vt[1], vt[2]
    au = local_roots @ u
    b1, b2 = local_roots @ e1, local_roots @ e2
    rho = np.hypot(b1, b2)
    phi = np.arctan2(b2, b1)
    tol = 1e-12
    breaks = {-1.0, 0.0, 1.0}
    for j in range(1, len(local_roots)):
        if abs(au[j]) > tol:
            tt = rho[j] / norms[j]
            breaks.update((tt, -tt))
        for i in range(j):
            line = np.cross(local_roots[i], local_roots[j])
            ln = np.linalg.norm(line)
            if ln > tol:
                tt = float(line @ u / ln)
                breaks.update((tt, -tt))
    cuts = [c for c in sorted(breaks) if -1.0 <= c <= 1.0]
    merged = [cuts[0]]
    for c in cuts[1:]:
        if c - merged[-1] > 1e-10:
            merged.append(c)
    sv, sw = _graded_rule(n)
    log_ks = 2.0 * ks
    nodes, weights = [], []
    for lo, hi in zip(merged[:-1], merged[1:]):
        for t, wt in zip(lo + (hi - lo) * sv, (hi - lo) * sw):
            s = math.sqrt(max(0.0, 1.0 - t * t))
            zeros, owners = [], []
            for j in range(1, len(local_roots)):
                if rho[j] <= tol:
                    continue
                c = -au[j] * t / (s * rho[j])
                if abs(c) < 1.0:
                    d = math.acos(c)
                    zeros += [(phi[j] + d) % (2 * math.pi), (phi[j] - d) % (2 * math.pi)]
                    owners += [j, j]
            theta, w_theta, log_sing = _arc_rule(zeros, owners, ks, n)
            pts = t * u[None, :] + s * (np.cos(theta)[:, None] * e1 + np.sin(theta)[:, None] * e2)
            log_w = np.sum(log_ks * np.log(np.abs(pts @ local_roots.T)), axis=1)
            nodes.append(pts)
            weights.append(wt * w_theta * np.exp(log_w - log_sing))
    return _Block(3, float(np.sum(ks)), np.concatenate(nodes), np.concatenate(weights))


def _generic_block(local_roots: np.ndarray, ks: np.ndarray, n: int) -> _Block:
    d = local_roots.shape[1]
    plain = _combine([_s0_block(1.0, 0.0) for _ in range(d)], n)
    wk = np.prod(np.abs(plain.nodes @ local_roots.T) ** (2.0 * ks), axis=1)
    return _Block(d, float(np.sum(ks)), plain.nodes, plain.weights * wk)


@lru_cache(maxsize=8)
def _sphere_rule_cached(ctx: DunklContext, n: int) -> SphereRule:
    roots = ctx.system.positive_roots
    ks = ctx.k_positive
    dim = ctx.dim
    frames, blocks = [], []
    for comp in _components(roots):
        basis = _span_basis(roots[comp])
        local = roots[comp] @ basis.T
        kc = ks[comp]
        rank = basis.shape[0]
        if rank == 1:
            blocks.append(_s0_block(float(np.prod(np.abs(local[:, 0]) ** (2.0 * kc))), float(np.sum(kc))))
        elif rank == 2:
            blocks.append(_circle_block(local, kc, n))
        elif rank == 3:
            blocks.append(_rank3_block(local, kc, n))
        else:
            blocks.append(_generic_block(local, kc, n))
        frames.append(basis)
    used = np.concatenate(frames) if frames else np.zeros((0, dim))
    if used.shape[0] < dim:
        if used.shape[0]:
            _, _, vt = np.linalg.svd(used, full_matrices=True)
            extra = vt[used.shape[0]:]
        else:
            extra = np.eye(dim)
        extra = _span_basis(extra)
        for row in extra:
            blocks.append(_s0_block(1.0, 0.0))
            frames.append(row[None, :])
    frame = np.concatenate(frames)
    total = _combine(blocks, n)
    nodes = total.nodes @ frame
    nodes /= np.linalg.norm(nodes, axis=1, keepdims=True)
    dots = np.abs(nodes @ roots.T) if len(roots) else np.ones((len(nodes), 1))
    clearance = float(np.min(dots) / math.sqrt(2.0))
    return SphereRule(nodes, total.weights, clearance)


def sphere_rule(ctx: DunklContext, n: int = DEFAULT_N) -> SphereRule:
    return _sphere_rule_cached(ctx, int(n))


# -----------------------------------------------------------------------------
# integration
# -----------------------------------------------------------------------------

def polar_rule(ctx: DunklContext, radius: float, n: int, r_power: float = 0.0):
    """Points and weights on the ball B_R for the measure |x|^s d mu_k."""
    rad = radial_rule(ctx, 2 * n, radius, r_power)
    sph = sphere_rule(ctx, n)
    pts = (rad.nodes[:, None, None] * sph.nodes[None, :, :]).reshape(-1, ctx.dim)
    wts = (rad.weights[:, None] * sph.weights[None, :]).reshape(-1)
    return pts, wts


@lru_cache(maxsize=None)
def _legendre(n: int):
    return np.polynomial.legendre.leggauss(n)


def _axis_rule(lo: float, hi: float, n: int, expo: float):
    """1-D rule on [lo, hi] absorbing |x|^expo; split at 0 when it is inside."""
    pieces = [(lo, hi)]
    if expo > 0 and lo < 0 < hi:
        pieces = [(lo, 0.0), (0.0, hi)]
    xs, ws = [], []
    for a, b in pieces:
        half = 0.5 * (b - a)
        if expo > 0 and (a == 0.0 or b == 0.0):
            if a == 0.0:
                t, w = _jacobi(n, 0.0, expo)  # singular end at t = -1
            else:
                t, w = _jacobi(n, expo, 0.0)
            x = a + half * (1.0 + t)
            ws.append(w * half ** (1.0 + expo))
            xs.append(x)
        else:
            t, w = _legendre(n)
            x = a + half * (1.0 + t)
            ws.append(w * half * np.abs(x) ** expo)
            xs.append(x)
    return np.concatenate(xs), np.concatenate(ws)


def box_rule(ctx: DunklContext, box: Box, n: int, weighted: bool = True):
    """Tensor rule on a box for d mu_k (or dx when ``weighted`` is False)."""
    dim = ctx.dim
    expo = np.zeros(dim)
    if weighted:
        for a, kk in zip(ctx.system.positive_roots, ctx.k_positive):
            nz = np.flatnonzero(np.abs(a) > 1e-12)
            if len(nz) == 1:
                expo[nz[0]] += 2.0 * kk
    axes = [_axis_rule(box.lo[i], box.hi[i], n, expo[i]) for i in range(dim)]
    grids = np.meshgrid(*[a[0] for a in axes], indexing="ij")
    wgrids = np.meshgrid(*[a[1] for a in axes], indexing="ij")
    pts = np.stack([g.reshape(-1) for g in grids], axis=1)
    wts = np.prod(np.stack([g.reshape(-1) for g in wgrids], axis=1), axis=1)
    if weighted:
        folded = np.prod(np.abs(pts) ** expo, axis=1)
        wts = wts * weight(ctx, pts) / folded
    return pts, wts


def _rule(ctx, domain, n, r_power, weighted):
    if isinstance(domain, Ball):
        if not weighted:
            raise ValueError("unweighted integrals use box domains")
        return polar_rule(ctx, domain.radius, n, r_power)
    if isinstance(domain, Box):
        pts, wts = box_rule(ctx, domain, n, weighted)
        if r_power:
            wts = wts * np.linalg.norm(pts, axis=1) ** r_power
        return pts, wts
    raise TypeError(f"unknown domain {domain!r}")


def integrate_rule(ctx, func, domain, n, r_power=0.0, weighted=True) -> float:
    pts, wts = _rule(ctx, domain, n, r_power, weighted)
    vals = np.asarray(func(pts), dtype=float)
    if not np.all(np.isfinite(vals)):
        raise FloatingPointError("non-finite integrand samples")
    return float(np.dot(wts, vals))


def resolution_levels(n) -> tuple:
    """(coarse, fine) from an int n (meaning n and 2n) or an explicit pair."""
    if isinstance(n, (tuple, list)):
        lo, hi = int(n[0]), int(n[1])
    else:
        lo, hi = int(n), 2 * int(n)
    if not 0 < lo < hi:
        raise ValueError(f"fine resolution must exceed coarse, got {lo}, {hi}")
    return lo, hi


def integrate_mu_k(ctx: DunklContext, func: Callable, domain, n: int = DEFAULT_N,
                   r_power: float = 0.0, weighted: bool = True) -> IntegralEstimate:
    """int over the domain of func(x) |x|^r_power d mu_k(x), at the coarse and fine levels."""
    lo, hi = resolution_levels(n)
    coarse = integrate_rule(ctx, func, domain, lo, r_power, weighted)
    fine = integrate_rule(ctx, func, domain, hi, r_power, weighted)
    return IntegralEstimate(fine, abs(fine - coarse), (lo, hi))


def integrate_many(ctx: DunklContext, pointwise: Callable, domain, n, r_power: float = 0.0,
                   weighted: bool = True) -> tuple:
    """Several integrands sharing one rule: ``pointwise`` maps points to a dict of arrays."""
    levels = resolution_levels(n)
    out = []
    for m in levels:
        pts, wts = _rule(ctx, domain, m, r_power, weighted)
        vals = pointwise(pts)
        res = {}
        for key, v in vals.items():
            v = np.asarray(v, dtype=float)
            if not np.all(np.isfinite(v)):
                raise FloatingPointError(f"non-finite samples in {key}")
            res[key] = float(np.dot(wts, v))
        out.append(res)
    coarse, fine = out
    return {key: IntegralEstimate(fine[key], abs(fine[key] - coarse[key]), levels) for key in fine}


def sphere_constant(ctx: DunklContext, n: int = DEFAULT_N) -> IntegralEstimate:
    """int over the unit sphere of w_k d sigma."""
    a = float(np.sum(sphere_rule(ctx, n).weights))
    b = float(np.sum(sphere_rule(ctx, 2 * n).weights))
    return IntegralEstimate(b, abs(b - a), (n, 2 * n))


def radial_moment(ctx: DunklContext, power: float) -> float:
    """int_0^inf r^(N + 2 gamma - 1 + power) exp(-r^2 / 2) dr in closed form."""
    s = 0.5 * (ctx.dim + 2.0 * ctx.gamma + power)
    return 2.0 ** (s - 1.0) * float(gamma_fn(s))


def macdonald_mehta(ctx: DunklContext, n: int = DEFAULT_N, radius: float = 12.0) -> IntegralEstimate:
    """M_k = int exp(-|x|^2 / 2) d mu_k by polar quadrature."""
    return integrate_mu_k(ctx, lambda x: np.exp(-0.5 * np.sum(x * x, axis=1)), Ball(radius), n)


def macdonald_mehta_rank1(k: float) -> float:
    """M_k for R = {+-sqrt(2)} (so w_k(x) = 2^k |x|^(2k))."""
    return 2.0 ** (2.0 * k + 0.5) * float(gamma_fn(k + 0.5))


def integration_by_parts_residual(ctx: DunklContext, i: int, f, g, radius: float | None = None,
                                  n: int = DEFAULT_N) -> IntegralEstimate:
    """|int T_i(f) g d mu_k + int f T_i(g) d mu_k| (vanishes for compact support)."""
    from .dunkl import dunkl_apply_field

    if radius is None:
        radius = _support_radius(f, g)

    def integrand(x):
        return dunkl_apply_field(ctx, i, f, x) * g(x) + f(x) * dunkl_apply_field(ctx, i, g, x)

    est = integrate_mu_k(ctx, integrand, Ball(radius), n)
    return IntegralEstimate(abs(est.value), est.error, est.resolution)


def _support_radius(*fields, default: float = 7.0) -> float:
    rads = [f.support_radius for f in fields if f.support_radius is not None]
    return min(rads) if rads else default
