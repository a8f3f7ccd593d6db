"""Rank-one Dunkl kernel and Dunkl transform for R = {+-sqrt(2)}.

On the line T f(x) = f'(x) + k (f(x) - f(-x)) / x, and the kernel E_k(x, y)
depends on s = x y only.  Writing e(s) = E_k(s, 1) = e_even(s) + e_odd(s),
the eigen-equation T e = e splits into

    e_even' = e_odd,        e_odd' = e_even - 2 k e_odd / s,

which has a regular singular point at s = 0.  The solver starts from the
power series at a small s0 and integrates with an 8th-order Runge-Kutta
method; s < 0 follows from parity.  The Bessel closed form is kept as an
independent reference and drives the transform, where the argument is
imaginary.
"""
from __future__ import annotations

import math
import threading

import numpy as np
from scipy.integrate import solve_ivp
from scipy.special import gammaln, iv, jv, roots_jacobi

from .quadrature import IntegralEstimate, macdonald_mehta_rank1

SERIES_RADIUS = 0.25
RTOL = 1e-13


def _series_coefficients(k: float, terms: int) -> np.ndarray:
    """c_n with e(s) = sum c_n s^n."""
    c = np.empty(terms)
    c[0] = 1.0
    for n in range(1, terms):
        # even n: n / (n) ; odd n: n + 2k ; from T s^n = (n + 2k [n odd]) s^(n-1)
        c[n] = c[n - 1] / (n + (2.0 * k if n % 2 else 0.0))
    return c


def kernel_series(k: float, s, terms: int = 80):
    """Truncated power series of E_k(s, 1); accurate for moderate |s|."""
    s = np.asarray(s, dtype=float)
    c = _series_coefficients(k, terms)
    return np.polynomial.polynomial.polyval(s, c)


def _series_parts(k: float, s: float, terms: int = 40):
    c = _series_coefficients(k, terms)
    powers = s ** np.arange(terms)
    even = float(np.sum((c * powers)[0::2]))
    odd = float(np.sum((c * powers)[1::2]))
    return even, odd


SMALL_ARG = 1e-3


def _small_arg_series(nu: float, z, sign: float):
    """1 + sign z^2/(4(nu+1)) + z^4/(32(nu+1)(nu+2)); error O(z^6) below SMALL_ARG."""
    q = 0.25 * z * z
    return 1.0 + sign * q / (nu + 1.0) + q * q / (2.0 * (nu + 1.0) * (nu + 2.0))


def _normalized_bessel(fn, nu: float, z, sign: float):
    z = np.asarray(z, dtype=float)
    az = np.abs(z)
    small = az < SMALL_ARG
    safe = np.where(small, 1.0, az)
    scale = np.exp(gammaln(nu + 1.0) + nu * np.log(2.0 / safe))
    return np.where(small, _small_arg_series(nu, az, sign), scale * fn(nu, safe))


def _normalized_j(nu: float, z):
    """j_nu(z) = Gamma(nu + 1) (2 / z)^nu J_nu(z), with j_nu(0) = 1."""
    return _normalized_bessel(jv, nu, z, -1.0)


def _normalized_i(nu: float, z):
    """Gamma(nu + 1) (2 / z)^nu I_nu(z), the real-argument analogue of j_nu."""
    return _normalized_bessel(iv, nu, z, 1.0)


def kernel_bessel(k: float, s):
    """E_k(s, 1) from modified Bessel functions."""
    s = np.asarray(s, dtype=float)
    return _normalized_i(k - 0.5, s) + s / (2.0 * k + 1.0) * _normalized_i(k + 0.5, s)


def kernel_oscillatory(k: float, t):
    """E_k(t, -i) = j_(k-1/2)(t) - i t/(2k+1) j_(k+1/2)(t)."""
    t = np.asarray(t, dtype=float)
    return _normalized_j(k - 0.5, t) - 1j * t / (2.0 * k + 1.0) * _normalized_j(k + 0.5, t)


class Rank1Kernel:
    """E_k(x, y) on the line, solved from its defining equation.

    The dense ODE solution in s = x y is cached and extended on demand; the
    cache is guarded by a lock so instances can be shared between threads.
    """

    def __init__(self, k: float):
        if k < 0:
            raise ValueError("multiplicity must be nonnegative")
        self.k = float(k)
        self._lock = threading.Lock()
        self._reach = 0.0
        self._pieces: list = []

    def _rhs(self, s, u):
        even, odd = u
        return [odd, even - 2.0 * self.k * odd / s]

    def _extend(self, reach: float) -> None:
        with self._lock:
            if reach <= self._reach:
                return
            start = SERIES_RADIUS if not self._pieces else self._reach
            if not self._pieces:
                y0 = _series_parts(self.k, SERIES_RADIUS)
            else:
                y0 = self._pieces[-1].sol(start)
            target = max(reach, 2.0 * self._reach, 4.0)
            sol = solve_ivp(self._rhs, (start, target), y0, method="DOP853", rtol=RTOL,
                            atol=1e-300, dense_output=True)
            if not sol.success:
                raise ArithmeticError(f"kernel ODE failed: {sol.message}")
            self._pieces.append(sol)
            self._reach = target

    def _parts(self, a: np.ndarray):
        """(even, odd) parts at a >= 0."""
        even = np.empty_like(a)
        odd = np.empty_like(a)
        near = a <= SERIES_RADIUS
        for idx in np.flatnonzero(near):
            even[idx], odd[idx] = _series_parts(self.k, float(a[idx]))
        far = ~near
        if np.any(far):
            self._extend(float(np.max(a[far])))
            lo = SERIES_RADIUS
            for piece in self._pieces:
                hi = piece.t[-1]
                sel = far & (a >= lo) & (a <= hi)
                if np.any(sel):
                    vals = piece.sol(a[sel])
                    even[sel], odd[sel] = vals[0], vals[1]
                lo = hi
        return even, odd

    def __call__(self, x, y):
        s = np.asarray(x, dtype=float) * np.asarray(y, dtype=float)
        shape = s.shape
        s = s.reshape(-1)
        even, odd = self._parts(np.abs(s))
        out = np.where(s >= 0, even + odd, even - odd)
        return out.reshape(shape) if shape else float(out[0])


_KERNELS: dict = {}
_KERNELS_LOCK = threading.Lock()


def rank1_kernel(k: float, x, y):
    """E_k(x, y) for the rank-one system (cached ODE solution per k)."""
    with _KERNELS_LOCK:
        kern = _KERNELS.get(float(k))
        if kern is None:
            kern = _KERNELS[float(k)] = Rank1Kernel(k)
    return kern(x, y)


# -----------------------------------------------------------------------------
# transform
# -----------------------------------------------------------------------------

def _half_line_rule(n: int, length: float, power: float):
    """Gauss-Jacobi nodes/weights for int_0^L g(t) t^power dt."""
    t, w = roots_jacobi(n, 0.0, power)
    return 0.5 * length * (1.0 + t), w * (0.5 * length) ** (power + 1.0)


class DunklTransform1D:
    """D_k f(xi) = (1/M_k) int f(x) E_k(-i xi, x) d mu_k(x) on the line.

    Integrals over R are folded onto [0, L] by parity: even and odd parts of
    f pair with the real and imaginary parts of the kernel.  ``length`` must
    cover the numerical support of f, ``freq`` that of its transform.
    """

    def __init__(self, k: float, length: float = 12.0, freq: float = 12.0, n: int = 200):
        self.k = float(k)
        self.length = float(length)
        self.freq = float(freq)
        self.n = int(n)
        self.norm = macdonald_mehta_rank1(self.k)

    def _x_rule(self, n=None, power=None):
        return _half_line_rule(n or self.n, self.length, 2.0 * self.k if power is None else power)

    def transform(self, f, xi, n: int | None = None) -> np.ndarray:
        xi = np.atleast_1d(np.asarray(xi, dtype=float))
        x, w = self._x_rule(n)
        fp, fm = f(x), f(-x)
        even, odd = 0.5 * (fp + fm), 0.5 * (fp - fm)
        kern = kernel_oscillatory(self.k, np.outer(xi, x))
        # E_k(-i xi, x) at -x is the conjugate; the weight 2^k |x|^(2k) is split off
        integral = 2.0 * (kern.real @ (w * even) + 1j * (kern.imag @ (w * odd)))
        return 2.0**self.k * integral / self.norm

    def norm_squared(self, f, n: int | None = None) -> float:
        x, w = self._x_rule(n)
        return float(2.0**self.k * np.dot(w, f(x) ** 2 + f(-x) ** 2))

    def transform_norm_squared(self, f, n: int | None = None, power: float = 0.0) -> float:
        """int |xi|^power |D_k f(xi)|^2 d mu_k(xi)."""
        m = n or self.n
        xi, w = _half_line_rule(m, self.freq, 2.0 * self.k + power)
        vals = self.transform(f, np.concatenate([xi, -xi]), m)
        return float(2.0**self.k * np.dot(np.concatenate([w, w]), np.abs(vals) ** 2))

    def plancherel_residual(self, f) -> IntegralEstimate:
        """Relative gap | ||D_k f||^2 - ||f||^2 | / ||f||^2 at two resolutions."""

        def gap(m):
            a = self.norm_squared(f, m)
            return abs(self.transform_norm_squared(f, m) - a) / a

        coarse, fine = gap(self.n // 2), gap(self.n)
        return IntegralEstimate(fine, abs(fine - coarse), (self.n // 2, self.n))


def dunkl_transform_rank1(k: float, f, xi, length: float = 12.0, n: int = 200) -> np.ndarray:
    """Samples of D_k f on the grid ``xi`` (complex)."""
    return DunklTransform1D(k, length=length, n=n).transform(f, xi)


def fractional_constant(dim: int, gamma: float, s: float) -> float:
    """C(s) = 2^s Gamma((N/2 + gamma + s)/2) / Gamma((N/2 + gamma - s)/2)."""
    h = 0.5 * dim + gamma
    if not 0.0 <= s < h:
        raise ValueError("need 0 <= s < N/2 + gamma")
    return math.exp(s * math.log(2.0) + gammaln(0.5 * (h + s)) - gammaln(0.5 * (h - s)))
