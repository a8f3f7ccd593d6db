import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest
from hypothesis import given, strategies as st

from dunklhardy.kernel import (
    DunklTransform1D, Rank1Kernel, dunkl_transform_rank1, fractional_constant, kernel_bessel, kernel_series,
    rank1_kernel,
)

GAUSS = lambda x: np.exp(-0.5 * x**2)
TEST_FUNCTIONS = {
    "gauss": GAUSS,
    "shifted": lambda x: np.exp(-((x - 0.7) ** 2)),
    "odd_poly": lambda x: (x + 0.3 * x**3) * np.exp(-0.6 * x**2),
}


def test_series_and_bessel_agree():
    s = np.linspace(-4, 4, 41)
    for k in (0.0, 0.5, 1.5):
        assert np.allclose(kernel_series(k, s), kernel_bessel(k, s), rtol=1e-12)


def test_defining_equation():
    # T_x E(x, y) = y E(x, y) by central differences in x
    k, y, h = 0.8, 1.3, 1e-5
    for x in (-1.7, 0.6, 2.4):
        e = lambda t: rank1_kernel(k, t, y)
        lhs = (e(x + h) - e(x - h)) / (2 * h) + k * (e(x) - e(-x)) / x
        assert lhs == pytest.approx(y * e(x), rel=1e-7)


def test_negative_multiplicity_rejected():
    with pytest.raises(ValueError):
        Rank1Kernel(-0.1)


def test_concurrent_reads_agree():
    kern = Rank1Kernel(0.7)
    grid = np.linspace(-6, 6, 301)

    def job(scale):
        return kern(grid, scale)

    with ThreadPoolExecutor(8) as pool:
        results = list(pool.map(job, [1.0] * 16))
    for r in results:
        assert np.array_equal(r, results[0])
    assert np.allclose(results[0], kernel_bessel(0.7, grid), rtol=1e-10)


def test_fourier_case_gaussian_fixed_point():
    xi = np.linspace(-4, 4, 17)
    vals = dunkl_transform_rank1(0.0, GAUSS, xi)
    assert np.allclose(vals, np.exp(-0.5 * xi**2), atol=1e-12)


@pytest.mark.parametrize("k", [0.0, 0.5, 1.5])
def test_dunkl_gaussian_fixed_point(k):
    xi = np.linspace(-3, 3, 13)
    assert np.allclose(dunkl_transform_rank1(k, GAUSS, xi), np.exp(-0.5 * xi**2), atol=1e-10)


def test_even_function_transform_is_real():
    xi = np.linspace(-5, 5, 21)
    vals = dunkl_transform_rank1(0.5, lambda x: np.exp(-x**2) * (1 + x**2), xi)
    assert np.max(np.abs(vals.imag)) < 1e-14


@pytest.mark.parametrize("k", [0.0, 0.5, 1.5])
@pytest.mark.parametrize("name", sorted(TEST_FUNCTIONS))
def test_plancherel(k, name):
    est = DunklTransform1D(k, length=12.0, freq=14.0, n=160).plancherel_residual(TEST_FUNCTIONS[name])
    assert est.value < 1e-4


def test_fractional_constant_special_values():
    assert fractional_constant(1, 0.5, 0.0) == pytest.approx(1.0, abs=1e-15)
    assert fractional_constant(3, 1.5, 1.0) == pytest.approx(2.0, rel=1e-14)


@given(st.integers(1, 6), st.floats(0.0, 20.0))
def test_fractional_constant_at_one(dim, gamma):
    if dim + 2 * gamma <= 2:
        return
    assert abs(fractional_constant(dim, gamma, 1.0) - (dim + 2 * gamma - 2) / 2) < 1e-12 * max(1.0, dim + 2 * gamma)
