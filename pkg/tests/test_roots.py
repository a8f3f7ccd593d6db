import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from dunklhardy.roots import (
    RootSystem, build_root_system, chamber_info, count_chambers, generate_group, make_context,
    reflect, weight,
)

FAMILIES = [("A", 1), ("A", 2), ("A", 3), ("B", 2), ("B", 3), ("D", 4), ("Z2", 1), ("Z2", 3), ("I2", 5)]


def _as_set(vectors):
    return {tuple(np.round(v, 9)) for v in vectors}


def test_a3_counts():
    system = build_root_system("A", 3)
    assert len(system.roots) == 12 and system.n_positive == 6 and system.dim == 4
    a2 = build_root_system("A", 2)
    assert len(a2.roots) == 6 and a2.n_positive == 3 and a2.dim == 3


def test_b2_positive_roots():
    system = build_root_system("B", 2)
    s = math.sqrt(2)
    expected = {(s, 0.0), (0.0, s), (1.0, 1.0), (1.0, -1.0)}
    assert _as_set(system.positive_roots) == _as_set(expected)


def test_b_short_roots_form_orbit_zero():
    system = build_root_system("B", 3)
    short = [i for i, o in enumerate(system.positive_orbit) if o == 0]
    assert len(short) == 3
    for i in short:
        assert np.count_nonzero(system.positive_roots[i]) == 1


def test_z2_rank_one():
    system = build_root_system("Z2", 1)
    assert _as_set(system.roots) == _as_set([[math.sqrt(2)], [-math.sqrt(2)]])


@pytest.mark.parametrize("family,n", FAMILIES)
def test_roots_normalised_and_closed(family, n):
    system = build_root_system(family, n)
    assert np.allclose(np.sum(system.roots**2, axis=1), 2.0)
    roots = _as_set(system.roots)
    for g in generate_group(system).elements:
        assert _as_set(system.roots @ g.T) == roots


@pytest.mark.parametrize("family,n", [("Q", 2), ("A", 0), ("I2", 1)])
def test_bad_family_or_rank(family, n):
    with pytest.raises(ValueError):
        build_root_system(family, n)


def test_reflect_examples():
    assert np.allclose(reflect([math.sqrt(2), 0], [1, 2]), [-1, 2])
    assert np.allclose(reflect([1, -1, 0], [3, 5, 0]), [5, 3, 0])
    assert np.allclose(reflect([1, -1, 0], [2, 2, 7]), [2, 2, 7])


@given(st.integers(0, 10_000))
def test_reflect_involution_and_isometry(seed):
    rng = np.random.default_rng(seed)
    family, n = FAMILIES[seed % len(FAMILIES)]
    system = build_root_system(family, n)
    a = system.roots[rng.integers(len(system.roots))]
    x = rng.standard_normal((25, system.dim)) * 3
    y = reflect(a, x)
    assert np.allclose(reflect(a, y), x, atol=1e-12)
    assert np.allclose(np.linalg.norm(y, axis=1), np.linalg.norm(x, axis=1))


@pytest.mark.parametrize("family,n,order", [("A", 2, 6), ("Z2", 1, 2), ("B", 2, 8), ("B", 3, 48), ("D", 4, 192),
                                            ("A", 3, 24), ("I2", 5, 10)])
def test_group_orders(family, n, order):
    assert generate_group(build_root_system(family, n)).order == order


@pytest.mark.parametrize("family,n", FAMILIES)
def test_group_order_equals_chamber_count(family, n):
    system = build_root_system(family, n)
    assert generate_group(system).order == count_chambers(system, samples=60000)


def test_group_cap_detects_runaway():
    with pytest.raises(RuntimeError):
        generate_group(build_root_system("B", 3), cap=10)


def test_weight_examples():
    ctx = make_context("Z2", 1, 0.5)
    assert weight(ctx, [[3.0]])[0] == pytest.approx(3 * math.sqrt(2))
    a2 = make_context("A", 2, 1.0)
    assert weight(a2, [[1.0, 1.0, 3.0]])[0] == 0.0
    flat = make_context("B", 3, 0.0)
    assert np.all(weight(flat, np.random.default_rng(0).standard_normal((10, 3))) == 1.0)


@given(st.integers(0, 10_000), st.floats(0.1, 10.0))
def test_weight_homogeneous_and_invariant(seed, t):
    rng = np.random.default_rng(seed)
    family, n = FAMILIES[seed % len(FAMILIES)]
    system = build_root_system(family, n)
    ctx = make_context(family, n, tuple(rng.uniform(0, 2, len(system.orbits))))
    x = rng.standard_normal((10, system.dim))
    w = weight(ctx, x)
    scaled = t ** (2 * ctx.gamma) * w
    assert np.all(np.abs(weight(ctx, t * x) - scaled) <= 1e-10 * scaled)
    for g in ctx.group.elements[:8]:
        assert np.allclose(weight(ctx, x @ g.T), w, rtol=1e-10)


def test_chamber_info_examples():
    a2 = build_root_system("A", 2)
    signs, dist = chamber_info(a2, [1.0, 2.0, 3.0])
    assert np.all(signs == -1) and dist == pytest.approx(1 / math.sqrt(2))
    _, dist0 = chamber_info(a2, [0.0, 0.0, 0.0])
    assert dist0 == 0.0
    signs, dist = chamber_info(build_root_system("Z2", 1), [5.0])
    assert dist == pytest.approx(5.0) and signs[0] == 1
    signs, _ = chamber_info(a2, [1.0, 1.0, 2.0])
    assert 0 in signs


def test_context_multiplicity_errors():
    with pytest.raises(ValueError):
        make_context("B", 2, (0.1, 0.2, 0.3))
    with pytest.raises(ValueError):
        make_context("A", 2, -0.5)


def test_gamma_sums_positive_roots():
    assert make_context("A", 2, 0.5).gamma == pytest.approx(1.5)
    assert make_context("B", 2, (0.3, 0.7)).gamma == pytest.approx(2.0)
    assert make_context("Z2", 2, (0.5, 0.25)).gamma == pytest.approx(0.75)


@pytest.mark.parametrize("family,n", FAMILIES)
def test_json_round_trip(family, n):
    system = build_root_system(family, n)
    k = [0.5] * len(system.orbits)
    doc = json.loads(system.to_json(k))
    assert set(doc) == {"family", "N", "roots", "positive_indices", "orbits", "k_per_orbit"}
    back, kk = RootSystem.from_json(system.to_json(k))
    assert np.allclose(back.roots, system.roots) and back.positive == system.positive
    assert list(kk) == k and back.exact == system.exact
