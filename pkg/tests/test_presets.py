import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kkcs.connection import scalar_curvature_2d
from kkcs.kaluza_klein import field_strength
from kkcs.presets import PresetSpec, build_preset


@pytest.mark.parametrize(
    "kwargs",
    [
        {"name": "sphere"},
        {"name": "hopf", "radius": 0.0},
        {"name": "lens", "lens_order": 0},
        {"name": "lens", "lens_order": 1.5},
        {"name": "hopf", "epsilon": -1.0},
        {"name": "hopf", "eps_grid": (1.0, 0.0)},
        {"name": "hopf", "grid": (3, 64)},
        {"name": "torus-random", "amplitude": 0.3},
        {"name": "hopf", "fiber_volume": 0.0},
    ],
)
def test_invalid_specs(kwargs):
    with pytest.raises(ValueError):
        PresetSpec(**kwargs)


def test_product_flat():
    kk, dom, quad = build_preset(PresetSpec("product-flat"))
    x = dom.sample(np.random.default_rng(0), 10)
    np.testing.assert_array_equal(kk.h(x), np.broadcast_to(np.eye(2), (10, 2, 2)))
    np.testing.assert_array_equal(kk.phi(x), 0)
    assert all(dom.periodic)
    assert quad.rules == ("trapezoid", "trapezoid")


def test_hopf_normalization(hopf, rng):
    kk, dom, quad = hopf
    x = dom.sample(rng, 100)
    np.testing.assert_allclose(field_strength(kk, x).f, 1.0, rtol=1e-13)
    np.testing.assert_allclose(scalar_curvature_2d(kk.h, x), 8.0, rtol=1e-12)
    np.testing.assert_allclose(kk.phi(x)[:, 1], -np.cos(x[:, 0]) / 4)
    assert quad.rules == ("gauss-legendre", "trapezoid")
    assert quad.points == (64, 64)


@pytest.mark.parametrize("radius", [0.3, 1.0, 2.5])
def test_hopf_any_radius_has_unit_field_strength(radius, rng):
    kk, dom, _ = build_preset(PresetSpec("hopf", radius=radius))
    x = dom.sample(rng, 20)
    np.testing.assert_allclose(field_strength(kk, x).f, 1.0, rtol=1e-12)
    np.testing.assert_allclose(scalar_curvature_2d(kk.h, x), 2 / radius**2, rtol=1e-12)


def test_lens_shares_hopf_fields(hopf, rng):
    kk, dom, _ = hopf
    lens, ldom, _ = build_preset(PresetSpec("lens", lens_order=3))
    x = dom.sample(rng, 10)
    np.testing.assert_array_equal(lens.h(x), kk.h(x))
    np.testing.assert_array_equal(lens.phi(x), kk.phi(x))
    assert lens.fiber_volume == pytest.approx(2 * np.pi / 3)
    assert ldom == dom


def test_fiber_volume_override():
    kk, _, _ = build_preset(PresetSpec("hopf", fiber_volume=1.25))
    assert kk.fiber_volume == 1.25


def test_grid_override():
    _, _, quad = build_preset(PresetSpec("torus-random", grid=(16, 24)))
    assert quad.points == (16, 24)


def test_torus_random_is_reproducible(rng):
    a, dom, _ = build_preset(PresetSpec("torus-random", seed=42))
    b, _, _ = build_preset(PresetSpec("torus-random", seed=42))
    c, _, _ = build_preset(PresetSpec("torus-random", seed=43))
    x = dom.sample(rng, 10)
    np.testing.assert_array_equal(a.h(x), b.h(x))
    np.testing.assert_array_equal(a.phi.hessian(x), b.phi.hessian(x))
    assert not np.array_equal(a.h(x), c.h(x))


@given(st.integers(0, 2**31 - 1))
def test_torus_random_is_spd_and_periodic(seed):
    kk, dom, _ = build_preset(PresetSpec("torus-random", seed=seed))
    x = dom.sample(np.random.default_rng(seed), 50)
    assert np.linalg.eigvalsh(kk.h(x)).min() >= 0.6 - 1e-12
    shifted = x + 2 * np.pi * np.array([1.0, -1.0])
    np.testing.assert_allclose(kk.h(shifted), kk.h(x), atol=1e-12)
    np.testing.assert_allclose(kk.phi(shifted), kk.phi(x), atol=1e-12)


@given(st.integers(0, 2**31 - 1))
def test_torus_random_partials_match_fd(seed):
    kk, dom, _ = build_preset(PresetSpec("torus-random", seed=seed))
    x = dom.sample(np.random.default_rng(seed), 3)
    step = 1e-4
    for fld in (kk.h, kk.phi):
        for k in range(2):
            e = np.zeros(2)
            e[k] = step
            np.testing.assert_allclose(fld.gradient(x)[..., k], (fld(x + e) - fld(x - e)) / (2 * step), atol=1e-6)
            np.testing.assert_allclose(
                fld.hessian(x)[..., k], (fld.gradient(x + e) - fld.gradient(x - e)) / (2 * step), atol=1e-6
            )
