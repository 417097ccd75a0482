import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kkcs.connection import christoffel_generic
from kkcs.geometry import SingularMetricError
from kkcs.kaluza_klein import (
    KKData,
    assemble_metric,
    christoffel_closed_form,
    covariant_derivative_oneform,
    field_strength,
    metric_field,
    metric_jets,
    surface_christoffel,
)
from kkcs.presets import PresetSpec, build_preset

from conftest import const_matrix_field, linear_oneform

ROTATION = [[0.0, -0.5], [0.5, 0.0]]  # phi = (-x1/2, x0/2)


def flat_kk(phi_coeffs=np.zeros((2, 2)), eps=1.0):
    return KKData(const_matrix_field(np.eye(2)), linear_oneform(phi_coeffs), eps)


def torus_sample(seed):
    rng = np.random.default_rng(seed)
    kk, dom, _ = build_preset(PresetSpec("torus-random", seed=seed, epsilon=float(rng.uniform(0.05, 5))))
    return kk, dom.sample(rng, 10)


def test_kkdata_validation():
    h = const_matrix_field(np.eye(2))
    phi = linear_oneform(np.zeros((2, 2)))
    with pytest.raises(ValueError):
        KKData(h, phi, 0.0)
    with pytest.raises(ValueError):
        KKData(h, phi, 1.0, fiber_volume=-1.0)
    with pytest.raises(ValueError):
        KKData(phi, phi, 1.0)
    with pytest.raises(SingularMetricError):
        KKData(const_matrix_field([[1.0, 2.0], [2.0, 1.0]]), phi, 1.0).jets([0.0, 0.0])


def test_product_metric_is_identity():
    g, g_inv = assemble_metric(flat_kk(), [0.3, 0.1])
    np.testing.assert_array_equal(g, np.eye(3))
    np.testing.assert_array_equal(g_inv, np.eye(3))


@given(st.integers(0, 10_000))
def test_metric_blocks_and_closed_inverse(seed):
    kk, x = torus_sample(seed)
    g, g_inv = assemble_metric(kk, x)
    phi = kk.phi(x)
    np.testing.assert_allclose(g[..., 0, 2], kk.epsilon * phi[..., 0], rtol=1e-15)
    np.testing.assert_allclose(g[..., 2, 2], kk.epsilon)
    np.testing.assert_allclose(g_inv @ g, np.broadcast_to(np.eye(3), g.shape), atol=1e-12 * max(1, 1 / kk.epsilon))


def test_metric_is_fiber_independent(torus):
    kk = torus[0]
    mf = metric_field(kk)
    a, b = mf([0.3, 0.4, 0.0]), mf([0.3, 0.4, 5.0])
    np.testing.assert_array_equal(a, b)
    np.testing.assert_array_equal(metric_jets(kk, [0.3, 0.4])[1][..., 2], np.zeros((3, 3)))


def test_metric_partials_match_fd(torus):
    kk = torus[0]
    x = np.array([1.1, 0.2])
    _, dg, d2g = metric_jets(kk, x, order=2)
    step = 1e-4
    for k in range(2):
        e = np.zeros(2)
        e[k] = step
        fd = (metric_jets(kk, x + e)[0] - metric_jets(kk, x - e)[0]) / (2 * step)
        np.testing.assert_allclose(dg[..., k], fd, atol=1e-7)
        fd2 = (metric_jets(kk, x + e)[1] - metric_jets(kk, x - e)[1]) / (2 * step)
        np.testing.assert_allclose(d2g[..., k], fd2, atol=1e-6)


def test_field_strength_examples(hopf, rng):
    # gradient one-form phi = d(x0 x1) -> f = 0
    exact = flat_kk([[0.0, 1.0], [1.0, 0.0]])
    assert field_strength(exact, [0.4, 0.7]).f == pytest.approx(0.0)
    rot = field_strength(flat_kk(ROTATION), [0.4, 0.7])
    assert rot.lower[0, 1] == pytest.approx(1.0)
    assert rot.f == pytest.approx(1.0)
    kk, dom, _ = hopf
    np.testing.assert_allclose(field_strength(kk, dom.sample(rng, 100)).f, 1.0, rtol=1e-13)


def test_covariant_derivative_examples(torus, rng):
    np.testing.assert_array_equal(covariant_derivative_oneform(flat_kk(), [0.1, 0.2]), np.zeros((2, 2)))
    d = covariant_derivative_oneform(flat_kk(ROTATION), [0.1, 0.2])
    np.testing.assert_allclose(d, [[0.0, 0.5], [-0.5, 0.0]], atol=1e-15)
    kk, dom, _ = torus
    x = dom.sample(rng, 20)
    d = covariant_derivative_oneform(kk, x)
    np.testing.assert_allclose(d - np.swapaxes(d, -1, -2), field_strength(kk, x).lower, atol=1e-13)


def test_product_case_reduces_to_surface(torus, rng):
    kk0, dom, _ = torus
    kk = KKData(kk0.h, linear_oneform(np.zeros((2, 2))), 0.8)
    x = dom.sample(rng, 10)
    c = christoffel_closed_form(kk, x).components
    np.testing.assert_allclose(c[..., :2, :2, :2], surface_christoffel(kk.jets(x)).components, atol=1e-15)
    mixing = c.copy()
    mixing[..., :2, :2, :2] = 0
    np.testing.assert_array_equal(mixing, 0)


@pytest.mark.parametrize("preset", ["hopf", "lens", "torus-random", "product-flat"])
def test_gamma_fiber_fiber_vanishes(preset, rng):
    kk, dom, _ = build_preset(PresetSpec(preset, seed=2, epsilon=1.7))
    x = dom.sample(rng, 10)
    np.testing.assert_array_equal(christoffel_closed_form(kk, x).components[..., :, 2, 2], 0)
    gen = christoffel_generic(metric_field(kk), np.c_[x, np.zeros(len(x))]).components
    np.testing.assert_allclose(gen[..., :, 2, 2], 0, atol=1e-13)


@given(st.integers(0, 10_000))
def test_closed_form_christoffels_match_generic(seed):
    kk, x = torus_sample(seed)
    closed = christoffel_closed_form(kk, x).components
    generic = christoffel_generic(metric_field(kk), np.c_[x, np.zeros(len(x))]).components
    np.testing.assert_allclose(closed, generic, atol=1e-8)
