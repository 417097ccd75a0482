import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kkcs.geometry import (
    LEVI_CIVITA_3,
    ChartDomain,
    DerivativeError,
    Field,
    SingularMetricError,
    invert_symmetric,
    levi_civita_symbol,
    partial_derivative,
)

from conftest import const_matrix_field


def sin_field(domain=None):
    return Field(
        lambda x: np.sin(x[..., 0]),
        2,
        "scalar",
        grad=lambda x: np.stack([np.cos(x[..., 0]), np.zeros_like(x[..., 0])], axis=-1),
        domain=domain,
    )


def test_chart_domain_validation():
    with pytest.raises(ValueError):
        ChartDomain(((0, 1),), (False,))
    with pytest.raises(ValueError):
        ChartDomain(((0, 1), (2, 2)), (False, False))
    with pytest.raises(ValueError):
        ChartDomain(((0, 1), (0, 1)), (False,))
    dom = ChartDomain(((0, np.pi), (0, 2 * np.pi)), (False, True))
    assert dom.dim == 2
    assert dom.volume() == pytest.approx(2 * np.pi**2)


def test_sample_respects_margin(rng):
    dom = ChartDomain(((0, 1), (0, 1)), (False, True))
    pts = dom.sample(rng, 500, margin=0.1)
    assert pts[:, 0].min() >= 0.1 and pts[:, 0].max() <= 0.9
    assert pts[:, 1].min() >= 0.0 and pts[:, 1].max() <= 1.0


def test_derivative_of_constant_is_zero():
    f = Field(lambda x: np.full(x.shape[:-1], 3.0), 2)
    for axis in range(2):
        assert partial_derivative(f, axis, [0.3, 0.4]) == pytest.approx(0.0, abs=1e-12)


def test_sin_derivative_analytic_and_fd():
    f = sin_field()
    assert partial_derivative(f, 0, [0.0, 0.0], mode="analytic") == pytest.approx(1.0, abs=1e-10)
    assert partial_derivative(f, 0, [0.0, 0.0], mode="fd", step=1e-3) == pytest.approx(1.0, abs=1e-8)


def test_fiber_axis_derivative_vanishes():
    h = const_matrix_field([[2.0, 0.1], [0.1, 1.0]])
    np.testing.assert_array_equal(partial_derivative(h, 2, [0.1, 0.2, 0.3]), np.zeros((2, 2)))


def test_stencil_near_boundary_raises():
    dom = ChartDomain(((0, 1), (0, 1)), (False, True))
    f = Field(lambda x: x[..., 0] ** 2, 2, domain=dom)
    with pytest.raises(DerivativeError):
        partial_derivative(f, 0, [1e-5, 0.5], mode="fd", step=1e-3)
    # periodic axis is fine anywhere
    partial_derivative(f, 1, [0.5, 0.0], mode="fd", step=1e-3)


def test_non_finite_value_raises():
    f = Field(lambda x: np.where(x[..., 0] == 0, np.inf, x[..., 0]), 2)
    with pytest.raises(DerivativeError):
        f(np.array([0.0, 1.0]))


def test_analytic_mode_without_partials_raises():
    f = Field(lambda x: x[..., 0], 2)
    with pytest.raises(DerivativeError):
        partial_derivative(f, 0, [0.1, 0.1], mode="analytic")


def test_fd_hessian_matches_exact():
    f = Field(lambda x: np.sin(x[..., 0]) * np.cos(2 * x[..., 1]), 2, fd_step=1e-3)
    x = np.array([0.4, 0.9])
    s0, c0, s1, c1 = np.sin(0.4), np.cos(0.4), np.sin(1.8), np.cos(1.8)
    exact = np.array([[-s0 * c1, -2 * c0 * s1], [-2 * c0 * s1, -4 * s0 * c1]])
    np.testing.assert_allclose(f.hessian(x), exact, atol=1e-7)


def test_invert_symmetric_examples():
    np.testing.assert_array_equal(invert_symmetric(np.eye(3)), np.eye(3))
    np.testing.assert_allclose(invert_symmetric(np.diag([4.0, 0.25])), np.diag([0.25, 4.0]), rtol=1e-15)
    with pytest.raises(SingularMetricError):
        invert_symmetric(np.array([[1.0, 1.0], [1.0, 1.0]]))
    with pytest.raises(ValueError):
        invert_symmetric(np.eye(4))


@given(st.integers(0, 2**32 - 1), st.sampled_from([2, 3]))
def test_invert_symmetric_random_spd(seed, n):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((n, n))
    m = a @ a.T + 0.5 * np.eye(n)
    inv = invert_symmetric(m)
    np.testing.assert_allclose(inv @ m, np.eye(n), atol=1e-12 * np.linalg.cond(m))
    np.testing.assert_array_equal(inv, inv.T)


def test_levi_civita_examples():
    assert levi_civita_symbol((0, 1, 2)) == 1
    assert levi_civita_symbol((1, 0, 2)) == -1
    assert levi_civita_symbol((0, 0, 2)) == 0
    assert levi_civita_symbol((0, 1)) == 1
    with pytest.raises(IndexError):
        levi_civita_symbol((0, 1, 3))


@given(st.permutations([0, 1, 2]), st.integers(0, 1), st.integers(1, 2))
def test_levi_civita_antisymmetric_under_swaps(perm, i, j):
    if i == j:
        return
    swapped = list(perm)
    swapped[i], swapped[j] = swapped[j], swapped[i]
    assert levi_civita_symbol(swapped) == -levi_civita_symbol(perm)


def test_levi_civita_array_matches_symbol():
    for idx in np.ndindex(3, 3, 3):
        assert LEVI_CIVITA_3[idx] == levi_civita_symbol(idx)
