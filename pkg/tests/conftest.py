import numpy as np
import pytest
from hypothesis import settings

from kkcs.geometry import Field
from kkcs.kaluza_klein import KKData
from kkcs.presets import PresetSpec, build_preset

settings.register_profile("kkcs", max_examples=25, deadline=None)
settings.load_profile("kkcs")


def const_matrix_field(m):
    m = np.asarray(m, dtype=float)
    n = m.shape[-1]
    return Field(
        lambda x: np.broadcast_to(m, x.shape[:-1] + m.shape).copy(),
        n,
        "sym-matrix",
        grad=lambda x: np.zeros(x.shape[:-1] + m.shape + (n,)),
        hess=lambda x: np.zeros(x.shape[:-1] + m.shape + (n, n)),
    )


def linear_oneform(c):
    """phi_a = c[a, b] x^b."""
    c = np.asarray(c, dtype=float)
    return Field(
        lambda x: np.einsum("ab,...b->...a", c, x),
        2,
        "one-form",
        grad=lambda x: np.broadcast_to(c, x.shape[:-1] + (2, 2)).copy(),
        hess=lambda x: np.zeros(x.shape[:-1] + (2, 2, 2)),
    )


def conformal_torus(amplitude=0.3, epsilon=1.0):
    """h = exp(2 a cos x0) I, phi = sin(x0) dx1, exact partials."""
    a = amplitude

    def h(x):
        return np.exp(2 * a * np.cos(x[..., 0]))[..., None, None] * np.eye(2)

    def dh(x):
        s = x[..., 0]
        g = np.exp(2 * a * np.cos(s)) * (-2 * a * np.sin(s))
        out = np.zeros(x.shape[:-1] + (2, 2, 2))
        out[..., 0, 0, 0] = out[..., 1, 1, 0] = g
        return out

    def d2h(x):
        s = x[..., 0]
        g = np.exp(2 * a * np.cos(s)) * (4 * a**2 * np.sin(s) ** 2 - 2 * a * np.cos(s))
        out = np.zeros(x.shape[:-1] + (2, 2, 2, 2))
        out[..., 0, 0, 0, 0] = out[..., 1, 1, 0, 0] = g
        return out

    def phi(x):
        out = np.zeros(x.shape[:-1] + (2,))
        out[..., 1] = np.sin(x[..., 0])
        return out

    def dphi(x):
        out = np.zeros(x.shape[:-1] + (2, 2))
        out[..., 1, 0] = np.cos(x[..., 0])
        return out

    def d2phi(x):
        out = np.zeros(x.shape[:-1] + (2, 2, 2))
        out[..., 1, 0, 0] = -np.sin(x[..., 0])
        return out

    return KKData(
        Field(h, 2, "sym-matrix", grad=dh, hess=d2h),
        Field(phi, 2, "one-form", grad=dphi, hess=d2phi),
        epsilon,
    )


@pytest.fixture(scope="session")
def hopf():
    return build_preset(PresetSpec("hopf"))


@pytest.fixture(scope="session")
def torus():
    return build_preset(PresetSpec("torus-random", seed=7))


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
