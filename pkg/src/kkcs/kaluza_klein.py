"""The adiabatic metric family ``g_eps = eps kappa (x) kappa + pi^* h`` in the
adapted chart ``(x0, x1, x2)``, with ``kappa = phi_0 dx0 + phi_1 dx1 + dx2``.

Index convention: ``alpha, beta, delta, zeta`` run over the base (0, 1);
``mu, nu, lambda`` over the full chart; axis 2 is the fiber (Reeb) direction.
Two-dimensional indices are raised with ``h``.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .connection import ChristoffelSet, christoffel_from_jets
from .geometry import Field, SingularMetricError, invert_symmetric

__all__ = [
    "KKData",
    "KKJets",
    "FieldStrength",
    "assemble_metric",
    "metric_jets",
    "metric_field",
    "field_strength",
    "covariant_derivative_oneform",
    "christoffel_closed_form",
    "surface_christoffel",
]


@dataclass(frozen=True)
class KKData:
    """Base data ``(h, phi)`` plus the fiber scale ``epsilon`` and the fiber
    length."""

    h: Field
    phi: Field
    epsilon: float
    fiber_volume: float = 2 * np.pi

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if not self.fiber_volume > 0:
            raise ValueError(f"fiber_volume must be positive, got {self.fiber_volume}")
        if self.h.dim != 2 or self.h.kind != "sym-matrix":
            raise ValueError("h must be a 2x2 symmetric-matrix field on the base")
        if self.phi.dim != 2 or self.phi.kind != "one-form":
            raise ValueError("phi must be a one-form field on the base")

    def with_epsilon(self, epsilon: float) -> "KKData":
        return replace(self, epsilon=float(epsilon))

    def with_fiber_volume(self, fiber_volume: float) -> "KKData":
        return replace(self, fiber_volume=float(fiber_volume))

    def jets(self, point, order: int = 1) -> "KKJets":
        x = np.asarray(point, dtype=float)[..., :2]
        h = self.h(x)
        det = np.linalg.det(h)
        if np.any(det <= 0) or np.any(h[..., 0, 0] <= 0):
            raise SingularMetricError("h is not positive definite")
        return KKJets(
            h=h,
            dh=self.h.gradient(x),
            d2h=self.h.hessian(x) if order >= 2 else None,
            phi=self.phi(x),
            dphi=self.phi.gradient(x),
            d2phi=self.phi.hessian(x) if order >= 2 else None,
            epsilon=self.epsilon,
        )


@dataclass(frozen=True)
class KKJets:
    """Pointwise values and partials of the base data (derivative index last)."""

    h: np.ndarray
    dh: np.ndarray
    d2h: np.ndarray | None
    phi: np.ndarray
    dphi: np.ndarray
    d2phi: np.ndarray | None
    epsilon: float

    @property
    def h_inv(self) -> np.ndarray:
        return invert_symmetric(self.h)

    @property
    def sqrt_det_h(self) -> np.ndarray:
        return np.sqrt(np.linalg.det(self.h))

    @property
    def f_lower(self) -> np.ndarray:
        # f_{ab} = d_a phi_b - d_b phi_a ; dphi[..., b, a] = d_a phi_b
        return np.swapaxes(self.dphi, -1, -2) - self.dphi


@dataclass(frozen=True)
class FieldStrength:
    """``lower[..., a, b] = f_{ab}`` and the invariant ``f = f_{01} / sqrt(h)``."""

    lower: np.ndarray
    f: np.ndarray


def _pad_fiber(arr: np.ndarray, n_deriv: int) -> np.ndarray:
    """Append zero partials along the fiber axis to each trailing derivative index."""
    pad = [(0, 0)] * arr.ndim
    for i in range(1, n_deriv + 1):
        pad[-i] = (0, 1)
    return np.pad(arr, pad)


def metric_jets(kk: KKData, point, order: int = 1):
    """``G``, its partials and (``order=2``) second partials in the 3D chart.
    Fiber partials are zero."""
    j = kk.jets(point, order)
    eps = kk.epsilon
    lead = j.h.shape[:-2]
    g = np.zeros(lead + (3, 3))
    g[..., :2, :2] = j.h + eps * np.einsum("...a,...b->...ab", j.phi, j.phi)
    g[..., :2, 2] = g[..., 2, :2] = eps * j.phi
    g[..., 2, 2] = eps

    dg = np.zeros(lead + (3, 3, 2))
    dg[..., :2, :2, :] = j.dh + eps * (
        np.einsum("...ak,...b->...abk", j.dphi, j.phi) + np.einsum("...a,...bk->...abk", j.phi, j.dphi)
    )
    dg[..., :2, 2, :] = dg[..., 2, :2, :] = eps * j.dphi
    dg = _pad_fiber(dg, 1)
    if order < 2:
        return g, dg, None

    d2g = np.zeros(lead + (3, 3, 2, 2))
    d2g[..., :2, :2, :, :] = j.d2h + eps * (
        np.einsum("...akl,...b->...abkl", j.d2phi, j.phi)
        + np.einsum("...ak,...bl->...abkl", j.dphi, j.dphi)
        + np.einsum("...al,...bk->...abkl", j.dphi, j.dphi)
        + np.einsum("...a,...bkl->...abkl", j.phi, j.d2phi)
    )
    d2g[..., :2, 2, :, :] = d2g[..., 2, :2, :, :] = eps * j.d2phi
    return g, dg, _pad_fiber(d2g, 2)


def assemble_metric(kk: KKData, point) -> tuple[np.ndarray, np.ndarray]:
    """The 3x3 metric ``[[h + eps phi phi^T, eps phi], [eps phi^T, eps]]`` and
    its closed-form inverse ``[[h^-1, -h^-1 phi], [-phi^T h^-1, 1/eps + phi.h^-1.phi]]``."""
    j = kk.jets(point)
    eps = kk.epsilon
    g, _, _ = metric_jets(kk, point)
    h_inv = j.h_inv
    phi_up = np.einsum("...ab,...b->...a", h_inv, j.phi)
    g_inv = np.zeros_like(g)
    g_inv[..., :2, :2] = h_inv
    g_inv[..., :2, 2] = g_inv[..., 2, :2] = -phi_up
    g_inv[..., 2, 2] = 1.0 / eps + np.einsum("...a,...a->...", phi_up, j.phi)
    return g, g_inv


def metric_field(kk: KKData) -> Field:
    """The assembled metric as a 3D field with exact partials."""
    return Field(
        func=lambda x: metric_jets(kk, x)[0],
        dim=3,
        kind="sym-matrix",
        grad=lambda x: metric_jets(kk, x)[1],
        hess=lambda x: metric_jets(kk, x, order=2)[2],
        name="g_eps",
    )


def field_strength(kk: KKData, point) -> FieldStrength:
    j = kk.jets(point)
    lower = j.f_lower
    return FieldStrength(lower=lower, f=lower[..., 0, 1] / j.sqrt_det_h)


def surface_christoffel(j: KKJets, with_derivative: bool = False) -> ChristoffelSet:
    """Christoffel symbols ``gamma^d_{ab}`` of the base metric ``h``."""
    return christoffel_from_jets(j.h, j.dh, j.d2h if with_derivative else None, g_inv=j.h_inv)


def _covariant_derivative(j: KKJets, gamma: np.ndarray) -> np.ndarray:
    # D_a phi_b = d_a phi_b - gamma^z_{ab} phi_z
    return np.swapaxes(j.dphi, -1, -2) - np.einsum("...zab,...z->...ab", gamma, j.phi)


def covariant_derivative_oneform(kk: KKData, point) -> np.ndarray:
    """``D[..., a, b] = D_a phi_b`` for the Levi-Civita connection of ``h``."""
    j = kk.jets(point)
    return _covariant_derivative(j, surface_christoffel(j).components)


def christoffel_closed_form(kk: KKData, point) -> ChristoffelSet:
    """Christoffel symbols of ``g_eps`` assembled from the five block families
    (base/base/base, fiber/base/base, base/fiber/base, fiber/fiber/base,
    anything/fiber/fiber)."""
    j = kk.jets(point)
    eps = kk.epsilon
    h_inv = j.h_inv
    gamma = surface_christoffel(j).components
    f = j.f_lower
    phi = j.phi
    phi_up = np.einsum("...ab,...b->...a", h_inv, phi)
    dphi_cov = _covariant_derivative(j, gamma)

    # S_{z a b} = phi_b f_{z a} + phi_a f_{z b}
    s = np.einsum("...b,...za->...zab", phi, f) + np.einsum("...a,...zb->...zab", phi, f)

    out = np.zeros(j.h.shape[:-2] + (3, 3, 3))
    out[..., :2, :2, :2] = gamma - 0.5 * eps * np.einsum("...dz,...zab->...dab", h_inv, s)
    out[..., 2, :2, :2] = 0.5 * (dphi_cov + np.swapaxes(dphi_cov, -1, -2)) + 0.5 * eps * np.einsum(
        "...z,...zab->...ab", phi_up, s
    )
    mixed = 0.5 * eps * np.einsum("...dz,...bz->...db", h_inv, f)
    out[..., :2, 2, :2] = mixed
    out[..., :2, :2, 2] = mixed
    fiber = 0.5 * eps * np.einsum("...z,...zb->...b", phi_up, f)
    out[..., 2, 2, :2] = fiber
    out[..., 2, :2, 2] = fiber
    return ChristoffelSet(out)

