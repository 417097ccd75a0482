"""Levi-Civita connection of an arbitrary 2D or 3D metric field, straight
from the defining formula, and the scalar curvature of a surface metric.

These are the reference routes that every closed-form expression elsewhere
in the package is checked against.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .geometry import Field, SingularMetricError, invert_symmetric

__all__ = [
    "ChristoffelSet",
    "christoffel_from_jets",
    "christoffel_generic",
    "scalar_curvature_2d",
    "scalar_curvature_from_jets",
]


@dataclass(frozen=True)
class ChristoffelSet:
    """``components[..., l, m, n]`` is ``Gamma^l_{mn}``; ``derivative`` (if
    present) appends the differentiation index."""

    components: np.ndarray
    derivative: Optional[np.ndarray] = None

    def __post_init__(self):
        c = np.asarray(self.components, dtype=float)
        # symmetric storage in the lower pair; exact for already symmetric input
        object.__setattr__(self, "components", 0.5 * (c + np.swapaxes(c, -1, -2)))
        if self.derivative is not None:
            d = np.asarray(self.derivative, dtype=float)
            object.__setattr__(self, "derivative", 0.5 * (d + np.swapaxes(d, -2, -3)))

    @property
    def dim(self) -> int:
        return self.components.shape[-1]

    def __getitem__(self, idx):
        lam, mu, nu = idx
        return self.components[..., lam, mu, nu]


def christoffel_from_jets(g, dg, d2g=None, g_inv=None) -> ChristoffelSet:
    """Christoffel symbols from metric components and their partials.

    ``Gamma^l_{mn} = 1/2 g^{lr} (d_n g_{rm} + d_m g_{rn} - d_r g_{mn})``.
    With ``d2g`` the first partials of Gamma are returned as well.
    """
    g = np.asarray(g, dtype=float)
    if g_inv is None:
        g_inv = invert_symmetric(g)
    # lowered symbols T_{r m n}
    t = dg + np.swapaxes(dg, -1, -2) - np.einsum("...mnr->...rmn", dg)
    gam = 0.5 * np.einsum("...lr,...rmn->...lmn", g_inv, t)
    if d2g is None:
        return ChristoffelSet(gam)
    # d_s T_{rmn}
    dt = d2g + np.einsum("...rnms->...rmns", d2g) - np.einsum("...mnrs->...rmns", d2g)
    dg_inv = -np.einsum("...la,...abs,...br->...lrs", g_inv, dg, g_inv, optimize=True)
    dgam = 0.5 * (
        np.einsum("...lrs,...rmn->...lmns", dg_inv, t) + np.einsum("...lr,...rmns->...lmns", g_inv, dt)
    )
    return ChristoffelSet(gam, dgam)


def _metric_jets(metric_field: Field, point, second: bool):
    x = np.asarray(point, dtype=float)
    d = metric_field.dim
    if x.shape[-1] < d:
        raise ValueError(f"point has {x.shape[-1]} coordinates, metric needs {d}")
    g = metric_field(x)
    dg = metric_field.gradient(x)
    d2g = metric_field.hessian(x) if second else None
    return g, dg, d2g


def christoffel_generic(metric_field: Field, point, with_derivative: bool = False) -> ChristoffelSet:
    """Christoffel symbols of ``metric_field`` at ``point`` by the defining
    formula. Raises :class:`SingularMetricError` for a singular metric."""
    g, dg, d2g = _metric_jets(metric_field, point, with_derivative)
    return christoffel_from_jets(g, dg, d2g)


def scalar_curvature_from_jets(h, dh, d2h) -> np.ndarray:
    """Scalar curvature (twice the Gauss curvature) of a 2D metric by full
    Riemann-tensor contraction."""
    h_inv = invert_symmetric(h)
    gam = christoffel_from_jets(h, dh, d2h, g_inv=h_inv)
    c, dc = gam.components, gam.derivative
    # R^r_{s m n} = d_m G^r_{n s} - d_n G^r_{m s} + G^r_{m l} G^l_{n s} - G^r_{n l} G^l_{m s}
    riem = (
        np.einsum("...rnsm->...rsmn", dc)
        - np.einsum("...rmsn->...rsmn", dc)
        + np.einsum("...rml,...lns->...rsmn", c, c)
        - np.einsum("...rnl,...lms->...rsmn", c, c)
    )
    ricci = np.einsum("...rsrn->...sn", riem)
    return np.einsum("...sn,...sn->...", h_inv, ricci)


def scalar_curvature_2d(h_field: Field, point, method: str = "riemann") -> np.ndarray:
    """Scalar curvature ``r`` of a surface metric.

    ``method="riemann"`` contracts the Riemann tensor; ``method="spin"`` uses
    the curl of the surface spin connection of the lower-triangular
    Zweibein, ``d_0 w_1 - d_1 w_0 = -1/2 sqrt(h) r``.
    """
    if h_field.dim != 2 or h_field.kind != "sym-matrix":
        raise ValueError("scalar_curvature_2d needs a 2x2 metric field")
    x = np.asarray(point, dtype=float)
    h, dh, d2h = h_field(x), h_field.gradient(x), h_field.hessian(x)
    if method == "riemann":
        return scalar_curvature_from_jets(h, dh, d2h)
    if method == "spin":
        from .frames import surface_spin_connection

        _, domega, _ = surface_spin_connection(h, dh, d2h)
        det = np.linalg.det(h)
        if np.any(det <= 0):
            raise SingularMetricError("surface metric is not positive definite")
        curl = domega[..., 1, 0] - domega[..., 0, 1]
        return -2.0 * curl / np.sqrt(det)
    raise ValueError(f"unknown curvature method {method!r}")
