"""Orthonormal frames and spin connections for ``g_eps``.

Frame arrays are stored with the tangent (Latin) index first:
``e[..., a, alpha] = e^a_alpha`` and ``e_inv[..., alpha, a]`` is the dual
frame, so ``e @ e_inv`` is the identity. Spin connections are stored as
``A[..., mu, A, B] = [A_mu]^A_B``; the tangent metric is the Euclidean
identity, so raised and lowered tangent indices coincide numerically.
The reduced connection is ``Ac[..., C, mu] = A^C_mu``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .connection import christoffel_generic
from .geometry import LEVI_CIVITA_3, SingularMetricError
from .kaluza_klein import KKData, KKJets, metric_field, surface_christoffel

__all__ = [
    "AntisymmetryError",
    "Zweibein",
    "Vielbein3",
    "SpinConnection",
    "ReducedConnection",
    "build_zweibein",
    "zweibein_jets",
    "build_vielbein3",
    "vielbein_jets",
    "surface_spin_connection",
    "spin_connection_generic",
    "spin_connection_closed_form",
    "reduce_spin_connection",
    "reduced_closed_form",
    "field_strength_jet",
]


class AntisymmetryError(ValueError):
    """Lowered spin connection is not antisymmetric (inconsistent frames)."""


@dataclass(frozen=True)
class Zweibein:
    e: np.ndarray
    e_inv: np.ndarray


@dataclass(frozen=True)
class Vielbein3:
    E: np.ndarray
    E_inv: np.ndarray


@dataclass(frozen=True)
class SpinConnection:
    components: np.ndarray
    derivative: Optional[np.ndarray] = None

    @property
    def lowered(self) -> np.ndarray:
        # eta_{AC} [A_mu]^C_B with eta = identity
        return self.components


@dataclass(frozen=True)
class ReducedConnection:
    """``components[..., C, mu] = A^C_mu``; ``derivative`` appends ``d_nu``.

    ``omega`` (surface spin connection ``w_alpha``) and ``f`` are filled in
    by the closed-form route only."""

    components: np.ndarray
    derivative: Optional[np.ndarray] = None
    omega: Optional[np.ndarray] = None
    f: Optional[np.ndarray] = None

    def lowered(self) -> np.ndarray:
        """``[A_mu]_{AB} = eps_{ABC} A^C_mu`` as ``[..., mu, A, B]``."""
        return np.einsum("ABC,...Cm->...mAB", LEVI_CIVITA_3, self.components)


# -- scalar jets: (value, gradient, hessian-or-None), derivative index last ---

def _outer(a, b):
    return np.einsum("...k,...l->...kl", a, b)


def _jmul(a, b):
    v = a[0] * b[0]
    g = a[1] * b[0][..., None] + a[0][..., None] * b[1]
    hh = None
    if a[2] is not None and b[2] is not None:
        hh = a[2] * b[0][..., None, None] + _outer(a[1], b[1]) + _outer(b[1], a[1]) + a[0][..., None, None] * b[2]
    return v, g, hh


def _jdiv(a, b):
    q = a[0] / b[0]
    g = (a[1] - q[..., None] * b[1]) / b[0][..., None]
    hh = None
    if a[2] is not None and b[2] is not None:
        hh = (a[2] - _outer(g, b[1]) - _outer(b[1], g) - q[..., None, None] * b[2]) / b[0][..., None, None]
    return q, g, hh


def _jsqrt(a):
    s = np.sqrt(a[0])
    g = a[1] / (2 * s[..., None])
    hh = None
    if a[2] is not None:
        hh = a[2] / (2 * s[..., None, None]) - _outer(a[1], a[1]) / (4 * s[..., None, None] ** 3)
    return s, g, hh


def _jsub(a, b):
    hh = None if a[2] is None or b[2] is None else a[2] - b[2]
    return a[0] - b[0], a[1] - b[1], hh


def _entry(h, dh, d2h, i, j):
    return h[..., i, j], dh[..., i, j, :], None if d2h is None else d2h[..., i, j, :, :]


def zweibein_jets(h, dh=None, d2h=None):
    """Lower-triangular Zweibein with positive diagonal and its partials.

    ``e = [[sqrt(det h / h11), 0], [h01 / sqrt(h11), sqrt(h11)]]`` so that
    ``e^T e = h`` and ``det e = sqrt(det h)``.
    """
    h = np.asarray(h, dtype=float)
    if np.any(h[..., 1, 1] <= 0) or np.any(np.linalg.det(h) <= 0):
        raise SingularMetricError("Zweibein needs a positive definite metric")
    if dh is None:
        dh = np.zeros(h.shape + (2,))
    h00, h01, h11 = _entry(h, dh, d2h, 0, 0), _entry(h, dh, d2h, 0, 1), _entry(h, dh, d2h, 1, 1)
    e11 = _jsqrt(h11)
    e10 = _jdiv(h01, e11)
    e00 = _jsqrt(_jsub(h00, _jmul(e10, e10)))

    lead = h.shape[:-2]
    e = np.zeros(lead + (2, 2))
    de = np.zeros(lead + (2, 2, 2))
    d2e = None if d2h is None else np.zeros(lead + (2, 2, 2, 2))
    for (a, al), jet in {(0, 0): e00, (1, 0): e10, (1, 1): e11}.items():
        e[..., a, al] = jet[0]
        de[..., a, al, :] = jet[1]
        if d2e is not None:
            d2e[..., a, al, :, :] = jet[2]
    e_inv = np.zeros_like(e)
    e_inv[..., 0, 0] = 1.0 / e00[0]
    e_inv[..., 1, 1] = 1.0 / e11[0]
    e_inv[..., 1, 0] = -e10[0] / (e00[0] * e11[0])
    return e, e_inv, de, d2e


def build_zweibein(h) -> Zweibein:
    """Zweibein of a (batch of) 2x2 SPD matrices in the lower-triangular gauge."""
    h = np.asarray(h, dtype=float)
    if h.shape[-2:] != (2, 2):
        raise ValueError("build_zweibein expects 2x2 matrices")
    if not np.allclose(h, np.swapaxes(h, -1, -2), rtol=0, atol=1e-12 * max(1.0, np.max(np.abs(h)))):
        raise SingularMetricError("metric is not symmetric")
    e, e_inv, _, _ = zweibein_jets(h)
    return Zweibein(e, e_inv)


def _vielbein_blocks(j: KKJets, e, e_inv, de, d2e):
    eps = j.epsilon
    rt = np.sqrt(eps)
    lead = e.shape[:-2]
    E = np.zeros(lead + (3, 3))
    E[..., :2, :2] = e
    E[..., 2, :2] = rt * j.phi
    E[..., 2, 2] = rt
    Einv = np.zeros(lead + (3, 3))
    Einv[..., :2, :2] = e_inv
    Einv[..., 2, :2] = -np.einsum("...z,...za->...a", j.phi, e_inv)
    Einv[..., 2, 2] = 1.0 / rt

    dE = np.zeros(lead + (3, 3, 3))
    dE[..., :2, :2, :2] = de
    dE[..., 2, :2, :2] = rt * j.dphi
    d2E = None
    if d2e is not None:
        d2E = np.zeros(lead + (3, 3, 3, 3))
        d2E[..., :2, :2, :2, :2] = d2e
        d2E[..., 2, :2, :2, :2] = rt * j.d2phi
    return E, Einv, dE, d2E


def vielbein_jets(kk: KKData, point, order: int = 1):
    """``E``, its dual, ``dE[..., A, l, k] = d_k E^A_l`` and (``order=2``)
    second partials. Fiber partials vanish."""
    j = kk.jets(point, order)
    e, e_inv, de, d2e = zweibein_jets(j.h, j.dh, j.d2h if order >= 2 else None)
    return _vielbein_blocks(j, e, e_inv, de, d2e)


def build_vielbein3(kk: KKData, point) -> Vielbein3:
    """Frame ``E^a_alpha = e^a_alpha``, ``E^2_alpha = sqrt(eps) phi_alpha``,
    ``E^2_2 = sqrt(eps)``, ``E^a_2 = 0`` and its dual in block form."""
    E, Einv, _, _ = vielbein_jets(kk, point)
    return Vielbein3(E, Einv)


def surface_spin_connection(h, dh, d2h=None):
    """Surface spin connection of the lower-triangular Zweibein.

    Returns ``(omega, domega, omega_matrix)`` with ``omega_matrix[..., a, A, B]``
    equal to ``(w_alpha)^a_b = e_inv^z_b D_alpha e^a_z`` (``alpha`` first),
    ``omega[..., alpha] = (w_alpha)^0_1`` and ``domega[..., alpha, k]`` its
    partials (``None`` without ``d2h``).
    """
    h = np.asarray(h, dtype=float)
    e, e_inv, de, d2e = zweibein_jets(h, dh, d2h)
    jets = KKJets(h, dh, d2h, np.zeros(h.shape[:-1]), np.zeros(h.shape), None, 1.0)
    gam = surface_christoffel(jets, with_derivative=d2h is not None)
    g = gam.components
    # De[..., a, alpha, z] = d_alpha e^a_z - gamma^d_{alpha z} e^a_d
    De = np.einsum("...azk->...akz", de) - np.einsum("...dkz,...ad->...akz", g, e)
    omat = np.einsum("...zb,...akz->...kab", e_inv, De)
    omega = omat[..., 0, 1]
    if d2h is None:
        return omega, None, omat
    dg = gam.derivative
    dDe = (
        np.einsum("...azks->...akzs", d2e)
        - np.einsum("...dkzs,...ad->...akzs", dg, e)
        - np.einsum("...dkz,...ads->...akzs", g, de)
    )
    de_inv = -np.einsum("...zc,...cys,...yb->...zbs", e_inv, de, e_inv, optimize=True)
    domat = np.einsum("...zbs,...akz->...kabs", de_inv, De) + np.einsum("...zb,...akzs->...kabs", e_inv, dDe)
    return omega, domat[..., 0, 1, :], omat


def spin_connection_generic(kk: KKData, point, with_derivative: bool = False) -> SpinConnection:
    """``[A_mu]^A_B = E^A_n Einv^l_B Gamma^n_{mu l} - Einv^l_B d_mu E^A_l`` with
    Christoffel symbols taken from the defining formula of the assembled
    metric."""
    order = 2 if with_derivative else 1
    E, Einv, dE, d2E = vielbein_jets(kk, point, order)
    x = np.asarray(point, dtype=float)
    if x.shape[-1] == 2:
        # fiber coordinate is irrelevant; the 3D metric field wants it present
        x = np.concatenate([x, np.zeros(x.shape[:-1] + (1,))], axis=-1)
    gam = christoffel_generic(metric_field(kk), x, with_derivative=with_derivative)
    G = gam.components
    A = np.einsum("...An,...lB,...nml->...mAB", E, Einv, G, optimize=True) - np.einsum("...lB,...Alm->...mAB", Einv, dE)
    if not with_derivative:
        return SpinConnection(A)
    dEinv = -np.einsum("...mC,...Cnk,...nB->...mBk", Einv, dE, Einv, optimize=True)
    dG = gam.derivative
    dA = (
        np.einsum("...Ank,...lB,...nml->...mABk", dE, Einv, G, optimize=True)
        + np.einsum("...An,...lBk,...nml->...mABk", E, dEinv, G, optimize=True)
        + np.einsum("...An,...lB,...nmlk->...mABk", E, Einv, dG, optimize=True)
        - np.einsum("...lBk,...Alm->...mABk", dEinv, dE)
        - np.einsum("...lB,...Almk->...mABk", Einv, d2E)
    )
    return SpinConnection(A, dA)


def spin_connection_closed_form(kk: KKData, point) -> SpinConnection:
    """Spin connection from the block closed forms (base/base, base/fiber,
    fiber-direction, and vanishing families)."""
    j = kk.jets(point)
    eps = kk.epsilon
    e, e_inv, de, _ = zweibein_jets(j.h, j.dh)
    h_inv = j.h_inv
    f = j.f_lower
    gamma = surface_christoffel(j).components
    De = np.einsum("...azk->...akz", de) - np.einsum("...dkz,...ad->...akz", gamma, e)
    # e^a_d h^{d r}
    eh = np.einsum("...ad,...dr->...ar", e, h_inv)

    A = np.zeros(j.h.shape[:-2] + (3, 3, 3))
    A[..., :2, :2, :2] = np.einsum("...zb,...akz->...kab", e_inv, -De) - 0.5 * eps * np.einsum(
        "...zb,...ar,...k,...rz->...kab", e_inv, eh, j.phi, f
    )
    mixed = 0.5 * np.sqrt(eps) * np.einsum("...az,...kz->...ka", eh, f)
    A[..., :2, :2, 2] = mixed
    A[..., :2, 2, :2] = -mixed
    A[..., 2, :2, :2] = 0.5 * eps * np.einsum("...zb,...ar,...zr->...ab", e_inv, eh, f, optimize=True)
    return SpinConnection(A)


def reduce_spin_connection(A: SpinConnection, atol: float = 1e-6) -> ReducedConnection:
    """``A^C_mu = 1/2 eps^{ABC} eta_{AD} [A_mu]^D_B``.

    Raises :class:`AntisymmetryError` when the lowered connection deviates
    from antisymmetry by more than ``atol`` (relative to its size)."""
    low = A.lowered
    scale = max(1.0, float(np.max(np.abs(low)))) if low.size else 1.0
    asym = np.max(np.abs(low + np.swapaxes(low, -1, -2))) if low.size else 0.0
    if asym > atol * scale:
        raise AntisymmetryError(f"spin connection not antisymmetric (max |A+A^T| = {asym:.3g})")
    red = 0.5 * np.einsum("ABC,...mAB->...Cm", LEVI_CIVITA_3, low)
    dred = None
    if A.derivative is not None:
        dred = 0.5 * np.einsum("ABC,...mABk->...Cmk", LEVI_CIVITA_3, A.derivative)
    return ReducedConnection(red, dred)


def field_strength_jet(j: KKJets):
    """Invariant field strength ``f = f_01 / sqrt(det h)`` and its first partials."""
    f01 = j.dphi[..., 1, 0] - j.dphi[..., 0, 1]
    lead = f01.shape
    df01 = np.zeros(lead + (2,)) if j.d2phi is None else j.d2phi[..., 1, 0, :] - j.d2phi[..., 0, 1, :]
    h00, h01, h11 = (_entry(j.h, j.dh, None, a, b) for a, b in ((0, 0), (0, 1), (1, 1)))
    det = _jsub(_jmul(h00, h11), _jmul(h01, h01))
    return _jdiv((f01, df01, None), _jsqrt(det))


def reduced_closed_form(kk: KKData, point, with_derivative: bool = False) -> ReducedConnection:
    """``A^2_alpha = -w_alpha - eps/2 f phi_alpha``, ``A^2_2 = -eps/2 f``,
    ``A^a_alpha = sqrt(eps)/2 e^a_alpha f``, ``A^a_2 = 0``."""
    j = kk.jets(point, order=2 if with_derivative else 1)
    return _reduced_from_jets(j, with_derivative)[0]


def _reduced_from_jets(j: KKJets, with_derivative: bool):
    """Closed-form reduced connection plus the jets ``(omega, domega, f, df)``
    it was built from."""
    eps = j.epsilon
    rt = np.sqrt(eps)
    e, _, de, _ = zweibein_jets(j.h, j.dh)
    omega, domega, _ = surface_spin_connection(j.h, j.dh, j.d2h if with_derivative else None)
    f, df, _ = field_strength_jet(j)
    extras = (omega, domega, f, df)

    Ac = np.zeros(j.h.shape[:-2] + (3, 3))
    Ac[..., 2, :2] = -omega - 0.5 * eps * f[..., None] * j.phi
    Ac[..., 2, 2] = -0.5 * eps * f
    Ac[..., :2, :2] = 0.5 * rt * e * f[..., None, None]
    if not with_derivative:
        return ReducedConnection(Ac, omega=omega, f=f), extras

    dAc = np.zeros(Ac.shape + (3,))
    dAc[..., 2, :2, :2] = -domega - 0.5 * eps * (
        np.einsum("...k,...a->...ak", df, j.phi) + f[..., None, None] * j.dphi
    )
    dAc[..., 2, 2, :2] = -0.5 * eps * df
    dAc[..., :2, :2, :2] = 0.5 * rt * (de * f[..., None, None, None] + np.einsum("...aq,...k->...aqk", e, df))
    return ReducedConnection(Ac, dAc, omega=omega, f=f), extras
