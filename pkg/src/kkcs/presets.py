"""Ready-made Kaluza-Klein data: the Hopf fibration, lens-space quotients,
seeded random data on a flat torus chart and the flat product."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .chern_simons import QuadratureSpec
from .geometry import ChartDomain, Field
from .kaluza_klein import KKData

__all__ = ["PRESETS", "PresetSpec", "TrigSeries", "random_trig_series", "build_preset", "torus_modes"]

PRESETS = ("hopf", "lens", "torus-random", "product-flat")


@dataclass(frozen=True)
class PresetSpec:
    name: str
    radius: float = 0.5
    lens_order: int = 1
    seed: int = 0
    grid: Optional[tuple[int, int]] = None
    epsilon: float = 1.0
    eps_grid: tuple[float, ...] = ()
    fiber_volume: Optional[float] = None
    amplitude: float = 0.2

    def __post_init__(self):
        if self.name not in PRESETS:
            raise ValueError(f"unknown preset {self.name!r}; expected one of {', '.join(PRESETS)}")
        if not self.radius > 0:
            raise ValueError("radius must be positive")
        if int(self.lens_order) != self.lens_order or self.lens_order < 1:
            raise ValueError("lens order must be an integer >= 1")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if any(not e > 0 for e in self.eps_grid):
            raise ValueError("epsilon grid must be strictly positive")
        if self.grid is not None and (len(self.grid) != 2 or min(self.grid) < 4):
            raise ValueError("grid needs two counts, each >= 4")
        if self.fiber_volume is not None and not self.fiber_volume > 0:
            raise ValueError("fiber volume must be positive")
        if not 0 <= self.amplitude <= 0.2:
            raise ValueError("perturbation amplitude must lie in [0, 0.2]")
        object.__setattr__(self, "eps_grid", tuple(float(e) for e in self.eps_grid))
        if self.grid is not None:
            object.__setattr__(self, "grid", tuple(int(n) for n in self.grid))


def torus_modes(kmax: int = 2) -> np.ndarray:
    """Integer wave vectors with ``0 < |k|_inf <= kmax`` up to sign."""
    ks = [
        (i, j)
        for i in range(0, kmax + 1)
        for j in range(-kmax, kmax + 1)
        if (i, j) != (0, 0) and (i > 0 or j > 0)
    ]
    return np.array(ks, dtype=float)


@dataclass(frozen=True)
class TrigSeries:
    """Vector of trigonometric polynomials on the torus,
    ``const_c + sum_m a_mc cos(k_m . x) + b_mc sin(k_m . x)``, with exact
    partials. All components share the wave vectors ``k``."""

    k: np.ndarray
    a: np.ndarray
    b: np.ndarray
    const: np.ndarray

    def _trig(self, x):
        t = np.einsum("...i,mi->...m", np.asarray(x, dtype=float), self.k)
        return np.cos(t), np.sin(t)

    def value(self, x):
        c, s = self._trig(x)
        return self.const + c @ self.a + s @ self.b

    def grad(self, x):
        c, s = self._trig(x)
        # [..., m, comp] -> [..., comp, i]
        return np.einsum("...mc,mi->...ci", -s[..., None] * self.a + c[..., None] * self.b, self.k)

    def hess(self, x):
        c, s = self._trig(x)
        coef = -(c[..., None] * self.a + s[..., None] * self.b)
        return np.einsum("...mc,mi,mj->...cij", coef, self.k, self.k, optimize=True)

    def sup_bound(self) -> np.ndarray:
        """Per-component bound on the deviation from the constant term."""
        return np.sum(np.abs(self.a), axis=0) + np.sum(np.abs(self.b), axis=0)


def random_trig_series(rng: np.random.Generator, k: np.ndarray, amplitudes, const) -> TrigSeries:
    """Seeded series whose non-constant part of component ``c`` is bounded in
    sup norm by ``amplitudes[c]``."""
    amplitudes = np.asarray(amplitudes, dtype=float)
    a = rng.standard_normal((len(k), len(amplitudes)))
    b = rng.standard_normal((len(k), len(amplitudes)))
    norm = np.sum(np.abs(a), axis=0) + np.sum(np.abs(b), axis=0)
    scale = amplitudes / norm
    return TrigSeries(k, a * scale, b * scale, np.asarray(const, dtype=float))


_TRIANGLE = np.array([[0, 1], [1, 2]])


def _sym_from_triangle(v: np.ndarray, n: int) -> np.ndarray:
    """``[..., 3, *deriv]`` holding (00, 01, 11) to ``[..., 2, 2, *deriv]``."""
    return np.take(v, _TRIANGLE, axis=v.ndim - 1 - n)


def _hopf_fields(radius: float) -> tuple[Field, Field]:
    r2 = radius**2

    def h(x):
        s = np.sin(x[..., 0])
        out = np.zeros(x.shape[:-1] + (2, 2))
        out[..., 0, 0] = r2
        out[..., 1, 1] = r2 * s**2
        return out

    def dh(x):
        out = np.zeros(x.shape[:-1] + (2, 2, 2))
        out[..., 1, 1, 0] = r2 * np.sin(2 * x[..., 0])
        return out

    def d2h(x):
        out = np.zeros(x.shape[:-1] + (2, 2, 2, 2))
        out[..., 1, 1, 0, 0] = 2 * r2 * np.cos(2 * x[..., 0])
        return out

    # phi = -R^2 cos(x0) dx1, so that d phi is the area form and f = 1
    def phi(x):
        out = np.zeros(x.shape[:-1] + (2,))
        out[..., 1] = -r2 * np.cos(x[..., 0])
        return out

    def dphi(x):
        out = np.zeros(x.shape[:-1] + (2, 2))
        out[..., 1, 0] = r2 * np.sin(x[..., 0])
        return out

    def d2phi(x):
        out = np.zeros(x.shape[:-1] + (2, 2, 2))
        out[..., 1, 0, 0] = r2 * np.cos(x[..., 0])
        return out

    dom = ChartDomain(((0.0, np.pi), (0.0, 2 * np.pi)), (False, True))
    return (
        Field(h, 2, "sym-matrix", grad=dh, hess=d2h, domain=dom, name="h_round"),
        Field(phi, 2, "one-form", grad=dphi, hess=d2phi, domain=dom, name="phi_hopf"),
    )


def _torus_fields(seed: int, amplitude: float) -> tuple[Field, Field]:
    rng = np.random.default_rng(seed)
    k = torus_modes(2)
    # each perturbation entry is bounded by amplitude <= 0.2, so the
    # eigenvalues of h stay >= 1 - 2 * 0.2 > 0
    hs = random_trig_series(rng, k, [amplitude] * 3, [1.0, 0.0, 1.0])
    ps = random_trig_series(rng, k, [1.0, 1.0], [0.0, 0.0])
    h = Field(
        lambda x: _sym_from_triangle(hs.value(x), 0),
        2,
        "sym-matrix",
        grad=lambda x: _sym_from_triangle(hs.grad(x), 1),
        hess=lambda x: _sym_from_triangle(hs.hess(x), 2),
        name=f"h_torus[{seed}]",
    )
    phi = Field(ps.value, 2, "one-form", grad=ps.grad, hess=ps.hess, name=f"phi_torus[{seed}]")
    return h, phi


def _flat_fields() -> tuple[Field, Field]:
    return (
        Field(
            lambda x: np.broadcast_to(np.eye(2), x.shape[:-1] + (2, 2)).copy(),
            2,
            "sym-matrix",
            grad=lambda x: np.zeros(x.shape[:-1] + (2, 2, 2)),
            hess=lambda x: np.zeros(x.shape[:-1] + (2, 2, 2, 2)),
            name="h_flat",
        ),
        Field(
            lambda x: np.zeros(x.shape[:-1] + (2,)),
            2,
            "one-form",
            grad=lambda x: np.zeros(x.shape[:-1] + (2, 2)),
            hess=lambda x: np.zeros(x.shape[:-1] + (2, 2, 2)),
            name="phi_zero",
        ),
    )


TORUS = ChartDomain(((0.0, 2 * np.pi), (0.0, 2 * np.pi)), (True, True))
SPHERE = ChartDomain(((0.0, np.pi), (0.0, 2 * np.pi)), (False, True))


def build_preset(spec: PresetSpec) -> tuple[KKData, ChartDomain, QuadratureSpec]:
    """Analytic base data, chart and default quadrature for a preset.

    ``lens`` has the local fields of ``hopf`` and fiber length ``2 pi / p``.
    """
    if spec.name in ("hopf", "lens"):
        h, phi = _hopf_fields(spec.radius)
        domain = SPHERE
        vol = 2 * np.pi / (spec.lens_order if spec.name == "lens" else 1)
    elif spec.name == "torus-random":
        h, phi = _torus_fields(spec.seed, spec.amplitude)
        domain, vol = TORUS, 2 * np.pi
    else:
        h, phi = _flat_fields()
        domain, vol = TORUS, 2 * np.pi
    if spec.fiber_volume is not None:
        vol = spec.fiber_volume
    kk = KKData(h, phi, spec.epsilon, vol)
    quad = QuadratureSpec.default(domain, spec.grid if spec.grid is not None else 64)
    return kk, domain, quad
