"""Chern-Simons densities, chart quadrature and the two evaluation routes.

Sign conventions
----------------
The direct route integrates the local density of the spin connection over
the chart and multiplies by ``-fiber_volume`` (the orientation of the base is
reversed so that, for data with ``f > 0``, the quadratic term comes out
positive). The reduced route evaluates

    CS = (eps/2) int r w + (eps^2/2) int f^2 w,      w = sqrt(h) f dx0 dx1,

scaled by ``fiber_volume / 2 pi``. The two do **not** agree in general: the
density actually produced by the spin connection integrates to

    CS_direct = -(eps/2) int r w + (eps^2/2) int f^2 w + stokes_term,

because ``d_0 w_1 - d_1 w_0 = -sqrt(h) r / 2`` for the surface connection
``w`` of a positively oriented Zweibein, and because the exact term
``d_1(w_0 f) - d_0(w_1 f)`` only drops out when the Zweibein is regular on
the whole chart (it is not at the poles of the sphere chart). ``CSResult``
carries both values together with ``stokes_term`` so the relation can be
checked.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional, Sequence

import numpy as np

from .connection import scalar_curvature_from_jets
from .frames import (
    ReducedConnection,
    SpinConnection,
    _reduced_from_jets,
    reduce_spin_connection,
    reduced_closed_form,
    spin_connection_generic,
)
from .geometry import LEVI_CIVITA_3, ChartDomain, Field
from .kaluza_klein import KKData

__all__ = [
    "QuadratureError",
    "QuadratureSpec",
    "QuadratureResult",
    "CSResult",
    "Fit",
    "SweepResult",
    "integrate_chart",
    "cs_density_reduced",
    "cs_density_trace",
    "cs_integrand_reduced",
    "cs_integrand_trace",
    "stokes_density",
    "cs_direct",
    "cs_reduced",
    "fit_linear_quadratic",
    "adiabatic_sweep",
    "framing_correction",
]

RULES = ("trapezoid", "gauss-legendre")


class QuadratureError(ValueError):
    pass


@dataclass(frozen=True)
class QuadratureSpec:
    """Per-axis rule and point count; ``refine`` multiplies the counts for the
    error estimate."""

    rules: tuple[str, ...]
    points: tuple[int, ...]
    refine: int = 2

    def __post_init__(self):
        object.__setattr__(self, "rules", tuple(self.rules))
        object.__setattr__(self, "points", tuple(int(n) for n in self.points))
        if len(self.rules) != len(self.points):
            raise ValueError("one rule per axis")
        for r in self.rules:
            if r not in RULES:
                raise ValueError(f"unknown quadrature rule {r!r}")
        if any(n < 4 for n in self.points):
            raise ValueError("at least 4 points per axis")
        if self.refine < 2:
            raise ValueError("refine factor must be >= 2")

    @classmethod
    def default(cls, domain: ChartDomain, points: int | Sequence[int] = 64) -> "QuadratureSpec":
        pts = (points,) * domain.dim if np.isscalar(points) else tuple(points)
        rules = tuple("trapezoid" if p else "gauss-legendre" for p in domain.periodic)
        return cls(rules, pts)

    def refined(self) -> "QuadratureSpec":
        return QuadratureSpec(self.rules, tuple(n * self.refine for n in self.points), self.refine)


class QuadratureResult(NamedTuple):
    value: float
    error: float


def _axis_rule(rule: str, n: int, lo: float, hi: float):
    if rule == "trapezoid":
        return lo + (hi - lo) * np.arange(n) / n, np.full(n, (hi - lo) / n)
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (hi - lo) * x + 0.5 * (hi + lo), 0.5 * (hi - lo) * w


def _tensor_quadrature(func, domain: ChartDomain, spec: QuadratureSpec):
    nodes, weights = zip(
        *(_axis_rule(r, n, lo, hi) for r, n, (lo, hi) in zip(spec.rules, spec.points, domain.bounds))
    )
    pts = np.stack(np.meshgrid(*nodes, indexing="ij"), axis=-1)
    vals = np.asarray(func(pts), dtype=float)
    if vals.shape[: pts.ndim - 1] != pts.shape[:-1]:
        raise QuadratureError(f"integrand returned shape {vals.shape}, expected {pts.shape[:-1]} + values")
    if not np.all(np.isfinite(vals)):
        raise QuadratureError("non-finite integrand sample")
    w = weights[0]
    for wi in weights[1:]:
        w = np.multiply.outer(w, wi)
    n = w.ndim
    return np.tensordot(w, vals, axes=n), np.tensordot(w, np.abs(vals), axes=n)


def integrate_chart(func: Callable | Field, domain: ChartDomain, spec: QuadratureSpec) -> QuadratureResult:
    """Tensor-product quadrature of a function of chart points.

    ``func`` maps ``[..., dim]`` points to scalars, or to ``[..., m]`` for
    ``m`` integrands sharing one evaluation (values and errors then come back
    as arrays). The error estimate is ``|Q(spec) - Q(spec.refined())|``,
    floored at the rounding level ``8 * machine_eps * sum|w f|``.
    """
    if len(spec.rules) != domain.dim:
        raise QuadratureError("quadrature spec and domain disagree on dimension")
    for axis, (rule, per) in enumerate(zip(spec.rules, domain.periodic)):
        if rule == "trapezoid" and not per:
            raise QuadratureError(f"trapezoid rule on non-periodic axis {axis}")
    coarse, _ = _tensor_quadrature(func, domain, spec)
    fine, mag = _tensor_quadrature(func, domain, spec.refined())
    err = np.maximum(np.abs(coarse - fine), 8 * np.finfo(float).eps * mag)
    if coarse.ndim == 0:
        return QuadratureResult(float(coarse), float(err))
    return QuadratureResult(coarse, err)


# -- densities ---------------------------------------------------------------

def cs_density_reduced(conn: ReducedConnection, split: bool = False):
    """``-1/(2 pi) eps^{mnl} A^A_m d_n A^A_l + 1/pi det(A^C_m)``."""
    if conn.derivative is None:
        raise ValueError("reduced connection carries no derivative")
    a, da = conn.components, conn.derivative
    cs_term = -np.einsum("mnl,...Am,...Aln->...", LEVI_CIVITA_3, a, da, optimize=True) / (2 * np.pi)
    det_term = np.linalg.det(a) / np.pi
    if split:
        return cs_term, det_term
    return cs_term + det_term


def cs_density_trace(conn: SpinConnection) -> np.ndarray:
    """``1/(4 pi) eps^{mnl} Tr(A_m d_n A_l + 2/3 A_m A_n A_l)``."""
    if conn.derivative is None:
        raise ValueError("spin connection carries no derivative")
    a, da = conn.components, conn.derivative
    quad = np.einsum("mnl,...mAB,...lBAn->...", LEVI_CIVITA_3, a, da, optimize=True)
    cubic = np.einsum("mnl,...mAB,...nBC,...lCA->...", LEVI_CIVITA_3, a, a, a, optimize=True)
    return (quad + 2.0 / 3.0 * cubic) / (4 * np.pi)


def _fd_connection(field: Callable, point, step: float) -> np.ndarray:
    """Fourth-order central differences of ``field(point).components``; the
    fiber partial is zero."""
    x = np.asarray(point, dtype=float)
    cols = []
    for k in range(2):
        s = np.zeros(x.shape[-1])
        s[k] = step
        c = [field(x + m * s).components for m in (2, 1, -1, -2)]
        cols.append((-c[0] + 8 * c[1] - 8 * c[2] + c[3]) / (12 * step))
    cols.append(np.zeros_like(cols[0]))
    return np.stack(cols, axis=-1)


def cs_integrand_reduced(field: Callable, point, fd_step: float = 1e-3):
    """Local density of a reduced-connection field at ``point``. Fields that
    do not return derivatives are differentiated numerically."""
    conn = field(point)
    if conn.derivative is None:
        conn = ReducedConnection(conn.components, _fd_connection(field, point, fd_step))
    return cs_density_reduced(conn)


def cs_integrand_trace(field: Callable, point, fd_step: float = 1e-3):
    """Local trace-form density of a spin-connection field at ``point``."""
    conn = field(point)
    if conn.derivative is None:
        conn = SpinConnection(conn.components, _fd_connection(field, point, fd_step))
    return cs_density_trace(conn)


def _stokes_from_jets(omega, domega, f, df):
    d1 = domega[..., 0, 1] * f + omega[..., 0] * df[..., 1]
    d0 = domega[..., 1, 0] * f + omega[..., 1] * df[..., 0]
    return d1 - d0


def stokes_density(kk: KKData, point) -> np.ndarray:
    """The exact term ``d_1(w_0 f) - d_0(w_1 f)`` of the linear-in-eps density."""
    _, extras = _reduced_from_jets(kk.jets(point, order=2), True)
    return _stokes_from_jets(*extras)


def _base_integrands(kk: KKData, x, route: str):
    """``[r f01, f01^3 / det h, exact term, direct density]`` from one
    evaluation of the base jets."""
    j = kk.jets(x, order=2)
    conn, extras = _reduced_from_jets(j, True)
    r = scalar_curvature_from_jets(j.h, j.dh, j.d2h)
    f01 = j.dphi[..., 1, 0] - j.dphi[..., 0, 1]
    if route == "closed":
        dens = cs_density_reduced(conn)
    else:
        dens = _ROUTES[route](kk, x)
    return np.stack([r * f01, f01**3 / np.linalg.det(j.h), _stokes_from_jets(*extras), dens], axis=-1)


_ROUTES = {
    "closed": lambda kk, x: cs_density_reduced(reduced_closed_form(kk, x, with_derivative=True)),
    "generic": lambda kk, x: cs_density_reduced(
        # near coordinate singularities the generic route loses digits to
        # cancellation between O(1/sin^2) Christoffel terms
        reduce_spin_connection(spin_connection_generic(kk, x, with_derivative=True), atol=1e-4)
    ),
    "trace": lambda kk, x: cs_density_trace(spin_connection_generic(kk, x, with_derivative=True)),
}


def _require_base(domain: ChartDomain) -> None:
    if domain.dim != 2:
        raise QuadratureError("Chern-Simons integrals take the 2D base chart; the fiber is a volume factor")


def _check_route(route: str) -> None:
    if route not in _ROUTES:
        raise ValueError(f"unknown route {route!r}; expected one of {sorted(_ROUTES)}")


def cs_direct_quadrature(kk: KKData, domain: ChartDomain, spec: QuadratureSpec, route: str = "closed"):
    _require_base(domain)
    _check_route(route)
    density = _ROUTES[route]
    q = integrate_chart(lambda x: density(kk, x), domain, spec)
    scale = -kk.fiber_volume
    return QuadratureResult(scale * q.value, abs(scale) * q.error)


def cs_direct(kk: KKData, domain: ChartDomain, spec: QuadratureSpec, route: str = "closed") -> float:
    """Chern-Simons value from the 3D density: ``-fiber_volume * int density``.

    ``route`` picks the density: ``"closed"`` (closed-form reduced
    connection), ``"generic"`` (reduced generic spin connection) or
    ``"trace"`` (matrix trace form of the generic spin connection).
    """
    return cs_direct_quadrature(kk, domain, spec, route).value


@dataclass(frozen=True)
class CSResult:
    epsilon: float
    cs_direct: float
    cs_reduced: float
    term_linear: float
    term_quadratic: float
    quadrature_error_estimate: float
    fiber_volume: float
    direct_error: float = 0.0
    reduced_error: float = 0.0
    stokes_term: float = 0.0

    def corrected_reduced(self) -> float:
        """Reduced value with the linear sign as produced by the density, plus
        the Stokes contribution; this is what ``cs_direct`` should equal."""
        return -self.epsilon * self.term_linear + self.epsilon**2 * self.term_quadratic + self.stokes_term


@dataclass(frozen=True)
class _ReducedIntegrals:
    linear: QuadratureResult  # int r f sqrt(h)
    quadratic: QuadratureResult  # int f^3 sqrt(h)
    stokes: QuadratureResult  # int d_1(w_0 f) - d_0(w_1 f)


def _reduced_integrals(kk: KKData, domain: ChartDomain, spec: QuadratureSpec, route: Optional[str] = None):
    """Base integrals of the reduced formula; with ``route`` the direct
    density is integrated in the same pass."""
    _require_base(domain)
    if route is not None:
        _check_route(route)
        q = integrate_chart(lambda x: _base_integrands(kk, x, route), domain, spec)
    else:
        q = integrate_chart(lambda x: _base_integrands(kk, x, "closed")[..., :3], domain, spec)
    parts = [QuadratureResult(float(v), float(e)) for v, e in zip(q.value, q.error)]
    ints = _ReducedIntegrals(*parts[:3])
    if route is None:
        return ints, None
    scale = -kk.fiber_volume
    return ints, QuadratureResult(scale * parts[3].value, abs(scale) * parts[3].error)


def _assemble(kk: KKData, ints: _ReducedIntegrals, direct: QuadratureResult) -> CSResult:
    eps, vol = kk.epsilon, kk.fiber_volume
    scale = vol / (2 * np.pi)
    tl = scale * 0.5 * ints.linear.value
    tq = scale * 0.5 * ints.quadratic.value
    red_err = scale * 0.5 * (eps * ints.linear.error + eps**2 * ints.quadratic.error)
    stokes = vol * eps / (4 * np.pi) * ints.stokes.value
    return CSResult(
        epsilon=eps,
        cs_direct=direct.value,
        cs_reduced=eps * tl + eps**2 * tq,
        term_linear=tl,
        term_quadratic=tq,
        quadrature_error_estimate=direct.error + red_err,
        fiber_volume=vol,
        direct_error=direct.error,
        reduced_error=red_err,
        stokes_term=stokes,
    )


def cs_reduced(kk: KKData, domain: ChartDomain, spec: QuadratureSpec, route: str = "closed") -> CSResult:
    """Reduced two-dimensional formula, returned together with the direct
    value so the routes can be compared."""
    ints, direct = _reduced_integrals(kk, domain, spec, route)
    return _assemble(kk, ints, direct)


@dataclass(frozen=True)
class Fit:
    a: float
    b: float
    residual: float


def fit_linear_quadratic(eps, values) -> Fit:
    """Least-squares ``values ~ a eps + b eps^2`` through the origin; the
    residual is relative to ``|values|``."""
    eps = np.asarray(eps, dtype=float)
    y = np.asarray(values, dtype=float)
    if len(np.unique(eps)) < 3:
        raise ValueError("need at least 3 distinct epsilon values for the fit")
    design = np.stack([eps, eps**2], axis=1)
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    norm = np.linalg.norm(y)
    res = np.linalg.norm(design @ coef - y) / norm if norm > 0 else float(np.linalg.norm(design @ coef - y))
    return Fit(float(coef[0]), float(coef[1]), float(res))


@dataclass(frozen=True)
class SweepResult:
    results: list[CSResult]
    fit: Fit
    fit_direct: Fit
    limit: dict = field(default_factory=dict)


def adiabatic_sweep(kk: KKData, eps_grid: Sequence[float], domain: ChartDomain, spec: QuadratureSpec,
                    route: str = "closed") -> SweepResult:
    """Evaluate both routes on an epsilon grid and fit ``a eps + b eps^2``.

    ``fit`` is the fit of the reduced values, ``fit_direct`` of the direct
    ones; ``limit`` reports the values at the smallest epsilon and whether
    ``|CS|`` decreases monotonically towards it.
    """
    grid = [float(e) for e in eps_grid]
    if any(not e > 0 for e in grid):
        raise ValueError("epsilon grid must be strictly positive")
    if len(set(grid)) < 3:
        raise ValueError("need at least 3 distinct epsilon values")
    ints, _ = _reduced_integrals(kk, domain, spec)
    results = []
    for e in grid:
        k = kk.with_epsilon(e)
        results.append(_assemble(k, ints, cs_direct_quadrature(k, domain, spec, route)))
    eps = np.array(grid)
    order = np.argsort(eps)
    red = np.array([r.cs_reduced for r in results])[order]
    dire = np.array([r.cs_direct for r in results])[order]
    limit = {
        "epsilon_min": float(eps[order[0]]),
        "cs_reduced": float(red[0]),
        "cs_direct": float(dire[0]),
        "monotone_reduced": bool(np.all(np.diff(np.abs(red)) >= 0)),
        "monotone_direct": bool(np.all(np.diff(np.abs(dire)) >= 0)),
    }
    return SweepResult(
        results=results,
        fit=fit_linear_quadratic(eps, [r.cs_reduced for r in results]),
        fit_direct=fit_linear_quadratic(eps, [r.cs_direct for r in results]),
        limit=limit,
    )


def framing_correction(cs_value: float) -> float:
    """The ``CS / (24 pi)`` summand of the framing-corrected eta combination."""
    return cs_value / (24 * np.pi)
