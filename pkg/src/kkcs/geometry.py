"""Charts, evaluatable fields and the small amount of linear algebra the rest
of the package needs.

Array conventions used everywhere in :mod:`kkcs`:

* points carry a leading batch shape, ``point[..., i]`` is coordinate ``x^i``;
* derivative indices go *last* (comma notation), so for a metric field
  ``grad[..., a, b, k]`` is ``d_k h_ab`` and ``hess[..., a, b, k, l]`` is
  ``d_k d_l h_ab``.

Axis 2 of a three-dimensional chart is the fiber coordinate; every field
built from two-dimensional data is independent of it.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations
from typing import Callable, Optional, Sequence

import numpy as np

__all__ = [
    "ChartDomain",
    "Field",
    "DerivativeError",
    "SingularMetricError",
    "partial_derivative",
    "invert_symmetric",
    "levi_civita_symbol",
    "LEVI_CIVITA_2",
    "LEVI_CIVITA_3",
]

FIELD_KINDS = ("scalar", "one-form", "sym-matrix")


class DerivativeError(ValueError):
    """A derivative could not be formed (boundary too close, non-finite data)."""


class SingularMetricError(ValueError):
    """A metric is singular or not positive definite."""


@dataclass(frozen=True)
class ChartDomain:
    """Rectangular coordinate box, optionally periodic along each axis."""

    bounds: tuple[tuple[float, float], ...]
    periodic: tuple[bool, ...]

    def __post_init__(self):
        bounds = tuple((float(lo), float(hi)) for lo, hi in self.bounds)
        periodic = tuple(bool(p) for p in self.periodic)
        if len(bounds) not in (2, 3):
            raise ValueError(f"chart dimension must be 2 or 3, got {len(bounds)}")
        if len(periodic) != len(bounds):
            raise ValueError("periodic flags must match the number of axes")
        for lo, hi in bounds:
            if not (np.isfinite(lo) and np.isfinite(hi)) or hi - lo <= 0.0:
                raise ValueError(f"degenerate chart axis [{lo}, {hi}]")
        object.__setattr__(self, "bounds", bounds)
        object.__setattr__(self, "periodic", periodic)

    @property
    def dim(self) -> int:
        return len(self.bounds)

    def length(self, axis: int) -> float:
        lo, hi = self.bounds[axis]
        return hi - lo

    def lengths(self) -> np.ndarray:
        return np.array([hi - lo for lo, hi in self.bounds])

    def volume(self) -> float:
        return float(np.prod(self.lengths()))

    def sample(self, rng: np.random.Generator, n: int, margin: float = 0.05) -> np.ndarray:
        """Uniform random interior points, kept ``margin`` (relative) away from
        non-periodic boundaries."""
        pts = np.empty((n, self.dim))
        for i, ((lo, hi), per) in enumerate(zip(self.bounds, self.periodic)):
            pad = 0.0 if per else margin * (hi - lo)
            pts[:, i] = rng.uniform(lo + pad, hi - pad, size=n)
        return pts


@dataclass(frozen=True)
class Field:
    """A smooth map from chart points to scalar, one-form or symmetric-matrix
    components.

    ``func`` must be vectorised over leading batch axes. ``grad`` and ``hess``
    are the caller's exact partials; when absent the field is differentiated
    by fourth-order central differences.
    """

    func: Callable[[np.ndarray], np.ndarray]
    dim: int
    kind: str = "scalar"
    grad: Optional[Callable[[np.ndarray], np.ndarray]] = None
    hess: Optional[Callable[[np.ndarray], np.ndarray]] = None
    domain: Optional[ChartDomain] = None
    fd_step: Optional[float] = None
    name: str = field(default="", compare=False)

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise ValueError("field dimension must be 2 or 3")
        if self.kind not in FIELD_KINDS:
            raise ValueError(f"unknown field kind {self.kind!r}")
        if self.domain is not None and self.domain.dim < self.dim:
            raise ValueError("domain has fewer axes than the field")

    @property
    def analytic(self) -> bool:
        return self.grad is not None

    @property
    def value_shape(self) -> tuple[int, ...]:
        return {"scalar": (), "one-form": (self.dim,), "sym-matrix": (self.dim, self.dim)}[self.kind]

    def __call__(self, point) -> np.ndarray:
        x = np.asarray(point, dtype=float)
        val = np.asarray(self.func(x[..., : self.dim]), dtype=float)
        if not np.all(np.isfinite(val)):
            raise DerivativeError(f"non-finite value of field {self.name or '<anon>'}")
        return val

    def step(self, axis: int) -> float:
        if self.fd_step is not None:
            return self.fd_step
        if self.domain is not None:
            return 1e-4 * self.domain.length(axis)
        return 1e-4

    def gradient(self, point) -> np.ndarray:
        """All first partials, derivative index last."""
        x = np.asarray(point, dtype=float)
        if self.grad is not None:
            return np.asarray(self.grad(x[..., : self.dim]), dtype=float)
        return np.stack([_central_difference(self, k, x, self.step(k)) for k in range(self.dim)], axis=-1)

    def hessian(self, point) -> np.ndarray:
        """All second partials, the two derivative indices last."""
        x = np.asarray(point, dtype=float)
        if self.hess is not None:
            return np.asarray(self.hess(x[..., : self.dim]), dtype=float)
        # nested differentiation of the gradient
        inner = Field(self.gradient, self.dim, "scalar", domain=self.domain, fd_step=self.fd_step)
        cols = [_central_difference(inner, k, x, self.step(k)) for k in range(self.dim)]
        return np.stack(cols, axis=-1)


def _check_stencil(field: Field, axis: int, x: np.ndarray, step: float) -> None:
    dom = field.domain
    if dom is None or dom.periodic[axis]:
        return
    lo, hi = dom.bounds[axis]
    xi = x[..., axis]
    if np.any(xi - 2 * step < lo) or np.any(xi + 2 * step > hi):
        raise DerivativeError(
            f"point too close to the non-periodic boundary of axis {axis} for a step of {step:g}"
        )


def _central_difference(field: Field, axis: int, x: np.ndarray, step: float) -> np.ndarray:
    _check_stencil(field, axis, x, step)
    shift = np.zeros(x.shape[-1])
    shift[axis] = step
    f = field
    return (-f(x + 2 * shift) + 8 * f(x + shift) - 8 * f(x - shift) + f(x - 2 * shift)) / (12 * step)


def partial_derivative(field: Field, axis: int, point, mode: str = "auto", step: float | None = None):
    """Partial derivative of every component of ``field`` along ``axis``.

    ``mode`` is ``"analytic"`` (caller-supplied partials), ``"fd"``
    (fourth-order central differences) or ``"auto"`` (analytic when
    available). Axes beyond the field's own dimension are fiber directions
    and give zero.
    """
    x = np.asarray(point, dtype=float)
    if axis < 0 or axis >= max(field.dim, x.shape[-1]):
        raise IndexError(f"axis {axis} out of range")
    if axis >= field.dim:
        return np.zeros(x.shape[:-1] + field.value_shape)
    if mode == "auto":
        mode = "analytic" if field.analytic else "fd"
    if mode == "analytic":
        if field.grad is None:
            raise DerivativeError("field has no analytic partials")
        return field.gradient(x)[..., axis]
    if mode == "fd":
        return _central_difference(field, axis, x, step if step is not None else field.step(axis))
    raise ValueError(f"unknown derivative mode {mode!r}")


def invert_symmetric(matrix, rtol: float = 1e-14) -> np.ndarray:
    """Inverse of a (batch of) symmetric 2x2 or 3x3 matrices.

    Raises :class:`SingularMetricError` when ``|det|`` falls below
    ``rtol * max|M|**n``.
    """
    m = np.asarray(matrix, dtype=float)
    n = m.shape[-1]
    if m.shape[-2:] not in ((2, 2), (3, 3)):
        raise ValueError(f"expected 2x2 or 3x3 matrices, got shape {m.shape}")
    scale = np.max(np.abs(m), axis=(-2, -1))
    det = np.linalg.det(m)
    if np.any(~np.isfinite(det)) or np.any(np.abs(det) <= rtol * scale**n):
        raise SingularMetricError("singular metric")
    inv = np.linalg.inv(m)
    return 0.5 * (inv + np.swapaxes(inv, -1, -2))


def levi_civita_symbol(indices: Sequence[int], dim: int | None = None) -> int:
    """Permutation symbol with ``eps^{012} = +1`` (``eps^{01} = +1`` in 2D)."""
    idx = tuple(int(i) for i in indices)
    dim = len(idx) if dim is None else dim
    if any(i < 0 or i >= dim for i in idx):
        raise IndexError(f"index out of range in {idx}")
    if len(set(idx)) < len(idx):
        return 0
    sign = 1
    arr = list(idx)
    for i in range(len(arr)):
        while arr[i] != i:
            j = arr[i]
            arr[i], arr[j] = arr[j], arr[i]
            sign = -sign
    return sign


def _levi_civita_array(dim: int) -> np.ndarray:
    out = np.zeros((dim,) * dim)
    for perm in permutations(range(dim)):
        out[perm] = levi_civita_symbol(perm)
    return out


LEVI_CIVITA_2 = _levi_civita_array(2)
LEVI_CIVITA_3 = _levi_civita_array(3)
