"""Gravitational Chern-Simons term of Kaluza-Klein metrics on circle bundles,
computed from the 3D spin connection and from reduced 2D data."""
from .chern_simons import (
    CSResult,
    QuadratureSpec,
    adiabatic_sweep,
    cs_direct,
    cs_reduced,
    framing_correction,
    integrate_chart,
)
from .connection import ChristoffelSet, christoffel_generic, scalar_curvature_2d
from .frames import (
    ReducedConnection,
    SpinConnection,
    build_vielbein3,
    build_zweibein,
    reduce_spin_connection,
    reduced_closed_form,
    spin_connection_closed_form,
    spin_connection_generic,
)
from .geometry import ChartDomain, Field, invert_symmetric, levi_civita_symbol, partial_derivative
from .kaluza_klein import KKData, assemble_metric, christoffel_closed_form, field_strength
from .presets import PresetSpec, build_preset

__version__ = "0.1.0"

__all__ = [
    "adiabatic_sweep",
    "assemble_metric",
    "build_preset",
    "build_vielbein3",
    "build_zweibein",
    "ChartDomain",
    "christoffel_closed_form",
    "christoffel_generic",
    "ChristoffelSet",
    "cs_direct",
    "cs_reduced",
    "CSResult",
    "Field",
    "field_strength",
    "framing_correction",
    "integrate_chart",
    "invert_symmetric",
    "KKData",
    "levi_civita_symbol",
    "partial_derivative",
    "PresetSpec",
    "QuadratureSpec",
    "reduce_spin_connection",
    "reduced_closed_form",
    "ReducedConnection",
    "scalar_curvature_2d",
    "spin_connection_closed_form",
    "spin_connection_generic",
    "SpinConnection",
]
