"""Steklov spectra, DtN heat traces and their boundary-curvature invariants."""

from .errors import ConfigError, NumericalError, SteklovError
from .geometry import CurvatureField, DomainKind, DomainSpec, curvature_field, make_domain
from .spectrum import Spectrum, steklov_closed_form, steklov_numeric
from .heat_trace import HeatTraceSamples, trace_samples
from .invariants import integrated_coefficients, symbol_diagonal_oracle
from .hearing import fit_expansion, invert_geometry, select_window

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "CurvatureField",
    "DomainKind",
    "DomainSpec",
    "HeatTraceSamples",
    "NumericalError",
    "Spectrum",
    "SteklovError",
    "curvature_field",
    "fit_expansion",
    "integrated_coefficients",
    "invert_geometry",
    "make_domain",
    "select_window",
    "steklov_closed_form",
    "steklov_numeric",
    "symbol_diagonal_oracle",
    "trace_samples",
]
