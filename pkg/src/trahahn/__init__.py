"""Series solutions of a ten-parameter ODE in Jacobi bases with deformed continuous Hahn coefficients."""

from .parameters import (
    REFERENCE,
    Branch,
    CanonicalParams,
    basis_params,
    derive_dependent,
    hahn_family,
    validate,
)
from .series import build_series, series_eval

__all__ = [
    "REFERENCE",
    "Branch",
    "CanonicalParams",
    "basis_params",
    "build_series",
    "derive_dependent",
    "hahn_family",
    "series_eval",
    "validate",
]
