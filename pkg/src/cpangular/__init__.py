"""Eigenvalues of a two-parameter Dirac-type angular operator on (0, pi)."""

from .characteristics import integrate_characteristic, transport_eigenvalue
from .closed_forms import equal_parameter_eigenvalue
from .delta_solver import delta, eigenvalue_delta
from .errors import CPAngularError
from .model import EigenvalueEstimate, ModelParams, base_eigenvalue
from .monodromy import monodromy_eigenvalues, monodromy_polynomial
from .series_expansion import series_coefficients, series_eval
from .theta_solver import eigenvalue_theta, theta_polynomial

__all__ = [
    "CPAngularError",
    "EigenvalueEstimate",
    "ModelParams",
    "base_eigenvalue",
    "delta",
    "eigenvalue_delta",
    "eigenvalue_theta",
    "equal_parameter_eigenvalue",
    "integrate_characteristic",
    "monodromy_eigenvalues",
    "monodromy_polynomial",
    "series_coefficients",
    "series_eval",
    "theta_polynomial",
    "transport_eigenvalue",
]
