"""Problem instance: parameters, coefficient matrices of the first-order
system on [0, 1], base spectrum and eigenvalue localization."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError

#: swap matrix exchanging the two components
K = np.array([[0.0, 1.0], [1.0, 0.0]])

DEFAULT_J_MAX = 8


@dataclass(frozen=True)
class ModelParams:
    """Parameters (kappa, mu, nu) of the angular operator.

    ``alpha_exp`` is the exponent ``kappa/2 + 1/4`` of the singular points
    of the transformed system.
    """

    kappa: float
    mu: float = 0.0
    nu: float = 0.0

    def __post_init__(self):
        for name in ("kappa", "mu", "nu"):
            val = getattr(self, name)
            if isinstance(val, complex) or not np.isfinite(val):
                raise DomainError(f"{name} must be a finite real number, got {val!r}")
            object.__setattr__(self, name, float(val))
        if self.kappa < 0.5:
            raise DomainError(f"kappa must be >= 1/2, got {self.kappa}")

    @property
    def alpha_exp(self) -> float:
        return self.kappa / 2 + 0.25

    @property
    def radius(self) -> float:
        """Localization radius ``max(|mu|, |nu|)``."""
        return max(abs(self.mu), abs(self.nu))

    def with_point(self, mu: float, nu: float) -> "ModelParams":
        return ModelParams(self.kappa, mu, nu)

    @property
    def t(self) -> complex:
        """Principal square root of ``nu^2 - mu^2``; ``+-t`` are the eigenvalues of C."""
        return complex(np.sqrt(complex(self.nu**2 - self.mu**2)))


def check_index(j) -> int:
    if int(j) != j or j == 0:
        raise DomainError("invalid index")
    return int(j)


def base_eigenvalue(kappa: float, j: int) -> float:
    """Eigenvalue at mu = nu = 0: ``sgn(j) (kappa - 1/2 + |j|)``."""
    j = check_index(j)
    return math.copysign(kappa - 0.5 + abs(j), j)


@dataclass(frozen=True)
class SystemMatrices:
    """Coefficient matrices of ``y' = (B0 / x + B1 / (x - 1) + C) y`` on (0, 1).

    The hatted variants ``B0h``, ``B1h`` and ``E`` belong to the gauge
    transformed system used by the polynomial recurrence.
    """

    B0: np.ndarray
    B1: np.ndarray
    C: np.ndarray
    B0h: np.ndarray
    B1h: np.ndarray
    E: np.ndarray


def system_matrices(p: ModelParams, lam) -> SystemMatrices:
    a = p.alpha_exp
    k = p.kappa
    mu, nu = p.mu, p.nu
    dt = np.result_type(type(lam), float)
    B0 = np.array([[-a, mu - lam], [0.0, a]], dtype=dt)
    B1 = np.array([[a, 0.0], [mu - lam, -a]], dtype=dt)
    C = np.array([[-2 * nu, -2 * mu], [2 * mu, 2 * nu]], dtype=dt)
    B0h = np.array([[-k - 0.5, mu - lam], [0.0, 0.0]], dtype=dt)
    B1h = np.array([[k - 0.5, 0.0], [mu - lam, -1.0]], dtype=dt)
    E = np.array([[2 * nu, 3 * mu - lam], [-mu - lam, -2 * nu]], dtype=dt)
    return SystemMatrices(B0, B1, C, B0h, B1h, E)


@dataclass(frozen=True)
class Interval:
    j: int
    center: float
    radius: float

    @property
    def lo(self) -> float:
        return self.center - self.radius

    @property
    def hi(self) -> float:
        return self.center + self.radius

    def contains(self, lam: float, slack: float = 0.0) -> bool:
        return abs(lam - self.center) <= self.radius + slack


def localization_intervals(p: ModelParams, j_max: int = DEFAULT_J_MAX) -> list[Interval]:
    """Intervals ``[lambda_j(0,0) - r, lambda_j(0,0) + r]`` with ``r = max(|mu|, |nu|)``,
    for ``0 < |j| <= j_max`` ordered by ``j``."""
    r = p.radius
    js = [j for j in range(-j_max, j_max + 1) if j != 0]
    return [Interval(j, base_eigenvalue(p.kappa, j), r) for j in js]


def interval_for(p: ModelParams, j: int) -> Interval:
    j = check_index(j)
    return Interval(j, base_eigenvalue(p.kappa, j), p.radius)


@dataclass
class EigenvalueEstimate:
    """An eigenvalue with provenance and diagnostics."""

    value: float
    j: int
    method: str
    order: int | None = None
    residual: float = float("nan")
    flagged: bool = False
    diagnostics: dict = field(default_factory=dict)

    def __float__(self):
        return float(self.value)

    def to_dict(self) -> dict:
        out = {
            "value": self.value,
            "j": self.j,
            "method": self.method,
            "order": self.order,
            "residual": self.residual,
            "flagged": self.flagged,
        }
        out.update(self.diagnostics)
        return out


def angular_operator(p: ModelParams, theta, u, du, v, dv):
    """Apply the angular operator to ``S = (u, v)`` given values and derivatives:

        A S = [[0, 1], [-1, 0]] S' + [[-mu cos, -q], [-q, mu cos]] S,
        q = kappa / sin(theta) + nu sin(theta).
    """
    s, c = np.sin(theta), np.cos(theta)
    q = p.kappa / s + p.nu * s
    return dv - p.mu * c * u - q * v, -du - q * u + p.mu * c * v
