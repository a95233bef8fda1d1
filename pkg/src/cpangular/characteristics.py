"""Characteristic curves of the eigenvalue PDE

    (mu - 2 nu lam) lam_mu + (nu - 2 mu lam) lam_nu + 2 kappa mu + 2 mu nu = 0

in the coordinates ``mu = t/2 (v + sigma/v)``, ``nu = t/2 (v - sigma/v)``,
where ``v(t)`` obeys a Painleve III equation and ``w(t) = lam`` is carried
along. Also residual checks for the isomonodromic deformation behind the
transport of eigenvalues along these curves.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .delta_solver import eigenvalue_delta
from .errors import DomainError, TrackingError
from .model import K, EigenvalueEstimate, ModelParams, base_eigenvalue, check_index, system_matrices
from .monodromy import half_integer_k, monodromy_eigenvalue, monodromy_eigenvalues
from .numerics import Trajectory, central_gradient, ode_integrate, quadrature

DEFAULT_TOL = 1e-12


# COORDINATES ==========================================================================


@dataclass(frozen=True)
class CharacteristicState:
    t: float
    v: float
    w: float
    sigma: int

    def __post_init__(self):
        if self.v == 0:
            raise DomainError("v must be nonzero")
        if not self.t > 0:
            raise DomainError("t must be positive")
        if self.sigma not in (-1, 1):
            raise DomainError("sigma must be +1 or -1")

    @property
    def munu(self):
        return coords_from_tv(self.t, self.v, self.sigma)


def coords_from_tv(t, v, sigma: int):
    """``(mu, nu)`` of the point with characteristic coordinates ``(t, v)``."""
    v = np.asarray(v, dtype=float)
    if np.any(v == 0):
        raise DomainError("v must be nonzero")
    mu = 0.5 * t * (v + sigma / v)
    nu = 0.5 * t * (v - sigma / v)
    if mu.ndim == 0:
        return float(mu), float(nu)
    return mu, nu


def tv_from_coords(mu: float, nu: float):
    """Inverse of :func:`coords_from_tv`: ``(t, v, sigma)`` with ``t > 0``."""
    d = mu * mu - nu * nu
    if d == 0:
        raise DomainError("characteristic coordinates singular")
    sigma = 1 if d > 0 else -1
    t = math.sqrt(abs(d))
    return t, (mu + nu) / t, sigma


# INTEGRATION ==========================================================================


def characteristic_field(kappa: float, sigma: int):
    def field(t, y):
        v, w = y
        return np.array([-2 * v * w / t, -kappa * (v + sigma / v) - 0.5 * t * (v * v - 1 / (v * v))])

    return field


@dataclass
class CharacteristicTrajectory:
    """Solution ``(v, w)`` of the characteristic system with dense output."""

    kappa: float
    sigma: int
    path: Trajectory
    tol: float = DEFAULT_TOL

    @property
    def t(self) -> np.ndarray:
        return self.path.t

    @property
    def v(self) -> np.ndarray:
        return self.path.y[:, 0]

    @property
    def w(self) -> np.ndarray:
        return self.path.y[:, 1]

    @property
    def t_range(self):
        return float(min(self.t[0], self.t[-1])), float(max(self.t[0], self.t[-1]))

    def state(self, t: float) -> CharacteristicState:
        v, w = self.path(t)
        return CharacteristicState(float(t), float(v), float(w), self.sigma)

    @property
    def start(self) -> CharacteristicState:
        return CharacteristicState(float(self.t[0]), float(self.v[0]), float(self.w[0]), self.sigma)

    @property
    def end(self) -> CharacteristicState:
        return CharacteristicState(float(self.t[-1]), float(self.v[-1]), float(self.w[-1]), self.sigma)

    def munu(self):
        return coords_from_tv(self.t, self.v, self.sigma)

    def to_csv(self) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["t", "v", "w", "mu", "nu"])
        mu, nu = self.munu()
        for row in zip(self.t, self.v, self.w, mu, nu):
            wr.writerow([f"{x:.9g}" for x in row])
        return buf.getvalue()


def integrate_characteristic(
    s0: CharacteristicState, kappa: float, t1: float, tol: float = DEFAULT_TOL, samples=None
) -> CharacteristicTrajectory:
    """Integrate ``v' = -2 v w / t``, ``w' = -kappa (v + sigma/v) - t/2 (v^2 - 1/v^2)``
    from ``s0`` to ``t1 > 0``.

    Raises :class:`StepSizeError` with the last good state if the solution
    runs into ``v = 0`` or blows up.
    """
    if not t1 > 0:
        raise DomainError("t1 must be positive")
    path = ode_integrate(
        characteristic_field(kappa, s0.sigma), s0.t, [s0.v, s0.w], t1, tol=tol, samples=samples
    )
    return CharacteristicTrajectory(kappa=float(kappa), sigma=s0.sigma, path=path, tol=tol)


# PAINLEVE III =========================================================================


def _interior(traj: CharacteristicTrajectory, n: int, margin: float):
    lo, hi = traj.t_range
    pad = margin * (hi - lo)
    return np.linspace(lo + pad, hi - pad, n)


STENCIL_HALF = 3


def _node_derivative(t: np.ndarray, g: np.ndarray, half: int = STENCIL_HALF) -> np.ndarray:
    """Derivative of ``g`` at the interior nodes ``t[half:-half]`` from the
    centred Lagrange stencil on the (non-uniform) neighbouring nodes."""
    width = 2 * half + 1
    out = np.empty(t.size - 2 * half)
    powers = np.arange(width)[:, None]
    rhs = np.zeros(width)
    rhs[1] = 1.0
    for i in range(half, t.size - half):
        dt = t[i - half : i + half + 1] - t[i]
        scale = np.max(np.abs(dt))
        weights = np.linalg.solve((dt / scale) ** powers, rhs) / scale
        out[i - half] = weights @ g[i - half : i + half + 1]
    return out


def painleve_residual(
    traj: CharacteristicTrajectory,
    kappa: float | None = None,
    sigma: int | None = None,
    w_offset: float = 0.0,
) -> float:
    """Largest scaled Painleve III residual along the trajectory.

    At every interior integrator node, ``v'`` is the right-hand side of the
    ``v``-equation at ``(v, w + w_offset)`` and ``v''`` is the derivative of
    that right-hand side along the computed flow (seven-point stencil on the
    neighbouring nodes). The residual therefore reflects both the integration
    error and any inconsistency between ``v`` and ``w``. Each residual is
    divided by ``1 + |t| + v^4``.
    """
    kappa = traj.kappa if kappa is None else kappa
    sigma = traj.sigma if sigma is None else sigma
    t, v, w = traj.t, traj.v, traj.w + w_offset
    h = STENCIL_HALF
    if t.size < 2 * h + 1:
        raise DomainError("trajectory has too few steps for the residual stencil")
    g = -2 * v * w / t
    d2 = _node_derivative(t, g)
    t, v, d1 = t[h:-h], v[h:-h], g[h:-h]
    res = t * v * d2 - t * d1**2 + v * d1 - 2 * kappa * (v * v + sigma) * v - t * (v**4 - 1)
    return float(np.max(np.abs(res) / (1 + np.abs(t) + v**4)))


# EIGENVALUE PDE =======================================================================


def pde_residual(surface, kappa: float, mu: float, nu: float, h: float) -> float:
    """``(mu - 2 nu lam) lam_mu + (nu - 2 mu lam) lam_nu + 2 kappa mu + 2 mu nu``
    with central differences of step ``h``."""
    lam = surface(mu, nu)
    g = central_gradient(surface, (mu, nu), h)
    return float((mu - 2 * nu * lam) * g[0] + (nu - 2 * mu * lam) * g[1] + 2 * kappa * mu + 2 * mu * nu)


class ClassicalSurface:
    """``(mu, nu) -> lambda_j(kappa; mu, nu)`` by the Delta method, continuing from
    the most recently computed point so that nearby evaluations are cheap."""

    def __init__(self, kappa: float, j: int, tol: float = 1e-14):
        self.kappa = kappa
        self.j = check_index(j)
        self.tol = tol
        self._anchor = (0.0, 0.0, base_eigenvalue(kappa, j))

    def __call__(self, mu: float, nu: float) -> float:
        m0, n0, _ = self._anchor
        start = self._anchor if max(abs(mu - m0), abs(nu - n0)) <= 0.05 else None
        est = eigenvalue_delta(ModelParams(self.kappa, mu, nu), self.j, tol=self.tol, start=start)
        self._anchor = (mu, nu, est.value)
        return est.value


class MonodromySurface:
    """``(mu, nu) -> lambda_0^j(kappa; mu, nu)``, the monodromy eigenvalue branch
    with limit ``j`` at the origin. Nearby evaluations pick the root of ``P``
    closest to the previous value."""

    def __init__(self, kappa: float, j: int, imag_tol: float = 1e-9):
        self.kappa = kappa
        self.j = j
        self.imag_tol = imag_tol
        self._anchor = None

    def __call__(self, mu: float, nu: float) -> float:
        if self._anchor is None or max(abs(mu - self._anchor[0]), abs(nu - self._anchor[1])) > 0.02:
            lam = monodromy_eigenvalue(self.kappa, self.j, mu, nu)
        else:
            roots = monodromy_eigenvalues(self.kappa, mu, nu)
            lam = roots[np.argmin(np.abs(roots - self._anchor[2]))]
        if abs(lam.imag) > self.imag_tol * (1 + abs(lam)):
            raise DomainError(f"monodromy eigenvalue not real at ({mu}, {nu}): {lam}")
        self._anchor = (mu, nu, lam.real)
        return float(lam.real)


# DEFORMATION EQUATION =================================================================


def omega_matrix(x, v: float, sigma: int) -> np.ndarray:
    a = v * v - sigma
    b = v * v + sigma
    return np.array([[a * (0.5 - x), b * (1 - x)], [b * x, a * (x - 0.5)]]) / v


def omega_dx(v: float, sigma: int) -> np.ndarray:
    a = v * v - sigma
    b = v * v + sigma
    return np.array([[-a, -b], [b, a]]) / v


def phi_matrix(kappa: float, t: float, v: float, w: float, sigma: int, x: float) -> np.ndarray:
    mu, nu = coords_from_tv(t, v, sigma)
    m = system_matrices(ModelParams(kappa, mu, nu), w)
    return m.B0 / x + m.B1 / (x - 1) + m.C


def gauge_matrix(kappa: float, t: float, v: float, w: float, sigma: int, phi: float) -> np.ndarray:
    mu, _ = coords_from_tv(t, v, sigma)
    return np.array([[math.exp(phi), (mu - w) * math.exp(-phi)], [0.0, (kappa + 0.5) * math.exp(-phi)]])


@dataclass
class DeformationReport:
    deformation: float
    gauge0: float
    gauge1: float

    @property
    def max(self) -> float:
        return max(self.deformation, self.gauge0, self.gauge1)


def deformation_residual(
    kappa: float,
    traj: CharacteristicTrajectory,
    x_samples=None,
    t_samples=None,
    w_offset: float = 0.0,
    rel_delta: float = 1e-4,
    tol: float = 1e-13,
) -> DeformationReport:
    """Residuals of ``Phi_t + Phi Omega - Omega Phi - Omega_x = 0`` and of
    ``G_a' = Omega(a) G_a`` along a characteristic.

    ``Phi_t`` and ``G_a'`` use central differences with step
    ``rel_delta * t``; the states at ``t +- delta`` come from re-integrating
    the characteristic system from the sampled state. The deformation
    residual is scaled by ``|Phi|`` and the gauge residuals by ``|G_a|``.
    ``phi`` is anchored at the trajectory start.
    """
    sigma = traj.sigma
    xs = np.array([0.15, 0.35, 0.5, 0.65, 0.85]) if x_samples is None else np.asarray(x_samples, dtype=float)
    ts = _interior(traj, 9, 0.05) if t_samples is None else np.asarray(t_samples, dtype=float)
    base = characteristic_field(kappa, sigma)
    t_start = float(traj.t[0])

    def field(t, y):
        v = y[0]
        return np.append(base(t, y[:2]), (v * v - sigma) / (2 * v))

    def phase_rate(s):
        v = traj.path(s)[0]
        return (v * v - sigma) / (2 * v)

    worst_def = worst_g0 = worst_g1 = 0.0
    for t in ts:
        v, w = traj.path(t)
        ph = quadrature(phase_rate, t_start, t, tol=1e-14) if t != t_start else 0.0
        d = rel_delta * t
        near = {sgn: ode_integrate(field, t, [v, w, ph], t + sgn * d, tol=tol).y_final for sgn in (-1, 1)}
        for x in xs:
            P = phi_matrix(kappa, t, v, w + w_offset, sigma, x)
            Pp = phi_matrix(kappa, t + d, near[1][0], near[1][1] + w_offset, sigma, x)
            Pm = phi_matrix(kappa, t - d, near[-1][0], near[-1][1] + w_offset, sigma, x)
            Om = omega_matrix(x, v, sigma)
            R = (Pp - Pm) / (2 * d) + P @ Om - Om @ P - omega_dx(v, sigma)
            worst_def = max(worst_def, np.linalg.norm(R, 2) / np.linalg.norm(P, 2))
        G = gauge_matrix(kappa, t, v, w + w_offset, sigma, ph)
        Gp = gauge_matrix(kappa, t + d, near[1][0], near[1][1] + w_offset, sigma, near[1][2])
        Gm = gauge_matrix(kappa, t - d, near[-1][0], near[-1][1] + w_offset, sigma, near[-1][2])
        dG = (Gp - Gm) / (2 * d)
        R0 = dG - omega_matrix(0.0, v, sigma) @ G
        worst_g0 = max(worst_g0, np.linalg.norm(R0, 2) / np.linalg.norm(G, 2))
        G1, dG1 = K @ G @ K, K @ dG @ K
        R1 = dG1 - omega_matrix(1.0, v, sigma) @ G1
        worst_g1 = max(worst_g1, np.linalg.norm(R1, 2) / np.linalg.norm(G1, 2))
    return DeformationReport(float(worst_def), float(worst_g0), float(worst_g1))


# EIGENVALUE TRANSPORT =================================================================


def _start_value(kappa: float, j: int, mu: float, nu: float, family: str) -> float:
    if family == "classical":
        return eigenvalue_delta(ModelParams(kappa, mu, nu), j).value
    if family == "monodromy":
        lam = monodromy_eigenvalue(kappa, j, mu, nu)
        if abs(lam.imag) > 1e-9 * (1 + abs(lam)):
            raise DomainError("monodromy eigenvalue at the start point is not real")
        return float(lam.real)
    raise ValueError(f"unknown eigenvalue family {family!r}")


def _direct_value(kappa: float, j: int, mu: float, nu: float, family: str, guess: float) -> float:
    if family == "classical":
        return eigenvalue_delta(ModelParams(kappa, mu, nu), j).value
    roots = monodromy_eigenvalues(kappa, mu, nu)
    return float(roots[np.argmin(np.abs(roots - guess))].real)


def transport_eigenvalue(
    kappa: float,
    j: int,
    start,
    end=None,
    t1: float | None = None,
    family: str = "classical",
    tol: float = 1e-8,
    ode_tol: float = DEFAULT_TOL,
) -> EigenvalueEstimate:
    """Carry an eigenvalue from ``start = (mu0, nu0)`` along its characteristic.

    The destination is either ``end = (mu1, nu1)``, which must lie on the
    characteristic through ``start`` (checked to ``tol``), or the point with
    coordinate ``t1``. The transported value is compared with a direct
    computation at the destination (``diagnostics['mismatch']``).
    """
    if family == "monodromy":
        half_integer_k(kappa)
    else:
        j = check_index(j)
    mu0, nu0 = start
    t0, v0, sigma = tv_from_coords(mu0, nu0)
    w0 = _start_value(kappa, j, mu0, nu0, family)
    if end is not None:
        if t1 is not None:
            raise ValueError("give either end or t1, not both")
        mu1, nu1 = end
        if (mu1, nu1) == (mu0, nu0):
            return EigenvalueEstimate(w0, j, f"transport-{family}", diagnostics={"mismatch": 0.0, "t": [t0, t0]})
        tt, vt, st = tv_from_coords(mu1, nu1)
        if st != sigma:
            raise TrackingError("destination not on the characteristic through the start point")
        t1 = tt
    if t1 is None:
        raise ValueError("a destination (end or t1) is required")
    if t1 == t0:
        return EigenvalueEstimate(w0, j, f"transport-{family}", diagnostics={"mismatch": 0.0, "t": [t0, t0]})
    traj = integrate_characteristic(CharacteristicState(t0, v0, w0, sigma), kappa, t1, tol=ode_tol)
    s1 = traj.end
    mu1, nu1 = s1.munu
    if end is not None and max(abs(mu1 - end[0]), abs(nu1 - end[1])) > tol:
        raise TrackingError(
            f"destination not on the characteristic through the start point (reached ({mu1:.9g}, {nu1:.9g}))"
        )
    direct = _direct_value(kappa, j, mu1, nu1, family, s1.w)
    return EigenvalueEstimate(
        value=s1.w,
        j=j,
        method=f"transport-{family}",
        residual=abs(s1.w - direct),
        diagnostics={
            "mismatch": abs(s1.w - direct),
            "direct": direct,
            "endpoint": [mu1, nu1],
            "t": [t0, t1],
            "sigma": sigma,
        },
    )
