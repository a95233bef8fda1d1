"""Exactly solvable cases.

* ``|mu| = |nu|``: closed formula for every eigenvalue branch.
* ``mu = nu = 0``: eigenfunctions in terms of Jacobi polynomials.
* General ``(mu, nu)``: parameters of the generalized Heun equation obeyed
  by the first component of the transformed system, with a residual check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .delta_solver import frobenius_coefficients
from .errors import DomainError
from .model import ModelParams, angular_operator, base_eigenvalue, check_index, system_matrices
from .numerics import ode_integrate, quadrature

# EQUAL PARAMETERS =====================================================================


def equal_parameter_eigenvalue(kappa: float, j: int, tau: int, mu: float) -> float:
    """Eigenvalue ``lambda_j(kappa; mu, tau mu)`` for ``tau = +-1``."""
    j = check_index(j)
    if tau not in (-1, 1):
        raise DomainError("tau must be +1 or -1")
    if j == tau:
        return tau * (kappa + 0.5) + mu
    lam0 = base_eigenvalue(kappa, j)
    rad = (lam0 - tau / 2) ** 2 + 2 * tau * kappa * mu + mu**2
    return tau / 2 + math.copysign(math.sqrt(rad), j)


# JACOBI POLYNOMIALS ===================================================================


def jacobi_polynomial(n: int, a: float, b: float, x):
    """``P_n^{(a, b)}(x)`` by the three-term recurrence (scalar or array ``x``)."""
    if n < 0:
        raise DomainError("degree must be non-negative")
    x = np.asarray(x, dtype=float)
    p0 = np.ones_like(x)
    if n == 0:
        return p0[()] if p0.ndim == 0 else p0
    p1 = (a + 1) + (a + b + 2) * (x - 1) / 2
    for k in range(2, n + 1):
        s = 2 * k + a + b
        c1 = 2 * k * (k + a + b) * (s - 2)
        c2 = (s - 1) * (s * (s - 2) * x + a * a - b * b)
        c3 = 2 * (k + a - 1) * (k + b - 1) * s
        p0, p1 = p1, (c2 * p1 - c3 * p0) / c1
    return p1[()] if p1.ndim == 0 else p1


def jacobi_derivative(n: int, a: float, b: float, x):
    if n == 0:
        return np.zeros_like(np.asarray(x, dtype=float))
    return 0.5 * (n + a + b + 1) * jacobi_polynomial(n - 1, a + 1, b + 1, x)


# ZERO-PARAMETER EIGENFUNCTIONS ========================================================


def zero_parameter_eigenvalue(kappa: float, n: int, sign: int) -> float:
    return sign * (kappa + 0.5 + n)


def _check_theta(theta):
    theta = np.asarray(theta, dtype=float)
    if np.any((theta <= 0) | (theta >= np.pi)):
        raise DomainError("theta must lie in (0, pi)")
    return theta


def zero_parameter_eigenfunction(kappa: float, n: int, sign: int, theta, derivative: bool = False):
    """Eigenfunction of the ``mu = nu = 0`` operator for ``sign (kappa + 1/2 + n)``:

        sin(th)^(kappa + 1/2) * ( sign sqrt(tan(th/2)) P_n^{(kappa+1/2, kappa-1/2)}(cos th),
                                 -sqrt(cot(th/2)) P_n^{(kappa-1/2, kappa+1/2)}(cos th) )

    Returns an array of shape ``(2, ...)``; with ``derivative=True`` also the
    ``theta``-derivative.
    """
    if sign not in (-1, 1):
        raise DomainError("sign must be +1 or -1")
    th = _check_theta(theta)
    s, c = np.sin(th), np.cos(th)
    pw = kappa + 0.5
    pre = s**pw
    rt = np.sqrt(np.tan(th / 2))
    a1, b1 = kappa + 0.5, kappa - 0.5
    p1 = jacobi_polynomial(n, a1, b1, c)
    p2 = jacobi_polynomial(n, b1, a1, c)
    u = sign * pre * rt * p1
    v = -pre / rt * p2
    if not derivative:
        return np.array([u, v])
    log_pre = pw * c / s
    du = u * (log_pre + 0.5 / s) + sign * pre * rt * jacobi_derivative(n, a1, b1, c) * (-s)
    dv = v * (log_pre - 0.5 / s) - pre / rt * jacobi_derivative(n, b1, a1, c) * (-s)
    return np.array([u, v]), np.array([du, dv])


def eigenfunction_residual(kappa: float, n: int, sign: int, theta) -> np.ndarray:
    """Relative residual ``|A S - lam S| / (|lam S| + |kappa S / sin|)`` at each ``theta``."""
    th = _check_theta(theta)
    (u, v), (du, dv) = zero_parameter_eigenfunction(kappa, n, sign, th, derivative=True)
    lam = zero_parameter_eigenvalue(kappa, n, sign)
    a1, a2 = angular_operator(ModelParams(kappa), th, u, du, v, dv)
    res = np.hypot(a1 - lam * u, a2 - lam * v)
    scale = np.hypot(u, v) * (abs(lam) + kappa / np.sin(th)) + np.hypot(du, dv)
    return res / scale


def eigenfunction_inner_product(kappa: float, first: tuple, second: tuple, tol: float = 1e-13) -> float:
    """``int_0^pi S_1 . S_2 d theta`` for ``first = (n, sign)`` and ``second = (n, sign)``."""

    def integrand(th):
        return float(
            np.dot(
                zero_parameter_eigenfunction(kappa, first[0], first[1], th),
                zero_parameter_eigenfunction(kappa, second[0], second[1], th),
            )
        )

    return quadrature(integrand, 0.0, np.pi, tol=tol)


# GENERALIZED HEUN EQUATION ============================================================


@dataclass(frozen=True)
class HeunParameters:
    """Parameters of the second-order equations satisfied by ``y1``.

    ``tau0 .. tau5`` belong to the equation for ``y1`` itself,
    ``mu0, mu1, mu2, beta0, beta1, beta2`` to the generalized Heun equation
    for ``psi = y1 x^-alpha (1 - x)^-alpha exp(-2 t x)``.
    """

    b: complex
    t: complex
    branch: int
    mu0: float
    mu1: float
    mu2: float
    beta0: complex
    beta1: complex
    beta2: complex
    tau0: complex
    tau1: complex
    tau2: complex
    tau3: complex
    tau4: complex
    tau5: complex


def heun_parameters(p: ModelParams, lam, branch: int = 1) -> HeunParameters:
    """Parameter map for ``t = branch * sqrt(nu^2 - mu^2)`` (principal root)."""
    mu, nu, a = p.mu, p.nu, p.alpha_exp
    if mu == 0:
        raise DomainError("b undefined")
    if abs(lam * lam - mu * mu) < 1e-14 * max(1.0, abs(lam) ** 2):
        raise DomainError("resonant denominators")
    if branch not in (-1, 1):
        raise DomainError("branch must be +1 or -1")
    t = branch * p.t
    b = (mu - lam) / (2 * mu)
    tau0 = 4 * (mu**2 - nu**2)
    tau1 = lam**2 - 2 * a**2 + 2 * nu + a - mu**2 - 4 * a * nu + 2 * a * mu / (mu - lam)
    tau2 = -(a**2)
    tau3 = 4 * a * mu**2 / (mu**2 - lam**2) + 2 * nu - tau1
    tau4 = a * (1 - a)
    tau5 = 2 * (nu * mu**2 + 2 * a * mu**2 - nu * lam**2) / (lam**2 - mu**2)
    beta2 = 8 * a * t
    beta1 = (
        mu**2
        - lam**2
        - 2 * t * (b + 2 * a * (1 + 2 * b))
        + 4 * a * (a - 1)
        + 2 * nu * (2 * a - b)
        - 2 * a * mu * (b - 1) / (lam + mu)
        + 2 * a * mu * b / (mu - lam)
    )
    beta0 = b * (lam**2 - mu**2) + b * (2 * (nu + t) - 4 * a * (nu - t) - 4 * a**2) + a - 2 * mu * a * b / (lam - mu)
    return HeunParameters(
        b=b, t=t, branch=branch, mu0=-2 * a, mu1=1 - 2 * a, mu2=2.0,
        beta0=beta0, beta1=beta1, beta2=beta2,
        tau0=tau0, tau1=tau1, tau2=tau2, tau3=tau3, tau4=tau4, tau5=tau5,
    )


def _regular_solution(p: ModelParams, lam, xs, x_start: float = 0.3, tol: float = 1e-12):
    """Values ``y``, ``y'``, ``y''`` at ``xs`` of the solution regular at 0.

    The series at ``x_start`` (well inside its unit disc) supplies the
    initial value; the system is then integrated across ``xs``.
    """
    m = system_matrices(p, lam)
    h = frobenius_coefficients(p, lam, 200).h
    powers = x_start ** np.arange(h.shape[0])
    y0 = x_start**p.alpha_exp * (powers @ h)
    xs = np.asarray(xs, dtype=float)

    def phi(x):
        return m.B0 / x + m.B1 / (x - 1) + m.C

    traj = ode_integrate(lambda x, y: phi(x) @ y, x_start, y0, float(xs.max()), tol=tol, samples=xs)
    ys = traj.y_samples
    yp = np.array([phi(x) @ y for x, y in zip(xs, ys)])
    ypp = np.array([(-m.B0 / x**2 - m.B1 / (x - 1) ** 2) @ y + phi(x) @ d for x, y, d in zip(xs, ys, yp)])
    return ys, yp, ypp


def pre_heun_residual(p: ModelParams, lam, xs=None) -> float:
    """Largest scaled residual of the second-order equation for ``y1`` at ``xs``."""
    hp = heun_parameters(p, lam)
    xs = np.linspace(0.35, 0.7, 8) if xs is None else np.asarray(xs, dtype=float)
    ys, yp, ypp = _regular_solution(p, lam, xs)
    worst = 0.0
    for x, y, d1, d2 in zip(xs, ys[:, 0], yp[:, 0], ypp[:, 0]):
        c1 = 1 / x - 1 / (x - hp.b)
        c0 = hp.tau0 + hp.tau1 / x + hp.tau2 / x**2 + hp.tau3 / (x - 1) + hp.tau4 / (x - 1) ** 2 + hp.tau5 / (x - hp.b)
        r = d2 + c1 * d1 + c0 * y
        scale = abs(d2) + abs(c1 * d1) + abs(c0 * y)
        worst = max(worst, abs(r) / scale)
    return worst


def heun_residual(p: ModelParams, lam, xs=None, branch: int = 1) -> float:
    """Largest scaled residual of the generalized Heun equation at ``xs`` in [0.3, 0.7].

    Each term is evaluated from the exact values of ``y1, y1', y1''`` and the
    residual is divided by the sum of the term magnitudes.
    """
    hp = heun_parameters(p, lam, branch)
    a, t = p.alpha_exp, hp.t
    xs = np.linspace(0.35, 0.7, 8) if xs is None else np.asarray(xs, dtype=float)
    ys, yp, ypp = _regular_solution(p, lam, xs)
    worst = 0.0
    for x, y, d1, d2 in zip(xs, ys[:, 0], yp[:, 0], ypp[:, 0]):
        lg = -a / x + a / (1 - x) - 2 * t
        lgp = a / x**2 + a / (1 - x) ** 2
        g = x ** (-a) * (1 - x) ** (-a) * np.exp(-2 * t * x)
        psi = y * g
        dpsi = (d1 + y * lg) * g
        d2psi = (d2 + 2 * d1 * lg + y * (lg**2 + lgp)) * g
        c1 = (1 - hp.mu0) / x + (1 - hp.mu1) / (x - 1) + (1 - hp.mu2) / (x - hp.b) + 4 * t
        c0 = (hp.beta0 + hp.beta1 * x + hp.beta2 * x**2) / (x * (x - 1) * (x - hp.b))
        r = d2psi + c1 * dpsi + c0 * psi
        scale = abs(d2psi) + abs(c1 * dpsi) + abs(c0 * psi)
        worst = max(worst, abs(r) / scale)
    return worst
