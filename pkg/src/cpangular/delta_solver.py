"""Eigenvalues as real zeros of the characteristic function Delta.

The solution of the transformed system that is regular at ``x = 0`` is a
power series ``sum h_n x^n`` with radius of convergence 1. Evaluating it at
``x = 1/2`` gives ``(f, g)`` and the eigenvalue condition is
``Delta = f^2 - g^2 = 0``. Terms decay like ``2^-n``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BracketError, TrackingError
from .model import EigenvalueEstimate, ModelParams, base_eigenvalue, check_index, interval_for
from .numerics import find_real_root

N_START = 32
N_CAP = 512
STEP = 0.2
DEFAULT_TOL = 1e-12


@dataclass
class FrobeniusSeries:
    """Coefficients ``h_n`` (rows) of the series solution at a fixed ``lam``."""

    h: np.ndarray
    lam: complex

    @property
    def order(self) -> int:
        return self.h.shape[0] - 1


def _recurrence_matrices(p: ModelParams, lam, n):
    a = p.alpha_exp
    mu, nu = p.mu, p.nu
    d = 1.0 - a - n
    M = ((2 * nu + d, 3 * mu - lam), (-mu - lam, -2 * nu + d))
    C = ((-2 * nu, -2 * mu), (2 * mu, 2 * nu))
    return M, C


def frobenius_coefficients(p: ModelParams, lam, N: int) -> FrobeniusSeries:
    """``h_0 .. h_N`` from ``(B0 - alpha - n) h_n = (B0 + B1 - C + 1 - alpha - n) h_{n-1} + C h_{n-2}``."""
    if N < 0:
        raise ValueError("N must be non-negative")
    a = p.alpha_exp
    mu, nu = p.mu, p.nu
    dt = complex if isinstance(lam, complex) else float
    h = np.zeros((N + 1, 2), dtype=dt)
    h[0] = (mu - lam, p.kappa + 0.5)
    prev2 = (0.0, 0.0)
    prev = (mu - lam, p.kappa + 0.5)
    for n in range(1, N + 1):
        d = 1.0 - a - n
        r1 = (2 * nu + d) * prev[0] + (3 * mu - lam) * prev[1] - 2 * nu * prev2[0] - 2 * mu * prev2[1]
        r2 = (-mu - lam) * prev[0] + (-2 * nu + d) * prev[1] + 2 * mu * prev2[0] + 2 * nu * prev2[1]
        x2 = r2 / -n
        x1 = (r1 - (mu - lam) * x2) / (-2 * a - n)
        prev2, prev = prev, (x1, x2)
        h[n] = prev
    return FrobeniusSeries(h=h, lam=lam)


def recurrence_residual(p: ModelParams, series: FrobeniusSeries) -> np.ndarray:
    """Relative residual of the defining recurrence for each ``n >= 1``."""
    lam = series.lam
    a = p.alpha_exp
    lhs_base = np.array([[-2 * a, p.mu - lam], [0.0, 0.0]])
    out = []
    for n in range(1, series.order + 1):
        M, C = _recurrence_matrices(p, lam, n)
        M, C = np.array(M), np.array(C)
        hm2 = series.h[n - 2] if n >= 2 else np.zeros(2)
        lhs = (lhs_base - n * np.eye(2)) @ series.h[n]
        rhs = M @ series.h[n - 1] + C @ hm2
        scale = max(np.linalg.norm(series.h[n]), np.finfo(float).tiny)
        out.append(np.linalg.norm(lhs - rhs) / scale)
    return np.array(out)


def _delta_fixed(p: ModelParams, lam, N: int):
    """Delta and tail estimate at fixed order; ``lam`` scalar or array."""
    a = p.alpha_exp
    mu, nu = p.mu, p.nu
    # scaled coefficients g_n = 2^-n h_n
    p1, p2 = mu - lam, p.kappa + 0.5 + 0 * lam
    q1 = q2 = 0.0 * lam
    f, g = p1, p2
    last = 0.0
    for n in range(1, N + 1):
        d = 1.0 - a - n
        r1 = 0.5 * ((2 * nu + d) * p1 + (3 * mu - lam) * p2) - 0.5 * (nu * q1 + mu * q2)
        r2 = 0.5 * ((-mu - lam) * p1 + (-2 * nu + d) * p2) + 0.5 * (mu * q1 + nu * q2)
        x2 = r2 / -n
        x1 = (r1 - (mu - lam) * x2) / (-2 * a - n)
        q1, q2, p1, p2 = p1, p2, x1, x2
        f = f + x1
        g = g + x2
        if n == N - 1:
            last = abs(x1) + abs(x2)
    term = abs(p1) + abs(p2) + last
    tail = 2 * (abs(f) + abs(g) + term) * term
    return f * f - g * g, tail


@dataclass
class DeltaResult:
    value: complex | np.ndarray
    tail: float | np.ndarray
    N: int
    flagged: bool


def delta(p: ModelParams, lam, N: int | None = None, tol: float = DEFAULT_TOL) -> DeltaResult:
    """Evaluate ``Delta(lam)`` (scalar or array ``lam``).

    With ``N=None`` the order doubles from 32 until the tail estimate falls
    below ``tol/10`` (relative to ``1 + |Delta|``), up to 512; a result that
    does not meet the bound is returned with ``flagged=True``.
    """
    lam = _coerce(lam)
    if N is not None:
        val, tail = _delta_fixed(p, lam, N)
        return DeltaResult(val, tail, N, bool(np.any(tail > tol * (1 + np.abs(val)))))
    n = N_START
    while True:
        val, tail = _delta_fixed(p, lam, n)
        ok = not np.any(tail >= tol / 10 * (1 + np.abs(val)))
        if ok or n >= N_CAP:
            return DeltaResult(val, tail, n, not ok)
        n *= 2


def _coerce(lam):
    if np.ndim(lam) == 0:
        lam = complex(lam)
        return lam.real if lam.imag == 0 else lam
    arr = np.asarray(lam)
    return arr if np.iscomplexobj(arr) else arr.astype(float)


def choose_order(p: ModelParams, lams, tol: float = DEFAULT_TOL) -> int:
    """Smallest doubling order whose tail bound holds at every point of ``lams``."""
    return delta(p, np.asarray(lams, dtype=float), tol=tol).N


def _track_window(p: ModelParams, j: int, lam_prev: float):
    iv = interval_for(p, j)
    lo, hi = lam_prev - 0.5, lam_prev + 0.5
    if iv.radius < 0.5:
        # localization intervals are disjoint; stay inside the one for j
        slack = 1e-9 + 1e-3 * iv.radius
        lo, hi = max(lo, iv.lo - slack), min(hi, iv.hi + slack)
    return lo, hi


def track_real_zero(func, lo: float, hi: float, center: float, tol: float, n_grid: int = 81):
    """Zero of ``func`` (vectorized) in ``[lo, hi]`` nearest ``center``."""
    grid = np.linspace(lo, hi, n_grid)
    vals = np.real(func(grid))
    exact = np.nonzero(vals == 0.0)[0]
    sign = np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]
    cands = [(abs(grid[i] - center), grid[i], None) for i in exact]
    cands += [(abs(0.5 * (grid[i] + grid[i + 1]) - center), grid[i], grid[i + 1]) for i in sign]
    if not cands:
        raise TrackingError("tracking failure, reduce step")
    cands.sort(key=lambda c: c[0])
    _, a, b = cands[0]
    if b is None:
        return float(a)
    try:
        return find_real_root(lambda x: float(np.real(func(x))), (a, b), tol=tol)
    except BracketError as exc:
        raise TrackingError("tracking failure, reduce step") from exc


def continuation_path(mu: float, nu: float, step: float = STEP, start=(0.0, 0.0)):
    """Points on the straight segment from ``start`` to ``(mu, nu)`` with
    ``max(|d mu|, |d nu|) <= step`` (the start point excluded)."""
    m0, n0 = start
    span = max(abs(mu - m0), abs(nu - n0))
    n_steps = max(1, math.ceil(span / step - 1e-12))
    s = np.linspace(0.0, 1.0, n_steps + 1)[1:]
    return [(m0 + si * (mu - m0), n0 + si * (nu - n0)) for si in s]


def eigenvalue_delta(p: ModelParams, j: int, tol: float = DEFAULT_TOL, start=None) -> EigenvalueEstimate:
    """Eigenvalue ``lambda_j(kappa; mu, nu)`` by continuation of a real zero of Delta.

    ``start`` is an optional ``(mu0, nu0, lam0)`` with a known eigenvalue of
    the same branch; the default is the base spectrum at the origin.
    """
    j = check_index(j)
    if start is None:
        m0, n0, lam = 0.0, 0.0, base_eigenvalue(p.kappa, j)
    else:
        m0, n0, lam = (float(x) for x in start)
    if (m0, n0) == (p.mu, p.nu):
        path = [(p.mu, p.nu)]
    else:
        path = continuation_path(p.mu, p.nu, start=(m0, n0))
    N = N_START
    flagged = False
    for mu_i, nu_i in path:
        q = p.with_point(mu_i, nu_i)
        lo, hi = _track_window(q, j, lam)
        if hi - lo < 1e-12:
            lo, hi = lo - 1e-9, hi + 1e-9
        N = choose_order(q, [lo, lam, hi], tol=tol)
        lam = track_real_zero(lambda x, q=q, N=N: _delta_fixed(q, x, N)[0], lo, hi, lam, tol)
    final = delta(p, lam, tol=tol)
    flagged = final.flagged
    return EigenvalueEstimate(
        value=float(lam),
        j=j,
        method="delta",
        order=final.N,
        residual=float(abs(final.value)),
        flagged=flagged,
        diagnostics={"tail": float(final.tail), "steps": len(path)},
    )
