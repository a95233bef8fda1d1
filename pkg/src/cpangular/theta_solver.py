"""Eigenvalues as zeros of the limit of the polynomial sequence Theta_n.

The vectors ``d_n(lam)`` obey

    d_n = (B0h - n)^-1 [(E - n) d_{n-1} + C d_{n-2}],   d_0 = (mu - lam, kappa + 1/2),

with polynomial entries in ``lam``. ``Theta_n`` is the second entry and
converges to a function whose real zeros are the eigenvalues.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .delta_solver import _track_window, continuation_path, track_real_zero
from .errors import TrackingError
from .model import EigenvalueEstimate, ModelParams, base_eigenvalue, check_index
from .numerics import Polynomial

N_FIRST = 16
N_CAP = 256
DEFAULT_TOL = 1e-10


@dataclass(frozen=True)
class ThetaPolynomialSequence:
    """The pairs ``d_0 .. d_N`` as polynomials in ``lam``."""

    d: tuple

    @property
    def order(self) -> int:
        return len(self.d) - 1

    @property
    def theta(self) -> Polynomial:
        return self.d[-1][1]


def theta_sequence(p: ModelParams, N: int) -> ThetaPolynomialSequence:
    if N < 0:
        raise ValueError("N must be non-negative")
    mu, nu, k = p.mu, p.nu, p.kappa
    lam = Polynomial.identity()
    mu_l = mu - lam
    e12 = 3 * mu - lam
    e21 = -mu - lam
    zero = Polynomial([])
    d = [(mu_l, Polynomial([k + 0.5]))]
    prev2 = (zero, zero)
    for n in range(1, N + 1):
        a, b = d[-1]
        r1 = (2 * nu - n) * a + e12 * b + (-2 * nu) * prev2[0] + (-2 * mu) * prev2[1]
        r2 = e21 * a + (-2 * nu - n) * b + (2 * mu) * prev2[0] + (2 * nu) * prev2[1]
        x2 = r2 / (-n)
        x1 = (r1 - mu_l * x2) / (-k - 0.5 - n)
        prev2 = d[-1]
        d.append((x1, x2))
    return ThetaPolynomialSequence(tuple(d))


@lru_cache(maxsize=256)
def _theta_polynomial_cached(kappa: float, mu: float, nu: float, N: int) -> Polynomial:
    return theta_sequence(ModelParams(kappa, mu, nu), N).theta


def theta_polynomial(p: ModelParams, N: int) -> Polynomial:
    """``Theta_N`` as a polynomial in ``lam`` (degree ``<= 2N``)."""
    return _theta_polynomial_cached(p.kappa, p.mu, p.nu, int(N))


def theta_eval(p: ModelParams, lam, N: int):
    """Horner evaluation of ``Theta_N`` at ``lam``."""
    val = theta_polynomial(p, N)(lam)
    if np.isrealobj(lam) and np.all(np.abs(np.imag(val)) <= 1e-13 * (1 + np.abs(val))):
        return np.real(val)
    return val


def theta_direct(p: ModelParams, lam, N: int, derivative: bool = False):
    """``Theta_N(lam)`` (and its ``lam``-derivative) by running the recurrence at fixed ``lam``.

    Works for scalar or array ``lam``; this is the fast path used for root
    tracking at large ``N`` where the coefficient form loses accuracy.
    """
    mu, nu, k = p.mu, p.nu, p.kappa
    a, b = mu - lam, k + 0.5 + 0 * lam
    da, db = -1.0 + 0 * lam, 0.0 * lam
    a2 = b2 = da2 = db2 = 0.0 * lam
    for n in range(1, N + 1):
        r1 = (2 * nu - n) * a + (3 * mu - lam) * b - 2 * nu * a2 - 2 * mu * b2
        r2 = (-mu - lam) * a + (-2 * nu - n) * b + 2 * mu * a2 + 2 * nu * b2
        x2 = -r2 / n
        x1 = (r1 - (mu - lam) * x2) / (-k - 0.5 - n)
        if derivative:
            dr1 = (2 * nu - n) * da - b + (3 * mu - lam) * db - 2 * nu * da2 - 2 * mu * db2
            dr2 = -a + (-mu - lam) * da + (-2 * nu - n) * db + 2 * mu * da2 + 2 * nu * db2
            dx2 = -dr2 / n
            dx1 = (dr1 + x2 - (mu - lam) * dx2) / (-k - 0.5 - n)
            da2, db2, da, db = da, db, dx1, dx2
        a2, b2, a, b = a, b, x1, x2
    return (b, db) if derivative else b


def needs_acceleration(p: ModelParams) -> bool:
    """Zeros of ``Theta_N`` converge only like ``N^-(kappa+1/2)`` unless
    ``kappa + 1/2`` is an integer."""
    k = p.kappa + 0.5
    return abs(k - round(k)) > 1e-12


def theta_accelerated(p: ModelParams, lam, N: int, derivative: bool = False, levels: int = 3):
    """Richardson extrapolation of ``Theta_{N/2^i}`` in ``N`` with exponents
    ``kappa + 1/2 + i`` (the algebraic correction terms of the sequence)."""
    orders = [N >> i for i in range(levels + 1) if (N >> i) >= 8][::-1]
    vals = [theta_direct(p, lam, n, derivative=derivative) for n in orders]
    vals = [np.array(v) if derivative else v for v in vals]
    s = p.kappa + 0.5
    for i in range(len(orders) - 1):
        f = 2.0 ** (s + i)
        vals = [(f * vals[m + 1] - vals[m]) / (f - 1) for m in range(len(vals) - 1)]
    return tuple(vals[-1]) if derivative else vals[-1]


def newton_polish(f_df, x0: float, lo: float, hi: float, tol: float, max_iter: int = 50) -> float:
    """Newton iteration kept inside ``[lo, hi]``; returns the input if a step leaves it."""
    x = x0
    for _ in range(max_iter):
        f, df = f_df(x)
        if df == 0 or not np.isfinite(df):
            return x
        step = f / df
        x_new = x - step
        if not lo <= x_new <= hi:
            return x
        x = x_new
        if abs(step) <= tol * max(1.0, abs(x)):
            break
    return float(x)


def _track_theta(p: ModelParams, j: int, N: int, tol: float, start, accelerate: bool):
    fn = theta_accelerated if accelerate else theta_direct
    m0, n0, lam = start
    if (m0, n0) == (p.mu, p.nu):
        path = [(p.mu, p.nu)]
    else:
        path = continuation_path(p.mu, p.nu, start=(m0, n0))
    for mu_i, nu_i in path:
        q = p.with_point(mu_i, nu_i)
        lo, hi = _track_window(q, j, lam)
        if q.radius < 0.5:
            # finite-N zeros can sit outside the interval; pad by half the gap to the neighbours
            pad = 0.5 * (0.5 - q.radius)
            lo, hi = lo - pad, hi + pad
        root = track_real_zero(lambda x, q=q: fn(q, x, N), lo, hi, lam, tol=1e-15)
        lam = newton_polish(lambda x, q=q: fn(q, x, N, derivative=True), root, lo, hi, tol)
    return float(lam)


def eigenvalue_theta(
    p: ModelParams, j: int, tol: float = DEFAULT_TOL, start=None, accelerate: bool | None = None
) -> EigenvalueEstimate:
    """Eigenvalue from the zeros of ``Theta_N``, doubling ``N`` from 16 to 256
    until the tracked zero moves by less than ``tol``.

    When ``kappa + 1/2`` is not an integer the zeros are tracked on the
    Richardson-extrapolated sequence (see :func:`theta_accelerated`) unless
    ``accelerate=False``. If the zero has not settled at the cap, the
    estimate is flagged and both of the last two values are reported in
    ``diagnostics``.
    """
    j = check_index(j)
    if accelerate is None:
        accelerate = needs_acceleration(p)
    if start is None:
        start = (0.0, 0.0, base_eigenvalue(p.kappa, j))
    history = []
    N = N_FIRST
    while N <= N_CAP:
        try:
            history.append((N, _track_theta(p, j, N, tol, start, accelerate)))
        except TrackingError:
            if N >= N_CAP:
                raise
            N *= 2
            continue
        if len(history) >= 2 and abs(history[-1][1] - history[-2][1]) < tol:
            break
        N *= 2
    N_used, lam = history[-1]
    flagged = not (len(history) >= 2 and abs(history[-1][1] - history[-2][1]) < tol)
    diag = {"history": [v for _, v in history], "accelerated": accelerate}
    if flagged and len(history) >= 2:
        diag["previous"] = history[-2][1]
    return EigenvalueEstimate(
        value=lam,
        j=j,
        method="theta",
        order=N_used,
        residual=float(abs((theta_accelerated if accelerate else theta_direct)(p, lam, N_used))),
        flagged=flagged,
        diagnostics=diag,
    )
