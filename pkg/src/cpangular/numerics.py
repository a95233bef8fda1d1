"""Numerics kernel: dense polynomials, simultaneous root finding, adaptive
Runge-Kutta integration, finite differences and quadrature.

Everything here is independent of the angular problem and is reused by the
solver modules.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import integrate, optimize

from .errors import BracketError, ConvergenceError, DomainError, StepSizeError

DEFAULT_ZERO_RTOL = 1e-14


# POLYNOMIALS ==========================================================================


def _trim(coeffs: np.ndarray, scale=None, rtol: float = DEFAULT_ZERO_RTOL) -> np.ndarray:
    """Drop trailing coefficients that are exactly zero or, given the
    magnitudes ``scale`` of the terms that produced them, cancellation noise
    below ``rtol * scale``."""
    mags = np.abs(coeffs)
    keep = mags > 0 if scale is None else mags > rtol * scale
    nz = np.nonzero(keep)[0]
    if nz.size == 0:
        return coeffs[:0]
    return coeffs[: nz[-1] + 1]


@dataclass(frozen=True, eq=False)
class Polynomial:
    """Dense polynomial in one variable with complex coefficients.

    ``coeffs[n]`` is the coefficient of ``z**n``. Trailing zeros are dropped
    on construction, so the zero polynomial has an empty coefficient array
    and degree -1. Sums and remainders also drop trailing coefficients that
    are pure cancellation noise (below ``zero_rtol`` times the magnitude of
    the cancelling terms).
    """

    coeffs: np.ndarray
    zero_rtol: float = DEFAULT_ZERO_RTOL

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex).ravel()
        c = _trim(c)
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    # construction helpers
    @classmethod
    def constant(cls, value) -> "Polynomial":
        return cls([value])

    @classmethod
    def identity(cls) -> "Polynomial":
        return cls([0.0, 1.0])

    @classmethod
    def from_roots(cls, roots: Sequence[complex], leading=1.0) -> "Polynomial":
        p = cls([leading])
        for r in roots:
            p = p * cls([-r, 1.0])
        return p

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    @property
    def is_zero(self) -> bool:
        return self.coeffs.size == 0

    @property
    def leading(self) -> complex:
        return self.coeffs[-1] if self.coeffs.size else 0j

    def __call__(self, z):
        return horner(self.coeffs, z)

    eval = __call__

    def magnitude_bound(self, z):
        """Horner evaluation of ``sum |c_n| |z|^n``, used to scale residuals."""
        return horner(np.abs(self.coeffs), np.abs(z)).real

    def derivative(self) -> "Polynomial":
        if self.degree < 1:
            return Polynomial([])
        n = np.arange(1, self.coeffs.size)
        return Polynomial(self.coeffs[1:] * n, self.zero_rtol)

    def compose(self, inner: "Polynomial") -> "Polynomial":
        """Return ``self(inner(z))``."""
        out = Polynomial([])
        for c in self.coeffs[::-1]:
            out = out * inner + c
        return out

    def divmod(self, divisor: "Polynomial"):
        if divisor.is_zero:
            raise ZeroDivisionError("polynomial division by zero")
        num = self.coeffs.copy()
        dd = divisor.degree
        if self.degree < dd:
            return Polynomial([]), self
        q = np.zeros(self.degree - dd + 1, dtype=complex)
        lead = divisor.coeffs[-1]
        for k in range(q.size - 1, -1, -1):
            q[k] = num[k + dd] / lead
            num[k : k + dd + 1] -= q[k] * divisor.coeffs
        scale = np.convolve(np.abs(q), np.abs(divisor.coeffs))[:dd] + np.abs(self.coeffs[:dd])
        rem = _trim(num[:dd], scale, self.zero_rtol)
        return Polynomial(q, self.zero_rtol), Polynomial(rem, self.zero_rtol)

    @property
    def real(self) -> np.ndarray:
        return self.coeffs.real.copy()

    # arithmetic
    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            return other
        return Polynomial([other])

    def __add__(self, other):
        other = self._coerce(other)
        n = max(self.coeffs.size, other.coeffs.size)
        c = np.zeros(n, dtype=complex)
        scale = np.zeros(n)
        c[: self.coeffs.size] += self.coeffs
        c[: other.coeffs.size] += other.coeffs
        scale[: self.coeffs.size] += np.abs(self.coeffs)
        scale[: other.coeffs.size] += np.abs(other.coeffs)
        return Polynomial(_trim(c, scale, self.zero_rtol), self.zero_rtol)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(-self.coeffs, self.zero_rtol)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, Polynomial):
            if self.is_zero or other.is_zero:
                return Polynomial([])
            return Polynomial(np.convolve(self.coeffs, other.coeffs), self.zero_rtol)
        return Polynomial(self.coeffs * complex(other), self.zero_rtol)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return Polynomial(self.coeffs / complex(scalar), self.zero_rtol)

    def __repr__(self):
        return f"Polynomial(degree={self.degree}, coeffs={np.array2string(self.coeffs, precision=6)})"


def horner(coeffs: np.ndarray, z):
    """Evaluate ``sum coeffs[n] z**n`` by Horner's rule (scalar or array ``z``)."""
    z = np.asarray(z)
    acc = np.zeros(z.shape, dtype=np.result_type(coeffs.dtype, z.dtype, float))
    for c in coeffs[::-1]:
        acc = acc * z + c
    return acc[()] if acc.ndim == 0 else acc


def poly_arith(a: Polynomial, b, kind: str) -> Polynomial:
    """Dispatch ``add``, ``sub``, ``mul`` or ``scale`` (``b`` a scalar for the latter)."""
    if kind == "add":
        return a + b
    if kind == "sub":
        return a - b
    if kind == "mul":
        return a * b
    if kind == "scale":
        return a * complex(b)
    raise ValueError(f"unknown polynomial operation {kind!r}")


# ROOT FINDING =========================================================================


def _initial_guesses(c: np.ndarray) -> np.ndarray:
    # radii from the upper convex hull of (k, log|c_k|) (Newton polygon)
    n = c.size - 1
    with np.errstate(divide="ignore"):
        logs = np.log(np.abs(c))
    pts = [k for k in range(n + 1) if np.isfinite(logs[k])]
    hull: list[int] = []
    for k in pts:
        while len(hull) >= 2:
            i, j = hull[-2], hull[-1]
            if (logs[j] - logs[i]) * (k - i) <= (logs[k] - logs[i]) * (j - i):
                hull.pop()
            else:
                break
        hull.append(k)
    z = np.empty(n, dtype=complex)
    for a, b in zip(hull[:-1], hull[1:]):
        r = math.exp((logs[a] - logs[b]) / (b - a))
        m = b - a
        ang = 2 * np.pi * np.arange(m) / m + 2 * np.pi * a / n + 0.4
        z[a:b] = r * np.exp(1j * ang)
    return z


_TINY = 1e3 * np.finfo(float).tiny


def poly_roots(p: Polynomial, tol: float = 1e-12, max_iter: int = 1000) -> np.ndarray:
    """All roots of ``p`` by Aberth-Ehrlich simultaneous iteration.

    Multiple roots appear repeated. Each root ``r`` satisfies
    ``|p(r)| <= tol * sum|c_n||r|^n`` (up to an absolute floor near the
    smallest normal float). Roots are sorted by real part, then
    imaginary part.
    """
    if p.degree < 1:
        raise DomainError("non-polynomial input")
    c = p.coeffs
    dc = p.derivative().coeffs
    absc = np.abs(c)
    z = _initial_guesses(c)
    n = z.size
    done = np.zeros(n, dtype=bool)
    for _ in range(max_iter):
        pv = horner(c, z)
        scale = horner(absc, np.abs(z)).real
        # the floor covers roots so small that the relative test hits subnormal granularity
        done = np.abs(pv) <= tol * scale + _TINY
        if done.all():
            break
        dpv = horner(dc, z)
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, 1.0)
        s = (1.0 / diff).sum(axis=1) - 1.0
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = pv / dpv
            step = ratio / (1.0 - ratio * s)
        step = np.where(np.isfinite(step), step, 1e-3 * (1 + np.abs(z)))
        z = np.where(done, z, z - step)
    else:
        raise ConvergenceError("Aberth iteration did not converge", best=_sort_roots(z))
    # one Newton polish per root; keep it only if it lowers the residual
    dpv = horner(dc, z)
    with np.errstate(divide="ignore", invalid="ignore"):
        z2 = z - horner(c, z) / dpv
    better = np.isfinite(z2) & (np.abs(horner(c, z2)) < np.abs(horner(c, z)))
    z = np.where(better, z2, z)
    return _sort_roots(z)


def _sort_roots(z: np.ndarray) -> np.ndarray:
    order = np.lexsort((z.imag, z.real))
    return z[order]


def real_roots(roots: np.ndarray, imag_tol: float = 1e-9) -> np.ndarray:
    """Real parts of the roots whose imaginary part is below ``imag_tol * (1 + |r|)``."""
    roots = np.asarray(roots)
    keep = np.abs(roots.imag) <= imag_tol * (1 + np.abs(roots))
    return np.sort(roots[keep].real)


def find_real_root(f: Callable[[float], float], bracket, tol: float = 1e-14) -> float:
    """Root of a real function inside a sign-change bracket (Brent's method)."""
    a, b = float(bracket[0]), float(bracket[1])
    fa, fb = float(f(a)), float(f(b))
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if not (np.isfinite(fa) and np.isfinite(fb)) or fa * fb > 0:
        raise BracketError("bracket invalid")
    return optimize.brentq(f, a, b, xtol=tol, rtol=4 * np.finfo(float).eps, maxiter=500)


# ODE INTEGRATION ======================================================================

# Dormand-Prince 5(4) tableau
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
_E = _B5 - _B4


@dataclass
class Trajectory:
    """Accepted steps of an adaptive integration plus cubic Hermite dense output."""

    t: np.ndarray
    y: np.ndarray
    f: np.ndarray
    n_rejected: int = 0
    t_samples: np.ndarray | None = None
    y_samples: np.ndarray | None = None

    @property
    def t_final(self) -> float:
        return float(self.t[-1])

    @property
    def y_final(self) -> np.ndarray:
        return self.y[-1]

    def __call__(self, ts):
        """Cubic Hermite interpolation at ``ts`` (scalar or array)."""
        ts_arr = np.atleast_1d(np.asarray(ts, dtype=float))
        forward = self.t[-1] >= self.t[0]
        grid = self.t if forward else self.t[::-1]
        lo, hi = grid[0], grid[-1]
        if np.any(ts_arr < lo - 1e-12 * max(1.0, abs(lo))) or np.any(ts_arr > hi + 1e-12 * max(1.0, abs(hi))):
            raise DomainError("sample point outside the integrated interval")
        idx = np.clip(np.searchsorted(grid, ts_arr) - 1, 0, grid.size - 2)
        if not forward:
            idx = self.t.size - 2 - idx
        t0, t1 = self.t[idx], self.t[idx + 1]
        y0, y1 = self.y[idx], self.y[idx + 1]
        f0, f1 = self.f[idx], self.f[idx + 1]
        h = (t1 - t0)[:, None]
        s = ((ts_arr - t0) / (t1 - t0))[:, None]
        h00 = 2 * s**3 - 3 * s**2 + 1
        h10 = s**3 - 2 * s**2 + s
        h01 = -2 * s**3 + 3 * s**2
        h11 = s**3 - s**2
        out = h00 * y0 + h10 * h * f0 + h01 * y1 + h11 * h * f1
        return out[0] if np.ndim(ts) == 0 else out

    def derivative(self, ts):
        """Derivative of the Hermite interpolant at ``ts``."""
        ts_arr = np.atleast_1d(np.asarray(ts, dtype=float))
        forward = self.t[-1] >= self.t[0]
        grid = self.t if forward else self.t[::-1]
        idx = np.clip(np.searchsorted(grid, ts_arr) - 1, 0, grid.size - 2)
        if not forward:
            idx = self.t.size - 2 - idx
        t0, t1 = self.t[idx], self.t[idx + 1]
        y0, y1 = self.y[idx], self.y[idx + 1]
        f0, f1 = self.f[idx], self.f[idx + 1]
        h = (t1 - t0)[:, None]
        s = ((ts_arr - t0) / (t1 - t0))[:, None]
        d00 = (6 * s**2 - 6 * s) / h
        d10 = 3 * s**2 - 4 * s + 1
        d01 = (-6 * s**2 + 6 * s) / h
        d11 = 3 * s**2 - 2 * s
        out = d00 * y0 + d10 * f0 + d01 * y1 + d11 * f1
        return out[0] if np.ndim(ts) == 0 else out


def _initial_step(field, t0, y0, f0, direction, tol):
    scale = tol * (1 + np.abs(y0))
    d0 = np.max(np.abs(y0) / scale)
    d1 = np.max(np.abs(f0) / scale)
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    y1 = y0 + direction * h0 * f0
    f1 = np.asarray(field(t0 + direction * h0, y1))
    d2 = np.max(np.abs(f1 - f0) / scale) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** (1 / 5)
    return min(100 * h0, h1)


def ode_integrate(
    field: Callable,
    t0: float,
    y0,
    t1: float,
    tol: float = 1e-10,
    samples=None,
    max_steps: int = 200_000,
    h_max: float | None = None,
) -> Trajectory:
    """Integrate ``y' = field(t, y)`` from ``t0`` to ``t1`` with Dormand-Prince 5(4).

    The local error estimate of every accepted step satisfies
    ``|err_i| <= tol * (1 + max(|y_i|, |y_new_i|))``. ``samples``, if given, are
    interpolated by cubic Hermite polynomials on the accepted steps.

    Raises :class:`StepSizeError` carrying the last accepted state when the
    step size underflows (a singularity of the field, for instance).
    """
    if t0 == t1:
        raise DomainError("t0 and t1 must differ")
    y = np.array(y0, dtype=np.result_type(np.asarray(y0).dtype, float)).ravel()
    direction = 1.0 if t1 > t0 else -1.0
    span = abs(t1 - t0)
    h_max = span if h_max is None else h_max
    t = float(t0)
    f = np.asarray(field(t, y), dtype=y.dtype)
    if not np.all(np.isfinite(f)):
        raise StepSizeError("field not finite at the initial point", t=t, y=y.copy())
    h = min(_initial_step(field, t, y, f, direction, tol), h_max)
    ts, ys, fs = [t], [y.copy()], [f.copy()]
    # sample points become step endpoints so dense output is exact there
    stops = [] if samples is None else sorted(
        {float(s) for s in np.atleast_1d(samples) if direction * (s - t0) > 0 and direction * (t1 - s) > 0},
        reverse=direction < 0,
    )
    stops.append(float(t1))
    stop_i = 0
    k = np.empty((7, y.size), dtype=y.dtype)
    rejected = 0
    for _ in range(max_steps):
        if direction * (t1 - t) <= 0:
            break
        while direction * (stops[stop_i] - t) <= 0:
            stop_i += 1
        target = stops[stop_i]
        h_try = min(h, abs(target - t))
        hit = h_try == abs(target - t)
        if hit and target != t1 and h_try < 1e-13 * max(1.0, abs(t)):
            stop_i += 1
            continue
        if h_try < 16 * np.finfo(float).eps * max(1.0, abs(t)):
            raise StepSizeError(f"step size underflow at t={t:.6g}", t=t, y=y.copy())
        k[0] = f
        ok = True
        with np.errstate(all="ignore"):
            for i in range(1, 7):
                yi = y + direction * h_try * np.dot(_A[i], k[:i])
                k[i] = field(t + direction * _C[i] * h_try, yi)
                if not np.all(np.isfinite(k[i])):
                    ok = False
                    break
        if ok:
            y_new = y + direction * h_try * np.dot(_B5, k)
            err_vec = direction * h_try * np.dot(_E, k)
            sc = tol * (1 + np.maximum(np.abs(y), np.abs(y_new)))
            err = float(np.max(np.abs(err_vec) / sc))
        else:
            err = np.inf
        if err <= 1.0:
            t = target if hit else t + direction * h_try
            y = y_new
            f = k[6].copy()
            ts.append(t)
            ys.append(y.copy())
            fs.append(f.copy())
            fac = 5.0 if err == 0 else min(5.0, max(0.2, 0.9 * err ** (-1 / 5)))
            h = min(max(h, h_try * fac) if hit else h_try * fac, h_max)
        else:
            rejected += 1
            fac = 0.2 if not np.isfinite(err) else max(0.1, 0.9 * err ** (-1 / 5))
            h = h_try * fac
    else:
        raise StepSizeError("maximum number of steps exceeded", t=t, y=y.copy())
    traj = Trajectory(np.array(ts), np.array(ys), np.array(fs), n_rejected=rejected)
    if samples is not None:
        traj.t_samples = np.asarray(samples, dtype=float)
        traj.y_samples = traj(traj.t_samples)
    return traj


# FINITE DIFFERENCES ===================================================================


def central_gradient(f: Callable, point, h: float) -> np.ndarray:
    """Central-difference gradient of ``f(x, y)`` on the 4-point stencil."""
    x, y = point
    fxp, fxm = f(x + h, y), f(x - h, y)
    fyp, fym = f(x, y + h), f(x, y - h)
    return np.array([(fxp - fxm) / (2 * h), (fyp - fym) / (2 * h)])


@dataclass
class GradientEstimate:
    gradient: np.ndarray
    error: np.ndarray
    h: float


def finite_diff_gradient(f: Callable, point, h: float = 1e-3) -> GradientEstimate:
    """Central differences at step ``h`` with a Richardson half-step error estimate.

    The error estimate is ``4/3 |g_h - g_{h/2}|``, the leading-order error of
    ``g_h`` for a second-order stencil.
    """
    g1 = central_gradient(f, point, h)
    g2 = central_gradient(f, point, h / 2)
    return GradientEstimate(gradient=g1, error=4.0 / 3.0 * np.abs(g1 - g2), h=h)


# QUADRATURE ===========================================================================


def quadrature(f: Callable[[float], float], a: float, b: float, tol: float = 1e-12, limit: int = 200) -> float:
    """Adaptive Gauss-Kronrod quadrature (QUADPACK) with absolute error ``tol``."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        value, abserr, info, *rest = integrate.quad(f, a, b, epsabs=tol, epsrel=tol, limit=limit, full_output=1)
    if abserr > max(tol, tol * abs(value)) and rest:
        raise ConvergenceError(f"quadrature did not converge: {rest[0]}", best=value)
    return float(value)
