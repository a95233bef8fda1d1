"""Two-variable power series of an eigenvalue branch.

With ``alpha = nu - mu`` and ``beta = nu + mu`` the eigenvalue
``lambda_j(kappa; mu, nu)`` has an expansion ``sum c[m, n] alpha^m beta^n``
whose coefficients follow from the eigenvalue PDE by comparing powers.

For rational ``kappa`` the recurrence prefactor ``(m+n) + 2 c0 (m-n)``
vanishes on a ray of index pairs. Those coefficients are recovered by also
expanding in ``kappa``: ``c[l, m, n]`` is the coefficient of
``eps^l alpha^m beta^n`` of the branch at ``kappa + eps``, and the
relation at level ``l`` determines the resonant coefficient of level
``l - 1``.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConsistencyError, DomainError, ResonanceError
from .model import base_eigenvalue, check_index

RESONANCE_TOL = 1e-9


@dataclass(frozen=True)
class CoefficientTable:
    """Coefficients ``levels[l, m, n]`` for ``l <= max_order`` and ``m + n <= max_order``.

    Entries outside the computed range are NaN. ``c`` is the level-0 slice,
    the expansion at fixed ``kappa``. ``resonant`` lists the index pairs
    whose prefactor vanished.
    """

    kappa: float
    j: int
    max_order: int
    levels: np.ndarray
    resonant: tuple = field(default_factory=tuple)

    @property
    def c(self) -> np.ndarray:
        out = np.where(np.isnan(self.levels[0]), 0.0, self.levels[0])
        return out

    @property
    def c0(self) -> float:
        return float(self.levels[0, 0, 0])

    def coefficient(self, m: int, n: int, level: int = 0) -> float:
        if m < 0 or n < 0 or m + n > self.max_order or level > self.max_order:
            raise IndexError(f"({level}, {m}, {n}) outside the table")
        return float(self.levels[level, m, n])

    def to_csv(self) -> str:
        """Rows ``l, m, n, value`` with six significant figures; exact zeros print as ``0.00000``."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["l", "m", "n", "value"])
        L = self.max_order
        for l in range(L + 1):
            for total in range(L + 1):
                for m in range(total + 1):
                    v = self.levels[l, m, total - m]
                    if np.isnan(v):
                        continue
                    w.writerow([l, m, total - m, format_coefficient(v)])
        return buf.getvalue()

    def to_json(self) -> str:
        levels = [[[None if np.isnan(x) else float(x) for x in row] for row in lvl] for lvl in self.levels]
        return json.dumps(
            {
                "kappa": self.kappa,
                "j": self.j,
                "max_order": self.max_order,
                "resonant": [list(p) for p in self.resonant],
                "levels": levels,
            },
            sort_keys=True,
        )


def format_coefficient(v: float, zero_tol: float = 1e-14) -> str:
    if abs(v) < zero_tol:
        return "0.00000"
    return f"{v:.5e}"


def prefactor(c0: float, m: int, n: int) -> float:
    return (m + n) + 2 * c0 * (m - n)


def _conv(levels: np.ndarray, l: int, m: int, n: int, exclude=()) -> float:
    """``sum c[t, r, s] c[l - t, m - r, n - s]`` over ``0 < t + r + s < l + m + n``."""
    total = 0.0
    top = l + m + n
    for t in range(l + 1):
        for r in range(m + 1):
            for s in range(n + 1):
                k = t + r + s
                if k == 0 or k == top or (t, r, s) in exclude:
                    continue
                a = levels[t, r, s]
                if a == 0.0:
                    continue
                total += a * levels[l - t, m - r, n - s]
    return total


def series_coefficients(kappa: float, j: int, max_order: int) -> CoefficientTable:
    """Build the coefficient table up to total order ``max_order`` in ``(alpha, beta)``.

    Order ``m + n = N`` is computed at levels ``0 .. max_order - N``. A
    resonant coefficient at level ``l`` uses level ``l + 1`` data of lower
    total order, which the budget always provides.
    """
    if kappa < 0.5:
        raise DomainError(f"kappa must be >= 1/2, got {kappa}")
    j = check_index(j)
    if max_order < 0:
        raise DomainError("max_order must be non-negative")
    L = max_order
    sg = 1.0 if j > 0 else -1.0
    c0 = base_eigenvalue(kappa, j)
    lv = np.full((L + 1, L + 1, L + 1), np.nan)
    resonant = []

    def seed(l, m, n, value):
        if l + m + n <= L and m + n <= L and l <= L - (m + n):
            lv[l, m, n] = value

    # closed-form low orders
    seed(0, 0, 0, c0)
    seed(1, 0, 0, sg)
    for l in range(2, L + 1):
        lv[l, 0, 0] = 0.0
    p, q = 2 * c0 + 1, 2 * c0 - 1
    seed(0, 1, 0, kappa / p)
    seed(0, 0, 1, kappa / q)
    seed(0, 2, 0, (p**2 - 4 * kappa**2) / (4 * p**3))
    seed(0, 1, 1, 0.0)
    seed(0, 0, 2, (q**2 - 4 * kappa**2) / (4 * q**3))
    seed(1, 1, 0, (p - 2 * sg * kappa) / p**2)
    seed(1, 0, 1, (q - 2 * sg * kappa) / q**2)

    for N in range(1, L + 1):
        for m in range(N + 1):
            n = N - m
            pre = prefactor(c0, m, n)
            is_res = abs(pre) < RESONANCE_TOL
            if is_res:
                resonant.append((m, n))
            for l in range(L - N + 1):
                if l + m + n <= 2:
                    continue
                if not is_res:
                    lv[l, m, n] = (n - m) / pre * _conv(lv, l, m, n)
                    continue
                if l + 1 > L - (N - 1):
                    raise ResonanceError(f"resonant pair ({m}, {n}) needs level {l + 1}, beyond the budget")
                excl = {(1, 0, 0), (l, m, n)}
                val = -sg / 2 * _conv(lv, l + 1, m, n, exclude=excl)
                if not np.isfinite(val):
                    raise ResonanceError(f"resonant pair ({m}, {n}) at level {l} depends on missing coefficients")
                lv[l, m, n] = val
    for N in range(L + 1):
        for m in range(N + 1):
            if not np.all(np.isfinite(lv[: L - N + 1, m, N - m])):
                raise ResonanceError(f"coefficient ({m}, {N - m}) could not be determined")
    return CoefficientTable(kappa=float(kappa), j=j, max_order=L, levels=lv, resonant=tuple(resonant))


@dataclass
class SeriesValue:
    value: float | np.ndarray
    tail: float | np.ndarray

    def __float__(self):
        return float(self.value)


def series_eval(table: CoefficientTable, alpha, beta) -> SeriesValue:
    """Truncated sum evaluated antidiagonal by antidiagonal.

    ``tail`` is the magnitude of the last antidiagonal, an indicator of the
    truncation error.
    """
    alpha = np.asarray(alpha, dtype=float)
    beta = np.asarray(beta, dtype=float)
    c = table.c
    total = np.zeros(np.broadcast(alpha, beta).shape)
    last = total
    for N in range(table.max_order + 1):
        diag = sum(c[m, N - m] * alpha**m * beta ** (N - m) for m in range(N + 1))
        total = total + diag
        last = np.abs(diag)
    if total.ndim == 0:
        return SeriesValue(float(total), float(last))
    return SeriesValue(total, last)


def series_eval_munu(table: CoefficientTable, mu, nu) -> SeriesValue:
    return series_eval(table, np.asarray(nu) - np.asarray(mu), np.asarray(nu) + np.asarray(mu))


def series_gradient(table: CoefficientTable, alpha: float, beta: float):
    """Exact partial derivatives of the truncated series in ``alpha`` and ``beta``."""
    c = table.c
    da = db = 0.0
    for N in range(1, table.max_order + 1):
        for m in range(N + 1):
            n = N - m
            if m:
                da += m * c[m, n] * alpha ** (m - 1) * beta**n
            if n:
                db += n * c[m, n] * alpha**m * beta ** (n - 1)
    return da, db


def pde_series_residual(table: CoefficientTable, alpha: float, beta: float) -> float:
    """Residual of ``alpha (L_a + (L^2)_a) + beta (L_b - (L^2)_b) = kappa (alpha - beta) + (alpha^2 - beta^2)/2``
    for the truncated series ``L``."""
    lam = series_eval(table, alpha, beta).value
    da, db = series_gradient(table, alpha, beta)
    lhs = alpha * (da + 2 * lam * da) + beta * (db - 2 * lam * db)
    rhs = table.kappa * (alpha - beta) + 0.5 * (alpha**2 - beta**2)
    return float(lhs - rhs)


def convert_to_munu(table: CoefficientTable, check_bound: bool = True) -> np.ndarray:
    """Coefficients ``lam[m, n]`` of ``mu^m nu^n`` from ``alpha = nu - mu``, ``beta = nu + mu``.

    Raises :class:`ConsistencyError` if ``|lam[m, n]| > (|kappa| + |j|) 2^(m+n)``.
    """
    L = table.max_order
    c = table.c
    out = np.zeros((L + 1, L + 1))
    for a in range(L + 1):
        for b in range(L + 1 - a):
            cab = c[a, b]
            if cab == 0.0:
                continue
            # (nu - mu)^a (nu + mu)^b
            for i in range(a + 1):
                ci = math.comb(a, i) * (-1) ** i
                for k in range(b + 1):
                    out[i + k, a + b - i - k] += cab * ci * math.comb(b, k)
    if check_bound:
        bound = abs(table.kappa) + abs(table.j)
        for m in range(L + 1):
            for n in range(L + 1 - m):
                if abs(out[m, n]) > bound * 2 ** (m + n) * (1 + 1e-12):
                    raise ConsistencyError(
                        f"coefficient bound violated at ({m}, {n}): |{out[m, n]:.6g}| > {bound * 2 ** (m + n):.6g}"
                    )
    return out
