"""Monodromy eigenvalues for half-integer ``kappa = k - 1/2``.

A monodromy eigenvalue is a ``lam`` for which the transformed system has a
solution ``p(x) exp(2 t x)`` with a polynomial ``p``. Writing out the
coefficient equations of ``p`` gives a ``(2k+1) x (2k+1)`` matrix ``Gamma``
whose entries are affine in ``Lam = lam - mu``; its determinant is a
polynomial of degree ``2k - 1`` that does not depend on the sign of
``t = sqrt(nu^2 - mu^2)``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConsistencyError, DomainError
from .numerics import Polynomial, poly_roots

T_AGREEMENT = 1e-10


def half_integer_k(kappa: float) -> int:
    k = kappa + 0.5
    if k < 1 or abs(k - round(k)) > 1e-12:
        raise DomainError(f"kappa must be a half-integer k - 1/2 with k >= 1, got {kappa}")
    return int(round(k))


def _affine(c0=0.0, c1=0.0) -> Polynomial:
    return Polynomial([c0, c1])


def _blank(n: int):
    z = Polynomial([])
    return [[z for _ in range(n)] for _ in range(n)]


def _put(G, row: int, col: int, block):
    for i in range(2):
        for j in range(2):
            G[row + i][col + j] = block[i][j]


def _blocks(k: int, mu: float, nu: float, t):
    L = Polynomial.identity()
    c = Polynomial.constant
    B0 = lambda n: [[c(-n), -L], [c(0.0), c(k - n)]]  # noqa: E731  B0t - n I
    Ct = [[c(-2 * nu - 2 * t), c(-2 * mu)], [c(2 * mu), c(2 * nu - 2 * t)]]
    St = lambda n: [  # noqa: E731  C - B0t - B1t + n I
        [c(-2 * nu - 2 * t - k + n), L - 2 * mu],
        [L + 2 * mu, c(2 * nu - 2 * t - k + n)],
    ]
    return B0, Ct, St


def gamma_matrix(k: int, mu: float, nu: float, t) -> list:
    """The reduced matrix ``Gamma`` (row-reduced form) as nested lists of
    :class:`Polynomial` in ``Lam``."""
    if k < 1:
        raise DomainError("k must be a positive integer")
    L = Polynomial.identity()
    c = Polynomial.constant
    n = 2 * k + 1
    G = _blank(n)
    if k == 1:
        G[0][1] = c(1.0)
        G[1][0], G[1][1], G[1][2] = c(-1.0), L, c(-1.0)
        G[2][0], G[2][1], G[2][2] = c(-2 * mu), c(2 * t - 2 * nu), L
        return G
    Q = [[c(-k), c(0.0)], [c(0.0), c(0.0)]]
    mR = [[c(-k), c(0.0)], [c(-2 * mu), c(2 * t - 2 * nu)]]
    S = lambda m: [  # noqa: E731
        [c(-2 * nu - 2 * t - k), c(-2 * mu)],
        [L + 2 * mu, c(2 * nu - 2 * t + m - k)],
    ]
    G[0][1] = c(float(k))
    for i in range(1, k):
        r = 2 * i - 1
        _put(G, r, 2 * (i - 1), S(i - 1))
        _put(G, r, 2 * i, [[c(-i), -L], [c(0.0), c(k - i)]])
        if i >= 2:
            _put(G, r, 2 * (i - 2), mR)
        for col in range(i - 2):
            _put(G, r, 2 * col, Q)
    r = 2 * k - 1
    _put(G, r, 2 * (k - 1), mR)
    for col in range(k - 1):
        _put(G, r, 2 * col, Q)
    G[r][2 * k] = c(-k)
    G[r + 1][2 * k] = L
    return G


def gamma_hat_matrix(k: int, mu: float, nu: float, t) -> list:
    """The matrix of the coefficient equations before row reduction, with
    the last row and column removed. Same determinant as :func:`gamma_matrix`."""
    if k < 1:
        raise DomainError("k must be a positive integer")
    L = Polynomial.identity()
    c = Polynomial.constant
    B0, Ct, St = _blocks(k, mu, nu, t)
    size = 2 * k + 2
    G = _blank(size)
    G[0][1] = c(float(k))
    for nn in range(1, k):
        r = 2 * nn - 1
        _put(G, r, 2 * (nn - 1), St(nn - 1))
        _put(G, r, 2 * nn, B0(nn))
        if nn >= 2:
            _put(G, r, 2 * (nn - 2), [[-e for e in row] for row in Ct])
    r = 2 * k - 1
    if k >= 2:
        G[r][2 * (k - 2)], G[r][2 * (k - 2) + 1] = c(2 * nu + 2 * t), c(2 * mu)
    G[r][2 * (k - 1)], G[r][2 * (k - 1) + 1] = c(-1.0), L
    G[r][2 * k] = c(-k)
    G[r + 1][2 * (k - 1)], G[r + 1][2 * (k - 1) + 1] = c(-2 * mu), c(2 * t - 2 * nu)
    G[r + 1][2 * k] = L
    G[r + 2][2 * k] = c(-2 * mu)
    G[r + 2][2 * k + 1] = c(2 * t - 2 * nu)
    return [row[:-1] for row in G[:-1]]


def det_cofactor(M: list) -> Polynomial:
    """Laplace expansion along rows with memoization over column subsets."""
    n = len(M)
    memo = {}

    def rec(row: int, cols: int) -> Polynomial:
        if row == n:
            return Polynomial([1.0])
        key = (row, cols)
        if key in memo:
            return memo[key]
        acc = Polynomial([])
        sign = 1.0
        for j in range(n):
            if cols & (1 << j):
                continue
            e = M[row][j]
            if not e.is_zero:
                acc = acc + sign * e * rec(row + 1, cols | (1 << j))
            sign = -sign
        memo[key] = acc
        return acc

    return rec(0, 0)


def det_bareiss(M: list) -> Polynomial:
    """Fraction-free Gaussian elimination over polynomials with row pivoting."""
    A = [list(row) for row in M]
    n = len(A)
    sign = 1.0
    prev = Polynomial([1.0])
    for k in range(n - 1):
        if A[k][k].is_zero:
            swap = next((i for i in range(k + 1, n) if not A[i][k].is_zero), None)
            if swap is None:
                return Polynomial([])
            A[k], A[swap] = A[swap], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = A[i][j] * A[k][k] - A[i][k] * A[k][j]
                q, _ = num.divmod(prev)
                A[i][j] = q
        prev = A[k][k]
    return sign * A[n - 1][n - 1]


def evaluate_matrix(M: list, lam_value) -> np.ndarray:
    return np.array([[e(lam_value) for e in row] for row in M], dtype=complex)


def gamma_determinant(k: int, mu: float, nu: float, t, method: str = "auto", form: str = "reduced") -> Polynomial:
    M = gamma_matrix(k, mu, nu, t) if form == "reduced" else gamma_hat_matrix(k, mu, nu, t)
    if method == "auto":
        method = "cofactor" if k <= 3 else "bareiss"
    if method == "cofactor":
        return det_cofactor(M)
    if method == "bareiss":
        return det_bareiss(M)
    raise ValueError(f"unknown determinant method {method!r}")


@dataclass(frozen=True)
class MonodromyPolynomial:
    """``P(kappa; lam; mu, nu)`` normalized to leading coefficient ``+k^2``.

    ``sign`` is the factor applied to ``det Gamma`` to reach that
    normalization.
    """

    kappa: float
    k: int
    mu: float
    nu: float
    poly: Polynomial
    sign: int
    t_mismatch: float

    @property
    def coefficients(self) -> np.ndarray:
        c = self.poly.coeffs
        return c.real.copy() if np.all(np.abs(c.imag) <= 1e-12 * (1 + np.abs(c))) else c.copy()

    def __call__(self, lam):
        return self.poly(lam)

    def roots(self, tol: float = 1e-12) -> np.ndarray:
        return poly_roots(self.poly, tol)

    def to_dict(self, tol: float = 1e-12) -> dict:
        roots = self.roots(tol)
        coeffs = self.coefficients
        return {
            "kappa": self.kappa,
            "k": self.k,
            "mu": self.mu,
            "nu": self.nu,
            "coefficients": [_jsonable(x) for x in coeffs],
            "roots": [_jsonable(r) for r in roots],
        }

    def to_json(self, tol: float = 1e-12) -> str:
        return json.dumps(self.to_dict(tol), sort_keys=True)


def _jsonable(z, imag_tol: float = 1e-10):
    z = complex(z)
    if abs(z.imag) <= imag_tol * (1 + abs(z)):
        return z.real
    return [z.real, z.imag]


def monodromy_polynomial(kappa: float, mu: float, nu: float, method: str = "auto") -> MonodromyPolynomial:
    """Build ``P`` from ``det Gamma`` at ``+t`` and ``-t`` and check that they agree."""
    k = half_integer_k(kappa)
    t = complex(np.sqrt(complex(nu * nu - mu * mu)))
    d_plus = gamma_determinant(k, mu, nu, t, method)
    d_minus = gamma_determinant(k, mu, nu, -t, method)
    n = max(d_plus.coeffs.size, d_minus.coeffs.size)
    a = np.zeros(n, dtype=complex)
    b = np.zeros(n, dtype=complex)
    a[: d_plus.coeffs.size] = d_plus.coeffs
    b[: d_minus.coeffs.size] = d_minus.coeffs
    scale = max(np.abs(a).max(initial=0.0), np.abs(b).max(initial=0.0), 1e-300)
    mismatch = float(np.abs(a - b).max(initial=0.0) / scale)
    if mismatch > T_AGREEMENT:
        raise ConsistencyError(f"determinants at +t and -t differ (relative {mismatch:.3e})")
    P = (0.5 * (d_plus + d_minus)).compose(Polynomial([-mu, 1.0]))
    if P.degree != 2 * k - 1:
        raise ConsistencyError(f"expected degree {2 * k - 1}, got {P.degree}")
    lead = P.leading
    if abs(abs(lead) - k * k) > 1e-9 * k * k:
        raise ConsistencyError(f"leading coefficient {lead} has magnitude other than {k * k}")
    sign = 1 if lead.real > 0 else -1
    return MonodromyPolynomial(
        kappa=float(kappa), k=k, mu=float(mu), nu=float(nu), poly=sign * P, sign=sign, t_mismatch=mismatch
    )


def monodromy_eigenvalues(kappa: float, mu: float, nu: float, tol: float = 1e-12) -> np.ndarray:
    """All zeros of ``P`` sorted by real then imaginary part."""
    return monodromy_polynomial(kappa, mu, nu).roots(tol)


def monodromy_eigenvalue(kappa: float, j: int, mu: float, nu: float, step: float = 0.05) -> complex:
    """Branch ``lambda_0^j`` with limit ``j`` at the origin, ``|j| <= k - 1``,
    tracked along the segment from ``(0, 0)`` by nearest-root continuation."""
    k = half_integer_k(kappa)
    if abs(j) > k - 1 or int(j) != j:
        raise DomainError(f"monodromy branch index must satisfy |j| <= {k - 1}")
    lam = complex(j)
    n_steps = max(1, math.ceil(max(abs(mu), abs(nu)) / step))
    for s in np.linspace(0.0, 1.0, n_steps + 1)[1:]:
        roots = monodromy_eigenvalues(kappa, s * mu, s * nu)
        dist = np.abs(roots - lam)
        order = np.argsort(dist)
        if roots.size > 1 and dist[order[1]] < 2 * dist[order[0]] + 1e-12 and dist[order[0]] > 1e-8:
            raise ConsistencyError("monodromy branches too close to track; reduce step")
        lam = roots[order[0]]
    return lam
