import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cpangular.errors import DomainError
from cpangular.model import ModelParams
from cpangular.monodromy import (
    det_bareiss,
    det_cofactor,
    evaluate_matrix,
    gamma_determinant,
    gamma_hat_matrix,
    gamma_matrix,
    half_integer_k,
    monodromy_eigenvalue,
    monodromy_eigenvalues,
    monodromy_polynomial,
)
from cpangular.numerics import Polynomial

pts = st.floats(-1.0, 1.0)


def _coeff_diff(a: Polynomial, b: Polynomial) -> float:
    n = max(a.coeffs.size, b.coeffs.size)
    x, y = np.zeros(n, complex), np.zeros(n, complex)
    x[: a.coeffs.size], y[: b.coeffs.size] = a.coeffs, b.coeffs
    return float(np.max(np.abs(x - y)) / max(np.max(np.abs(y)), 1e-300))


@given(pts, pts)
def test_kappa_half_is_linear(mu, nu):
    P = monodromy_polynomial(0.5, mu, nu)
    assert np.max(np.abs(P.poly.coeffs - np.array([mu, 1.0]))) < 1e-12


@pytest.mark.parametrize("k", [1, 2, 3, 4, 5])
def test_roots_at_origin_are_integers(k):
    roots = monodromy_eigenvalues(k - 0.5, 0.0, 0.0)
    assert np.allclose(np.sort(roots.real), np.arange(-(k - 1), k), atol=1e-10)


@given(st.integers(1, 4), pts, pts)
def test_degree_and_leading_coefficient(k, mu, nu):
    P = monodromy_polynomial(k - 0.5, mu, nu)
    assert P.poly.degree == 2 * k - 1
    assert P.poly.leading == pytest.approx(k * k)
    assert P.t_mismatch < 1e-10


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_two_matrix_forms_share_determinant(k):
    t = ModelParams(k - 0.5, 0.3, 0.1).t
    assert _coeff_diff(gamma_determinant(k, 0.3, 0.1, t, form="hat"), gamma_determinant(k, 0.3, 0.1, t)) < 1e-10


@pytest.mark.parametrize("k", [2, 3])
def test_determinant_methods_agree_with_numeric_determinant(k):
    t = ModelParams(k - 0.5, -0.2, 0.6).t
    M = gamma_matrix(k, -0.2, 0.6, t)
    a, b = det_cofactor(M), det_bareiss(M)
    assert _coeff_diff(a, b) < 1e-10
    for lam in (0.3, -1.1 + 0.5j):
        assert a(lam) == pytest.approx(np.linalg.det(evaluate_matrix(M, lam)), rel=1e-10)


def test_hat_form_is_square():
    M = gamma_hat_matrix(3, 0.1, 0.2, 0.5j)
    assert len(M) == 7 and all(len(r) == 7 for r in M)


def test_complex_roots_appear_at_kappa_three_halves():
    roots = monodromy_eigenvalues(1.5, 0.3, 0.1)
    assert np.sum(np.abs(roots.imag) > 1e-6) == 2


def test_branch_tracking_is_continuous():
    a = monodromy_eigenvalue(1.5, 1, 0.1, 0.05)
    b = monodromy_eigenvalue(1.5, 1, 0.11, 0.055)
    assert abs(a - 1) < 0.3 and abs(a - b) < 0.02


def test_non_half_integer_rejected():
    with pytest.raises(DomainError):
        half_integer_k(1.0)
    with pytest.raises(DomainError):
        monodromy_eigenvalue(1.5, 2, 0.1, 0.1)


def test_json_export_is_deterministic():
    P = monodromy_polynomial(2.5, 0.2, -0.1)
    assert P.to_json() == monodromy_polynomial(2.5, 0.2, -0.1).to_json()
