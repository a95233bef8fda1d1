import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cpangular.errors import BracketError, DomainError, StepSizeError
from cpangular.numerics import (
    Polynomial,
    central_gradient,
    find_real_root,
    finite_diff_gradient,
    ode_integrate,
    poly_roots,
    quadrature,
    real_roots,
)

coeff = st.floats(-5, 5, allow_nan=False).filter(lambda x: abs(x) > 1e-3)


# polynomials


def test_zero_polynomial_has_degree_minus_one():
    assert Polynomial([0.0, 0.0]).degree == -1
    assert Polynomial([]).is_zero


@given(st.lists(coeff, min_size=1, max_size=6), st.lists(coeff, min_size=1, max_size=6), coeff)
def test_arithmetic_matches_pointwise(a, b, x):
    p, q = Polynomial(a), Polynomial(b)
    assert (p * q)(x) == pytest.approx(p(x) * q(x), rel=1e-10, abs=1e-10)
    assert (p + q)(x) == pytest.approx(p(x) + q(x), rel=1e-12, abs=1e-12)
    assert (p - q)(x) == pytest.approx(p(x) - q(x), rel=1e-12, abs=1e-10)


@given(st.lists(coeff, min_size=2, max_size=7), st.lists(coeff, min_size=1, max_size=3))
def test_divmod_reconstructs(a, b):
    p, d = Polynomial(a), Polynomial(b)
    q, r = p.divmod(d)
    assert r.degree < d.degree or r.is_zero
    back = q * d + r
    n = max(back.coeffs.size, p.coeffs.size)
    diff = np.zeros(n, complex)
    diff[: back.coeffs.size] += back.coeffs
    diff[: p.coeffs.size] -= p.coeffs
    scale = np.sum(np.abs(q.coeffs)) * np.sum(np.abs(d.coeffs)) + np.sum(np.abs(p.coeffs))
    assert np.max(np.abs(diff)) < 1e-12 * scale


def test_compose_and_derivative():
    p = Polynomial([1.0, 2.0, 3.0])
    shifted = p.compose(Polynomial([1.0, 1.0]))  # p(x + 1)
    assert shifted(0.7) == pytest.approx(p(1.7))
    assert p.derivative()(2.0) == pytest.approx(2 + 6 * 2.0)


# roots


def test_roots_have_small_backward_error_on_ill_conditioned_input():
    # the rounded coefficients of prod (z - k) have complex roots; only the residual is meaningful
    p = Polynomial.from_roots(np.arange(1, 21, dtype=float))
    roots = poly_roots(p)
    assert roots.size == 20
    assert np.all(np.abs(p(roots)) <= 1e-12 * p.magnitude_bound(roots))


def test_roots_agree_with_companion_matrix_at_degree_20():
    rng = np.random.default_rng(3)
    true = np.exp(2j * np.pi * np.sort(rng.uniform(size=20))) * rng.uniform(0.5, 2.0, size=20)
    p = Polynomial.from_roots(true)
    ours = poly_roots(p)
    ref = np.roots(p.coeffs[::-1])
    for r in ref:
        assert np.min(np.abs(ours - r)) < 1e-9


@given(st.lists(st.floats(-3, 3, allow_nan=False), min_size=1, max_size=8))
def test_roots_reproduce_generating_set(true):
    true = np.sort(np.array(true) + 0.1 * np.arange(len(true)))  # keep them apart
    if np.min(np.diff(true), initial=1.0) < 0.05:
        return
    roots = poly_roots(Polynomial.from_roots(true))
    assert np.max(np.abs(np.sort(roots.real) - true)) < 1e-6
    assert np.max(np.abs(roots.imag)) < 1e-6


def test_roots_are_sorted_and_complex_pairs_found():
    roots = poly_roots(Polynomial([1.0, 0.0, 1.0]))
    assert roots[0] == pytest.approx(-1j)
    assert roots[1] == pytest.approx(1j)
    assert real_roots(roots).size == 0


def test_roots_reject_constants():
    with pytest.raises(DomainError, match="non-polynomial input"):
        poly_roots(Polynomial([3.0]))


def test_bracketed_root():
    assert find_real_root(math.cos, (0.0, 3.0)) == pytest.approx(math.pi / 2, abs=1e-14)
    with pytest.raises(BracketError, match="bracket invalid"):
        find_real_root(math.cos, (0.0, 1.0))


# integrator


def test_exponential_growth():
    traj = ode_integrate(lambda t, y: y, 0.0, [1.0], 1.0, tol=1e-12)
    assert traj.y_final[0] == pytest.approx(math.e, rel=1e-10)


@pytest.mark.parametrize("tol", [1e-8, 1e-10, 1e-12])
def test_samples_meet_tolerance(tol):
    ts = np.linspace(0.1, 2.9, 15)
    traj = ode_integrate(lambda t, y: -y, 0.0, [1.0], 3.0, tol=tol, samples=ts)
    assert np.max(np.abs(traj.y_samples[:, 0] - np.exp(-ts))) < 100 * tol


def test_harmonic_oscillator_backwards():
    traj = ode_integrate(lambda t, y: np.array([y[1], -y[0]]), 2.0, [math.sin(2), math.cos(2)], 0.0, tol=1e-12)
    assert np.allclose(traj.y_final, [0.0, 1.0], atol=1e-10)


def test_dense_output_derivative_is_field():
    traj = ode_integrate(lambda t, y: np.cos(t) * np.ones(1), 0.0, [0.0], 3.0, tol=1e-12)
    assert traj.derivative(1.3)[0] == pytest.approx(math.cos(1.3), abs=1e-6)


def test_blowup_reports_last_state():
    with pytest.raises(StepSizeError) as info:
        ode_integrate(lambda t, y: y * y, 0.0, [1.0], 2.0)
    assert info.value.t < 1.0
    assert info.value.y is not None


def test_zero_length_interval_rejected():
    with pytest.raises(DomainError):
        ode_integrate(lambda t, y: y, 1.0, [1.0], 1.0)


# derivatives and quadrature


def test_gradient_of_quadratic_is_exact():
    f = lambda x, y: 3 * x * x + x * y - y * y  # noqa: E731
    g = central_gradient(f, (0.4, -0.2), 1e-3)
    assert np.allclose(g, [6 * 0.4 - 0.2, 0.4 + 0.4], atol=1e-10)


def test_gradient_error_estimate_bounds_true_error():
    f = lambda x, y: math.sin(3 * x) * math.exp(y)  # noqa: E731
    est = finite_diff_gradient(f, (0.3, 0.1), h=1e-2)
    true = np.array([3 * math.cos(0.9) * math.exp(0.1), math.sin(0.9) * math.exp(0.1)])
    assert np.all(np.abs(est.gradient - true) <= 1.1 * est.error + 1e-12)


def test_quadrature():
    assert quadrature(math.sin, 0.0, math.pi) == pytest.approx(2.0, abs=1e-12)
