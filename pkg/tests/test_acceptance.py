"""Acceptance gate: one PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py -v`` or directly as a script.
Lines are printed even when output capture is on.
"""

import math
import sys
import time

import numpy as np
import pytest

from cpangular.characteristics import (
    CharacteristicState,
    ClassicalSurface,
    MonodromySurface,
    deformation_residual,
    integrate_characteristic,
    painleve_residual,
    pde_residual,
    transport_eigenvalue,
    tv_from_coords,
)
from cpangular.closed_forms import (
    eigenfunction_inner_product,
    eigenfunction_residual,
    equal_parameter_eigenvalue,
    zero_parameter_eigenvalue,
)
from cpangular.delta_solver import eigenvalue_delta
from cpangular.model import ModelParams, base_eigenvalue, interval_for
from cpangular.monodromy import gamma_determinant, monodromy_eigenvalues, monodromy_polynomial
from cpangular.numerics import finite_diff_gradient
from cpangular.series_expansion import convert_to_munu, series_coefficients, series_eval, series_eval_munu
from cpangular.theta_solver import theta_eval, theta_polynomial
from cpangular.verification import reference_series, reference_theta8


@pytest.fixture
def report(capsys):
    def emit(number: int, ok: bool, detail: str):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} criterion {number}: {detail}")
        assert ok, detail

    return emit


def _rel_ok(value, ref):
    if ref == 0.0:
        return abs(value) < 1e-12
    return abs(value - ref) <= 1e-5 * abs(ref)


def test_criterion_01_series_table(report):
    start = time.perf_counter()
    table = series_coefficients(0.5, 1, 8)
    elapsed = time.perf_counter() - start
    ref = reference_series()
    bad = [key for key, value in ref.items() if not _rel_ok(table.c[key], value)]
    ok = not bad and len(ref) == 45 and elapsed < 1.0
    report(1, ok, f"{len(ref) - len(bad)}/{len(ref)} coefficients match, {elapsed:.3f} s")


def test_criterion_02_first_reference_point(report):
    start = time.perf_counter()
    table = series_coefficients(0.5, 1, 8)
    by_series = series_eval_munu(table, 0.005, 0.015).value
    by_delta = eigenvalue_delta(ModelParams(0.5, 0.005, 0.015), 1).value
    elapsed = time.perf_counter() - start
    ok = abs(by_series - 1.01167) < 1e-5 and abs(by_delta - 1.01167) < 1e-5 and elapsed < 1.0
    report(2, ok, f"series {by_series:.9f}, delta {by_delta:.9f}, {elapsed:.3f} s")


def test_criterion_03_second_reference_point(report):
    start = time.perf_counter()
    p = ModelParams(0.5, 0.25, 0.75)
    lam = series_eval(series_coefficients(0.5, 1, 8), 0.5, 1.0).value
    at_a = theta_eval(p, 1.59745, 8)
    at_b = theta_eval(p, 1.59764, 8)
    elapsed = time.perf_counter() - start
    ok_series = abs(lam - 1.59745) < 5e-5
    ok_a = abs(at_a - 3.60882e-05) < 1e-6
    ok_b = abs(at_b - (-2.51164e-04)) < 1e-5
    ok = ok_series and ok_a and ok_b and elapsed < 1.0
    detail = (
        f"series {lam:.9f} ({'ok' if ok_series else 'off'}), "
        f"Theta_8(1.59745) = {at_a:.6e} vs 3.60882e-05 ({'ok' if ok_a else 'off'}; "
        f"at the unrounded series value {theta_eval(p, lam, 8):.6e}), "
        f"Theta_8(1.59764) = {at_b:.6e} ({'ok' if ok_b else 'off'}), {elapsed:.3f} s"
    )
    report(3, ok, detail)


def test_criterion_04_theta_table(report):
    start = time.perf_counter()
    coeffs = theta_polynomial(ModelParams(0.5, 0.02, 0.1), 8).coeffs.real
    elapsed = time.perf_counter() - start
    ref = reference_theta8()
    good = [abs(coeffs[15]) < 1e-12 if n == 15 else _rel_ok(coeffs[n], v) for n, v in enumerate(ref)]
    ok = len(ref) == 17 and coeffs.size == 17 and all(good) and elapsed < 1.0
    report(4, ok, f"{sum(good)}/17 coefficients match (|d15| = {abs(coeffs[15]):.1e}), {elapsed:.3f} s")


def test_criterion_05_third_reference_point(report):
    p = ModelParams(0.5, 0.02, 0.1)
    at_root = theta_eval(p, 1.07379, 8)
    at_other = theta_eval(p, 1.06104, 8)
    lam = eigenvalue_delta(p, 1).value
    ok_root = abs(at_root) < 1e-9
    ok_other = abs(at_other - 1.52770e-02) < 1e-4
    ok_delta = abs(lam - 1.07379) < 5e-5
    detail = (
        f"|Theta_8(1.07379)| = {abs(at_root):.3e} ({'ok' if ok_root else 'off'}; "
        f"at the unrounded root {abs(theta_eval(p, lam, 8)):.1e}), "
        f"Theta_8(1.06104) = {at_other:.6e} ({'ok' if ok_other else 'off'}), "
        f"delta {lam:.9f} ({'ok' if ok_delta else 'off'})"
    )
    report(5, ok_root and ok_other and ok_delta, detail)


def test_criterion_06_equal_parameter_grid(report):
    start = time.perf_counter()
    worst = 0.0
    count = 0
    for kappa in (0.5, 1.0, 1.5):
        for j in (-2, -1, 1, 2):
            for tau in (-1, 1):
                for mu in (-0.5, -0.25, 0.1, 0.25, 0.5):
                    lam = eigenvalue_delta(ModelParams(kappa, mu, tau * mu), j).value
                    worst = max(worst, abs(lam - equal_parameter_eigenvalue(kappa, j, tau, mu)))
                    count += 1
    elapsed = time.perf_counter() - start
    report(6, worst < 1e-8 and elapsed < 30.0, f"{count} points, worst {worst:.2e}, {elapsed:.2f} s")


def test_criterion_07_monodromy(report):
    rng = np.random.default_rng(2024)
    linear = max(
        float(np.max(np.abs(monodromy_polynomial(0.5, mu, nu).poly.coeffs - np.array([mu, 1.0]))))
        for mu, nu in rng.uniform(-1, 1, size=(10, 2))
    )
    roots = np.sort(monodromy_eigenvalues(1.5, 0.0, 0.0).real)
    root_err = float(np.max(np.abs(roots - np.array([-1.0, 0.0, 1.0]))))
    mismatch = 0.0
    lead_err = 0.0
    for kappa in (0.5, 1.5, 2.5, 3.5):
        P = monodromy_polynomial(kappa, 0.3, 0.1)
        t = ModelParams(kappa, 0.3, 0.1).t
        plus = gamma_determinant(P.k, 0.3, 0.1, t)
        minus = gamma_determinant(P.k, 0.3, 0.1, -t)
        n = max(plus.coeffs.size, minus.coeffs.size)
        a, b = np.zeros(n, complex), np.zeros(n, complex)
        a[: plus.coeffs.size], b[: minus.coeffs.size] = plus.coeffs, minus.coeffs
        mismatch = max(mismatch, float(np.max(np.abs(a - b)) / np.max(np.abs(b))))
        lead_err = max(lead_err, abs(abs(P.poly.leading) - P.k**2) / P.k**2)
    ok = linear < 1e-12 and root_err < 1e-10 and mismatch < 1e-10 and lead_err < 1e-12
    report(7, ok, f"linear {linear:.1e}, origin roots {root_err:.1e}, +-t {mismatch:.1e}, leading {lead_err:.1e}")


def test_criterion_08_pde_residual(report):
    point = (0.1, 0.05)
    rows = []
    for kappa in (0.5, math.sqrt(2), 1.5):
        for j in (1, -1, 2):
            rows.append((f"k={kappa:.3f} j={j}", kappa, ClassicalSurface(kappa, j)))
    for j in (-1, 0, 1):
        rows.append((f"monodromy k=1.5 j={j}", 1.5, MonodromySurface(1.5, j)))
    worst, ratios = 0.0, []
    for _, kappa, surf in rows:
        r1 = pde_residual(surf, kappa, *point, 1e-3)
        r2 = pde_residual(surf, kappa, *point, 5e-4)
        worst = max(worst, abs(r1))
        ratios.append(r1 / r2)
    ok = worst < 1e-4 and all(3.5 <= r <= 4.5 for r in ratios)
    report(8, ok, f"{len(rows)} surfaces, worst |residual| {worst:.2e}, ratios {min(ratios):.3f}..{max(ratios):.3f}")


def test_criterion_09_transport(report):
    mism, piii, piii_bad, deform, deform_bad = 0.0, 0.0, math.inf, 0.0, math.inf
    for start in ((0.2, 0.1), (0.1, 0.2)):
        t0, v0, sigma = tv_from_coords(*start)
        for factor in (1.5, 0.6):
            mism = max(mism, transport_eigenvalue(0.5, 1, start, t1=factor * t0).diagnostics["mismatch"])
            mono = transport_eigenvalue(1.5, 0, start, t1=factor * t0, family="monodromy")
            mism = max(mism, mono.diagnostics["mismatch"])
            w0 = eigenvalue_delta(ModelParams(0.5, *start), 1).value
            traj = integrate_characteristic(CharacteristicState(t0, v0, w0, sigma), 0.5, factor * t0)
            piii = max(piii, painleve_residual(traj))
            piii_bad = min(piii_bad, painleve_residual(traj, w_offset=0.1))
            deform = max(deform, deformation_residual(0.5, traj).max)
            deform_bad = min(deform_bad, deformation_residual(0.5, traj, w_offset=0.1).deformation)
    ok = mism < 1e-6 and piii < 1e-6 and deform < 1e-6 and deform_bad > 1e-3 and piii_bad > 1e-2
    report(
        9,
        ok,
        f"mismatch {mism:.1e}, Painleve {piii:.1e} (perturbed {piii_bad:.2f}), "
        f"deformation {deform:.1e} (perturbed {deform_bad:.2e})",
    )


def test_criterion_10_zero_parameter_eigenfunctions(report):
    thetas = np.linspace(0.05, math.pi - 0.05, 20)
    worst_res, worst_ip, exact = 0.0, 0.0, True
    for kappa in (0.5, 1.5):
        labels = [(n, s) for n in range(6) for s in (1, -1)]
        for n, s in labels:
            worst_res = max(worst_res, float(np.max(eigenfunction_residual(kappa, n, s, thetas))))
            exact &= zero_parameter_eigenvalue(kappa, n, s) == base_eigenvalue(kappa, s * (n + 1))
        for a in range(len(labels)):
            for b in range(a + 1, len(labels)):
                worst_ip = max(worst_ip, abs(eigenfunction_inner_product(kappa, labels[a], labels[b])))
    ok = worst_res < 1e-10 and worst_ip < 1e-10 and exact
    report(10, ok, f"residual {worst_res:.1e}, inner products {worst_ip:.1e}, eigenvalues exact {exact}")


def test_criterion_11_coefficient_bound(report):
    worst = 0.0
    for kappa, j in ((0.5, 1), (0.5, -1), (1.0, 2), (math.sqrt(2), 1), (1.5, -2)):
        table = series_coefficients(kappa, j, 8)
        lam = convert_to_munu(table, check_bound=False)
        for m in range(9):
            for n in range(9 - m):
                worst = max(worst, abs(lam[m, n]) / ((abs(kappa) + abs(j)) * 2 ** (m + n)))
    report(11, worst <= 1.0, f"largest |lam_mn| / ((|kappa|+|j|) 2^(m+n)) = {worst:.3e}")


def test_criterion_12_property_suite(report):
    diag = float(np.max(np.abs(np.diag(series_coefficients(0.5, 1, 16).c)[1:9])))
    grid = np.linspace(-0.2, 0.2, 5)
    worst_grad, outside = 0.0, 0
    for j in (1, -1, 2):
        surf = ClassicalSurface(0.5, j)
        for mu in grid:
            for nu in grid:
                g = finite_diff_gradient(surf, (mu, nu), h=1e-4).gradient
                worst_grad = max(worst_grad, float(np.max(np.abs(g))))
                p = ModelParams(0.5, mu, nu)
                outside += not interval_for(p, j).contains(surf(mu, nu), slack=1e-12)
    ok = diag < 1e-12 and worst_grad <= 1 + 1e-6 and outside == 0
    report(12, ok, f"max |c_nn| {diag:.1e}, max |grad| {worst_grad:.9f}, outside intervals {outside}")


# the printed reference values for points 2 and 3 were evaluated at the unrounded eigenvalue


def test_point2_theta_at_unrounded_series_value():
    p = ModelParams(0.5, 0.25, 0.75)
    lam = series_eval(series_coefficients(0.5, 1, 8), 0.5, 1.0).value
    assert theta_eval(p, lam, 8) == pytest.approx(3.60882e-05, abs=1e-9)


def test_point3_theta_at_unrounded_root():
    p = ModelParams(0.5, 0.02, 0.1)
    assert abs(theta_eval(p, eigenvalue_delta(p, 1).value, 8)) < 1e-9


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
