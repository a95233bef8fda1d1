"""Recompute the reference coefficient tables and the three reference points.

    python3 scripts/reproduce_reference_values.py [--out DIR]

Writes the series table (order 8) and the Theta_8 coefficients as CSV, and
prints each reference point by every available method.
"""

import argparse
from pathlib import Path

from cpangular.delta_solver import eigenvalue_delta
from cpangular.model import ModelParams
from cpangular.series_expansion import format_coefficient, series_coefficients, series_eval, series_eval_munu
from cpangular.theta_solver import eigenvalue_theta, theta_eval, theta_polynomial


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path("out"))
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    table = series_coefficients(0.5, 1, 8)
    rows = ["m,n,value"] + [f"{m},{n},{format_coefficient(table.c[m, n])}" for m in range(9) for n in range(9 - m)]
    (args.out / "series_kappa0.5_j1.csv").write_text("\n".join(rows) + "\n")

    coeffs = theta_polynomial(ModelParams(0.5, 0.02, 0.1), 8).coeffs.real
    rows = ["n,value"] + [f"{n},{c:.5e}" for n, c in enumerate(coeffs)]
    (args.out / "theta8_kappa0.5_mu0.02_nu0.1.csv").write_text("\n".join(rows) + "\n")

    for mu, nu in [(0.005, 0.015), (0.25, 0.75), (0.02, 0.1)]:
        p = ModelParams(0.5, mu, nu)
        s = series_eval_munu(table, mu, nu)
        d = eigenvalue_delta(p, 1).value
        t = eigenvalue_theta(p, 1).value
        print(f"(mu, nu) = ({mu}, {nu})")
        print(f"  series order 8 : {s.value:.10f}  (last antidiagonal {s.tail:.1e})")
        print(f"  Delta          : {d:.10f}")
        print(f"  Theta          : {t:.10f}")
        print(f"  Theta_8 at Delta root: {theta_eval(p, d, 8):.6e}")
    lam = series_eval(table, 0.5, 1.0).value
    p = ModelParams(0.5, 0.25, 0.75)
    for x in (lam, 1.59745, 1.59764):
        print(f"Theta_8({x:.10f}) at (0.25, 0.75) = {theta_eval(p, x, 8):.6e}")
    p = ModelParams(0.5, 0.02, 0.1)
    for x in (1.07379, 1.06104, -1.06104):
        print(f"Theta_8({x}) at (0.02, 0.1) = {theta_eval(p, x, 8):.6e}")
    print(f"tables written to {args.out}/")


if __name__ == "__main__":
    main()
