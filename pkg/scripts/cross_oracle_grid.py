"""Compare the Delta, Theta, series and (where available) closed-form
eigenvalues on a parameter grid.

    python3 scripts/cross_oracle_grid.py [--radius 0.3] [--points 5]
"""

import argparse
import itertools
import math
import time

import numpy as np

from cpangular.closed_forms import equal_parameter_eigenvalue
from cpangular.delta_solver import eigenvalue_delta
from cpangular.model import ModelParams
from cpangular.series_expansion import series_coefficients, series_eval_munu
from cpangular.theta_solver import eigenvalue_theta


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--radius", type=float, default=0.3)
    ap.add_argument("--points", type=int, default=5)
    ap.add_argument("--series-order", type=int, default=12)
    args = ap.parse_args()

    grid = np.linspace(-args.radius, args.radius, args.points)
    start = time.perf_counter()
    for kappa in (0.5, 1.0, math.sqrt(2), 1.5):
        for j in (-2, -1, 1, 2):
            table = series_coefficients(kappa, j, args.series_order)
            theta_err = series_err = closed_err = 0.0
            for mu, nu in itertools.product(grid, grid):
                p = ModelParams(kappa, mu, nu)
                lam = eigenvalue_delta(p, j).value
                theta_err = max(theta_err, abs(eigenvalue_theta(p, j).value - lam))
                series_err = max(series_err, abs(series_eval_munu(table, mu, nu).value - lam))
                if abs(abs(mu) - abs(nu)) < 1e-15:
                    tau = 1 if mu == nu else -1
                    closed_err = max(closed_err, abs(equal_parameter_eigenvalue(kappa, j, tau, mu) - lam))
            print(f"kappa={kappa:.4f} j={j:+d}: |theta-delta| {theta_err:.1e}  "
                  f"|series-delta| {series_err:.1e}  |closed-delta| {closed_err:.1e}")
    print(f"{time.perf_counter() - start:.1f} s")


if __name__ == "__main__":
    main()
