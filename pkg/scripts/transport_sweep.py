"""Transport eigenvalues along characteristics from a grid of start points and
compare with direct computation at the end points.

    python3 scripts/transport_sweep.py [--kappa 0.5] [--j 1] [--factor 1.5] [--csv-dir DIR]
"""

import argparse
from pathlib import Path

import numpy as np

from cpangular.characteristics import (
    CharacteristicState,
    deformation_residual,
    integrate_characteristic,
    painleve_residual,
    transport_eigenvalue,
    tv_from_coords,
)
from cpangular.delta_solver import eigenvalue_delta
from cpangular.model import ModelParams


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--kappa", type=float, default=0.5)
    ap.add_argument("--j", type=int, default=1)
    ap.add_argument("--factor", type=float, default=1.5)
    ap.add_argument("--csv-dir", type=Path)
    args = ap.parse_args()

    print(f"{'mu0':>7} {'nu0':>7} {'sigma':>5} {'w_end':>14} {'mismatch':>9} {'PIII':>9} {'deform':>9}")
    worst = 0.0
    for mu0 in np.linspace(-0.3, 0.3, 4):
        for nu0 in np.linspace(-0.25, 0.35, 4):
            if abs(abs(mu0) - abs(nu0)) < 0.05:
                continue
            t0, v0, sigma = tv_from_coords(mu0, nu0)
            est = transport_eigenvalue(args.kappa, args.j, (mu0, nu0), t1=args.factor * t0)
            w0 = eigenvalue_delta(ModelParams(args.kappa, mu0, nu0), args.j).value
            traj = integrate_characteristic(CharacteristicState(t0, v0, w0, sigma), args.kappa, args.factor * t0)
            piii = painleve_residual(traj)
            dres = deformation_residual(args.kappa, traj).max
            worst = max(worst, est.diagnostics["mismatch"])
            print(f"{mu0:7.3f} {nu0:7.3f} {sigma:5d} {est.value:14.10f} "
                  f"{est.diagnostics['mismatch']:9.1e} {piii:9.1e} {dres:9.1e}")
            if args.csv_dir:
                args.csv_dir.mkdir(parents=True, exist_ok=True)
                (args.csv_dir / f"traj_{mu0:+.3f}_{nu0:+.3f}.csv").write_text(traj.to_csv())
    print(f"worst mismatch {worst:.2e}")


if __name__ == "__main__":
    main()
