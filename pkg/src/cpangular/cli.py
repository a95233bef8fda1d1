"""Command-line front end.

Commands: ``eigen``, ``series-table``, ``verify``, ``monodromy`` and
``characteristic``. Exit codes: 0 success, 1 usage error (including
parameters outside the domain), 2 numerical failure (including failed
verification checks). ``CPANGULAR_TOL`` overrides the default solver
tolerance.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass

import numpy as np

from .characteristics import CharacteristicState, integrate_characteristic, tv_from_coords
from .closed_forms import equal_parameter_eigenvalue
from .delta_solver import DEFAULT_TOL, delta, eigenvalue_delta
from .errors import CPAngularError, DomainError
from .model import ModelParams, base_eigenvalue, interval_for
from .monodromy import monodromy_eigenvalue, monodromy_polynomial
from .series_expansion import format_coefficient, series_coefficients, series_eval_munu
from .theta_solver import eigenvalue_theta, theta_direct
from .verification import SUITES, run_suite

EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL = 0, 1, 2
IRRATIONAL = {"sqrt2": math.sqrt(2), "sqrt3": math.sqrt(3), "pi": math.pi, "e": math.e}
SIG_DIGITS = 9


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass(frozen=True)
class RunConfig:
    command: str
    kappa: float = 0.5
    mu: float = 0.0
    nu: float = 0.0
    j: int = 1
    tau: int | None = None
    sigma: int | None = None
    method: str = "delta"
    order: int | None = None
    tol: float = DEFAULT_TOL
    fmt: str = "json"
    output: str | None = None
    suite: str = "tables"
    t1: float | None = None
    factor: float | None = None


def default_tol() -> float:
    raw = os.environ.get("CPANGULAR_TOL")
    if raw is None:
        return DEFAULT_TOL
    try:
        tol = float(raw)
    except ValueError as exc:
        raise UsageError(f"CPANGULAR_TOL is not a number: {raw!r}") from exc
    if not tol > 0:
        raise UsageError("CPANGULAR_TOL must be positive")
    return tol


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cpangular", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def point(p, j=True):
        p.add_argument("--kappa", type=float, default=0.5)
        p.add_argument("--mu", type=float, default=0.0)
        p.add_argument("--nu", type=float, default=0.0)
        if j:
            p.add_argument("--j", type=int, default=1)

    def out(p, formats):
        p.add_argument("--format", dest="fmt", choices=formats, default=formats[0])
        p.add_argument("--output", "-o")

    p = sub.add_parser("eigen", help="compute one eigenvalue")
    point(p)
    p.add_argument("--method", choices=["delta", "theta", "series", "closed"], default="delta")
    p.add_argument("--order", type=int, help="series order or fixed recurrence length")
    p.add_argument("--tau", type=int, choices=[-1, 1], help="closed form on nu = tau mu")
    p.add_argument("--tol", type=float)
    out(p, ["json", "text"])

    p = sub.add_parser("series-table", help="power series coefficients")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--kappa", type=float)
    group.add_argument("--kappa-irrational", choices=sorted(IRRATIONAL))
    p.add_argument("--j", type=int, default=1)
    p.add_argument("--max-order", dest="order", type=int, default=8)
    out(p, ["csv", "json"])

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("--suite", choices=list(SUITES) + ["all"], default="tables")
    out(p, ["json", "text"])

    p = sub.add_parser("monodromy", help="monodromy polynomial and its zeros")
    point(p, j=False)
    out(p, ["json"])

    p = sub.add_parser("characteristic", help="integrate a characteristic curve")
    point(p)
    p.add_argument("--family", dest="method", choices=["classical", "monodromy"], default="classical")
    dest = p.add_mutually_exclusive_group(required=True)
    dest.add_argument("--t1", type=float)
    dest.add_argument("--factor", type=float, help="end at factor * t0")
    p.add_argument("--tol", type=float)
    out(p, ["csv", "json"])
    return parser


def parse_config(argv) -> RunConfig:
    ns = build_parser().parse_args(argv)
    d = vars(ns).copy()
    if d.get("kappa_irrational"):
        d["kappa"] = IRRATIONAL[d["kappa_irrational"]]
    if d.get("kappa") is None:
        d["kappa"] = 0.5
    if d.get("tol") is None:
        d["tol"] = default_tol()
    return RunConfig(**{k: v for k, v in d.items() if k in RunConfig.__dataclass_fields__})


# FORMATTING ===========================================================================


def rounded(obj):
    """Round floats to ``SIG_DIGITS`` significant digits, recursively."""
    if isinstance(obj, dict):
        return {str(k): rounded(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [rounded(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return None
        return float(f"{x:.{SIG_DIGITS}g}") + 0.0
    if isinstance(obj, (complex, np.complexfloating)):
        return [rounded(obj.real), rounded(obj.imag)]
    return obj


def to_json(obj) -> str:
    return json.dumps(rounded(obj), sort_keys=True, indent=2) + "\n"


def emit(text: str, cfg: RunConfig):
    if cfg.output:
        with open(cfg.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# COMMANDS =============================================================================


def cmd_eigen(cfg: RunConfig) -> dict:
    p = ModelParams(cfg.kappa, cfg.mu, cfg.nu)
    order = cfg.order
    flagged = False
    if cfg.method == "delta":
        est = eigenvalue_delta(p, cfg.j, tol=cfg.tol)
        lam, order, flagged = est.value, est.order, est.flagged
    elif cfg.method == "theta":
        est = eigenvalue_theta(p, cfg.j, tol=max(cfg.tol, 1e-13))
        lam, order, flagged = est.value, est.order, est.flagged
    elif cfg.method == "series":
        order = 8 if order is None else order
        table = series_coefficients(cfg.kappa, cfg.j, order)
        lam = series_eval_munu(table, cfg.mu, cfg.nu).value
    else:
        lam = closed_value(cfg)
    ival = interval_for(p, cfg.j)
    return {
        "lambda": lam,
        "j": cfg.j,
        "method": cfg.method,
        "order": order,
        "flagged": flagged,
        "residuals": {
            "delta_at_root": delta(p, lam).value,
            "theta_at_root": theta_direct(p, lam, 64),
        },
        "localization_interval": [ival.lo, ival.hi],
    }


def closed_value(cfg: RunConfig) -> float:
    if cfg.mu == 0 and cfg.nu == 0:
        return base_eigenvalue(cfg.kappa, cfg.j)
    tau = cfg.tau
    if tau is None:
        if abs(cfg.mu) != abs(cfg.nu):
            raise UsageError("closed form needs |mu| = |nu| (or mu = nu = 0)")
        tau = 1 if cfg.nu == cfg.mu else -1
    if cfg.nu != tau * cfg.mu:
        raise UsageError(f"closed form with tau={tau} needs nu = tau * mu")
    return equal_parameter_eigenvalue(cfg.kappa, cfg.j, tau, cfg.mu)


def cmd_series_table(cfg: RunConfig) -> str:
    order = 8 if cfg.order is None else cfg.order
    if not 0 <= order <= 16:
        raise UsageError("max order must lie in 0..16")
    table = series_coefficients(cfg.kappa, cfg.j, order)
    rows = [(m, n, table.c[m, n]) for m in range(order + 1) for n in range(order + 1 - m)]
    if cfg.fmt == "json":
        return to_json(
            {
                "kappa": cfg.kappa,
                "j": cfg.j,
                "max_order": order,
                "resonant": [list(r) for r in table.resonant],
                "coefficients": [[m, n, v] for m, n, v in rows],
            }
        )
    lines = []
    if table.resonant:
        pairs = " ".join(f"({m},{n})" for m, n in table.resonant)
        lines.append(f"# resonant index pairs: {pairs}")
    lines.append("m,n,value")
    lines += [f"{m},{n},{format_coefficient(v)}" for m, n, v in rows]
    return "\n".join(lines) + "\n"


def cmd_verify(cfg: RunConfig) -> dict:
    suites = SUITES if cfg.suite == "all" else (cfg.suite,)
    reports = [run_suite(s) for s in suites]
    if len(reports) == 1:
        return reports[0]
    return {"suite": "all", "reports": reports, "pass": all(r["pass"] for r in reports)}


def cmd_monodromy(cfg: RunConfig) -> dict:
    return monodromy_polynomial(cfg.kappa, cfg.mu, cfg.nu).to_dict()


def cmd_characteristic(cfg: RunConfig):
    t0, v0, sigma = tv_from_coords(cfg.mu, cfg.nu)
    if cfg.method == "monodromy":
        lam = monodromy_eigenvalue(cfg.kappa, cfg.j, cfg.mu, cfg.nu)
        if abs(lam.imag) > 1e-9 * (1 + abs(lam)):
            raise CPAngularError("monodromy eigenvalue at the start point is not real")
        w0 = lam.real
    else:
        w0 = eigenvalue_delta(ModelParams(cfg.kappa, cfg.mu, cfg.nu), cfg.j).value
    t1 = cfg.t1 if cfg.t1 is not None else cfg.factor * t0
    traj = integrate_characteristic(CharacteristicState(t0, v0, w0, sigma), cfg.kappa, t1, tol=cfg.tol)
    if cfg.fmt == "csv":
        return traj.to_csv()
    mu, nu = traj.munu()
    return to_json({"sigma": sigma, "t": traj.t, "v": traj.v, "w": traj.w, "mu": mu, "nu": nu})


def text_report(obj) -> str:
    if "checks" in obj:
        lines = [f"{'PASS' if c['pass'] else 'FAIL'} {c['name']} measured={c['measured']:.9g}" for c in obj["checks"]]
        return "\n".join(lines) + "\n"
    if "reports" in obj:
        return "".join(text_report(r) for r in obj["reports"])
    return "".join(f"{k}: {v}\n" for k, v in sorted(rounded(obj).items()))


def run(cfg: RunConfig) -> int:
    if cfg.command == "eigen":
        res = cmd_eigen(cfg)
        emit(text_report(res) if cfg.fmt == "text" else to_json(res), cfg)
        return EXIT_NUMERICAL if res["flagged"] else EXIT_OK
    if cfg.command == "series-table":
        emit(cmd_series_table(cfg), cfg)
        return EXIT_OK
    if cfg.command == "verify":
        res = cmd_verify(cfg)
        emit(text_report(res) if cfg.fmt == "text" else to_json(res), cfg)
        return EXIT_OK if res["pass"] else EXIT_NUMERICAL
    if cfg.command == "monodromy":
        emit(to_json(cmd_monodromy(cfg)), cfg)
        return EXIT_OK
    out = cmd_characteristic(cfg)
    emit(out if isinstance(out, str) else to_json(out), cfg)
    return EXIT_OK


def main(argv=None) -> int:
    try:
        cfg = parse_config(sys.argv[1:] if argv is None else argv)
        return run(cfg)
    except (UsageError, DomainError) as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    except (CPAngularError, ArithmeticError) as exc:
        sys.stderr.write(f"numerical failure: {exc}\n")
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
