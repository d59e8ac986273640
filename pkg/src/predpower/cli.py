"""Command-line front end: power, sample size, calibration, simulation, serve.

JSON output (``--json``) mirrors the HTTP service responses field for
field; text output prints ``key=value`` lines with counts as integers and
other numerics to 6 significant digits.  Exit codes: 0 success, 1
computation error (machine-readable JSON on stderr), 2 usage error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from . import api
from .errors import (
    ConfigError,
    DegenerateMomentsError,
    DomainError,
    InfeasiblePlanError,
    PredPowerError,
    UnattainablePowerError,
)
from .calibration import PilotSample, estimate_moments
from .power import rule_of_thumb
from .sim import SimConfig, results_to_csv_text, run_experiment, write_csv

_ERROR_CODES = {
    InfeasiblePlanError: "infeasible",
    UnattainablePowerError: "unattainable_power",
    DegenerateMomentsError: "degenerate_moments",
    ConfigError: "config_error",
    DomainError: "domain_error",
}

_TEXT_SKIP = {"curve", "inputs"}


def _error_payload(exc: PredPowerError) -> dict:
    code = "error"
    for klass, name in _ERROR_CODES.items():
        if isinstance(exc, klass):
            code = name
            break
    payload = {"error": {"code": code, "message": str(exc)}}
    if isinstance(exc, InfeasiblePlanError) and exc.min_n_unlabeled is not None:
        payload["error"]["min_N"] = exc.min_n_unlabeled
    return payload


def _fmt_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def _emit(payload: dict, as_json: bool) -> None:
    if as_json:
        print(json.dumps(payload))
        return
    for key, value in payload.items():
        if key in _TEXT_SKIP:
            continue
        print(f"{key}={_fmt_value(value)}")


def _moment_kwargs(args: argparse.Namespace) -> dict:
    return {
        "sigma2": args.sigma2,
        "rho2": args.rho2,
        "mse": args.mse,
        "p": args.p,
        "se": args.se,
        "sp": args.sp,
    }


def _add_mean_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--sigma2", type=float, help="outcome variance")
    parser.add_argument("--rho2", type=float, help="squared outcome-prediction correlation")
    parser.add_argument("--mse", type=float, help="prediction MSE (conservative path)")
    parser.add_argument("--p", type=float, help="binary outcome prevalence")
    parser.add_argument("--se", type=float, help="classifier sensitivity")
    parser.add_argument("--sp", type=float, help="classifier specificity")


def _add_common_design_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--design",
        required=True,
        choices=["one-sample", "two-sample", "paired", "two-by-two", "regression"],
    )
    parser.add_argument("--alpha", type=float, default=0.05)
    parser.add_argument("--power", type=float, default=0.8, help="target power")
    parser.add_argument("--json", action="store_true", dest="as_json")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="predpower",
        description=(
            "Plan labeled sample sizes for studies that pair a small "
            "gold-standard sample with a large pool of model predictions."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_n = sub.add_parser("n", help="required labeled sample size")
    _add_common_design_flags(p_n)
    _add_mean_flags(p_n)
    p_n.add_argument("--N", type=float, help="unlabeled pool size")
    p_n.add_argument("--delta", type=float, help="effect size")
    p_n.add_argument("--theta0", type=float, default=0.0)
    p_n.add_argument(
        "--method", choices=["classical", "vanilla", "optimal"], default="optimal"
    )
    p_n.add_argument("--allocation", type=float, default=1.0, help="n_a / n_b")
    p_n.add_argument("--p0", type=float, help="control event probability (2x2)")
    p_n.add_argument("--p1", type=float, help="treated event probability (2x2)")
    p_n.add_argument("--rho0", type=float, help="control-group correlation (2x2)")
    p_n.add_argument("--rho1", type=float, help="treated-group correlation (2x2)")
    p_n.add_argument("--kappa", type=float, default=1.0, help="n1 / n0 (2x2)")
    p_n.add_argument("--measure", choices=["RR", "OR"], default="RR")
    p_n.add_argument("--v-yy", type=float, dest="v_yy", help="labeled score block")
    p_n.add_argument("--v-ff", type=float, dest="v_ff", help="prediction score block")
    p_n.add_argument("--v-yf", type=float, dest="v_yf", help="cross score block")

    p_pow = sub.add_parser("power", help="analytic power at a given budget")
    _add_common_design_flags(p_pow)
    _add_mean_flags(p_pow)
    p_pow.add_argument("--n", type=int, required=True, help="labeled sample size")
    p_pow.add_argument("--N", type=float, required=True)
    p_pow.add_argument("--delta", type=float, required=True)
    p_pow.add_argument(
        "--method", choices=["classical", "vanilla", "optimal"], default="optimal"
    )
    p_pow.add_argument("--allocation", type=float, default=1.0)

    p_cal = sub.add_parser("calibrate", help="metrics or pilot data -> moments")
    group = p_cal.add_mutually_exclusive_group(required=True)
    group.add_argument("--binary", action="store_true")
    group.add_argument("--continuous", action="store_true")
    group.add_argument("--pilot", type=str, help="two-column y,f CSV file")
    p_cal.add_argument("--p", type=float)
    p_cal.add_argument("--se", type=float)
    p_cal.add_argument("--sp", type=float)
    p_cal.add_argument("--var-y", type=float, dest="var_y")
    p_cal.add_argument("--r2", type=float)
    p_cal.add_argument("--mse", type=float)
    p_cal.add_argument("--json", action="store_true", dest="as_json")

    p_sim = sub.add_parser("simulate", help="run a Monte Carlo validation grid")
    p_sim.add_argument("--config", required=True, help="JSON experiment config")
    p_sim.add_argument("--out", help="output CSV path (default: stdout)")
    p_sim.add_argument("--seed", type=int, help="override the config seed")

    p_srv = sub.add_parser("serve", help="start the local planning HTTP service")
    p_srv.add_argument("--host", default="127.0.0.1")
    p_srv.add_argument("--port", type=int, default=8712)

    return parser


def _run_n(args: argparse.Namespace) -> dict:
    if args.design == "two-by-two":
        return api.plan_two_by_two(
            p0=args.p0,
            p1=args.p1,
            rho0=args.rho0,
            rho1=args.rho1,
            se=args.se,
            sp=args.sp,
            kappa=args.kappa,
            measure=args.measure,
            alpha=args.alpha,
            power=args.power,
        )
    if args.design == "regression":
        if None in (args.v_yy, args.v_ff, args.v_yf, args.N, args.delta):
            raise DomainError(
                "regression planning needs --v-yy --v-ff --v-yf --N --delta"
            )
        return api.plan_regression(
            v_yy=args.v_yy,
            v_ff=args.v_ff,
            v_yf=args.v_yf,
            n_unlabeled=args.N,
            delta=args.delta,
            alpha=args.alpha,
            power=args.power,
        )
    if args.N is None or args.delta is None:
        raise DomainError("mean-family planning needs --N and --delta")
    if args.design == "one-sample":
        return api.plan_mean(
            n_unlabeled=args.N,
            delta=args.delta,
            alpha=args.alpha,
            power=args.power,
            theta0=args.theta0,
            method=args.method,
            **_moment_kwargs(args),
        )
    if args.design == "paired":
        return api.plan_paired(
            n_unlabeled=args.N,
            delta=args.delta,
            alpha=args.alpha,
            power=args.power,
            method=args.method,
            **_moment_kwargs(args),
        )
    return api.plan_two_sample(
        n_unlabeled=args.N,
        delta=args.delta,
        alpha=args.alpha,
        power=args.power,
        allocation=args.allocation,
        method=args.method,
        **_moment_kwargs(args),
    )


def _run_power(args: argparse.Namespace) -> dict:
    design = {"one-sample": "one-sample", "paired": "paired", "two-sample": "two-sample"}.get(
        args.design
    )
    if design is None:
        raise DomainError(
            "the power subcommand supports one-sample, paired, and two-sample designs"
        )
    return api.power_payload(
        design=design,
        n=args.n,
        n_unlabeled=args.N,
        delta=args.delta,
        alpha=args.alpha,
        power=args.power,
        method=args.method,
        allocation=args.allocation,
        **_moment_kwargs(args),
    )


def _run_calibrate(args: argparse.Namespace) -> dict:
    if args.pilot:
        pilot = PilotSample.from_csv(args.pilot)
        m = estimate_moments(pilot)
        return {
            "kind": "pilot",
            "n_pairs": len(pilot),
            "var_y": m.var_y,
            "var_f": m.var_f,
            "cov_yf": m.cov_yf,
            "rho": m.rho,
            "rho2": m.rho2,
            "var_eps": m.var_eps,
            "conservative": m.conservative,
            "rule_of_thumb_ratio": rule_of_thumb(m.rho2),
        }
    if args.binary:
        return api.calibrate_payload(p=args.p, se=args.se, sp=args.sp)
    return api.calibrate_payload(var_y=args.var_y, r2=args.r2, mse=args.mse)


def _run_simulate(args: argparse.Namespace) -> int:
    cfg = SimConfig.from_json(args.config)
    if args.seed is not None:
        cfg = dataclasses.replace(cfg, seed=args.seed)
    results = run_experiment(cfg)
    if args.out:
        write_csv(results, Path(args.out))
    else:
        sys.stdout.write(results_to_csv_text(results))
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "n":
            _emit(_run_n(args), args.as_json)
        elif args.command == "power":
            _emit(_run_power(args), args.as_json)
        elif args.command == "calibrate":
            _emit(_run_calibrate(args), args.as_json)
        elif args.command == "simulate":
            return _run_simulate(args)
        elif args.command == "serve":
            import uvicorn

            from .service import app

            uvicorn.run(app, host=args.host, port=args.port)
    except PredPowerError as exc:
        print(json.dumps(_error_payload(exc)), file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
