"""Command-line interface: ``residcopula {fit,simulate,diagnose}``.

Exit status is 0 on success, 1 for bad input or usage, and 2 when an
estimator or scenario fails numerically.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import secrets
import sys
from pathlib import Path

import numpy as np

from .dataset import ObservationSet, load_csv
from .diagnose import check_applicability
from .errors import EstimationError, InputError, InvalidScenario, ScenarioUnstable
from .estimate import TrimPolicy, fit_pipeline
from .marginals import MarginalSpec
from .montecarlo import MARGIN_SETS, Scenario, render_table, run_scenario

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NUMERIC = 2

JITTER_SCALE = 1e-12

log = logging.getLogger("residcopula")


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors; 2 is reserved for numerical failure here
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(f"{self.prog}: error: {message}")


def _positive_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected an integer >= 1, got {value}")
    return value


def _seed(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {value}")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=_seed, help="root seed; drawn from system entropy and echoed if omitted")
    common.add_argument("--threads", type=_positive_int, default=1, help="worker processes (default 1)")
    common.add_argument("--out", type=Path, help="write output here instead of stdout")
    common.add_argument("--format", choices=("csv", "markdown", "json"), default=None, help="output format")
    common.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")

    parser = _Parser(prog="residcopula", description="Copula estimation from regression residuals.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    fit = sub.add_parser("fit", parents=[common], help="estimate the copula of regression errors from a CSV")
    fit.add_argument("--data", type=Path, required=True, help="CSV with header columns y1..yd, x1..xq")
    fit.add_argument("--d", type=int, required=True, help="number of responses")
    fit.add_argument("--q", type=int, required=True, help="number of covariates")
    fit.add_argument("--family", required=True, help="clayton, frank, gumbel, gaussian or student_t5")
    fit.add_argument("--estimator", choices=("ik", "pl", "pl_star"), default="pl")
    fit.add_argument("--trim-D", dest="trim_D", type=float, default=0.25, help="trimming constant D (pl_star)")
    fit.add_argument("--trim-lambda", dest="trim_lambda", type=float, default=1.9, help="trimming rate lambda (pl_star)")
    fit.add_argument("--transform", default=None, help="comma list of identity|log, one per response")
    fit.add_argument("--jitter", action="store_true", help="add uniform noise of relative size 1e-12 to break ties")

    sim = sub.add_parser("simulate", parents=[common], help="run a Monte Carlo scenario")
    sim.add_argument("--scenario", type=Path, help="scenario JSON file; inline flags override its fields")
    sim.add_argument("--family")
    sim.add_argument("--tau", type=float)
    sim.add_argument("--margins", choices=tuple(MARGIN_SETS))
    sim.add_argument("--n", type=int)
    sim.add_argument("--reps", type=int)

    diag = sub.add_parser("diagnose", parents=[common], help="which equivalence result covers a family and margins")
    diag.add_argument("--family", required=True)
    diag.add_argument("--margins", required=True, help="comma list, e.g. normal,exponential")
    return parser


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        out.write_text(text)


def _resolve_seed(seed):
    if seed is not None:
        return seed
    seed = secrets.randbits(63)
    print(f"seed: {seed}", file=sys.stderr)
    return seed


def _jitter(data: ObservationSet, rng: np.random.Generator) -> ObservationSet:
    y = data.y
    noise = rng.uniform(-1.0, 1.0, size=y.shape) * JITTER_SCALE * np.maximum(1.0, np.abs(y))
    return ObservationSet(y=y + noise, x=data.x)


def _render_report(doc: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(doc, indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(list(doc))
        writer.writerow(["" if v is None else v for v in doc.values()])
        return buf.getvalue()
    lines = ["| field | value |", "|---|---|"]
    lines += [f"| {k} | {'' if v is None else v} |" for k, v in doc.items()]
    return "\n".join(lines) + "\n"


def cmd_fit(args) -> int:
    if args.d < 2 or args.q < 1:
        raise _UsageError("--d must be >= 2 and --q >= 1")
    transforms = ["identity"] * args.d
    if args.transform:
        transforms = [t.strip() for t in args.transform.split(",")]
        if len(transforms) != args.d:
            raise _UsageError(f"--transform needs {args.d} comma-separated entries, got {len(transforms)}")
    data = load_csv(args.data, args.d, args.q)
    if args.jitter:
        data = _jitter(data, np.random.default_rng(_resolve_seed(args.seed)))
    specs = [MarginalSpec(j, transformation=t) for j, t in enumerate(transforms)]
    policy = TrimPolicy(D=args.trim_D, lam=args.trim_lambda)
    report, _ = fit_pipeline(data, specs, args.family, args.estimator, policy)
    _emit(_render_report(report.to_dict(), args.format or "json"), args.out)
    if not report.converged:
        print("error: estimator did not converge", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


def _scenario_from_args(args) -> Scenario:
    overrides = {
        "family": args.family,
        "tau_true": args.tau,
        "margins": args.margins,
        "n": args.n,
        "reps": args.reps,
    }
    doc = {}
    if args.scenario is not None:
        try:
            text = args.scenario.read_text()
        except OSError as exc:
            raise InvalidScenario(f"cannot read scenario file: {exc}") from None
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InvalidScenario(f"scenario is not valid JSON: {exc}") from None
        if not isinstance(doc, dict):
            raise InvalidScenario("scenario JSON must be an object")
    if args.seed is not None or "seed" not in doc:
        overrides["seed"] = _resolve_seed(args.seed)
    return Scenario.from_dict(doc, **overrides)


def _render_rows(rows, scenario: Scenario, fmt: str) -> str:
    if fmt == "json":
        doc = {
            "scenario": scenario.to_dict(),
            "rows": [
                {
                    "estimator": r.estimator,
                    "bias_x100": r.bias_x100,
                    "sd_x100": r.sd_x100,
                    "rmse_x100": r.rmse_x100,
                    "n_ok": r.n_ok,
                    "n_failed": r.n_failed,
                }
                for r in rows
            ],
        }
        return json.dumps(doc, indent=2) + "\n"
    return render_table(rows, fmt)


def cmd_simulate(args) -> int:
    scenario = _scenario_from_args(args)
    fmt = args.format or "markdown"
    try:
        rows = run_scenario(scenario, threads=args.threads)
    except ScenarioUnstable as exc:
        if exc.rows:
            _emit(_render_rows(exc.rows, scenario, fmt), args.out)
        raise
    _emit(_render_rows(rows, scenario, fmt), args.out)
    return EXIT_OK


def cmd_diagnose(args) -> int:
    margins = [m.strip() for m in args.margins.split(",") if m.strip()]
    result = check_applicability(args.family, margins)
    if args.format == "json":
        text = result.to_json() + "\n"
    elif args.format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["verdict", "family", "margins", "beta_max"])
        writer.writerow(
            [
                result.verdict,
                result.family,
                ";".join(m["law"] for m in result.margins),
                ";".join(f"{m['beta_max']:.3f}" for m in result.margins),
            ]
        )
        text = buf.getvalue()
    else:
        text = result.to_text()
    _emit(text, args.out)
    return EXIT_OK


COMMANDS = {"fit": cmd_fit, "simulate": cmd_simulate, "diagnose": cmd_diagnose}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        logging.basicConfig(
            level=logging.INFO if args.verbose else logging.WARNING,
            format="%(levelname)s %(name)s: %(message)s",
        )
        return COMMANDS[args.command](args)
    except _UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_INPUT
    except InputError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except EstimationError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
