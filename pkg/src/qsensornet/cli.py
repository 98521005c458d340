"""Command-line front end: ``qsensornet {sweep,verify,crossover,fixtures,overlap}``.

Exit codes: 0 success, 1 verification failure, 2 invalid configuration,
3 scenario error, 4 no sign change in a crossover bracket.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import fixtures, oracle
from .errors import NoSignChange, SensorNetError
from .scenarios import (
    HALF_PI,
    ScenarioId,
    SweepResult,
    crossover_bracket,
    overlap_analysis,
    sweep,
)

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_BAD_CONFIG = 2
EXIT_SCENARIO_ERROR = 3
EXIT_NO_SIGN_CHANGE = 4


class ConfigError(ValueError):
    pass


def fmt(x: float) -> str:
    return format(float(x), ".15g")


@dataclass
class SweepConfig:
    scenario: ScenarioId
    theta_start: float = 0.0
    theta_end: float = HALF_PI
    steps: int = 181
    output: str | None = None
    format: str = "csv"
    jobs: int = 1
    params: dict = field(default_factory=dict)

    def validate(self) -> None:
        if not (math.isfinite(self.theta_start) and math.isfinite(self.theta_end)):
            raise ConfigError("theta bounds must be finite")
        if not self.theta_start < self.theta_end:
            raise ConfigError("--theta-start must be smaller than --theta-end")
        if self.steps < 2:
            raise ConfigError("--steps must be at least 2")
        if self.jobs < 1:
            raise ConfigError("--jobs must be positive")
        if self.format not in ("csv", "json"):
            raise ConfigError(f"unknown format {self.format!r}")
        n = self.params.get("n")
        if n is not None and not 1 <= n <= 4:
            raise ConfigError("--n must be between 1 and 4")
        p0 = self.params.get("p0")
        if p0 is not None and not 0.0 <= p0 <= 1.0:
            raise ConfigError("--p0 must lie in [0, 1]")
        for key in ("c0", "c1", "c2"):
            c = self.params.get(key)
            if c is not None and not 0.0 <= c <= 1.0:
                raise ConfigError(f"--{key} must lie in [0, 1]")
        grid_steps = self.params.get("grid_steps")
        if grid_steps is not None and grid_steps < 11:
            raise ConfigError("--grid-steps must be at least 11")

    def thetas(self) -> np.ndarray:
        return np.linspace(self.theta_start, self.theta_end, self.steps)


def render_csv(result: SweepResult) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(result.columns)
    for row in result.rows():
        writer.writerow([fmt(x) for x in row])
    return buf.getvalue()


def render_json(result: SweepResult) -> str:
    return json.dumps(result.to_dict(), indent=2, sort_keys=False) + "\n"


def _emit(text: str, output: str | None) -> None:
    if output is None or output == "-":
        sys.stdout.write(text)
    else:
        Path(output).write_text(text, encoding="utf-8", newline="\n")


def cmd_sweep(config: SweepConfig) -> int:
    config.validate()
    result = sweep(config.scenario, config.thetas(), jobs=config.jobs, **config.params)
    text = render_csv(result) if config.format == "csv" else render_json(result)
    _emit(text, config.output)
    return EXIT_OK


def cmd_verify(tol: float | None) -> int:
    if tol is not None and not tol > 0:
        raise ConfigError("--tol must be positive")
    reports = oracle.verify_all(tol)
    for report in reports:
        print(report.line())
    failed = [r for r in reports if not r.passed]
    print(f"{len(reports) - len(failed)}/{len(reports)} checks passed")
    return EXIT_OK if not failed else EXIT_VERIFY_FAILED


def cmd_crossover(lo: float, hi: float, tol: float) -> int:
    if not lo < hi:
        raise ConfigError("--lo must be smaller than --hi")
    if not tol > 0:
        raise ConfigError("--tol must be positive")
    a, b = crossover_bracket(None, lo, hi, tol)
    print(f"theta_star={fmt(0.5 * (a + b))}")
    print(f"bracket={fmt(a)},{fmt(b)}")
    return EXIT_OK


def cmd_fixtures(output: str | None, check: bool) -> int:
    if check:
        mismatches = fixtures.check_fixture(output)
        for row, got in mismatches:
            print(f"mismatch {row.scenario} theta={row.theta} {row.name}: stored {row.value}, got {got}")
        print(f"{len(mismatches)} mismatches")
        return EXIT_OK if not mismatches else EXIT_VERIFY_FAILED
    path = fixtures.write_fixture(output)
    print(path)
    return EXIT_OK


def cmd_overlap(thetas: list[float], grid_steps: int) -> int:
    if grid_steps < 11:
        raise ConfigError("--grid-steps must be at least 11")
    print("theta,form_minimized_at_uniform,remaining_average_minimized_at_uniform,argmin_weights")
    for theta in thetas:
        rep = overlap_analysis(theta, grid_steps)
        weights = " ".join(fmt(w) for w in rep.argmin_weights)
        print(f"{fmt(theta)},{rep.form_minimized_at_uniform},{rep.remaining_average_minimized_at_uniform},{weights}")
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad flags already; keep that code for our own checks too
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_BAD_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qsensornet", description="Detector-network discrimination curves and checks.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sw = sub.add_parser("sweep", help="evaluate one scenario over a theta range")
    sw.add_argument("--scenario", required=True, choices=[s.value for s in ScenarioId])
    sw.add_argument("--theta-start", type=float, default=0.0)
    sw.add_argument("--theta-end", type=float, default=HALF_PI)
    sw.add_argument("--steps", type=int, default=181)
    sw.add_argument("--n", type=int, help="detector count for n-det-unambiguous (default 2)")
    sw.add_argument("--p0", type=float, help="prior of 'not fired' for two-det-min-err (default 0.5)")
    sw.add_argument("--c0", type=float)
    sw.add_argument("--c1", type=float)
    sw.add_argument("--c2", type=float)
    sw.add_argument("--grid-steps", type=int, help="simplex lattice size for overlap-analysis")
    sw.add_argument("--output", "-o", help="output file (default stdout)")
    sw.add_argument("--format", choices=("csv", "json"), default="csv")
    sw.add_argument("--jobs", type=int, default=1)

    ve = sub.add_parser("verify", help="run every oracle check")
    ve.add_argument("--tol", type=float, default=None, help="override agreement tolerances")

    cr = sub.add_parser("crossover", help="angle where entangled and product inputs tie")
    cr.add_argument("--lo", type=float, default=0.5)
    cr.add_argument("--hi", type=float, default=0.9)
    cr.add_argument("--tol", type=float, default=1e-6)

    fx = sub.add_parser("fixtures", help="write or check the regression fixture")
    fx.add_argument("--output", "-o", default=None)
    fx.add_argument("--check", action="store_true")

    ov = sub.add_parser("overlap", help="input-state overlap grid search")
    ov.add_argument("--theta", type=float, action="append")
    ov.add_argument("--grid-steps", type=int, default=21)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "sweep":
            params = {
                "n": args.n,
                "p0": args.p0,
                "c0": args.c0,
                "c1": args.c1,
                "c2": args.c2,
                "grid_steps": args.grid_steps,
            }
            config = SweepConfig(
                ScenarioId(args.scenario),
                args.theta_start,
                args.theta_end,
                args.steps,
                args.output,
                args.format,
                args.jobs,
                {k: v for k, v in params.items() if v is not None},
            )
            return cmd_sweep(config)
        if args.command == "verify":
            return cmd_verify(args.tol)
        if args.command == "crossover":
            return cmd_crossover(args.lo, args.hi, args.tol)
        if args.command == "fixtures":
            return cmd_fixtures(args.output, args.check)
        return cmd_overlap(args.theta or [0.3, 0.7, 1.2], args.grid_steps)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_CONFIG
    except NoSignChange as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_SIGN_CHANGE
    except (SensorNetError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_SCENARIO_ERROR


if __name__ == "__main__":
    sys.exit(main())
