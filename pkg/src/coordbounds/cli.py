"""Command-line front end: threshold tables, single-point reports, and n-sweeps
emitting plot-ready CSV.

The sweep writes exactly the columns n,Rapprox,R,I,d (R left empty where no
codebook size can reach the target error), deterministically for a given
configuration and seed.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass
from fractions import Fraction

from . import __version__
from .bounds import (
    InfeasibleRateError,
    error_floor,
    exact_achievability_bound,
    expected_codebook_error,
    gaussian_approx_rate,
    optimal_random_codebook_rate,
)
from .distributions import DistributionError, JointDistribution, info_profile, load_distribution
from .simulate import InstanceTooLargeError, mc_expected_error
from .types import TypicalitySpec, default_lambda_cache

__all__ = ["ConfigError", "SweepConfig", "delta_sequence", "run_sweep", "run_point", "main"]


class ConfigError(ValueError):
    """Invalid command-line configuration."""


@dataclass
class SweepConfig:
    """Everything one sweep needs; built from parsed CLI arguments."""

    dist: JointDistribution
    eps: float
    typicality: TypicalitySpec
    n_start: int
    n_end: int
    n_step: int
    out: str | None
    compute_r_sharp: bool = True
    theorem2: bool = False
    mc_check: bool = False
    trials: int = 10000
    seed: int = 0

    def n_grid(self) -> range:
        return range(self.n_start, self.n_end + 1, self.n_step)

    def validate(self) -> None:
        if not 0.0 < self.eps < 1.0:
            raise ConfigError(f"config invalid: eps must be in (0,1), got {self.eps}")
        if self.n_step < 1 or self.n_start < 1 or self.n_end < self.n_start:
            raise ConfigError(
                "config invalid: need 1 <= n-start <= n-end and n-step >= 1, got "
                f"n-start={self.n_start}, n-end={self.n_end}, n-step={self.n_step}"
            )
        if len(self.n_grid()) == 0:
            raise ConfigError("config invalid: empty n grid")
        if self.trials < 1:
            raise ConfigError(f"config invalid: trials must be >= 1, got {self.trials}")


def delta_sequence(spec: TypicalitySpec, n: int) -> float:
    """Threshold value used at blocklength n, as a float."""
    return float(spec.delta_at(n))


def _fmt(x: float) -> str:
    """Shortest round-trip decimal form."""
    return repr(float(x))


def run_sweep(config: SweepConfig, stream=None) -> str:
    """Compute one CSV row per n and return the document; also writes config.out.

    Per-row infeasibility of the exact rate leaves the R field empty; auxiliary
    checks (exact-bound reports, Monte Carlo cross-checks) go to the stream,
    never into the CSV.
    """
    stream = sys.stdout if stream is None else stream
    config.validate()
    dist = config.dist
    mutual = info_profile(dist).mutual_information

    lines = ["n,Rapprox,R,I,d"]
    for n in config.n_grid():
        delta = config.typicality.delta_at(n)
        rapprox = gaussian_approx_rate(n, dist, config.eps)
        r_field = ""
        m_star = None
        if config.compute_r_sharp:
            try:
                rate, m_star = optimal_random_codebook_rate(n, dist, delta, config.eps)
                r_field = _fmt(rate)
            except InfeasibleRateError as exc:
                print(f"n={n}: {exc}", file=stream)
        lines.append(f"{n},{_fmt(rapprox)},{r_field},{_fmt(mutual)},{_fmt(float(delta))}")

        if config.theorem2:
            report = exact_achievability_bound(n, dist, delta, config.eps)
            if report.valid:
                print(f"n={n}: exact bound valid, rate = {_fmt(report.rate)}", file=stream)
            else:
                failed = ", ".join(c.name for c in report.failed_conditions())
                print(f"n={n}: exact bound invalid (failed: {failed})", file=stream)
        if config.mc_check and m_star is not None:
            try:
                est = mc_expected_error(n, m_star, dist, delta, config.trials, config.seed)
            except InstanceTooLargeError as exc:
                print(f"n={n}: mc-check skipped ({exc})", file=stream)
            else:
                exact = expected_codebook_error(n, m_star, dist, delta)
                z = 0.0 if est.std_error == 0.0 else (est.mean - exact) / est.std_error
                print(
                    f"n={n}: mc-check m={m_star} mean={_fmt(est.mean)} "
                    f"exact={_fmt(exact)} std_error={_fmt(est.std_error)} z={z:.3f}",
                    file=stream,
                )

    doc = "\n".join(lines) + "\n"
    if config.out:
        with open(config.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(doc)
    return doc


def run_point(
    dist: JointDistribution,
    n: int,
    eps: float,
    typicality: TypicalitySpec,
    mc_check: bool = False,
    trials: int = 10000,
    seed: int = 0,
    stream=None,
) -> None:
    """Print every bound and diagnostic for a single (n, delta, eps) point."""
    stream = sys.stdout if stream is None else stream
    if not 0.0 < eps < 1.0:
        raise ConfigError(f"config invalid: eps must be in (0,1), got {eps}")
    delta = typicality.delta_at(n)
    mutual = info_profile(dist).mutual_information
    print(f"n = {n}", file=stream)
    print(f"delta = {_fmt(float(delta))}", file=stream)
    print(f"eps = {_fmt(eps)}", file=stream)
    print(f"I = {_fmt(mutual)}", file=stream)
    print(f"Rapprox = {_fmt(gaussian_approx_rate(n, dist, eps))}", file=stream)
    floor = error_floor(n, dist, delta)
    print(f"error_floor = {_fmt(floor)}", file=stream)

    m_star = None
    try:
        rate, m_star = optimal_random_codebook_rate(n, dist, delta, eps)
        print(f"R_sharp = {_fmt(rate)} (m_star = {m_star})", file=stream)
    except InfeasibleRateError as exc:
        print(f"R_sharp = infeasible ({exc})", file=stream)

    report = exact_achievability_bound(n, dist, delta, eps)
    print(f"exact_bound_valid = {report.valid}", file=stream)
    for cond in report.conditions:
        mark = "ok" if cond.satisfied else "FAIL"
        print(f"  [{mark}] {cond.name} (threshold = {cond.threshold})", file=stream)
    if report.rate is not None:
        for name, value in report.terms.items():
            print(f"  term {name} = {_fmt(value)}", file=stream)
        print(f"exact_bound_rate = {_fmt(report.rate)}", file=stream)
    else:
        print("exact_bound_rate = undefined", file=stream)

    if mc_check and m_star is not None:
        try:
            est = mc_expected_error(n, m_star, dist, delta, trials, seed)
        except InstanceTooLargeError as exc:
            print(f"mc_check skipped ({exc})", file=stream)
        else:
            exact = expected_codebook_error(n, m_star, dist, delta)
            z = 0.0 if est.std_error == 0.0 else (est.mean - exact) / est.std_error
            print(
                f"mc_check m={m_star}: mean = {_fmt(est.mean)}, exact = {_fmt(exact)}, "
                f"std_error = {_fmt(est.std_error)}, z = {z:.3f}",
                file=stream,
            )


def _parse_rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"config invalid: not a rational number: {text!r}") from exc


def _typicality_from_args(args) -> TypicalitySpec:
    if args.delta_mode == "fixed":
        if args.delta is None:
            raise ConfigError("config invalid: --delta-mode fixed requires --delta")
        try:
            return TypicalitySpec(mode="fixed", delta=_parse_rational(args.delta))
        except ValueError as exc:
            raise ConfigError(f"config invalid: {exc}") from exc
    if args.c is None:
        raise ConfigError("config invalid: --delta-mode convention requires --c")
    try:
        return TypicalitySpec(mode="convention", c=_parse_rational(args.c))
    except ValueError as exc:
        raise ConfigError(f"config invalid: {exc}") from exc


def _load_dist(path: str) -> JointDistribution:
    try:
        return load_distribution(path)
    except FileNotFoundError as exc:
        raise ConfigError(f"config invalid: distribution file not found: {path}") from exc
    except (DistributionError, ValueError) as exc:
        raise ConfigError(f"config invalid: {exc}") from exc


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--dist", required=True, help="distribution JSON file")
    parser.add_argument("--eps", required=True, type=float, help="target error in (0,1)")
    parser.add_argument(
        "--delta-mode",
        choices=("fixed", "convention"),
        default="convention",
        help="fixed threshold, or the family c*sqrt(ln n / n)",
    )
    parser.add_argument("--delta", help="threshold for fixed mode (rational or decimal)")
    parser.add_argument("--c", help="coefficient for convention mode (rational or decimal)")
    parser.add_argument("--mc-check", action="store_true", help="Monte Carlo cross-check")
    parser.add_argument("--trials", type=int, default=10000, help="Monte Carlo trials")
    parser.add_argument("--seed", type=int, default=0, help="Monte Carlo seed")
    parser.add_argument("--cache", help="type-probability cache file to load/save")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="coordbounds",
        description="Finite-blocklength achievability bounds for empirical coordination.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sweep = sub.add_parser("sweep", help="CSV sweep over a blocklength grid")
    _add_common(sweep)
    sweep.add_argument("--n-start", required=True, type=int)
    sweep.add_argument("--n-end", required=True, type=int)
    sweep.add_argument("--n-step", required=True, type=int)
    sweep.add_argument("--out", required=True, help="output CSV path")
    sweep.add_argument(
        "--no-r-sharp", action="store_true", help="skip the exact rate column (left empty)"
    )
    sweep.add_argument(
        "--theorem2", action="store_true", help="report the exact achievability bound per row"
    )

    point = sub.add_parser("point", help="all bounds and diagnostics at one blocklength")
    _add_common(point)
    point.add_argument("--n", required=True, type=int)

    table = sub.add_parser("table-delta", help="threshold values over a list of n")
    table.add_argument("--c", required=True, help="convention coefficient (rational)")
    table.add_argument("--n-list", required=True, help="comma-separated blocklengths")
    return parser


def _with_cache(path: str | None, action) -> None:
    if path and os.path.exists(path):
        default_lambda_cache.load(path)
    action()
    if path:
        default_lambda_cache.save(path)


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "table-delta":
            spec = TypicalitySpec(mode="convention", c=_parse_rational(args.c))
            try:
                n_list = [int(tok) for tok in args.n_list.split(",") if tok.strip()]
            except ValueError as exc:
                raise ConfigError(f"config invalid: bad --n-list: {exc}") from exc
            if not n_list:
                raise ConfigError("config invalid: empty --n-list")
            print("n,d")
            for n in n_list:
                print(f"{n},{_fmt(delta_sequence(spec, n))}")
            return 0

        if args.command == "sweep":
            config = SweepConfig(
                dist=_load_dist(args.dist),
                eps=args.eps,
                typicality=_typicality_from_args(args),
                n_start=args.n_start,
                n_end=args.n_end,
                n_step=args.n_step,
                out=args.out,
                compute_r_sharp=not args.no_r_sharp,
                theorem2=args.theorem2,
                mc_check=args.mc_check,
                trials=args.trials,
                seed=args.seed,
            )
            _with_cache(args.cache, lambda: run_sweep(config))
            print(f"wrote {config.out}")
            return 0

        if args.command == "point":
            dist = _load_dist(args.dist)
            typicality = _typicality_from_args(args)
            _with_cache(
                args.cache,
                lambda: run_point(
                    dist,
                    args.n,
                    args.eps,
                    typicality,
                    mc_check=args.mc_check,
                    trials=args.trials,
                    seed=args.seed,
                ),
            )
            return 0
    except ConfigError as exc:
        print(str(exc), file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"config invalid: {exc}", file=sys.stderr)
        return 2
    raise AssertionError("unreachable")


if __name__ == "__main__":
    sys.exit(main())
