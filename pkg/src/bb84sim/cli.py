"""Command-line front end.

Subcommands:
  sweep      eavesdropper-fraction sweep; writes per-trial and aggregate files
  trial      one session end to end: QBER, interval, verdict, key rate
  ci         all four binomial intervals for a given (k, n) side by side
  threshold  the security threshold and the key rate at a given QBER

Exit statuses: 0 success, 1 usage error, 2 runtime/simulation error.

Output formats (frozen; golden tests depend on the exact bytes):
  per-trial CSV header  f,trial,seed,n_qubits,sifted_count,compared_n,errors_k,qber
  aggregate CSV header  f,trials,mean_qber,std_dev,ci_low,ci_high,theory
Floats are fixed 6-decimal in CSV. JSON rows carry the same columns with the
values rounded to 6 decimals before serialization, so both formats encode the
identical numbers.

The default master seed is 42; the BB84SIM_SEED environment variable
overrides it, and an explicit --seed flag overrides both.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass
from typing import Optional, Sequence

from .core import CIMethod, QberEstimate
from .decision import DecisionPolicy, decide, key_rate, threshold_root
from .harness import SweepConfig, SweepResult, TrialRow, run_sweep
from .protocol import ChannelModel, EveStrategy, SessionConfig, run_session
from .stats import confidence_interval

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_RUNTIME = 2

SEED_ENV_VAR = "BB84SIM_SEED"

TRIAL_CSV_HEADER = "f,trial,seed,n_qubits,sifted_count,compared_n,errors_k,qber"
AGGREGATE_CSV_HEADER = "f,trials,mean_qber,std_dev,ci_low,ci_high,theory"

_CI_CHOICES = tuple(m.value for m in CIMethod)
_POLICY_CHOICES = tuple(p.value for p in DecisionPolicy)


class UsageError(ValueError):
    """Bad flag combination discovered after argparse accepted the syntax."""


def _fmt(x: float) -> str:
    return f"{x:.6f}"


# ---------------------------------------------------------------------------
# serialization


@dataclass(frozen=True, slots=True)
class AggregateRow:
    """One aggregate-file row; mirrors the aggregate CSV columns exactly."""

    f: float
    trials: int
    mean_qber: float
    std_dev: float
    ci_low: float
    ci_high: float
    theory: float


def aggregate_rows(result: SweepResult) -> list[AggregateRow]:
    rows = []
    for point in result.per_point:
        agg = point.aggregate
        rows.append(
            AggregateRow(
                f=point.f,
                trials=agg.trials_m,
                mean_qber=agg.mean_qber,
                std_dev=agg.std_dev,
                ci_low=agg.ci_of_mean.lower,
                ci_high=agg.ci_of_mean.upper,
                theory=point.theory_f_over_4,
            )
        )
    return rows


def format_trials_csv(rows: Sequence[TrialRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(TRIAL_CSV_HEADER.split(","))
    for r in rows:
        writer.writerow(
            [
                _fmt(r.f),
                r.trial,
                r.seed,
                r.n_qubits,
                r.sifted_count,
                r.compared_n,
                r.errors_k,
                _fmt(r.qber),
            ]
        )
    return buf.getvalue()


def parse_trials_csv(text: str) -> list[TrialRow]:
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    if header != TRIAL_CSV_HEADER.split(","):
        raise ValueError(f"unexpected per-trial CSV header: {header}")
    rows = []
    for rec in reader:
        rows.append(
            TrialRow(
                f=float(rec[0]),
                trial=int(rec[1]),
                seed=int(rec[2]),
                n_qubits=int(rec[3]),
                sifted_count=int(rec[4]),
                compared_n=int(rec[5]),
                errors_k=int(rec[6]),
                qber=float(rec[7]),
            )
        )
    return rows


def format_aggregate_csv(rows: Sequence[AggregateRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(AGGREGATE_CSV_HEADER.split(","))
    for r in rows:
        writer.writerow(
            [
                _fmt(r.f),
                r.trials,
                _fmt(r.mean_qber),
                _fmt(r.std_dev),
                _fmt(r.ci_low),
                _fmt(r.ci_high),
                _fmt(r.theory),
            ]
        )
    return buf.getvalue()


def parse_aggregate_csv(text: str) -> list[AggregateRow]:
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    if header != AGGREGATE_CSV_HEADER.split(","):
        raise ValueError(f"unexpected aggregate CSV header: {header}")
    rows = []
    for rec in reader:
        rows.append(
            AggregateRow(
                f=float(rec[0]),
                trials=int(rec[1]),
                mean_qber=float(rec[2]),
                std_dev=float(rec[3]),
                ci_low=float(rec[4]),
                ci_high=float(rec[5]),
                theory=float(rec[6]),
            )
        )
    return rows


def _round6(x: float) -> float:
    return round(x, 6)


def format_trials_json(rows: Sequence[TrialRow]) -> str:
    payload = {
        "schema": "trials",
        "columns": TRIAL_CSV_HEADER.split(","),
        "rows": [
            {
                "f": _round6(r.f),
                "trial": r.trial,
                "seed": r.seed,
                "n_qubits": r.n_qubits,
                "sifted_count": r.sifted_count,
                "compared_n": r.compared_n,
                "errors_k": r.errors_k,
                "qber": _round6(r.qber),
            }
            for r in rows
        ],
    }
    return json.dumps(payload, indent=2) + "\n"


def format_aggregate_json(rows: Sequence[AggregateRow]) -> str:
    payload = {
        "schema": "aggregate",
        "columns": AGGREGATE_CSV_HEADER.split(","),
        "rows": [
            {
                "f": _round6(r.f),
                "trials": r.trials,
                "mean_qber": _round6(r.mean_qber),
                "std_dev": _round6(r.std_dev),
                "ci_low": _round6(r.ci_low),
                "ci_high": _round6(r.ci_high),
                "theory": _round6(r.theory),
            }
            for r in rows
        ],
    }
    return json.dumps(payload, indent=2) + "\n"


# ---------------------------------------------------------------------------
# flag plumbing


class _Parser(argparse.ArgumentParser):
    """argparse variant whose usage failures exit with status 1, not 2."""

    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _resolve_seed(flag_value: Optional[int]) -> int:
    """Explicit --seed wins; else the environment variable; else 42."""
    if flag_value is not None:
        return flag_value
    raw = os.environ.get(SEED_ENV_VAR)
    if raw is None:
        return 42
    try:
        seed = int(raw)
    except ValueError:
        raise UsageError(f"{SEED_ENV_VAR} must be an integer, got {raw!r}")
    if not 0 <= seed < 2**64:
        raise UsageError(f"{SEED_ENV_VAR} must fit in 64 bits, got {seed}")
    return seed


def _channel_from(depolarizing_p: float) -> ChannelModel:
    if depolarizing_p == 0.0:
        return ChannelModel.ideal()
    return ChannelModel.depolarizing(depolarizing_p)


def _add_session_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--qubits", type=int, default=50_000,
                   help="transmitted qubits per trial (default 50000)")
    p.add_argument("--sample-fraction", type=float, default=0.5,
                   help="fraction of the sifted key compared publicly (default 0.5)")
    p.add_argument("--seed", type=int, default=None,
                   help=f"master seed (default 42; {SEED_ENV_VAR} overrides the "
                        "default, this flag overrides both)")
    p.add_argument("--depolarizing-p", type=float, default=0.0,
                   help="channel depolarizing probability (default 0.0 = ideal)")
    p.add_argument("--ci", choices=_CI_CHOICES, default=CIMethod.CLOPPER_PEARSON.value,
                   help="interval method for per-trial estimates "
                        "(default clopper-pearson)")
    p.add_argument("--confidence", type=float, default=0.95,
                   help="two-sided confidence level (default 0.95)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="bb84sim", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p_sweep = sub.add_parser(
        "sweep", help="run trials across a grid of interception fractions")
    p_sweep.add_argument("--f-start", type=float, default=0.0)
    p_sweep.add_argument("--f-end", type=float, default=1.0)
    p_sweep.add_argument("--f-step", type=float, default=0.05)
    p_sweep.add_argument("--trials", type=int, default=50,
                         help="trials per grid point (default 50, minimum 2)")
    _add_session_flags(p_sweep)
    p_sweep.add_argument("--out", default="sweep",
                         help="output file prefix (default 'sweep')")
    p_sweep.add_argument("--format", choices=("csv", "json"), default="csv")
    p_sweep.add_argument("--workers", type=int, default=1,
                         help="parallel trial workers; output is identical "
                              "for any value (default 1)")
    p_sweep.set_defaults(func=cmd_sweep)

    p_trial = sub.add_parser("trial", help="run a single session end to end")
    p_trial.add_argument("--eve-fraction", type=float, default=0.0,
                         help="interception fraction f (default 0.0)")
    _add_session_flags(p_trial)
    p_trial.add_argument("--policy", choices=_POLICY_CHOICES,
                         default=DecisionPolicy.UPPER_BOUND.value,
                         help="decide on the point estimate or on the interval's "
                              "upper bound (default upper)")
    p_trial.set_defaults(func=cmd_trial)

    p_ci = sub.add_parser(
        "ci", help="print all four binomial intervals for (k, n)")
    p_ci.add_argument("--k", type=int, required=True, help="observed errors")
    p_ci.add_argument("--n", type=int, required=True, help="compared bits")
    p_ci.add_argument("--confidence", type=float, default=0.95)
    p_ci.set_defaults(func=cmd_ci)

    p_thr = sub.add_parser(
        "threshold", help="security threshold and key rate at a given QBER")
    p_thr.add_argument("--qber", type=float, required=True)
    p_thr.set_defaults(func=cmd_threshold)

    return parser


# ---------------------------------------------------------------------------
# subcommands


def _f_grid(start: float, end: float, step: float) -> tuple[float, ...]:
    if step <= 0.0:
        raise UsageError(f"--f-step must be positive, got {step}")
    if not 0.0 <= start <= 1.0 or not 0.0 <= end <= 1.0:
        raise UsageError("--f-start and --f-end must lie in [0, 1]")
    if end < start:
        raise UsageError("--f-end must not be less than --f-start")
    count = int(math.floor((end - start) / step + 1e-9)) + 1
    return tuple(round(start + i * step, 10) for i in range(count))


def cmd_sweep(args: argparse.Namespace) -> int:
    f_values = _f_grid(args.f_start, args.f_end, args.f_step)
    if args.trials < 2:
        raise UsageError(
            f"--trials must be at least 2 to aggregate, got {args.trials}")
    if args.workers < 1:
        raise UsageError(f"--workers must be at least 1, got {args.workers}")
    try:
        config = SweepConfig(
            f_values=f_values,
            trials_per_f=args.trials,
            n_qubits=args.qubits,
            sample_fraction=args.sample_fraction,
            channel=_channel_from(args.depolarizing_p),
            master_seed=_resolve_seed(args.seed),
            ci_method=CIMethod(args.ci),
            confidence=args.confidence,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    result = run_sweep(config, workers=args.workers)
    agg = aggregate_rows(result)

    ext = args.format
    trials_path = f"{args.out}_trials.{ext}"
    aggregate_path = f"{args.out}_aggregate.{ext}"
    if args.format == "csv":
        trials_text = format_trials_csv(result.per_trial_rows)
        aggregate_text = format_aggregate_csv(agg)
    else:
        trials_text = format_trials_json(result.per_trial_rows)
        aggregate_text = format_aggregate_json(agg)
    with open(trials_path, "w", encoding="utf-8", newline="") as fh:
        fh.write(trials_text)
    with open(aggregate_path, "w", encoding="utf-8", newline="") as fh:
        fh.write(aggregate_text)

    widths = (8, 6, 9, 8, 8, 8, 8)
    names = AGGREGATE_CSV_HEADER.split(",")
    print("  ".join(n.rjust(w) for n, w in zip(names, widths)))
    for r in agg:
        cells = (
            _fmt(r.f), str(r.trials), _fmt(r.mean_qber), _fmt(r.std_dev),
            _fmt(r.ci_low), _fmt(r.ci_high), _fmt(r.theory),
        )
        print("  ".join(c.rjust(w) for c, w in zip(cells, widths)))
    print(f"wrote {trials_path}", file=sys.stderr)
    print(f"wrote {aggregate_path}", file=sys.stderr)
    return EXIT_OK


def cmd_trial(args: argparse.Namespace) -> int:
    if not 0.0 <= args.eve_fraction <= 1.0:
        raise UsageError(
            f"--eve-fraction must lie in [0, 1], got {args.eve_fraction}")
    try:
        eve = (EveStrategy.intercept_resend(args.eve_fraction)
               if args.eve_fraction > 0.0 else EveStrategy.absent())
        config = SessionConfig(
            n_qubits=args.qubits,
            eve=eve,
            channel=_channel_from(args.depolarizing_p),
            sample_fraction=args.sample_fraction,
            seed=_resolve_seed(args.seed),
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    result = run_session(config)
    est = result.estimate
    method = CIMethod(args.ci)
    interval = confidence_interval(est, args.confidence, method)
    verdict = decide(est, interval, DecisionPolicy(args.policy))
    report = key_rate(est.point_estimate)

    print(f"qubits sent    : {config.n_qubits}")
    print(f"sifted count   : {result.sifted_count}")
    print(f"compared n     : {est.compared_n}")
    print(f"errors k       : {est.errors_k}")
    print(f"qber           : {_fmt(est.point_estimate)}")
    print(f"{method.value} {args.confidence:g} CI : "
          f"[{_fmt(interval.lower)}, {_fmt(interval.upper)}]")
    print(f"policy         : {args.policy}")
    print(f"qber used      : {_fmt(verdict.qber_used)}")
    print(f"threshold      : {_fmt(verdict.threshold)}")
    print(f"decision       : {verdict.decision.name}")
    print(f"key rate       : {_fmt(report.rate)} "
          f"({'secure' if report.secure else 'insecure'})")
    return EXIT_OK


def cmd_ci(args: argparse.Namespace) -> int:
    if args.n < 1:
        raise UsageError(f"--n must be at least 1, got {args.n}")
    if not 0 <= args.k <= args.n:
        raise UsageError(f"--k must lie in [0, n], got k={args.k}, n={args.n}")
    if not 0.0 < args.confidence < 1.0:
        raise UsageError(
            f"--confidence must lie in (0, 1), got {args.confidence}")
    est = QberEstimate(errors_k=args.k, compared_n=args.n)
    print(f"k = {args.k}, n = {args.n}, confidence = {args.confidence:g}")
    print(f"point estimate = {_fmt(est.point_estimate)}")
    for method in CIMethod:
        ci = confidence_interval(est, args.confidence, method)
        print(f"{method.value:<15}  [{_fmt(ci.lower)}, {_fmt(ci.upper)}]"
              f"  width {_fmt(ci.width)}")
    return EXIT_OK


def cmd_threshold(args: argparse.Namespace) -> int:
    if not 0.0 <= args.qber <= 0.5:
        raise UsageError(f"--qber must lie in [0, 0.5], got {args.qber}")
    root = threshold_root()
    report = key_rate(args.qber)
    print(f"threshold q*   : {_fmt(root)}")
    print(f"qber           : {_fmt(args.qber)}")
    print(f"key rate       : {_fmt(report.rate)}")
    print(f"status         : {'secure' if report.secure else 'insecure'}")
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"bb84sim: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:
        print(f"bb84sim: error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
