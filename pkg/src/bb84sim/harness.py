"""Reproducible Monte Carlo runners: the eavesdropper-fraction sweep, QBER
histograms, and finite-size studies.

Every trial gets its own seed derived from (master_seed, point index, trial
index) with a SplitMix64-style mixer, so trials are independent, reorderable,
and parallelizable: results are keyed by their indices, never by completion
order, and the output is identical for any worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .core import CIMethod, QberEstimate
from .protocol import ChannelModel, EveStrategy, SessionConfig, run_session
from .stats import TrialAggregate, aggregate_trials, confidence_interval

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15  # SplitMix64 Weyl increment


def _mix64(z: int) -> int:
    """SplitMix64 finalizer (Vigna): two xor-shift-multiply rounds."""
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def derive_trial_seed(master_seed: int, f_index: int, trial_index: int) -> int:
    """Mix (master_seed, f_index, trial_index) into one 64-bit trial seed.

    Each index word is folded in with a Weyl increment and finalized with the
    SplitMix64 mixer. The mapping is frozen: golden tests pin its outputs, so
    archived per-trial seeds stay valid.
    """
    acc = master_seed & _MASK64
    for word in (f_index, trial_index):
        acc = (acc + (word & _MASK64) * _GOLDEN + _GOLDEN) & _MASK64
        acc = _mix64(acc)
    return acc


@dataclass(frozen=True, slots=True)
class SweepConfig:
    """Parameters of an eavesdropper-fraction sweep."""

    f_values: tuple[float, ...]
    trials_per_f: int = 50
    n_qubits: int = 50_000
    sample_fraction: float = 0.5
    channel: ChannelModel = ChannelModel.ideal()
    master_seed: int = 42
    ci_method: CIMethod = CIMethod.CLOPPER_PEARSON
    confidence: float = 0.95

    def __post_init__(self) -> None:
        if not self.f_values:
            raise ValueError("f_values must be non-empty")
        if any(not 0.0 <= f <= 1.0 for f in self.f_values):
            raise ValueError("every f must lie in [0, 1]")
        if any(b <= a for a, b in zip(self.f_values, self.f_values[1:])):
            raise ValueError("f_values must be strictly increasing")
        if self.trials_per_f < 2:
            raise ValueError(
                f"at least 2 trials per point are required to aggregate, "
                f"got {self.trials_per_f}"
            )
        if self.n_qubits < 1:
            raise ValueError(f"n_qubits must be positive, got {self.n_qubits}")
        if not 0.0 < self.sample_fraction < 1.0:
            raise ValueError(
                f"sample_fraction must be strictly in (0, 1), got {self.sample_fraction}"
            )
        if not 0 <= self.master_seed < 2**64:
            raise ValueError("master_seed must fit in 64 bits")
        if not 0.0 < self.confidence < 1.0:
            raise ValueError(f"confidence must be in (0, 1), got {self.confidence}")


@dataclass(frozen=True, slots=True)
class TrialRow:
    """One trial's bookkeeping, sufficient to recompute every aggregate."""

    f: float
    trial: int
    seed: int
    n_qubits: int
    sifted_count: int
    compared_n: int
    errors_k: int
    qber: float


@dataclass(frozen=True, slots=True)
class SweepPoint:
    """Aggregate for one f, with the theoretical f/4 alongside."""

    f: float
    aggregate: TrialAggregate
    theory_f_over_4: float


@dataclass(frozen=True, slots=True)
class SweepResult:
    per_point: tuple[SweepPoint, ...]
    per_trial_rows: tuple[TrialRow, ...]


def _run_trial(
    f: float,
    f_index: int,
    trial_index: int,
    *,
    n_qubits: int,
    sample_fraction: float,
    channel: ChannelModel,
    master_seed: int,
) -> TrialRow:
    seed = derive_trial_seed(master_seed, f_index, trial_index)
    eve = EveStrategy.intercept_resend(f) if f > 0.0 else EveStrategy.absent()
    config = SessionConfig(
        n_qubits=n_qubits,
        eve=eve,
        channel=channel,
        sample_fraction=sample_fraction,
        seed=seed,
    )
    try:
        result = run_session(config)
    except Exception as exc:
        raise RuntimeError(f"trial failed at f={f}, trial={trial_index}: {exc}") from exc
    est = result.estimate
    return TrialRow(
        f=f,
        trial=trial_index,
        seed=seed,
        n_qubits=n_qubits,
        sifted_count=result.sifted_count,
        compared_n=est.compared_n,
        errors_k=est.errors_k,
        qber=est.point_estimate,
    )


def _run_point_trials(
    f: float,
    f_index: int,
    trials: int,
    *,
    n_qubits: int,
    sample_fraction: float,
    channel: ChannelModel,
    master_seed: int,
    workers: int = 1,
) -> list[TrialRow]:
    def job(t: int) -> TrialRow:
        return _run_trial(
            f, f_index, t,
            n_qubits=n_qubits, sample_fraction=sample_fraction,
            channel=channel, master_seed=master_seed,
        )

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(job, range(trials)))
    return [job(t) for t in range(trials)]


def run_sweep(config: SweepConfig, workers: int = 1) -> SweepResult:
    """Run trials_per_f sessions at every f and aggregate per point.

    Deterministic in the config; the worker count only affects wall time.
    """
    rows: list[TrialRow] = []
    points: list[SweepPoint] = []
    for f_index, f in enumerate(config.f_values):
        trial_rows = _run_point_trials(
            f, f_index, config.trials_per_f,
            n_qubits=config.n_qubits,
            sample_fraction=config.sample_fraction,
            channel=config.channel,
            master_seed=config.master_seed,
            workers=workers,
        )
        rows.extend(trial_rows)
        estimates = [QberEstimate(r.errors_k, r.compared_n) for r in trial_rows]
        aggregate = aggregate_trials(estimates, config.confidence)
        points.append(SweepPoint(f=f, aggregate=aggregate, theory_f_over_4=f / 4.0))
    return SweepResult(per_point=tuple(points), per_trial_rows=tuple(rows))


@dataclass(frozen=True, slots=True)
class HistogramResult:
    """Binned per-trial QBER values, with their mean and sample std."""

    bin_edges: tuple[float, ...]
    counts: tuple[int, ...]
    mean: float
    std: float

    def __post_init__(self) -> None:
        if len(self.counts) != len(self.bin_edges) - 1:
            raise ValueError("need exactly one more edge than bins")
        if any(b <= a for a, b in zip(self.bin_edges, self.bin_edges[1:])):
            raise ValueError("bin edges must be strictly increasing")
        if any(c < 0 for c in self.counts):
            raise ValueError("counts must be non-negative")


def run_histogram(
    f: float,
    *,
    trials: int = 50,
    n_qubits: int = 50_000,
    sample_fraction: float = 0.5,
    channel: ChannelModel = ChannelModel.ideal(),
    master_seed: int = 42,
    bin_width: float = 0.002,
    f_index: int = 0,
    workers: int = 1,
) -> HistogramResult:
    """Distribution of per-trial QBER values at a fixed eavesdropper fraction.

    Bins of the given width cover [max(0, mean - 5 std), mean + 5 std],
    widened if needed so that every trial lands in some bin; when all trials
    agree exactly (std = 0) a single bin holds them all. Pass f_index to
    reuse the per-trial seeds of a sweep position.
    """
    if trials < 2:
        raise ValueError(f"need at least 2 trials, got {trials}")
    if bin_width <= 0.0:
        raise ValueError(f"bin_width must be positive, got {bin_width}")
    rows = _run_point_trials(
        f, f_index, trials,
        n_qubits=n_qubits, sample_fraction=sample_fraction,
        channel=channel, master_seed=master_seed, workers=workers,
    )
    values = np.array([r.qber for r in rows])
    mean = float(np.mean(values))
    std = float(np.std(values, ddof=1))
    if std == 0.0:
        edges = np.array([mean, mean + bin_width])
    else:
        lo = min(max(0.0, mean - 5.0 * std), float(values.min()))
        hi = max(mean + 5.0 * std, float(values.max()) + bin_width * 1e-9)
        n_bins = max(1, math.ceil((hi - lo) / bin_width))
        edges = lo + bin_width * np.arange(n_bins + 1)
    counts, _ = np.histogram(values, bins=edges)
    assert int(counts.sum()) == trials
    return HistogramResult(
        bin_edges=tuple(float(e) for e in edges),
        counts=tuple(int(c) for c in counts),
        mean=mean,
        std=std,
    )


@dataclass(frozen=True, slots=True)
class FiniteSizePoint:
    """Aggregate at one qubit count, plus the mean per-trial interval width."""

    n_qubits: int
    aggregate: TrialAggregate
    ci_width: float


def run_finite_size_study(
    f: float,
    n_values: Sequence[int],
    *,
    trials: int = 50,
    sample_fraction: float = 0.5,
    channel: Optional[ChannelModel] = None,
    master_seed: int = 42,
    ci_method: CIMethod = CIMethod.CLOPPER_PEARSON,
    confidence: float = 0.95,
    workers: int = 1,
) -> list[FiniteSizePoint]:
    """How interval width shrinks as the key grows: sweep over n at fixed f.

    ci_width at each n is the mean, over trials, of the width of the chosen
    interval on that trial's own (k, n) estimate; the per-trial reading is
    what makes "shorter keys give wider intervals" directly visible.
    """
    if not n_values:
        raise ValueError("n_values must be non-empty")
    if any(b <= a for a, b in zip(n_values, n_values[1:])):
        raise ValueError("n_values must be strictly increasing")
    channel = channel if channel is not None else ChannelModel.ideal()
    out: list[FiniteSizePoint] = []
    for n_index, n_qubits in enumerate(n_values):
        rows = _run_point_trials(
            f, n_index, trials,
            n_qubits=n_qubits, sample_fraction=sample_fraction,
            channel=channel, master_seed=master_seed, workers=workers,
        )
        estimates = [QberEstimate(r.errors_k, r.compared_n) for r in rows]
        widths = [
            confidence_interval(e, confidence, ci_method).width for e in estimates
        ]
        out.append(
            FiniteSizePoint(
                n_qubits=n_qubits,
                aggregate=aggregate_trials(estimates, confidence),
                ci_width=float(np.mean(widths)),
            )
        )
    return out
