"""Overlapping-interval apnea detection.

A sliding grid of long analysis intervals covers the record; each interval
gets its own mixture fit and binary label track, the tracks are averaged
per sample into an apnea probability, and the probability is binarised and
cleaned with a minimum-duration rule.  Averaging over many shifted intervals
is what makes the result robust to post-event body movements that corrupt
any single interval's fit.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import CoverageGap, IntervalLongerThanRecord, NonBinaryInput
from .gmm import (
    DEFAULT_MAX_ITER,
    DEFAULT_TOL,
    GmmFit,
    LabelRuleConfig,
    fit_gmm_em,
    temporary_labels,
)
from .pipeline import FilterConfig
from .series import ScalarSeries

DEFAULT_INTERVAL_LENGTH = 60.0  # s
DEFAULT_STEP = 2.5  # s
DEFAULT_LABEL_THRESHOLD = 0.60
DEFAULT_MIN_EVENT_DURATION = 10.0  # s


@dataclass(frozen=True)
class Interval:
    """One analysis window: [start_time, start_time + length) in seconds,
    [start_index, start_index + n_samples) on the sample grid."""

    start_time: float
    end_time: float
    start_index: int
    n_samples: int

    @property
    def end_index(self) -> int:
        return self.start_index + self.n_samples


@dataclass(frozen=True, eq=False)
class IntervalGrid:
    """Sliding interval grid with per-sample coverage counts."""

    total_duration: float
    interval_length: float
    step: float
    sample_rate: float
    intervals: tuple[Interval, ...]
    coverage: np.ndarray
    short_record: bool = False

    def __len__(self) -> int:
        return len(self.intervals)


@dataclass(frozen=True)
class DetectionConfig:
    """Everything the detection chain needs, expressed in seconds.

    ``filter`` is only consulted by callers that start from displacement or
    echo input; ``detect`` itself consumes a ready envelope.
    """

    label_threshold: float = DEFAULT_LABEL_THRESHOLD
    min_event_duration: float = DEFAULT_MIN_EVENT_DURATION
    interval_length: float = DEFAULT_INTERVAL_LENGTH
    step: float = DEFAULT_STEP
    filter: FilterConfig = FilterConfig()
    label_rule: LabelRuleConfig = LabelRuleConfig()
    max_iter: int = DEFAULT_MAX_ITER
    tol: float = DEFAULT_TOL
    restarts: int = 0
    seed: int | None = None

    def __post_init__(self):
        if not 0.0 <= self.label_threshold <= 1.0:
            raise ValueError("label_threshold must lie in [0, 1]")
        if self.min_event_duration < 0:
            raise ValueError("min_event_duration must be non-negative")
        if not self.interval_length > 0 or not self.step > 0:
            raise ValueError("interval_length and step must be positive")


@dataclass(frozen=True, eq=False)
class IntervalFit:
    """Mixture fit and temporary label track of one interval."""

    interval: Interval
    fit: GmmFit
    labels: ScalarSeries


@dataclass(frozen=True, eq=False)
class DetectionResult:
    """Final labels plus the intermediate products for inspection."""

    labels: ScalarSeries  # binary, after the minimum-duration rule
    averaged: ScalarSeries  # per-sample mean of temporary labels, in [0, 1]
    interval_fits: tuple[IntervalFit, ...]
    grid: IntervalGrid

    def events(self) -> list[tuple[float, float]]:
        """(start_s, end_s) of each detected apnea event."""
        return label_events(self.labels)


def build_intervals(
    total_duration: float,
    interval_length: float = DEFAULT_INTERVAL_LENGTH,
    step: float = DEFAULT_STEP,
    sample_rate: float = 10.0,
) -> IntervalGrid:
    """Sliding grid of intervals covering ``[0, total_duration]``.

    Interval n starts at ``(n - 1) * step``; when the record length minus the
    interval length is not a multiple of the step, one extra interval ending
    exactly at the record end is appended so coverage reaches the last
    sample.  A record shorter than one interval degrades to a single
    full-record interval and emits :class:`IntervalLongerThanRecord`.
    """
    if not interval_length > 0 or not step > 0 or not total_duration > 0:
        raise ValueError("durations and step must be positive")
    n_total = int(round(total_duration * sample_rate))

    if total_duration < interval_length:
        warnings.warn(
            f"record of {total_duration} s is shorter than one "
            f"{interval_length} s interval; using a single full-record interval",
            IntervalLongerThanRecord,
        )
        interval = Interval(0.0, total_duration, 0, n_total)
        return IntervalGrid(
            total_duration,
            interval_length,
            step,
            sample_rate,
            (interval,),
            _coverage((interval,), n_total),
            short_record=True,
        )

    n_samples = int(round(interval_length * sample_rate))
    count = int(np.floor((total_duration - interval_length) / step + 1e-9)) + 1
    intervals = []
    for n in range(count):
        start = n * step
        start_index = int(round(start * sample_rate))
        intervals.append(Interval(start, start + interval_length, start_index, n_samples))
    if intervals[-1].end_index < n_total:
        intervals.append(
            Interval(
                total_duration - interval_length,
                total_duration,
                n_total - n_samples,
                n_samples,
            )
        )
    grid = IntervalGrid(
        total_duration,
        interval_length,
        step,
        sample_rate,
        tuple(intervals),
        _coverage(tuple(intervals), n_total),
    )
    assert grid.coverage.min() >= 1
    return grid


def _coverage(intervals: tuple[Interval, ...], n_total: int) -> np.ndarray:
    counts = np.zeros(n_total, dtype=int)
    for itv in intervals:
        counts[itv.start_index : itv.end_index] += 1
    counts.setflags(write=False)
    return counts


def average_labels(
    per_interval_labels: Sequence[tuple[Interval, ScalarSeries]],
) -> ScalarSeries:
    """Per-sample mean of the temporary labels of all covering intervals.

    Every sample of the output grid must be covered by at least one interval;
    a gap raises :class:`CoverageGap`.
    """
    if not per_interval_labels:
        raise ValueError("no interval labels to average")
    sample_rate = per_interval_labels[0][1].sample_rate
    base_start = (
        per_interval_labels[0][1].start_time - per_interval_labels[0][0].start_time
    )
    n_total = max(itv.end_index for itv, _ in per_interval_labels)
    sums = np.zeros(n_total)
    counts = np.zeros(n_total, dtype=int)
    for itv, labels in per_interval_labels:
        if labels.sample_rate != sample_rate:
            raise ValueError("all label series must share one sample rate")
        if len(labels) != itv.n_samples:
            raise ValueError(
                f"label series of {len(labels)} samples does not match its "
                f"{itv.n_samples}-sample interval"
            )
        sums[itv.start_index : itv.end_index] += labels.values
        counts[itv.start_index : itv.end_index] += 1
    uncovered = np.flatnonzero(counts == 0)
    if uncovered.size:
        raise CoverageGap(int(uncovered[0]))
    return ScalarSeries(sums / counts, sample_rate, base_start, role="averaged_labels")


def binarize(lbar: ScalarSeries, label_threshold: float = DEFAULT_LABEL_THRESHOLD) -> ScalarSeries:
    """Threshold the averaged labels: 1 where the value reaches the threshold
    (inclusive), 0 elsewhere."""
    return lbar.with_values(
        (lbar.values >= label_threshold).astype(float), role="binary_labels"
    )


def enforce_min_duration(
    lhat: ScalarSeries, min_duration: float = DEFAULT_MIN_EVENT_DURATION
) -> ScalarSeries:
    """Zero out every maximal run of ones shorter than ``min_duration``.

    Runs whose duration equals the minimum are kept.  The operation is
    idempotent and never adds ones.
    """
    values = _require_binary(lhat)
    out = values.copy()
    min_samples = int(np.ceil(min_duration * lhat.sample_rate - 1e-9))
    for start, stop in binary_runs(values):
        if stop - start < min_samples:
            out[start:stop] = 0.0
    return lhat.with_values(out, role="final_labels")


def binary_runs(values: np.ndarray) -> list[tuple[int, int]]:
    """Half-open [start, stop) index ranges of maximal runs of ones."""
    padded = np.concatenate(([0.0], values, [0.0]))
    delta = np.diff(padded)
    starts = np.flatnonzero(delta == 1)
    stops = np.flatnonzero(delta == -1)
    return list(zip(starts.tolist(), stops.tolist()))


def label_events(labels: ScalarSeries) -> list[tuple[float, float]]:
    """(start_s, end_s) of each maximal run of ones in a binary series."""
    values = _require_binary(labels)
    t0, fs = labels.start_time, labels.sample_rate
    return [(t0 + start / fs, t0 + stop / fs) for start, stop in binary_runs(values)]


def _require_binary(series: ScalarSeries) -> np.ndarray:
    values = series.values
    if not np.all((values == 0.0) | (values == 1.0)):
        raise NonBinaryInput("series values must all be 0 or 1")
    return values


def detect(envelope: ScalarSeries, cfg: DetectionConfig = DetectionConfig()) -> DetectionResult:
    """Run the full overlapping-interval detection on an amplitude envelope.

    Per interval: fit the two-component mixture and derive temporary labels;
    then average the labels across intervals, binarise at
    ``cfg.label_threshold`` and drop events shorter than
    ``cfg.min_event_duration``.  Deterministic for a fixed config and seed.
    """
    grid = build_intervals(
        envelope.duration, cfg.interval_length, cfg.step, envelope.sample_rate
    )
    fits = []
    for i, itv in enumerate(grid.intervals):
        samples = envelope.values[itv.start_index : itv.end_index]
        seed = None if cfg.seed is None else cfg.seed + i
        fit, resp = fit_gmm_em(samples, cfg.max_iter, cfg.tol, cfg.restarts, seed)
        labels = temporary_labels(
            fit,
            resp,
            cfg.label_rule,
            envelope.sample_rate,
            envelope.start_time + itv.start_time,
        )
        fits.append(IntervalFit(itv, fit, labels))
    averaged = average_labels([(f.interval, f.labels) for f in fits])
    final = enforce_min_duration(
        binarize(averaged, cfg.label_threshold), cfg.min_event_duration
    )
    return DetectionResult(
        labels=final, averaged=averaged, interval_fits=tuple(fits), grid=grid
    )
