"""Evaluation against reference annotations.

Covers the clinical summary statistic (events per hour), sample-level
precision/recall/F1 against a rasterized reference event list, per-record
threshold optimization on the averaged-label track, and the correlation
between event-type proportions and the per-record optimal threshold.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .detector import (
    DEFAULT_MIN_EVENT_DURATION,
    _require_binary,
    binarize,
    binary_runs,
    enforce_min_duration,
)
from .errors import LengthMismatch, OverlapError, UnknownType
from .series import ScalarSeries

EVENT_TYPES = ("OSA", "CSA", "MSA", "HYP")
APNEA_TYPES = ("OSA", "CSA", "MSA")

SECONDS_PER_HOUR = 3600.0


@dataclass(frozen=True)
class AnnotationEvent:
    """One scored reference event, in seconds from the start of the record."""

    start: float
    end: float
    kind: str

    def __post_init__(self):
        if self.kind not in EVENT_TYPES:
            raise UnknownType(f"unknown event type {self.kind!r}; expected one of {EVENT_TYPES}")
        if not self.start < self.end:
            raise ValueError(f"event start {self.start} must precede end {self.end}")

    @property
    def duration(self) -> float:
        return self.end - self.start


@dataclass(frozen=True)
class ReferenceAnnotation:
    """Sorted, non-overlapping reference events over one recording."""

    events: tuple[AnnotationEvent, ...]
    recording_duration: float

    def __post_init__(self):
        if not self.recording_duration > 0:
            raise ValueError("recording_duration must be positive")
        events = tuple(sorted(self.events, key=lambda e: (e.start, e.end)))
        object.__setattr__(self, "events", events)
        for event in events:
            if event.start < 0 or event.end > self.recording_duration + 1e-9:
                raise ValueError(
                    f"event [{event.start}, {event.end}] s lies outside the "
                    f"{self.recording_duration} s recording"
                )
        for prev, cur in zip(events, events[1:]):
            if cur.start < prev.end:
                raise OverlapError(
                    f"events [{prev.start}, {prev.end}] and "
                    f"[{cur.start}, {cur.end}] overlap"
                )

    def selected(self, include_hypopnea: bool = True) -> tuple[AnnotationEvent, ...]:
        if include_hypopnea:
            return self.events
        return tuple(e for e in self.events if e.kind in APNEA_TYPES)

    def event_count(self, include_hypopnea: bool = True) -> int:
        return len(self.selected(include_hypopnea))

    def ahi_reference(self, include_hypopnea: bool = True) -> float:
        """Scored events per hour of recording."""
        return self.event_count(include_hypopnea) / (
            self.recording_duration / SECONDS_PER_HOUR
        )

    def type_proportions(self) -> dict[str, float]:
        """Share of each event type among all events (all zero when empty)."""
        counts = {kind: 0 for kind in EVENT_TYPES}
        for event in self.events:
            counts[event.kind] += 1
        total = len(self.events)
        if total == 0:
            return {kind: 0.0 for kind in EVENT_TYPES}
        return {kind: counts[kind] / total for kind in EVENT_TYPES}

    def to_labels(
        self,
        sample_rate: float,
        n_samples: int | None = None,
        include_hypopnea: bool = True,
    ) -> ScalarSeries:
        """Rasterize events to a binary series: a sample at time t is 1 when
        some event satisfies start <= t < end (inclusive start, exclusive
        end)."""
        if n_samples is None:
            n_samples = int(round(self.recording_duration * sample_rate))
        values = np.zeros(n_samples)
        for event in self.selected(include_hypopnea):
            lo = int(np.ceil(event.start * sample_rate - 1e-9))
            hi = int(np.ceil(event.end * sample_rate - 1e-9))
            values[max(lo, 0) : min(hi, n_samples)] = 1.0
        return ScalarSeries(values, sample_rate, 0.0, role="reference_labels")


def ahi(labels: ScalarSeries, duration: float | None = None) -> float:
    """Events per hour: count of maximal 1-runs over the recording length.

    ``duration`` defaults to the series length; pass the full recording
    duration when the label track covers only part of it.
    """
    values = _require_binary(labels)
    if duration is None:
        duration = labels.duration
    if not duration > 0:
        raise ValueError("duration must be positive")
    return len(binary_runs(values)) / (duration / SECONDS_PER_HOUR)


class F1Result(NamedTuple):
    f1: float
    precision: float
    recall: float


def f1_score(est: ScalarSeries, ref: ScalarSeries) -> F1Result:
    """Sample-level F1 of a binary estimate against a binary reference.

    Defined as 0 when precision and recall are both 0 (or undefined).
    Swapping the arguments swaps precision and recall and preserves F1.
    """
    if len(est) != len(ref) or est.sample_rate != ref.sample_rate:
        raise LengthMismatch(
            f"estimate ({len(est)} @ {est.sample_rate} Hz) and reference "
            f"({len(ref)} @ {ref.sample_rate} Hz) are not comparable"
        )
    e = _require_binary(est)
    r = _require_binary(ref)
    tp = float(np.sum((e == 1.0) & (r == 1.0)))
    fp = float(np.sum((e == 1.0) & (r == 0.0)))
    fn = float(np.sum((e == 0.0) & (r == 1.0)))
    precision = tp / (tp + fp) if tp + fp > 0 else 0.0
    recall = tp / (tp + fn) if tp + fn > 0 else 0.0
    if precision + recall == 0.0:
        return F1Result(0.0, precision, recall)
    return F1Result(2.0 * precision * recall / (precision + recall), precision, recall)


DEFAULT_THRESHOLD_GRID = tuple(np.round(np.arange(0, 101) / 100.0, 2).tolist())


class ThresholdResult(NamedTuple):
    threshold: float
    f1: float


def optimize_threshold(
    lbar: ScalarSeries,
    ref: ScalarSeries,
    grid: Sequence[float] = DEFAULT_THRESHOLD_GRID,
    min_event_duration: float = DEFAULT_MIN_EVENT_DURATION,
) -> ThresholdResult:
    """Exhaustive search for the label threshold maximizing F1.

    Each grid value is applied as binarize + minimum-duration rule, then
    scored against the reference; ties break toward the smaller threshold.
    """
    grid = [float(g) for g in grid]
    if not grid:
        raise ValueError("threshold grid must be non-empty")
    if any(g < 0.0 or g > 1.0 for g in grid):
        raise ValueError("thresholds must lie in [0, 1]")
    best = ThresholdResult(float("nan"), -1.0)
    for threshold in sorted(grid):
        labels = enforce_min_duration(binarize(lbar, threshold), min_event_duration)
        score = f1_score(labels, ref).f1
        if score > best.f1:
            best = ThresholdResult(threshold, score)
    return best


def pearson_correlation(x, y) -> float | None:
    """Pearson correlation coefficient, or None when either input is
    constant (zero variance makes the coefficient undefined)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise LengthMismatch("correlation inputs must be equal-length vectors")
    if x.size < 2:
        raise ValueError("correlation needs at least two points")
    # test constancy on the raw values: subtracting the mean first would
    # leave one-ulp residues on exactly constant inputs
    if np.all(x == x[0]) or np.all(y == y[0]):
        return None
    xm = x - x.mean()
    ym = y - y.mean()
    denom = np.sqrt(np.sum(xm * xm) * np.sum(ym * ym))
    if denom == 0.0:
        return None
    return float(np.clip(np.sum(xm * ym) / denom, -1.0, 1.0))


def type_threshold_correlation(
    patients: Sequence[tuple[dict, float]],
) -> dict[str, float | None]:
    """Correlation of each event type's proportion with the per-record
    optimal threshold.

    ``patients`` holds (type_proportions, optimal_threshold) pairs; each
    proportion mapping must cover the known types and sum to 1.  A type
    whose proportion vector is constant (or a constant threshold vector)
    maps to None.
    """
    if len(patients) < 3:
        raise ValueError("correlation needs at least 3 records")
    thresholds = []
    proportions = {kind: [] for kind in EVENT_TYPES}
    for props, threshold in patients:
        missing = [kind for kind in EVENT_TYPES if kind not in props]
        if missing:
            raise UnknownType(f"proportions missing event types {missing}")
        total = sum(props[kind] for kind in EVENT_TYPES)
        if abs(total - 1.0) > 1e-6:
            raise ValueError(f"proportions sum to {total}, expected 1")
        if not 0.0 <= threshold <= 1.0:
            raise ValueError(f"threshold {threshold} outside [0, 1]")
        thresholds.append(threshold)
        for kind in EVENT_TYPES:
            proportions[kind].append(props[kind])
    return {
        kind: pearson_correlation(proportions[kind], thresholds)
        for kind in EVENT_TYPES
    }


@dataclass(frozen=True)
class EvaluationReport:
    """Everything needed to compare a detection run against its reference."""

    ahi_est: float
    ahi_ref: float
    f1: float
    precision: float
    recall: float
    optimal_threshold: float | None
    optimal_f1: float | None
    type_proportions: dict[str, float]

    @property
    def ahi_error(self) -> float:
        return abs(self.ahi_est - self.ahi_ref)

    def to_dict(self) -> dict:
        return {
            "ahi_est": self.ahi_est,
            "ahi_ref": self.ahi_ref,
            "ahi_error": self.ahi_error,
            "f1": self.f1,
            "precision": self.precision,
            "recall": self.recall,
            "optimal_threshold": self.optimal_threshold,
            "optimal_f1": self.optimal_f1,
            "type_proportions": dict(self.type_proportions),
        }


def evaluation_report(
    labels: ScalarSeries,
    reference: ReferenceAnnotation,
    lbar: ScalarSeries | None = None,
    optimize: bool = False,
    min_event_duration: float = DEFAULT_MIN_EVENT_DURATION,
    include_hypopnea: bool = True,
    threshold_grid: Sequence[float] = DEFAULT_THRESHOLD_GRID,
) -> EvaluationReport:
    """Build the full evaluation for one record.

    The reference is rasterized onto the label grid.  With ``optimize`` and
    an averaged-label track, the threshold search runs and the reported
    F1/precision/recall and estimated event rate use the re-binarized
    optimal labels; otherwise they use ``labels`` as given.
    """
    ref_labels = reference.to_labels(
        labels.sample_rate, len(labels), include_hypopnea
    )
    optimal_threshold = None
    optimal_f1 = None
    scored = labels
    if optimize:
        if lbar is None:
            raise ValueError("threshold optimization needs the averaged-label track")
        optimal_threshold, optimal_f1 = optimize_threshold(
            lbar, ref_labels, threshold_grid, min_event_duration
        )
        scored = enforce_min_duration(
            binarize(lbar, optimal_threshold), min_event_duration
        )
    score = f1_score(scored, ref_labels)
    return EvaluationReport(
        ahi_est=ahi(scored),
        ahi_ref=reference.ahi_reference(include_hypopnea),
        f1=score.f1,
        precision=score.precision,
        recall=score.recall,
        optimal_threshold=optimal_threshold,
        optimal_f1=optimal_f1,
        type_proportions=reference.type_proportions(),
    )
