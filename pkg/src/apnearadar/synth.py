"""Synthetic breathing scenarios and the movement-parameter loss sweep.

Scenarios are piecewise sinusoids with phase continuity across segment
boundaries: normal breathing, apnea (strongly reduced amplitude) and
post-event body movement (enlarged amplitude) differ only in amplitude and
period.  ``sweep_bce`` measures, over a grid of movement amplitudes and
durations, how badly such movements corrupt the per-interval mixture fit,
scored as binary cross-entropy between the low-component responsibilities
and the ground-truth apnea track.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .detector import DetectionConfig, build_intervals
from .errors import InvalidSpec, LengthMismatch, NonBinaryInput
from .gmm import fit_gmm_em
from .pipeline import amplitude_envelope, bandpass_respiration
from .series import ScalarSeries

SEGMENT_KINDS = ("normal", "apnea", "movement")

BCE_EPS = 1e-7


@dataclass(frozen=True)
class Segment:
    """One scenario phase: a sinusoid of fixed amplitude (mm) and period (s)."""

    kind: str
    duration: float
    amplitude: float
    period: float = 4.0


@dataclass(frozen=True)
class ScenarioSpec:
    """Piecewise synthetic-breathing schedule.

    ``noise_std`` adds white Gaussian noise (mm) drawn from ``seed``; the
    truth track never depends on the noise.
    """

    segments: tuple[Segment, ...]
    sample_rate: float = 10.0
    noise_std: float = 0.0
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "segments", tuple(self.segments))
        if not self.segments:
            raise InvalidSpec("scenario needs at least one segment")
        for seg in self.segments:
            if seg.kind not in SEGMENT_KINDS:
                raise InvalidSpec(f"unknown segment kind {seg.kind!r}")
            if not seg.duration > 0:
                raise InvalidSpec("segment durations must be positive")
            if seg.amplitude < 0:
                raise InvalidSpec("segment amplitudes must be non-negative")
            if not seg.period > 0:
                raise InvalidSpec("segment periods must be positive")
        if not self.sample_rate > 0:
            raise InvalidSpec("sample_rate must be positive")
        if self.noise_std < 0:
            raise InvalidSpec("noise_std must be non-negative")

    @property
    def total_duration(self) -> float:
        return sum(seg.duration for seg in self.segments)


def reference_scenario(
    movement_amplitude: float = 3.3,
    movement_duration: float = 5.0,
    noise_std: float = 0.0,
    seed: int = 0,
) -> ScenarioSpec:
    """Four-phase benchmark scenario: 40 s normal breathing (1.0 mm), 20 s
    apnea (0.1 mm), a body movement burst, then 35 s normal breathing; all
    at a 4.0 s breathing period and a 10 Hz rate."""
    return ScenarioSpec(
        segments=(
            Segment("normal", 40.0, 1.0),
            Segment("apnea", 20.0, 0.1),
            Segment("movement", movement_duration, movement_amplitude),
            Segment("normal", 35.0, 1.0),
        ),
        noise_std=noise_std,
        seed=seed,
    )


def generate_scenario(spec: ScenarioSpec) -> tuple[ScalarSeries, ScalarSeries]:
    """Displacement and truth tracks for a scenario.

    The sinusoid's phase is continuous across segment boundaries; only the
    amplitude (and possibly period) switches.  Truth is 1 during apnea
    segments and 0 elsewhere, movement included.
    """
    fs = spec.sample_rate
    bounds = [0]
    elapsed = 0.0
    for seg in spec.segments:
        elapsed += seg.duration
        bounds.append(int(np.floor(elapsed * fs + 0.5)))
    n_total = bounds[-1]

    values = np.empty(n_total)
    truth = np.zeros(n_total)
    phase = 0.0
    for seg, start, stop in zip(spec.segments, bounds[:-1], bounds[1:]):
        n = stop - start
        step = 2.0 * np.pi / (seg.period * fs)
        values[start:stop] = seg.amplitude * np.sin(phase + step * np.arange(n))
        phase += step * n
        if seg.kind == "apnea":
            truth[start:stop] = 1.0
    if spec.noise_std > 0:
        rng = np.random.default_rng(spec.seed)
        values = values + rng.normal(0.0, spec.noise_std, n_total)
    return (
        ScalarSeries(values, fs, 0.0, role="displacement"),
        ScalarSeries(truth, fs, 0.0, role="truth"),
    )


def bce_loss(prob: ScalarSeries, truth: ScalarSeries) -> float:
    """Mean binary cross-entropy between a probability track and binary truth.

    Probabilities are clamped to ``[BCE_EPS, 1 - BCE_EPS]`` so perfect hard
    predictions score approximately (not exactly) zero.
    """
    if len(prob) != len(truth) or prob.sample_rate != truth.sample_rate:
        raise LengthMismatch(
            f"probability track ({len(prob)} @ {prob.sample_rate} Hz) and truth "
            f"({len(truth)} @ {truth.sample_rate} Hz) are not comparable"
        )
    y = truth.values
    if not np.all((y == 0.0) | (y == 1.0)):
        raise NonBinaryInput("truth values must all be 0 or 1")
    p = np.clip(prob.values, BCE_EPS, 1.0 - BCE_EPS)
    return float(-np.mean(y * np.log(p) + (1.0 - y) * np.log1p(-p)))


@dataclass(frozen=True, eq=False)
class SweepGrid:
    """Mean per-interval loss for each movement (amplitude, duration) pair;
    ``bce[i, j]`` belongs to ``movement_amplitudes[i]`` and
    ``movement_durations[j]``."""

    movement_amplitudes: tuple[float, ...]
    movement_durations: tuple[float, ...]
    bce: np.ndarray

    def __post_init__(self):
        expected = (len(self.movement_amplitudes), len(self.movement_durations))
        if self.bce.shape != expected:
            raise ValueError(f"loss matrix shape {self.bce.shape} != {expected}")
        if self.bce.min() < 0:
            raise ValueError("loss values must be non-negative")


def _with_movement(spec: ScenarioSpec, amplitude: float, duration: float) -> ScenarioSpec:
    segments = tuple(
        replace(seg, amplitude=amplitude, duration=duration)
        if seg.kind == "movement"
        else seg
        for seg in spec.segments
    )
    return replace(spec, segments=segments)


def interval_responsibility_bce(
    spec: ScenarioSpec, cfg: DetectionConfig = DetectionConfig()
) -> float:
    """Mean over all grid intervals of the BCE between the low-component
    responsibilities and the truth inside that interval."""
    displacement, truth = generate_scenario(spec)
    envelope = amplitude_envelope(bandpass_respiration(displacement, cfg.filter), cfg.filter)
    grid = build_intervals(
        envelope.duration, cfg.interval_length, cfg.step, envelope.sample_rate
    )
    losses = []
    for i, itv in enumerate(grid.intervals):
        samples = envelope.values[itv.start_index : itv.end_index]
        seed = None if cfg.seed is None else cfg.seed + i
        fit, resp = fit_gmm_em(samples, cfg.max_iter, cfg.tol, cfg.restarts, seed)
        gamma_low = envelope.segment(itv.start_index, itv.end_index).with_values(
            resp.gamma[:, 1], role="responsibility"
        )
        losses.append(bce_loss(gamma_low, truth.segment(itv.start_index, itv.end_index)))
    return float(np.mean(losses))


def sweep_bce(
    base_spec: ScenarioSpec,
    movement_amplitudes,
    movement_durations,
    cfg: DetectionConfig = DetectionConfig(),
) -> SweepGrid:
    """Evaluate ``interval_responsibility_bce`` over a movement-parameter grid.

    ``base_spec`` must contain at least one movement segment; each cell
    replaces every movement segment's amplitude and duration with the cell's
    values.  Cells are independent, so the grid is order-free.
    """
    amplitudes = tuple(float(a) for a in movement_amplitudes)
    durations = tuple(float(d) for d in movement_durations)
    if not amplitudes or not durations:
        raise InvalidSpec("sweep needs at least one amplitude and one duration")
    if not any(seg.kind == "movement" for seg in base_spec.segments):
        raise InvalidSpec("base scenario has no movement segment to sweep")
    bce = np.empty((len(amplitudes), len(durations)))
    for i, amplitude in enumerate(amplitudes):
        for j, duration in enumerate(durations):
            cell_spec = _with_movement(base_spec, amplitude, duration)
            bce[i, j] = interval_responsibility_bce(cell_spec, cfg)
    return SweepGrid(amplitudes, durations, bce)
