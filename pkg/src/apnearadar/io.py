"""File formats: CSV series/annotations/sweep grids and JSON configs/reports.

All CSV is UTF-8 with LF line endings and a decimal point.  Floats are
written with 17 significant digits so that write/read round-trips are
bit-exact.  Every writer goes through a temp file and ``os.replace`` so a
crash never leaves a half-written output.
"""

from __future__ import annotations

import json
import os
import tempfile

import numpy as np

from .detector import DetectionConfig
from .errors import ConfigError, NonUniformSampling, ParseError
from .gmm import LabelRuleConfig
from .metrics import AnnotationEvent, ReferenceAnnotation
from .pipeline import DEFAULT_WAVELENGTH_MM, FilterConfig
from .series import ComplexEchoSeries, ScalarSeries
from .synth import ScenarioSpec, Segment, SweepGrid

TIME_JITTER_TOLERANCE = 1e-6  # s

_SCALAR_HEADER = "time_s,value"
_COMPLEX_HEADER = "time_s,i,q"
_ANNOTATION_HEADER = "start_s,end_s,type"
_SWEEP_HEADER = "movement_amplitude_mm,movement_duration_s,bce"
_DURATION_COMMENT = "# recording_duration_s:"


def _atomic_write_text(path, text: str) -> None:
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def _atomic_write_bytes(path, data: bytes) -> None:
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def _read_lines(path) -> list[str]:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        text = fh.read()
    return text.splitlines()


def _parse_float(token: str, line_no: int, column: str) -> float:
    try:
        value = float(token)
    except ValueError:
        raise ParseError(f"cannot parse {column} value {token!r}", line_no) from None
    if not np.isfinite(value):
        raise ParseError(f"non-finite {column} value {token!r}", line_no)
    return value


def _split_row(line: str, n_columns: int, line_no: int) -> list[str]:
    parts = line.split(",")
    if len(parts) != n_columns:
        raise ParseError(
            f"expected {n_columns} comma-separated columns, found {len(parts)}",
            line_no,
        )
    return parts


def _check_header(
    lines: list[str], expected: str, start: int = 0, allow_empty: bool = False
) -> None:
    if len(lines) <= start:
        raise ParseError("file is empty", start + 1)
    if lines[start].strip() != expected:
        raise ParseError(f"expected header {expected!r}, found {lines[start]!r}", start + 1)
    if len(lines) == start + 1 and not allow_empty:
        raise ParseError("file has a header but no data rows", start + 2)


def _sample_rate_from_times(times: np.ndarray) -> tuple[float, float]:
    """(sample_rate, start_time) from a uniformly spaced time column.

    Spacing must be constant within ``TIME_JITTER_TOLERANCE``; the rate is
    snapped to 12 significant digits so that times written from a clean rate
    recover it exactly.
    """
    if times.size < 2:
        raise ParseError("need at least two samples to derive the sample rate", 2)
    deltas = np.diff(times)
    dt = float(np.median(deltas))
    if dt <= 0:
        bad = int(np.argmax(deltas <= 0))
        raise NonUniformSampling(bad + 1)
    deviation = np.abs(deltas - dt)
    if deviation.max() > TIME_JITTER_TOLERANCE:
        raise NonUniformSampling(int(np.argmax(deviation > TIME_JITTER_TOLERANCE)) + 1)
    raw = (times.size - 1) / float(times[-1] - times[0])
    snapped = float(f"{raw:.12g}")
    rate = snapped if abs(snapped - raw) <= 1e-9 * raw else raw
    return rate, float(times[0])


def read_scalar_series(path, role: str = "") -> ScalarSeries:
    """Read a `time_s,value` CSV written by :func:`write_scalar_series`."""
    lines = _read_lines(path)
    _check_header(lines, _SCALAR_HEADER)
    times, values = [], []
    for offset, line in enumerate(lines[1:], start=2):
        t, v = _split_row(line, 2, offset)
        times.append(_parse_float(t, offset, "time_s"))
        values.append(_parse_float(v, offset, "value"))
    rate, start = _sample_rate_from_times(np.asarray(times))
    return ScalarSeries(np.asarray(values), rate, start, role=role)


def write_scalar_series(series: ScalarSeries, path) -> None:
    rows = [_SCALAR_HEADER]
    rows.extend(
        f"{t:.17g},{v:.17g}" for t, v in zip(series.times(), series.values)
    )
    _atomic_write_text(path, "\n".join(rows) + "\n")


def read_complex_series(
    path, wavelength_mm: float = DEFAULT_WAVELENGTH_MM
) -> ComplexEchoSeries:
    """Read a `time_s,i,q` CSV of complex radar echo samples.

    The file carries no wavelength; pass the radar's operating wavelength
    (mm) to interpret the phase as displacement later.
    """
    lines = _read_lines(path)
    _check_header(lines, _COMPLEX_HEADER)
    times, samples = [], []
    for offset, line in enumerate(lines[1:], start=2):
        t, re_part, im_part = _split_row(line, 3, offset)
        times.append(_parse_float(t, offset, "time_s"))
        samples.append(
            complex(
                _parse_float(re_part, offset, "i"),
                _parse_float(im_part, offset, "q"),
            )
        )
    rate, _ = _sample_rate_from_times(np.asarray(times))
    return ComplexEchoSeries(np.asarray(samples), rate, wavelength_mm)


def write_complex_series(
    echo: ComplexEchoSeries, path, start_time: float = 0.0
) -> None:
    rows = [_COMPLEX_HEADER]
    times = start_time + np.arange(len(echo)) / echo.sample_rate
    rows.extend(
        f"{t:.17g},{s.real:.17g},{s.imag:.17g}"
        for t, s in zip(times, echo.samples)
    )
    _atomic_write_text(path, "\n".join(rows) + "\n")


def read_annotation(
    path,
    recording_duration: float | None = None,
    default_duration: float | None = None,
) -> ReferenceAnnotation:
    """Read a `start_s,end_s,type` CSV of scored reference events.

    The recording duration comes from, in order of precedence: the
    ``recording_duration`` argument, a leading
    ``# recording_duration_s: <seconds>`` comment line, ``default_duration``
    (a caller-side fallback such as the label-track length), or the latest
    event end time.
    """
    lines = _read_lines(path)
    start = 0
    file_duration = None
    while start < len(lines) and lines[start].startswith("#"):
        comment = lines[start]
        if comment.startswith(_DURATION_COMMENT):
            file_duration = _parse_float(
                comment[len(_DURATION_COMMENT) :].strip(), start + 1, "duration"
            )
        start += 1
    # a record with no scored events is legitimate as long as its duration
    # is known from somewhere else
    _check_header(lines, _ANNOTATION_HEADER, start, allow_empty=True)
    events = []
    for offset, line in enumerate(lines[start + 1 :], start=start + 2):
        begin, end, kind = _split_row(line, 3, offset)
        events.append(
            AnnotationEvent(
                _parse_float(begin, offset, "start_s"),
                _parse_float(end, offset, "end_s"),
                kind.strip(),
            )
        )
    if recording_duration is None:
        recording_duration = file_duration
    if recording_duration is None:
        recording_duration = default_duration
    if recording_duration is None:
        if not events:
            raise ParseError(
                "annotation file has no events and no recording duration", start + 2
            )
        recording_duration = max(e.end for e in events)
    return ReferenceAnnotation(tuple(events), recording_duration)


def write_annotation(annotation: ReferenceAnnotation, path) -> None:
    rows = [
        f"{_DURATION_COMMENT} {annotation.recording_duration:.17g}",
        _ANNOTATION_HEADER,
    ]
    rows.extend(
        f"{e.start:.17g},{e.end:.17g},{e.kind}" for e in annotation.events
    )
    _atomic_write_text(path, "\n".join(rows) + "\n")


def read_sweep_grid(path) -> SweepGrid:
    """Read the long-format sweep CSV written by :func:`write_sweep_grid`."""
    lines = _read_lines(path)
    _check_header(lines, _SWEEP_HEADER)
    cells: dict[tuple[float, float], float] = {}
    for offset, line in enumerate(lines[1:], start=2):
        a, d, value = _split_row(line, 3, offset)
        key = (
            _parse_float(a, offset, "movement_amplitude_mm"),
            _parse_float(d, offset, "movement_duration_s"),
        )
        if key in cells:
            raise ParseError(f"duplicate sweep cell {key}", offset)
        cells[key] = _parse_float(value, offset, "bce")
    amplitudes = tuple(sorted({a for a, _ in cells}))
    durations = tuple(sorted({d for _, d in cells}))
    bce = np.empty((len(amplitudes), len(durations)))
    for i, a in enumerate(amplitudes):
        for j, d in enumerate(durations):
            if (a, d) not in cells:
                raise ParseError(f"sweep grid is missing cell ({a}, {d})", len(lines))
            bce[i, j] = cells[(a, d)]
    return SweepGrid(amplitudes, durations, bce)


def write_sweep_grid(grid: SweepGrid, path) -> None:
    rows = [_SWEEP_HEADER]
    for i, a in enumerate(grid.movement_amplitudes):
        for j, d in enumerate(grid.movement_durations):
            rows.append(f"{a:.17g},{d:.17g},{grid.bce[i, j]:.17g}")
    _atomic_write_text(path, "\n".join(rows) + "\n")


def write_report(report: dict, path) -> None:
    """Write a JSON report with sorted keys and a trailing newline."""
    _atomic_write_text(path, json.dumps(report, indent=2, sort_keys=True) + "\n")


def _load_json(path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON in {os.fspath(path)}: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError(f"top level of {os.fspath(path)} must be a JSON object")
    return data


def _reject_unknown(data: dict, allowed: set, what: str) -> None:
    unknown = sorted(set(data) - allowed)
    if unknown:
        raise ConfigError(f"unknown {what} key(s): {', '.join(unknown)}")


_REQUIRED = object()


def _number(data: dict, key: str, default, what: str):
    value = data.get(key, default)
    if value is _REQUIRED:
        raise ConfigError(f"{what} is missing required key {key!r}")
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{what} key {key!r} must be a number, got {value!r}")
    return value


def _integer(data: dict, key: str, default, what: str, allow_none: bool = False):
    value = data.get(key, default)
    if value is _REQUIRED:
        raise ConfigError(f"{what} is missing required key {key!r}")
    if value is None and allow_none:
        return None
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{what} key {key!r} must be an integer, got {value!r}")
    return value


_SCENARIO_KEYS = {"segments", "sample_rate", "noise_std", "seed"}
_SEGMENT_KEYS = {"kind", "duration", "amplitude", "period"}


def scenario_from_dict(data: dict) -> ScenarioSpec:
    _reject_unknown(data, _SCENARIO_KEYS, "scenario")
    raw_segments = data.get("segments")
    if not isinstance(raw_segments, list) or not raw_segments:
        raise ConfigError("scenario key 'segments' must be a non-empty list")
    segments = []
    for i, seg in enumerate(raw_segments):
        if not isinstance(seg, dict):
            raise ConfigError(f"segment {i} must be a JSON object")
        _reject_unknown(seg, _SEGMENT_KEYS, f"segment {i}")
        kind = seg.get("kind")
        if not isinstance(kind, str):
            raise ConfigError(f"segment {i} key 'kind' must be a string")
        segments.append(
            Segment(
                kind,
                _number(seg, "duration", _REQUIRED, f"segment {i}"),
                _number(seg, "amplitude", _REQUIRED, f"segment {i}"),
                _number(seg, "period", 4.0, f"segment {i}"),
            )
        )
    return ScenarioSpec(
        segments=tuple(segments),
        sample_rate=_number(data, "sample_rate", 10.0, "scenario"),
        noise_std=_number(data, "noise_std", 0.0, "scenario"),
        seed=_integer(data, "seed", 0, "scenario"),
    )


def load_scenario_spec(path) -> ScenarioSpec:
    return scenario_from_dict(_load_json(path))


_DETECTION_KEYS = {
    "label_threshold",
    "min_event_duration",
    "interval_length",
    "step",
    "beta",
    "h1_length",
    "h2_length",
    "envelope_length",
    "max_iter",
    "tol",
    "restarts",
    "seed",
    "wavelength_mm",
}


def detection_from_dict(data: dict) -> tuple[DetectionConfig, float]:
    """(DetectionConfig, wavelength_mm) from a flat JSON mapping; every key
    optional, unknown keys rejected by name."""
    _reject_unknown(data, _DETECTION_KEYS, "detection")
    defaults = DetectionConfig()
    filter_cfg = FilterConfig(
        h1_length=_number(data, "h1_length", defaults.filter.h1_length, "detection"),
        h2_length=_number(data, "h2_length", defaults.filter.h2_length, "detection"),
        envelope_length=_number(
            data, "envelope_length", defaults.filter.envelope_length, "detection"
        ),
    )
    rule = LabelRuleConfig(beta=_number(data, "beta", defaults.label_rule.beta, "detection"))
    cfg = DetectionConfig(
        label_threshold=_number(
            data, "label_threshold", defaults.label_threshold, "detection"
        ),
        min_event_duration=_number(
            data, "min_event_duration", defaults.min_event_duration, "detection"
        ),
        interval_length=_number(
            data, "interval_length", defaults.interval_length, "detection"
        ),
        step=_number(data, "step", defaults.step, "detection"),
        filter=filter_cfg,
        label_rule=rule,
        max_iter=_integer(data, "max_iter", defaults.max_iter, "detection"),
        tol=_number(data, "tol", defaults.tol, "detection"),
        restarts=_integer(data, "restarts", defaults.restarts, "detection"),
        seed=_integer(data, "seed", defaults.seed, "detection", allow_none=True),
    )
    wavelength = _number(data, "wavelength_mm", DEFAULT_WAVELENGTH_MM, "detection")
    return cfg, wavelength


def load_detection_config(path) -> tuple[DetectionConfig, float]:
    return detection_from_dict(_load_json(path))


def detection_to_dict(cfg: DetectionConfig, wavelength_mm: float) -> dict:
    """Flat JSON-ready mapping mirroring :func:`detection_from_dict`."""
    return {
        "label_threshold": cfg.label_threshold,
        "min_event_duration": cfg.min_event_duration,
        "interval_length": cfg.interval_length,
        "step": cfg.step,
        "beta": cfg.label_rule.beta,
        "h1_length": cfg.filter.h1_length,
        "h2_length": cfg.filter.h2_length,
        "envelope_length": cfg.filter.envelope_length,
        "max_iter": cfg.max_iter,
        "tol": cfg.tol,
        "restarts": cfg.restarts,
        "seed": cfg.seed,
        "wavelength_mm": wavelength_mm,
    }
