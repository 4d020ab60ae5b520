"""Command-line interface.

Subcommands: ``simulate`` (synthetic scenario to CSV), ``detect`` (echo,
displacement or envelope CSV to apnea labels), ``evaluate`` (labels against
a reference annotation), ``sweep`` (movement-parameter loss grid).  Exit
codes: 0 success, 1 validation or data error, 2 I/O error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from . import __version__
from .detector import (
    DEFAULT_MIN_EVENT_DURATION,
    DetectionConfig,
    detect,
)
from .errors import ApneaRadarError
from .io import (
    detection_to_dict,
    load_detection_config,
    load_scenario_spec,
    read_annotation,
    read_complex_series,
    read_scalar_series,
    write_report,
    write_scalar_series,
    write_sweep_grid,
)
from .metrics import ahi, evaluation_report
from .pipeline import (
    DEFAULT_WAVELENGTH_MM,
    amplitude_envelope,
    bandpass_respiration,
    extract_displacement,
)
from .series import ScalarSeries
from .synth import generate_scenario, sweep_bce

DEFAULT_SWEEP_AMPLITUDES = tuple(1.0 + 0.5 * i for i in range(9))  # 1.0 .. 5.0 mm
DEFAULT_SWEEP_DURATIONS = tuple(5.0 + 2.5 * i for i in range(5))  # 5 .. 15 s


def _seed(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be an integer, got {text!r}") from None
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must fit an unsigned 64-bit integer")
    return value


def _float_list(text: str) -> list[float]:
    try:
        values = [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected comma-separated numbers, got {text!r}"
        ) from None
    if not values:
        raise argparse.ArgumentTypeError("list must contain at least one number")
    return values


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="apnearadar",
        description="Radar-based sleep apnea detection toolkit.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")
    kwargs = {"formatter_class": argparse.ArgumentDefaultsHelpFormatter}

    sim = sub.add_parser(
        "simulate", help="generate a synthetic displacement scenario", **kwargs
    )
    sim.add_argument("--spec", required=True, help="scenario JSON file")
    sim.add_argument(
        "--out-displacement", required=True, help="output displacement CSV"
    )
    sim.add_argument("--out-truth", required=True, help="output truth-label CSV")
    sim.add_argument("--seed", type=_seed, default=None, help="override the scenario's noise seed")
    sim.add_argument("--svg", default=None, help="optional line-chart SVG of the outputs")
    sim.set_defaults(func=_cmd_simulate)

    det = sub.add_parser("detect", help="detect apnea events in a recording", **kwargs)
    det.add_argument("--input", required=True, help="input CSV")
    det.add_argument(
        "--input-kind",
        choices=("iq", "displacement", "envelope"),
        default="displacement",
        help="what the input CSV contains",
    )
    det.add_argument("--config", default=None, help="detection JSON config (defaults apply)")
    det.add_argument("--out-labels", required=True, help="output binary-label CSV")
    det.add_argument("--out-lbar", required=True, help="output averaged-label CSV")
    det.add_argument("--report", default=None, help="optional JSON run report")
    det.add_argument("--seed", type=_seed, default=None, help="override the config's seed")
    det.add_argument("--svg", default=None, help="optional detection-overview SVG")
    det.set_defaults(func=_cmd_detect)

    ev = sub.add_parser(
        "evaluate", help="score detected labels against a reference annotation", **kwargs
    )
    ev.add_argument("--labels", required=True, help="detected binary-label CSV")
    ev.add_argument("--lbar", required=True, help="averaged-label CSV from detect")
    ev.add_argument("--reference", required=True, help="reference annotation CSV")
    ev.add_argument(
        "--optimize-threshold",
        action="store_true",
        help="search the 0.00-1.00 grid for the F1-optimal threshold",
    )
    ev.add_argument(
        "--min-event-duration",
        type=float,
        default=DEFAULT_MIN_EVENT_DURATION,
        help="minimum event duration (s) used when re-thresholding",
    )
    ev.add_argument(
        "--exclude-hypopnea",
        action="store_true",
        help="count only apnea events in the reference rate",
    )
    ev.add_argument("--report", required=True, help="output JSON report")
    ev.set_defaults(func=_cmd_evaluate)

    sw = sub.add_parser(
        "sweep", help="loss grid over movement amplitude and duration", **kwargs
    )
    sw.add_argument("--spec", required=True, help="base scenario JSON (needs a movement segment)")
    sw.add_argument(
        "--dm",
        type=_float_list,
        default=list(DEFAULT_SWEEP_AMPLITUDES),
        help="comma-separated movement amplitudes (mm)",
    )
    sw.add_argument(
        "--tm",
        type=_float_list,
        default=list(DEFAULT_SWEEP_DURATIONS),
        help="comma-separated movement durations (s)",
    )
    sw.add_argument("--config", default=None, help="detection JSON config (defaults apply)")
    sw.add_argument("--out", required=True, help="output grid CSV")
    sw.add_argument("--svg", default=None, help="optional heatmap SVG")
    sw.add_argument("--seed", type=_seed, default=None, help="override scenario and EM seeds")
    sw.set_defaults(func=_cmd_sweep)
    return parser


def _cmd_simulate(args) -> int:
    spec = load_scenario_spec(args.spec)
    if args.seed is not None:
        spec = replace(spec, seed=args.seed)
    displacement, truth = generate_scenario(spec)
    write_scalar_series(displacement, args.out_displacement)
    write_scalar_series(truth, args.out_truth)
    if args.svg:
        from . import plots

        plots.plot_series(
            [("displacement (mm)", displacement), ("truth label", truth)],
            args.svg,
            title="synthetic scenario",
        )
    return 0


def _load_envelope(args, cfg: DetectionConfig, wavelength_mm: float) -> ScalarSeries:
    if args.input_kind == "iq":
        echo = read_complex_series(args.input, wavelength_mm)
        dprime = extract_displacement(echo)
        return amplitude_envelope(bandpass_respiration(dprime, cfg.filter), cfg.filter)
    if args.input_kind == "displacement":
        dprime = read_scalar_series(args.input, role="displacement")
        return amplitude_envelope(bandpass_respiration(dprime, cfg.filter), cfg.filter)
    return read_scalar_series(args.input, role="envelope")


def _cmd_detect(args) -> int:
    if args.config is not None:
        cfg, wavelength_mm = load_detection_config(args.config)
    else:
        cfg, wavelength_mm = DetectionConfig(), DEFAULT_WAVELENGTH_MM
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    envelope = _load_envelope(args, cfg, wavelength_mm)
    result = detect(envelope, cfg)
    write_scalar_series(result.labels, args.out_labels)
    write_scalar_series(result.averaged, args.out_lbar)
    if args.report:
        events = result.events()
        write_report(
            {
                "config": detection_to_dict(cfg, wavelength_mm),
                "input": str(args.input),
                "input_kind": args.input_kind,
                "duration_s": envelope.duration,
                "n_events": len(events),
                "events": [[start, end] for start, end in events],
                "ahi_est": ahi(result.labels),
            },
            args.report,
        )
    if args.svg:
        from . import plots

        plots.plot_detection(envelope, result, args.svg, cfg.label_threshold)
    return 0


def _cmd_evaluate(args) -> int:
    labels = read_scalar_series(args.labels, role="labels")
    lbar = read_scalar_series(args.lbar, role="averaged_labels")
    annotation = read_annotation(args.reference, default_duration=labels.duration)
    include_hypopnea = not args.exclude_hypopnea
    report = evaluation_report(
        labels,
        annotation,
        lbar=lbar,
        optimize=args.optimize_threshold,
        min_event_duration=args.min_event_duration,
        include_hypopnea=include_hypopnea,
    )
    write_report(
        {
            "labels": str(args.labels),
            "lbar": str(args.lbar),
            "reference": str(args.reference),
            "recording_duration_s": annotation.recording_duration,
            "n_reference_events": annotation.event_count(include_hypopnea),
            "include_hypopnea": include_hypopnea,
            "min_event_duration_s": args.min_event_duration,
            **report.to_dict(),
        },
        args.report,
    )
    return 0


def _cmd_sweep(args) -> int:
    spec = load_scenario_spec(args.spec)
    if args.config is not None:
        cfg, _ = load_detection_config(args.config)
    else:
        cfg = DetectionConfig()
    if args.seed is not None:
        spec = replace(spec, seed=args.seed)
        cfg = replace(cfg, seed=args.seed)
    grid = sweep_bce(spec, args.dm, args.tm, cfg)
    write_sweep_grid(grid, args.out)
    if args.svg:
        from . import plots

        plots.plot_sweep(grid, args.svg)
    return 0


def main(argv=None) -> int:
    try:
        args = _build_parser().parse_args(argv)
    except SystemExit as exc:
        return 0 if not exc.code else 1
    try:
        return args.func(args)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ApneaRadarError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
