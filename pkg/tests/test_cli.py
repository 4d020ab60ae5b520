"""Command-line behaviour: subcommand flows, exit codes, determinism."""

import json
import subprocess
import sys

import numpy as np
import pytest

from apnearadar import ScalarSeries, write_scalar_series
from apnearadar.cli import main

SCENARIO = {
    "segments": [
        {"kind": "normal", "duration": 40.0, "amplitude": 1.0},
        {"kind": "apnea", "duration": 20.0, "amplitude": 0.1},
        {"kind": "movement", "duration": 5.0, "amplitude": 3.3},
        {"kind": "normal", "duration": 35.0, "amplitude": 1.0},
    ]
}

REFERENCE_CSV = "# recording_duration_s: 100\nstart_s,end_s,type\n40,60,CSA\n"


@pytest.fixture
def scenario_file(tmp_path):
    path = tmp_path / "scenario.json"
    path.write_text(json.dumps(SCENARIO))
    return path


def run_simulate(tmp_path, scenario_file, tag=""):
    disp = tmp_path / f"d{tag}.csv"
    truth = tmp_path / f"t{tag}.csv"
    code = main(
        [
            "simulate",
            "--spec",
            str(scenario_file),
            "--out-displacement",
            str(disp),
            "--out-truth",
            str(truth),
        ]
    )
    assert code == 0
    return disp, truth


def test_help_and_version_exit_zero(capsys):
    # argparse raises SystemExit(0) for --help; main remaps it to a return
    assert main(["--help"]) == 0
    assert main(["--version"]) == 0
    out = capsys.readouterr().out
    assert "apnearadar" in out


def test_unknown_flag_and_missing_args_exit_one(capsys):
    assert main(["detect", "--bogus"]) == 1
    assert main(["simulate"]) == 1
    assert main([]) == 1
    assert main(["not-a-command"]) == 1


def test_simulate_writes_deterministic_outputs(tmp_path, scenario_file):
    d1, t1 = run_simulate(tmp_path, scenario_file, "1")
    d2, t2 = run_simulate(tmp_path, scenario_file, "2")
    assert d1.read_bytes() == d2.read_bytes()
    assert t1.read_bytes() == t2.read_bytes()
    assert d1.read_text().startswith("time_s,value\n")


def test_detect_full_flow_with_report(tmp_path, scenario_file):
    disp, truth = run_simulate(tmp_path, scenario_file)
    labels = tmp_path / "labels.csv"
    lbar = tmp_path / "lbar.csv"
    report = tmp_path / "report.json"
    code = main(
        [
            "detect",
            "--input",
            str(disp),
            "--out-labels",
            str(labels),
            "--out-lbar",
            str(lbar),
            "--report",
            str(report),
        ]
    )
    assert code == 0
    data = json.loads(report.read_text())
    assert data["n_events"] == 1
    assert data["input_kind"] == "displacement"
    (start, end), = data["events"]
    assert 35.0 < start < 45.0 and 55.0 < end < 65.0
    assert data["config"]["label_threshold"] == 0.60

    ev_report = tmp_path / "eval.json"
    ref = tmp_path / "ref.csv"
    ref.write_text(REFERENCE_CSV)
    code = main(
        [
            "evaluate",
            "--labels",
            str(labels),
            "--lbar",
            str(lbar),
            "--reference",
            str(ref),
            "--optimize-threshold",
            "--report",
            str(ev_report),
        ]
    )
    assert code == 0
    scored = json.loads(ev_report.read_text())
    assert scored["ahi_ref"] == 36.0
    assert scored["n_reference_events"] == 1
    assert 0.0 <= scored["optimal_threshold"] <= 1.0
    assert scored["f1"] > 0.5


def test_detect_accepts_precomputed_envelope(tmp_path):
    values = np.concatenate([np.full(600, 0.8), np.full(200, 0.08), np.full(400, 0.8)])
    write_scalar_series(ScalarSeries(values, 10.0), tmp_path / "env.csv")
    code = main(
        [
            "detect",
            "--input",
            str(tmp_path / "env.csv"),
            "--input-kind",
            "envelope",
            "--out-labels",
            str(tmp_path / "labels.csv"),
            "--out-lbar",
            str(tmp_path / "lbar.csv"),
            "--report",
            str(tmp_path / "report.json"),
        ]
    )
    assert code == 0
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["n_events"] == 1
    start, end = report["events"][0]
    assert 55.0 < start < 65.0 and 75.0 < end < 85.0


def test_detect_flat_envelope_yields_no_events(tmp_path):
    write_scalar_series(ScalarSeries(np.zeros(1000), 10.0), tmp_path / "env.csv")
    code = main(
        [
            "detect",
            "--input",
            str(tmp_path / "env.csv"),
            "--input-kind",
            "envelope",
            "--out-labels",
            str(tmp_path / "labels.csv"),
            "--out-lbar",
            str(tmp_path / "lbar.csv"),
            "--report",
            str(tmp_path / "report.json"),
        ]
    )
    assert code == 0
    assert json.loads((tmp_path / "report.json").read_text())["n_events"] == 0


def test_detect_reads_raw_echo(tmp_path):
    from apnearadar import ComplexEchoSeries, write_complex_series
    from apnearadar.pipeline import DEFAULT_WAVELENGTH_MM

    t = np.arange(0, 100, 0.1)
    amp = np.where((t >= 40) & (t < 60), 0.1, 1.0)
    x = amp * np.sin(2 * np.pi * t / 4)
    echo = ComplexEchoSeries(
        np.exp(1j * 4 * np.pi * x / DEFAULT_WAVELENGTH_MM), 10.0, DEFAULT_WAVELENGTH_MM
    )
    write_complex_series(echo, tmp_path / "iq.csv")
    code = main(
        [
            "detect",
            "--input",
            str(tmp_path / "iq.csv"),
            "--input-kind",
            "iq",
            "--out-labels",
            str(tmp_path / "labels.csv"),
            "--out-lbar",
            str(tmp_path / "lbar.csv"),
            "--report",
            str(tmp_path / "report.json"),
        ]
    )
    assert code == 0
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["n_events"] == 1


def test_sweep_small_grid(tmp_path, scenario_file):
    out = tmp_path / "sweep.csv"
    code = main(
        [
            "sweep",
            "--spec",
            str(scenario_file),
            "--dm",
            "1.0,3.3",
            "--tm",
            "5.0",
            "--out",
            str(out),
        ]
    )
    assert code == 0
    from apnearadar import read_sweep_grid

    grid = read_sweep_grid(out)
    assert grid.movement_amplitudes == (1.0, 3.3)
    assert grid.movement_durations == (5.0,)
    assert np.all(grid.bce >= 0.0)


def test_missing_input_exits_two(tmp_path, capsys):
    code = main(
        [
            "detect",
            "--input",
            str(tmp_path / "absent.csv"),
            "--out-labels",
            str(tmp_path / "l.csv"),
            "--out-lbar",
            str(tmp_path / "b.csv"),
        ]
    )
    assert code == 2
    assert "error" in capsys.readouterr().err


def test_invalid_config_exits_one(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"segments": [], "bogus": 1}))
    code = main(
        [
            "simulate",
            "--spec",
            str(bad),
            "--out-displacement",
            str(tmp_path / "d.csv"),
            "--out-truth",
            str(tmp_path / "t.csv"),
        ]
    )
    assert code == 1
    assert "bogus" in capsys.readouterr().err


def test_invalid_seed_exits_one(tmp_path, scenario_file):
    assert (
        main(
            [
                "simulate",
                "--spec",
                str(scenario_file),
                "--out-displacement",
                str(tmp_path / "d.csv"),
                "--out-truth",
                str(tmp_path / "t.csv"),
                "--seed",
                "-3",
            ]
        )
        == 1
    )


def test_evaluate_rejects_non_binary_labels(tmp_path, capsys):
    write_scalar_series(ScalarSeries(np.full(100, 0.5), 10.0), tmp_path / "l.csv")
    write_scalar_series(ScalarSeries(np.full(100, 0.5), 10.0), tmp_path / "b.csv")
    ref = tmp_path / "ref.csv"
    ref.write_text(REFERENCE_CSV)
    code = main(
        [
            "evaluate",
            "--labels",
            str(tmp_path / "l.csv"),
            "--lbar",
            str(tmp_path / "b.csv"),
            "--reference",
            str(ref),
            "--report",
            str(tmp_path / "r.json"),
        ]
    )
    assert code == 1


def test_svg_outputs_are_deterministic(tmp_path, scenario_file):
    disp, _ = run_simulate(tmp_path, scenario_file)
    svgs = []
    for tag in ("1", "2"):
        svg = tmp_path / f"plot{tag}.svg"
        code = main(
            [
                "detect",
                "--input",
                str(disp),
                "--out-labels",
                str(tmp_path / f"l{tag}.csv"),
                "--out-lbar",
                str(tmp_path / f"b{tag}.csv"),
                "--svg",
                str(svg),
            ]
        )
        assert code == 0
        svgs.append(svg.read_bytes())
    assert svgs[0] == svgs[1]
    assert svgs[0].startswith(b"<?xml")


def test_console_script_is_installed():
    out = subprocess.run(
        ["apnearadar", "--version"], capture_output=True, text=True
    )
    assert out.returncode == 0
    assert "apnearadar" in out.stdout
