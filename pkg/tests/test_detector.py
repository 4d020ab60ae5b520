"""Interval grid, label averaging, thresholding, and the full detection chain.

The averaging oracle below re-derives every output sample from scratch by
enumerating which intervals contain it, so it shares no code with the
vectorized implementation.
"""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from apnearadar import (
    CoverageGap,
    DetectionConfig,
    IntervalLongerThanRecord,
    NonBinaryInput,
    ScalarSeries,
    Segment,
    ScenarioSpec,
    amplitude_envelope,
    average_labels,
    bandpass_respiration,
    binarize,
    build_intervals,
    detect,
    enforce_min_duration,
    generate_scenario,
    label_events,
    reference_scenario,
)
from apnearadar.detector import Interval, binary_runs

FS = 10.0


def brute_force_average(pairs):
    n_total = max(itv.start_index + itv.n_samples for itv, _ in pairs)
    out = np.empty(n_total)
    for i in range(n_total):
        hits = [
            labels.values[i - itv.start_index]
            for itv, labels in pairs
            if itv.start_index <= i < itv.start_index + itv.n_samples
        ]
        assert hits, f"sample {i} uncovered"
        out[i] = sum(hits) / len(hits)
    return out


def random_label_pairs(rng, total_duration, interval_length=60.0, step=2.5):
    grid = build_intervals(total_duration, interval_length, step, FS)
    pairs = []
    for itv in grid.intervals:
        values = (rng.random(itv.n_samples) < 0.5).astype(float)
        pairs.append((itv, ScalarSeries(values, FS, itv.start_time, role="labels")))
    return grid, pairs


# interval grid


def test_grid_for_95_second_record():
    grid = build_intervals(95.0, 60.0, 2.5, FS)
    assert len(grid.intervals) == 15
    starts = [itv.start_time for itv in grid.intervals]
    np.testing.assert_allclose(starts, np.arange(15) * 2.5)
    assert grid.intervals[-1].start_time == 35.0
    assert grid.intervals[-1].end_time == 95.0
    assert not grid.short_record


def test_grid_single_interval_record():
    grid = build_intervals(60.0, 60.0, 2.5, FS)
    assert len(grid.intervals) == 1
    assert (grid.intervals[0].start_time, grid.intervals[0].end_time) == (0.0, 60.0)


def test_grid_appends_remainder_interval():
    grid = build_intervals(61.0, 60.0, 2.5, FS)
    spans = [(itv.start_time, itv.end_time) for itv in grid.intervals]
    assert spans == [(0.0, 60.0), (1.0, 61.0)]
    assert grid.intervals[-1].start_index == 10


def test_grid_short_record_degrades_with_warning():
    with pytest.warns(IntervalLongerThanRecord):
        grid = build_intervals(30.0, 60.0, 2.5, FS)
    assert grid.short_record
    assert len(grid.intervals) == 1
    assert (grid.intervals[0].start_time, grid.intervals[0].end_time) == (0.0, 30.0)
    assert np.all(grid.coverage == 1)


def test_grid_coverage_bounds():
    for t0 in (60.0, 61.0, 95.0, 137.3, 600.0):
        grid = build_intervals(t0, 60.0, 2.5, FS)
        assert grid.coverage.min() >= 1
        assert grid.coverage.max() <= int(np.ceil(60.0 / 2.5)) + 1


def test_grid_rejects_nonpositive_arguments():
    with pytest.raises(ValueError):
        build_intervals(0.0, 60.0, 2.5, FS)
    with pytest.raises(ValueError):
        build_intervals(95.0, -1.0, 2.5, FS)
    with pytest.raises(ValueError):
        build_intervals(95.0, 60.0, 0.0, FS)


# label averaging


def test_unanimous_labels_average_to_one():
    rng = np.random.default_rng(0)
    grid, pairs = random_label_pairs(rng, 80.0)
    ones = [(itv, s.with_values(np.ones(len(s)))) for itv, s in pairs]
    np.testing.assert_array_equal(average_labels(ones).values, 1.0)


def test_split_vote_averages_to_half():
    # four unit intervals all covering [3, 4): votes 1,1,0,0
    intervals = [Interval(float(k), float(k) + 4.0, 10 * k, 40) for k in range(4)]
    votes = [1.0, 1.0, 0.0, 0.0]
    pairs = [
        (itv, ScalarSeries(np.full(40, v), FS, itv.start_time))
        for itv, v in zip(intervals, votes)
    ]
    avg = average_labels(pairs)
    np.testing.assert_array_equal(avg.values[30:40], 0.5)


def test_average_matches_brute_force_on_random_grids():
    rng = np.random.default_rng(1)
    for _ in range(10):
        t0 = float(rng.uniform(70.0, 300.0))
        grid, pairs = random_label_pairs(rng, t0)
        avg = average_labels(pairs)
        np.testing.assert_allclose(avg.values, brute_force_average(pairs), atol=1e-12)
        assert avg.values.min() >= 0.0 and avg.values.max() <= 1.0


def test_average_detects_coverage_gap():
    a = Interval(0.0, 2.0, 0, 20)
    b = Interval(4.0, 6.0, 40, 20)
    pairs = [
        (a, ScalarSeries(np.ones(20), FS, 0.0)),
        (b, ScalarSeries(np.ones(20), FS, 4.0)),
    ]
    with pytest.raises(CoverageGap) as info:
        average_labels(pairs)
    assert info.value.index == 20


def test_average_rejects_mismatched_series():
    itv = Interval(0.0, 2.0, 0, 20)
    with pytest.raises(ValueError):
        average_labels([(itv, ScalarSeries(np.ones(19), FS, 0.0))])
    with pytest.raises(ValueError):
        average_labels([])


def test_leave_one_out_changes_average_by_at_most_inverse_coverage():
    rng = np.random.default_rng(2)
    grid, pairs = random_label_pairs(rng, 90.0)
    full = average_labels(pairs).values
    for k in (0, len(pairs) // 2, len(pairs) - 1):
        rest = [p for i, p in enumerate(pairs) if i != k]
        counts = np.zeros(full.size, dtype=int)
        for itv, _ in rest:
            counts[itv.start_index : itv.start_index + itv.n_samples] += 1
        covered = counts > 0
        sums = np.zeros(full.size)
        for itv, labels in rest:
            sums[itv.start_index : itv.start_index + itv.n_samples] += labels.values
        partial_avg = np.divide(sums, counts, out=np.zeros_like(sums), where=covered)
        bound = 1.0 / counts[covered]
        assert np.all(np.abs(full[covered] - partial_avg[covered]) <= bound + 1e-12)


# binarization and duration rule


def test_binarize_threshold_is_inclusive():
    lbar = ScalarSeries([0.59, 0.60, 0.61], FS)
    np.testing.assert_array_equal(binarize(lbar, 0.60).values, [0.0, 1.0, 1.0])


def test_binarize_zero_threshold_marks_everything():
    lbar = ScalarSeries([0.0, 0.2, 1.0], FS)
    np.testing.assert_array_equal(binarize(lbar, 0.0).values, [1.0, 1.0, 1.0])


def test_min_duration_boundary():
    just_short = np.zeros(300)
    just_short[100:199] = 1.0  # 9.9 s at 10 Hz
    assert not enforce_min_duration(ScalarSeries(just_short, FS), 10.0).values.any()
    exact = np.zeros(300)
    exact[100:200] = 1.0  # exactly 10.0 s
    np.testing.assert_array_equal(
        enforce_min_duration(ScalarSeries(exact, FS), 10.0).values, exact
    )


def test_min_duration_filters_per_run_without_merging():
    values = np.zeros(400)
    values[10:130] = 1.0  # 12 s, kept
    values[200:280] = 1.0  # 8 s, removed
    out = enforce_min_duration(ScalarSeries(values, FS), 10.0).values
    assert binary_runs(out) == [(10, 130)]


def test_min_duration_requires_binary_input():
    with pytest.raises(NonBinaryInput):
        enforce_min_duration(ScalarSeries([0.0, 0.5, 1.0], FS), 10.0)


def test_binary_runs_and_events():
    values = np.array([1.0, 1.0, 0.0, 1.0, 0.0, 0.0, 1.0, 1.0, 1.0])
    assert binary_runs(values) == [(0, 2), (3, 4), (6, 9)]
    series = ScalarSeries(values, FS, start_time=2.0)
    events = label_events(series)
    np.testing.assert_allclose(events, [(2.0, 2.2), (2.3, 2.4), (2.6, 2.9)])


@given(
    st.lists(st.floats(0.0, 1.0), min_size=1, max_size=300),
    st.floats(0.0, 1.0),
    st.floats(0.0, 1.0),
)
def test_threshold_monotonicity(values, th_a, th_b):
    lbar = ScalarSeries(values, FS)
    lo, hi = sorted((th_a, th_b))
    wide = binarize(lbar, lo).values
    narrow = binarize(lbar, hi).values
    assert np.all(narrow <= wide)


@given(
    st.lists(st.sampled_from([0.0, 1.0]), min_size=1, max_size=300),
    st.floats(0.0, 20.0),
)
def test_min_duration_idempotent(values, min_s):
    series = ScalarSeries(values, FS)
    once = enforce_min_duration(series, min_s)
    twice = enforce_min_duration(once, min_s)
    np.testing.assert_array_equal(once.values, twice.values)
    assert np.all(once.values <= np.asarray(values))


# full chain


def reference_envelope():
    displacement, truth = generate_scenario(reference_scenario())
    return amplitude_envelope(bandpass_respiration(displacement)), truth


def test_detect_finds_the_reference_apnea():
    envelope, truth = reference_envelope()
    result = detect(envelope)
    events = result.events()
    assert len(events) == 1
    start, end = events[0]
    assert 35.0 < start < 45.0 and 55.0 < end < 65.0
    assert not result.labels.values[:350].any()
    assert not result.labels.values[700:].any()
    assert result.averaged.values.min() >= 0.0
    assert result.averaged.values.max() <= 1.0


def test_detect_is_deterministic():
    envelope, _ = reference_envelope()
    a = detect(envelope, DetectionConfig(restarts=2, seed=5))
    b = detect(envelope, DetectionConfig(restarts=2, seed=5))
    assert a.labels == b.labels
    assert a.averaged == b.averaged


def test_detect_reports_no_events_for_steady_breathing():
    spec = ScenarioSpec((Segment("normal", 600.0, 1.0),))
    displacement, _ = generate_scenario(spec)
    result = detect(amplitude_envelope(bandpass_respiration(displacement)))
    assert result.events() == []


def test_detect_counts_two_separated_apneas():
    spec = ScenarioSpec(
        (
            Segment("normal", 150.0, 1.0),
            Segment("apnea", 25.0, 0.1),
            Segment("normal", 200.0, 1.0),
            Segment("apnea", 25.0, 0.1),
            Segment("normal", 200.0, 1.0),
        )
    )
    displacement, _ = generate_scenario(spec)
    result = detect(amplitude_envelope(bandpass_respiration(displacement)))
    events = result.events()
    assert len(events) == 2
    assert 145.0 < events[0][0] < 155.0 and 170.0 < events[0][1] < 180.0
    assert 370.0 < events[1][0] < 380.0 and 395.0 < events[1][1] < 405.0


def test_detect_config_validation():
    with pytest.raises(ValueError):
        DetectionConfig(label_threshold=1.5)
    with pytest.raises(ValueError):
        DetectionConfig(min_event_duration=-1.0)
    with pytest.raises(ValueError):
        DetectionConfig(step=0.0)
