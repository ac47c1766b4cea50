import math

import numpy as np
import pytest

from hawkesabc import (
    DegenerateSequenceError,
    EventSequence,
    HawkesParams,
    SummaryVector,
    Thresholds,
    accept_candidate,
    compute_summaries,
    compute_summaries_alt,
    interevent_diffs,
    median_mean_ratio,
    ripley_k,
    simulate,
    tail_means,
)


def seq(times, horizon=None):
    times = np.asarray(times, dtype=float)
    if horizon is None:
        horizon = float(times[-1]) if times.size else 1.0
    return EventSequence(times, horizon)


# eleven events whose ten gaps are 1..10: symmetric gaps, known quantiles
LADDER = seq(np.cumsum([0] + list(range(1, 11))), 55.0)


class TestIntereventDiffs:
    def test_basic(self):
        assert np.array_equal(interevent_diffs(seq([1, 2, 3])), [1, 1])
        assert np.array_equal(interevent_diffs(seq([0, 0.5, 3])), [0.5, 2.5])

    def test_degenerate(self):
        with pytest.raises(DegenerateSequenceError):
            interevent_diffs(seq([1.0]))


class TestGapStatistics:
    def test_median_mean_ratio(self):
        assert median_mean_ratio(np.array([1.0, 1.0, 4.0])) == pytest.approx(0.5)

    def test_symmetric_gaps_give_one(self):
        # gaps 1..10: median == mean == 5.5
        vec = compute_summaries(LADDER)
        assert vec.values[1] == pytest.approx(1.0)

    def test_tail_means_worked_example(self):
        up, lo = tail_means(np.arange(1.0, 11.0))
        assert up == pytest.approx(10.0)  # only 10 exceeds q90 = 9.1
        assert lo == pytest.approx(3.0)  # mean of 1..5 below median 5.5

    def test_quantile_convention_matches_numpy(self):
        rng = np.random.default_rng(3)
        diffs = rng.exponential(1.0, size=37)
        up, lo = tail_means(diffs)
        q90, med = np.quantile(diffs, [0.9, 0.5])
        assert up == pytest.approx(diffs[diffs > q90].mean(), rel=1e-12)
        assert lo == pytest.approx(diffs[diffs < med].mean(), rel=1e-12)

    def test_all_equal_gaps_degenerate(self):
        with pytest.raises(DegenerateSequenceError):
            tail_means(np.ones(20))


class TestRipleyK:
    def test_enumerated_pairs(self):
        y = seq([0.5, 1.0, 3.0], 5.0)
        assert ripley_k(y, 1) == pytest.approx(2 / 3)
        assert ripley_k(y, 2) == pytest.approx(4 / 3)
        assert ripley_k(y, 4) == pytest.approx(2.0)

    def test_monotone_and_saturates(self):
        y = simulate(HawkesParams(0.5, 0.5, 1.0), 50.0, np.random.default_rng(1))
        n = len(y)
        vals = [ripley_k(y, w) for w in (0.5, 1, 2, 4, 8)]
        assert all(a <= b for a, b in zip(vals, vals[1:]))
        assert ripley_k(y, y.times[-1] - y.times[0]) == pytest.approx(n - 1)

    def test_translation_and_scale(self):
        times = np.array([0.5, 1.0, 2.2, 5.0, 5.1])
        y = seq(times, 10.0)
        shifted = seq(times + 3.0, 13.0)
        assert ripley_k(shifted, 2.0) == ripley_k(y, 2.0)
        scaled = seq(3.0 * times, 30.0)
        assert ripley_k(scaled, 6.0) == ripley_k(y, 2.0)

    def test_brute_force_oracle(self):
        rng = np.random.default_rng(9)
        y = simulate(HawkesParams(0.4, 0.6, 1.5), 40.0, rng)
        t = y.times
        for w in (1.0, 2.0, 4.0):
            pairs = sum(
                1 for i in range(len(t)) for j in range(i + 1, len(t)) if t[j] - t[i] <= w
            )
            assert ripley_k(y, w) == pytest.approx(2 * pairs / len(t), rel=1e-12)


def naive_seven(y):
    """Independent recomputation of the seven statistics with numpy built-ins."""
    diffs = np.diff(y.times)
    q90, med = np.quantile(diffs, [0.9, 0.5])
    t = y.times
    ripleys = []
    for w in (1.0, 2.0, 4.0):
        pairs = sum(
            1 for i in range(len(t)) for j in range(i + 1, len(t)) if t[j] - t[i] <= w
        )
        ripleys.append(2 * pairs / len(t))
    return np.array(
        [
            math.log(len(t)),
            np.median(diffs) / diffs.mean(),
            *ripleys,
            diffs[diffs > q90].mean(),
            diffs[diffs < med].mean(),
        ]
    )


class TestComputeSummaries:
    def test_worked_example(self):
        vec = compute_summaries(LADDER)
        assert vec.set_id == "abc7"
        assert vec.values[0] == pytest.approx(math.log(11))
        assert vec.values[5] == pytest.approx(10.0)
        assert vec.values[6] == pytest.approx(3.0)

    def test_too_few_events(self):
        with pytest.raises(DegenerateSequenceError):
            compute_summaries(seq(np.arange(5.0) + 1, 10.0))

    def test_equally_spaced_degenerate(self):
        with pytest.raises(DegenerateSequenceError):
            compute_summaries(seq(np.arange(1.0, 13.0), 13.0))

    def test_matches_naive_reimplementation(self):
        rng = np.random.default_rng(21)
        for _ in range(10):
            y = simulate(HawkesParams(0.5, 0.5, 1.0), 60.0, rng)
            if len(y) < 10:
                continue
            got = compute_summaries(y).values
            np.testing.assert_allclose(got, naive_seven(y), rtol=1e-12)

    def test_translation_invariance(self):
        y = simulate(HawkesParams(0.5, 0.4, 1.0), 50.0, np.random.default_rng(2))
        shifted = seq(y.times + 5.0, y.horizon + 5.0)
        np.testing.assert_allclose(
            compute_summaries(y).values, compute_summaries(shifted).values, rtol=1e-12
        )

    def test_custom_windows(self):
        y = simulate(HawkesParams(0.5, 0.4, 1.0), 50.0, np.random.default_rng(2))
        vec = compute_summaries(y, windows=(0.5, 1.0, 2.0))
        assert vec.values[2] == pytest.approx(ripley_k(y, 0.5))

    def test_rescaling(self):
        # t -> c*t leaves S1 and S2 alone; Ripley matches at window c*w
        y = simulate(HawkesParams(0.5, 0.4, 1.0), 50.0, np.random.default_rng(2))
        c = 3.0
        scaled = seq(c * y.times, c * y.horizon)
        a = compute_summaries(y)
        b = compute_summaries(scaled, windows=(c * 1.0, c * 2.0, c * 4.0))
        assert b.values[0] == a.values[0]
        assert b.values[1] == pytest.approx(a.values[1], rel=1e-12)
        np.testing.assert_allclose(b.values[2:5], a.values[2:5], rtol=1e-12)


class TestAlternativeSet:
    def test_identical_sequences_zero_kl(self):
        y = simulate(HawkesParams(0.5, 0.4, 1.0), 60.0, np.random.default_rng(4))
        vec = compute_summaries_alt(y, y)
        assert vec.set_id == "alt2"
        assert vec.values[0] == pytest.approx(math.log(len(y)))
        assert vec.values[1] == 0.0

    def test_log_count_entry(self):
        y = seq(np.linspace(0.0, 149.0 + 0.001, 150) + np.sort(
            np.random.default_rng(0).random(150) * 0.5), 160.0)
        ref = simulate(HawkesParams(0.5, 0.4, 1.0), 60.0, np.random.default_rng(4))
        vec = compute_summaries_alt(y, ref)
        assert vec.values[0] == pytest.approx(math.log(150))

    def test_kl_matches_naive_pass(self):
        rng = np.random.default_rng(8)
        y = simulate(HawkesParams(0.4, 0.5, 1.0), 60.0, rng)
        ref = simulate(HawkesParams(0.6, 0.3, 1.5), 60.0, rng)
        vec = compute_summaries_alt(y, ref)
        dy, dref = np.diff(y.times), np.diff(ref.times)
        hi = max(dy.max(), dref.max())
        kl = 0.0
        for b in range(20):
            lo_e, hi_e = hi * b / 20, hi * (b + 1) / 20
            if b == 19:
                cy = np.sum((dy >= lo_e) & (dy <= hi_e))
                cr = np.sum((dref >= lo_e) & (dref <= hi_e))
            else:
                cy = np.sum((dy >= lo_e) & (dy < hi_e))
                cr = np.sum((dref >= lo_e) & (dref < hi_e))
            p = (cr + 0.05) / (dref.size + 1.0)
            q = (cy + 0.05) / (dy.size + 1.0)
            kl += p * math.log(p / q)
        assert vec.values[1] == pytest.approx(kl, rel=1e-12)

    def test_degenerate_inputs(self):
        y = simulate(HawkesParams(0.5, 0.4, 1.0), 60.0, np.random.default_rng(4))
        with pytest.raises(DegenerateSequenceError):
            compute_summaries_alt(seq([1.0], 2.0), y)


class TestAcceptCandidate:
    def test_zero_distance(self):
        v = SummaryVector(np.array([1.0, 1.0]), "alt2")
        assert accept_candidate(v, v, Thresholds(np.array([0.5, 0.5])))

    def test_boundary_is_strict(self):
        a = SummaryVector(np.array([1.0, 1.0]), "alt2")
        b = SummaryVector(np.array([1.0, 1.1]), "alt2")
        eps = Thresholds(np.array([1.0, 0.1]))
        assert not accept_candidate(a, b, eps)

    def test_coordinatewise(self):
        a = SummaryVector(np.array([1.0, 1.0]), "alt2")
        b = SummaryVector(np.array([1.5, 1.0]), "alt2")
        assert accept_candidate(a, b, Thresholds(np.array([1.0, 0.1])))

    def test_symmetric(self):
        rng = np.random.default_rng(12)
        a = SummaryVector(rng.normal(size=7), "abc7")
        b = SummaryVector(rng.normal(size=7), "abc7")
        eps = Thresholds(rng.uniform(0.5, 2.0, size=7))
        assert accept_candidate(a, b, eps) == accept_candidate(b, a, eps)

    def test_family_mismatch(self):
        a = SummaryVector(np.zeros(7), "abc7")
        b = SummaryVector(np.zeros(2), "alt2")
        with pytest.raises(ValueError):
            accept_candidate(a, b, Thresholds(np.ones(7)))

    def test_threshold_length_mismatch(self):
        a = SummaryVector(np.zeros(7), "abc7")
        with pytest.raises(ValueError):
            accept_candidate(a, a, Thresholds(np.ones(2)))

    def test_infinite_thresholds_allowed(self):
        a = SummaryVector(np.zeros(2), "alt2")
        b = SummaryVector(np.array([100.0, -50.0]), "alt2")
        assert accept_candidate(a, b, Thresholds(np.full(2, np.inf)))


class TestTypes:
    def test_threshold_positivity(self):
        with pytest.raises(ValueError):
            Thresholds(np.array([1.0, 0.0]))

    def test_summary_vector_length(self):
        with pytest.raises(ValueError):
            SummaryVector(np.zeros(3), "abc7")

    def test_summary_vector_finite(self):
        with pytest.raises(DegenerateSequenceError):
            SummaryVector(np.array([np.nan, 1.0]), "alt2")
