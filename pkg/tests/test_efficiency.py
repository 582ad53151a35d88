import random

import pytest

import oracles
from effikit.corpus import Corpus, EfficiencyProfile
from effikit.efficiency import (
    BREAKPOINT_PERCENTS,
    bucket_proportions,
    npi,
    profile_from_times,
    time_breakpoints,
)
from test_corpus import make_problem, make_sample

PROFILE = EfficiencyProfile(100.0, 200.0, 400.0)


def test_npi_exact_values():
    assert npi(200, PROFILE) == pytest.approx(50.0, abs=1e-9)
    assert npi(100, PROFILE) == pytest.approx(100.0, abs=1e-9)
    assert npi(400, PROFILE) == pytest.approx(0.0, abs=1e-9)
    assert npi(150, PROFILE) == pytest.approx(75.0, abs=1e-9)
    assert npi(300, PROFILE) == pytest.approx(25.0, abs=1e-9)


def test_npi_clamps_out_of_range_times():
    assert npi(50, PROFILE) == 100.0
    assert npi(1000, PROFILE) == 0.0


def test_npi_rejects_non_positive_times():
    with pytest.raises(ValueError):
        npi(0, PROFILE)
    with pytest.raises(ValueError):
        npi(-5, PROFILE)


def test_npi_degenerate_profiles():
    lower_collapsed = EfficiencyProfile(100.0, 100.0, 300.0)
    assert npi(50, lower_collapsed) == 100.0
    assert npi(100, lower_collapsed) == 50.0
    assert npi(200, lower_collapsed) == 25.0
    upper_collapsed = EfficiencyProfile(100.0, 300.0, 300.0)
    assert npi(350, upper_collapsed) == 0.0
    assert npi(300, upper_collapsed) == 50.0
    assert npi(200, upper_collapsed) == 75.0
    flat = EfficiencyProfile(200.0, 200.0, 200.0)
    for t in (1, 100, 200, 1000):
        assert npi(t, flat) == 50.0


def test_npi_monotone_and_continuous():
    rng = random.Random(41)
    for _ in range(500):
        t_min = rng.uniform(1, 1000)
        t_med = t_min + rng.uniform(0.1, 1000)
        t_max = t_med + rng.uniform(0.1, 1000)
        profile = EfficiencyProfile(t_min, t_med, t_max)
        times = sorted(rng.uniform(t_min / 2, t_max * 2) for _ in range(20))
        scores = [npi(t, profile) for t in times]
        assert all(a >= b - 1e-12 for a, b in zip(scores, scores[1:]))
        eps = 1e-9 * min(t_med - t_min, t_max - t_med)
        assert npi(t_med - eps, profile) == pytest.approx(50.0, abs=1e-6)
        assert npi(t_med + eps, profile) == pytest.approx(50.0, abs=1e-6)


def test_npi_of_median_element_is_50():
    rng = random.Random(43)
    for _ in range(50):
        times = sorted(rng.uniform(1, 500) for _ in range(rng.choice((3, 5, 7, 9))))
        profile = profile_from_times(times)
        median = times[len(times) // 2]
        assert npi(median, profile) == pytest.approx(50.0, abs=1e-9)


def test_profile_from_small_sample_is_exact():
    profile = profile_from_times([100, 200, 400])
    assert (profile.t_min_ms, profile.t_med_ms, profile.t_max_ms) == (100, 200, 400)


def test_profile_even_count_median():
    assert profile_from_times([1, 2, 3, 4]).t_med_ms == 2.5


def test_profile_requires_three_samples():
    with pytest.raises(ValueError):
        profile_from_times([1, 2])


def test_profile_trimming_removes_planted_outliers():
    rng = random.Random(47)
    times = [rng.uniform(1, 1000) for _ in range(1000)] + [1e6, 1e6]
    profile = profile_from_times(times)
    assert profile.t_max_ms < 1e6
    want_min, want_med, want_max = oracles.trimmed_stats_oracle(times)
    assert profile.t_min_ms == pytest.approx(want_min, abs=1e-12)
    assert profile.t_med_ms == pytest.approx(want_med, abs=1e-12)
    assert profile.t_max_ms == pytest.approx(want_max, abs=1e-12)


def test_time_breakpoints_exact():
    assert time_breakpoints([100, 600], 20) == pytest.approx(200.0, abs=1e-12)
    assert time_breakpoints([100, 600], 0) == 100.0
    assert time_breakpoints([100, 600], 100) == 600.0
    assert time_breakpoints([100, 300, 600], 50) == pytest.approx(350.0, abs=1e-12)


def test_time_breakpoints_validates_input():
    with pytest.raises(ValueError):
        time_breakpoints([100, 600], 120)
    with pytest.raises(ValueError):
        time_breakpoints([100], 20)


def _corpus_with_times(groups: dict[str, list[float]], difficulty=3) -> Corpus:
    corpus = Corpus(schema="ori")
    for pid, times in groups.items():
        corpus.problems[pid] = make_problem(pid=pid, difficulty=difficulty)
        for i, t in enumerate(times):
            corpus.samples.append(make_sample(f"{pid}_s{i}", pid, scaled=t))
    return corpus


def test_bucket_midpoint_fixture():
    # five samples placed at the midpoints of the five 20% intervals
    corpus = _corpus_with_times({"q1": [150, 250, 350, 450, 550]})
    table = bucket_proportions(corpus, 3)
    assert table.bucket_weights == (1, 1, 1, 1, 1)
    assert table.breakpoints == (150, 230, 310, 390, 470, 550)
    assert table.bucket_shares == (0.2, 0.2, 0.2, 0.2, 0.2)


def test_bucket_all_samples_at_t_min():
    corpus = _corpus_with_times({"q1": [100, 100, 100, 100, 200]})
    table = bucket_proportions(corpus, 3)
    assert table.bucket_weights[0] == 4
    assert table.bucket_weights[4] == 1  # the global max belongs to the last bucket


def test_bucket_mean_over_identical_problems():
    corpus = _corpus_with_times({"q1": [150, 250, 350, 450, 550], "q2": [150, 250, 350, 450, 550]})
    table = bucket_proportions(corpus, 3)
    assert table.bucket_weights == (1, 1, 1, 1, 1)
    assert table.n_problems == 2


def test_bucket_uses_measured_time_when_not_scaled():
    corpus = Corpus(schema="ori")
    corpus.problems["q1"] = make_problem(pid="q1", difficulty=3)
    for i, t in enumerate((150.0, 250.0, 350.0, 450.0, 550.0)):
        corpus.samples.append(make_sample(f"s{i}", "q1", scaled=None, measured_time_ms=t))
    table = bucket_proportions(corpus, 3)
    assert table.bucket_weights == (1, 1, 1, 1, 1)


def test_bucket_requires_problems_at_difficulty():
    corpus = _corpus_with_times({"q1": [100, 200, 300]})
    with pytest.raises(ValueError):
        bucket_proportions(corpus, 12)


def test_bucket_counts_conserve_samples():
    rng = random.Random(53)
    groups = {
        f"q{i}": [rng.uniform(10, 500) for _ in range(rng.randint(5, 40))] for i in range(4)
    }
    corpus = _corpus_with_times(groups)
    table = bucket_proportions(corpus, 3)
    total = sum(table.bucket_weights) * table.n_problems
    assert total == pytest.approx(sum(len(v) for v in groups.values()), abs=1e-9)
    assert len(table.breakpoints) == len(BREAKPOINT_PERCENTS)
    assert all(a <= b + 1e-12 for a, b in zip(table.breakpoints, table.breakpoints[1:]))
