import math
import random
import statistics

import pytest

import oracles
from effikit.corpus import Corpus
from effikit.evalstats import (
    PredictionRecord,
    ScoredSample,
    grouped_report,
    report_to_csv,
    rmse,
    spearman,
)
from test_corpus import make_problem

# ---------------------------------------------------------------------------
# spearman


def test_spearman_monotone_identity():
    rho, p = spearman([1, 2, 3], [10, 20, 30])
    assert rho == 1.0 and p == 0.0


def test_spearman_perfect_inverse():
    rho, p = spearman([1, 2, 3], [3, 2, 1])
    assert rho == -1.0 and p == 0.0


def test_spearman_self_correlation_is_exactly_one():
    rng = random.Random(71)
    for _ in range(20):
        x = [rng.uniform(0, 100) for _ in range(rng.randint(3, 40))]
        if len(set(x)) == 1:
            continue
        rho, p = spearman(x, x)
        assert rho == 1.0 and p == 0.0


def test_spearman_tied_example_matches_oracle():
    x = [1, 2, 2, 3]
    y = [1, 3, 2, 4]
    rho, _ = spearman(x, y)
    assert rho == pytest.approx(oracles.spearman_oracle(x, y), abs=1e-12)


def test_spearman_oracle_equivalence_random_tied_vectors():
    rng = random.Random(73)
    for _ in range(300):
        n = rng.randint(3, 50)
        x = [rng.randint(0, 8) for _ in range(n)]
        y = [rng.randint(0, 8) for _ in range(n)]
        if len(set(x)) == 1 or len(set(y)) == 1:
            continue
        rho, p = spearman(x, y)
        assert rho == pytest.approx(oracles.spearman_oracle(x, y), abs=1e-9)
        assert 0.0 <= p <= 1.0


def test_spearman_invariant_under_monotone_transform():
    rng = random.Random(79)
    x = [rng.uniform(0, 10) for _ in range(30)]
    y = [rng.uniform(0, 10) for _ in range(30)]
    rho, _ = spearman(x, y)
    rho2, _ = spearman([math.exp(v) for v in x], [v ** 3 for v in y])
    assert rho2 == pytest.approx(rho, abs=1e-12)


def test_spearman_p_matches_scipy():
    scipy_stats = pytest.importorskip("scipy.stats")
    rng = random.Random(83)
    for _ in range(50):
        n = rng.randint(5, 60)
        x = [rng.randint(0, 12) for _ in range(n)]
        y = [rng.randint(0, 12) for _ in range(n)]
        if len(set(x)) == 1 or len(set(y)) == 1:
            continue
        rho, p = spearman(x, y)
        want = scipy_stats.spearmanr(x, y)
        assert rho == pytest.approx(want.statistic, abs=1e-9)
        if abs(rho) < 1.0:
            assert p == pytest.approx(want.pvalue, rel=1e-6, abs=1e-12)


def test_spearman_p_floor_clamps_underflow():
    # nearly perfect monotone relation over many points underflows the t tail
    n = 2000
    x = list(range(n))
    y = list(range(n))
    y[0], y[1] = y[1], y[0]  # keep |rho| < 1
    rho, p = spearman(x, y)
    assert abs(rho) < 1.0
    assert p == 5e-324  # smallest representable positive value


def test_spearman_rejects_bad_input():
    with pytest.raises(ValueError):
        spearman([1, 2], [1, 2])
    with pytest.raises(ValueError):
        spearman([1, 2, 3], [1, 2])
    with pytest.raises(ValueError):
        spearman([5, 5, 5], [1, 2, 3])


# ---------------------------------------------------------------------------
# rmse


def test_rmse_zero_for_perfect_predictions():
    records = [PredictionRecord("a", 10.0, 10.0), PredictionRecord("b", 3.5, 3.5)]
    assert rmse(records) == 0.0


def test_rmse_worked_example():
    records = [PredictionRecord("a", 3.0, 0.0), PredictionRecord("b", 4.0, 0.0)]
    assert rmse(records) == pytest.approx(3.5355339059327378, abs=1e-6)


def test_rmse_zero_iff_exact():
    records = [PredictionRecord("a", 1.0, 1.0), PredictionRecord("b", 2.0, 2.0000001)]
    assert rmse(records) > 0.0


def test_zeror_rmse_equals_population_std():
    rng = random.Random(89)
    for _ in range(100):
        actuals = [rng.uniform(0, 500) for _ in range(rng.randint(2, 60))]
        mean = sum(actuals) / len(actuals)
        records = [PredictionRecord(f"s{i}", mean, a) for i, a in enumerate(actuals)]
        assert rmse(records) == pytest.approx(statistics.pstdev(actuals), abs=1e-9)


def test_rmse_rejects_empty_and_mixed():
    with pytest.raises(ValueError):
        rmse([])
    with pytest.raises(ValueError):
        rmse([PredictionRecord("a", 1.0, 1.0, "time_ms"), PredictionRecord("b", 50.0, 50.0, "npi")])


def test_prediction_record_validation():
    with pytest.raises(ValueError):
        PredictionRecord("a", 1.0, -2.0, "time_ms")
    with pytest.raises(ValueError):
        PredictionRecord("a", 1.0, 150.0, "npi")
    with pytest.raises(ValueError):
        PredictionRecord("a", 1.0, 1.0, "joules")


# ---------------------------------------------------------------------------
# grouped_report


def _report_corpus() -> Corpus:
    corpus = Corpus(schema="ori")
    corpus.problems["q0"] = make_problem("q0", difficulty=0, tags=("math", "greedy"))
    corpus.problems["q2"] = make_problem("q2", difficulty=2, tags=("strings",))
    corpus.problems["q9"] = make_problem("q9", difficulty=9, tags=("dp",))
    return corpus


def test_report_single_bucket():
    corpus = Corpus(schema="ori")
    corpus.problems["q0"] = make_problem("q0", difficulty=0, tags=("math",))
    scored = [ScoredSample("s1", "q0", True, 75.0, 40.0)]
    rows = grouped_report(scored, corpus)
    difficulty_rows = [r for r in rows if r.group_type == "difficulty"]
    assert len(difficulty_rows) == 1
    row = difficulty_rows[0]
    assert row.group == "Introductory" and row.n == 1
    assert row.mean_npi == 75.0 and row.io_pass_pct == 100.0


def test_report_multi_tag_samples_count_in_each_tag():
    corpus = _report_corpus()
    scored = [ScoredSample("s1", "q0", True, 60.0, 20.0)]
    rows = grouped_report(scored, corpus)
    tag_rows = {r.group: r for r in rows if r.group_type == "tag"}
    assert set(tag_rows) == {"math", "greedy"}
    assert tag_rows["math"].n == 1 and tag_rows["greedy"].n == 1


def test_report_bucket_assignment_and_means():
    corpus = _report_corpus()
    scored = [
        ScoredSample("s1", "q0", True, 80.0, 30.0),
        ScoredSample("s2", "q2", False, 40.0, 10.0),
        ScoredSample("s3", "q2", True, 60.0, 20.0),
        ScoredSample("s4", "q9", False, 20.0, 5.0),
    ]
    rows = {(r.group_type, r.group): r for r in grouped_report(scored, corpus)}
    assert rows[("difficulty", "Interview")].n == 2
    assert rows[("difficulty", "Interview")].mean_npi == 50.0
    assert rows[("difficulty", "Interview")].io_pass_pct == 50.0
    assert rows[("difficulty", "Competition")].mean_ioccb == 5.0
    # row means stay within the group's raw value range
    for r in rows.values():
        assert 0.0 <= r.mean_npi <= 100.0


def test_report_suppresses_empty_groups():
    corpus = _report_corpus()
    scored = [ScoredSample("s1", "q0", True, 60.0, 20.0)]
    rows = grouped_report(scored, corpus)
    assert all(r.n >= 1 for r in rows)
    assert not any(r.group == "Competition" for r in rows)


def test_report_csv_is_byte_stable():
    corpus = _report_corpus()
    scored = [
        ScoredSample("s1", "q0", True, 80.0, 30.0),
        ScoredSample("s2", "q2", False, 40.0, 10.0),
    ]
    csv_text = report_to_csv(grouped_report(scored, corpus))
    assert csv_text == (
        "group_type,group,n,io_pass_pct,mean_npi,mean_ioccb\n"
        "difficulty,Introductory,1,100.0000,80.0000,30.0000\n"
        "difficulty,Interview,1,0.0000,40.0000,10.0000\n"
        "tag,greedy,1,100.0000,80.0000,30.0000\n"
        "tag,math,1,100.0000,80.0000,30.0000\n"
        "tag,strings,1,0.0000,40.0000,10.0000\n"
    )
