from __future__ import annotations

import copy
import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from conftest import fuzz_case, oracle_scores
from stratharness.errors import ConfigError, IncompleteDataError
from stratharness.metrics import CounterRecord
from stratharness.scoring import (
    RunMetrics,
    config_from_dict,
    load_capability_config,
    normalize,
    overall_score,
    runs_from_records,
    score,
    validate_config,
)


def run_metrics(runs) -> list[RunMetrics]:
    return [RunMetrics(g, s, r, v) for g, s, r, v in runs]


def one_dim(scenarios, beta=1.0) -> dict:
    return {"dimensions": [{"name": "D", "W": 1.0, "beta": beta, "scenarios": scenarios}]}


# -- normalize ------------------------------------------------------------------

def test_normalize_examples():
    assert normalize(100, 50, 100) == 1
    assert normalize(50, 50, 100) == 0
    assert normalize(75, 50, 100) == 0.5


def test_normalize_clamps_with_warning():
    warnings: list[str] = []
    assert normalize(130, 0, 100, warnings, "SUR") == 1
    assert normalize(-5, 0, 100, warnings, "SUR") == 0
    assert len(warnings) == 2 and "clamped" in warnings[0]


def test_normalize_bad_bounds():
    with pytest.raises(ConfigError):
        normalize(1, 5, 5)
    with pytest.raises(ConfigError):
        normalize(1, 6, 5)


# -- dimension and overall examples -----------------------------------------------

def test_two_scenario_example_gives_63():
    cfg = config_from_dict(one_dim([
        {"game": "werewolf", "scenario": "a", "w": 0.6, "metrics": ["IRP"]},
        {"game": "werewolf", "scenario": "b", "w": 0.4, "metrics": ["IRP"]},
    ], beta=0.9))
    runs = [RunMetrics("werewolf", "a", 0, {"IRP": 25.0}), RunMetrics("werewolf", "a", 1, {"IRP": 75.0}),
            RunMetrics("werewolf", "b", 0, {"IRP": 100.0})]
    report = score(cfg, runs)
    assert report.dimension("D").score == pytest.approx(63.0, abs=1e-12)
    assert report.overall == pytest.approx(63.0, abs=1e-12)


def test_extremes():
    scen = [{"game": "stratego", "scenario": "x", "w": 1.0, "metrics": ["TPCV", "CPR"]}]
    top = score(config_from_dict(one_dim(scen)), [RunMetrics("stratego", "x", 0, {"TPCV": 148, "CPR": 100})])
    assert top.overall == pytest.approx(100)
    low = score(config_from_dict(one_dim(scen, beta=0.5)),
                [RunMetrics("stratego", "x", 0, {"TPCV": 0, "CPR": 0})])
    assert low.overall == 0
    half = score(config_from_dict(one_dim(scen, beta=0.5)),
                 [RunMetrics("stratego", "x", 0, {"TPCV": 148, "CPR": 100})])
    assert half.overall == pytest.approx(50)


def test_equal_weight_overall_53_638():
    dims = [{"name": n, "W": 0.2, "beta": 1.0,
             "scenarios": [{"game": "werewolf", "scenario": "w", "w": 1.0, "metrics": ["IRP"]}]}
            for n in "ABCDE"]
    cfg = config_from_dict({"dimensions": dims})
    scores = dict(zip("ABCDE", (72.88, 48.45, 60.17, 22.46, 64.23)))
    assert overall_score(cfg, scores) == pytest.approx(53.638, abs=1e-6)


def test_single_dimension_overall_equals_dimension():
    cfg = config_from_dict(one_dim([{"game": "werewolf", "scenario": "w", "w": 1.0, "metrics": ["KSR"]}]))
    assert overall_score(cfg, {"D": 41.5}) == 41.5
    with pytest.raises(IncompleteDataError):
        overall_score(cfg, {})


def test_undefined_metric_is_excluded_with_warning():
    cfg = config_from_dict(one_dim([{"game": "werewolf", "scenario": "w", "w": 1.0,
                                     "metrics": ["IRP", "KSR"]}]))
    runs = [RunMetrics("werewolf", "w", 0, {"IRP": math.nan, "KSR": 40.0}),
            RunMetrics("werewolf", "w", 1, {"IRP": math.nan, "KSR": 60.0})]
    report = score(cfg, runs)
    assert report.overall == pytest.approx(50)
    assert any("IRP" in w for w in report.warnings)


def test_partially_undefined_metric_averages_defined_runs():
    cfg = config_from_dict(one_dim([{"game": "werewolf", "scenario": "w", "w": 1.0, "metrics": ["IRP"]}]))
    runs = [RunMetrics("werewolf", "w", 0, {"IRP": math.nan}),
            RunMetrics("werewolf", "w", 1, {"IRP": 30.0})]
    assert score(cfg, runs).overall == pytest.approx(30)


# -- k enforcement ---------------------------------------------------------------

def test_missing_runs_are_listed():
    cfg = config_from_dict(one_dim([
        {"game": "werewolf", "scenario": "a", "w": 0.5, "k": 3, "metrics": ["IRP"]},
        {"game": "sc2", "scenario": "Macro", "w": 0.5, "k": 2, "metrics": ["SUR"]},
    ]))
    runs = [RunMetrics("werewolf", "a", 0, {"IRP": 1.0}), RunMetrics("werewolf", "a", 2, {"IRP": 1.0})]
    with pytest.raises(IncompleteDataError) as err:
        score(cfg, runs)
    assert err.value.missing == [("werewolf/a", 1), ("sc2/Macro", 0), ("sc2/Macro", 1)]
    assert "sc2/Macro" in str(err.value)


def test_extra_runs_beyond_k_are_ignored():
    cfg = config_from_dict(one_dim([{"game": "werewolf", "scenario": "a", "w": 1.0, "k": 1,
                                     "metrics": ["IRP"]}]))
    runs = [RunMetrics("werewolf", "a", 0, {"IRP": 20.0}), RunMetrics("werewolf", "a", 1, {"IRP": 90.0})]
    report = score(cfg, runs)
    assert report.overall == pytest.approx(20)
    assert any("beyond k" in w for w in report.warnings)


def test_duplicate_runs_rejected():
    cfg = config_from_dict(one_dim([{"game": "werewolf", "scenario": "a", "w": 1.0, "metrics": ["IRP"]}]))
    runs = [RunMetrics("werewolf", "a", 0, {"IRP": 1.0})] * 2
    with pytest.raises(IncompleteDataError):
        score(cfg, runs)


def test_run_spread_uses_sample_stdev():
    cfg = config_from_dict(one_dim([{"game": "werewolf", "scenario": "a", "w": 1.0, "k": 3,
                                     "metrics": ["IRP"]}]))
    runs = [RunMetrics("werewolf", "a", i, {"IRP": v}) for i, v in enumerate((10.0, 20.0, 60.0))]
    report = score(cfg, runs)
    dim = report.dimension("D")
    assert dim.run_scores == pytest.approx([10, 20, 60])
    assert dim.run_mean == pytest.approx(30)
    assert dim.run_std == pytest.approx(math.sqrt(((20) ** 2 + 10 ** 2 + 30 ** 2) / 2))
    assert report.overall_std == pytest.approx(dim.run_std)


def test_runs_from_records_filters_seat():
    recs = [
        CounterRecord("werewolf", "w", 0, {"correct_identifications": 1, "total_identification_attempts": 2,
                                           "key_role_survived": 0, "total_key_role_games": 0,
                                           "successful_votes": 0, "total_critical_votes": 1}, seat="Tyler"),
        CounterRecord("werewolf", "w", 0, {"correct_identifications": 0, "total_identification_attempts": 2,
                                           "key_role_survived": 0, "total_key_role_games": 0,
                                           "successful_votes": 0, "total_critical_votes": 1}, seat="Sam"),
    ]
    runs = runs_from_records(recs, {"w": "Tyler"})
    assert len(runs) == 1 and runs[0].values["IRP"] == 50
    assert math.isnan(runs[0].values["KSR"])


# -- validation --------------------------------------------------------------------

def test_default_config_is_valid():
    cfg = load_capability_config()
    assert validate_config(cfg) == []
    assert len(cfg.dimensions) == 5
    assert math.isclose(sum(d.W for d in cfg.dimensions), 1.0)


def test_weight_sum_violation_names_w():
    data = copy.deepcopy(load_capability_config().to_dict())
    data["dimensions"][0]["W"] = 0.1
    problems = validate_config(config_from_dict(data))
    assert any("W" in p and "0.9" in p for p in problems)
    with pytest.raises(ConfigError):
        overall_score(config_from_dict(data), {d["name"]: 50.0 for d in data["dimensions"]})


def test_beta_zero_violation():
    data = load_capability_config().to_dict()
    data["dimensions"][1]["beta"] = 0
    problems = validate_config(config_from_dict(data))
    assert any("beta" in p for p in problems)


@pytest.mark.parametrize(
    "mutate,fragment",
    [
        (lambda d: d["dimensions"][0]["scenarios"][0].update(w=0.9), "scenarios.w"),
        (lambda d: d["dimensions"][0]["scenarios"][0].update(k=0), ".k"),
        (lambda d: d["dimensions"][0]["scenarios"][0].update(game="chess"), "chess"),
        (lambda d: d["dimensions"][0]["scenarios"][0]["metrics"].append({"id": "IRP"}), "IRP"),
        (lambda d: d["dimensions"][0]["scenarios"][0]["metrics"].append({"id": "SUR", "bounds": [5, 5]}),
         "bounds"),
        (lambda d: d["dimensions"][1].update(name=d["dimensions"][0]["name"]), "duplicate"),
    ],
)
def test_other_violations(mutate, fragment):
    data = copy.deepcopy(load_capability_config().to_dict())
    mutate(data)
    problems = validate_config(config_from_dict(data))
    assert any(fragment in p for p in problems), problems


def test_malformed_config_files(tmp_path):
    bad = tmp_path / "bad.yaml"
    bad.write_text("dimensions: [1, 2", encoding="utf-8")
    with pytest.raises(ConfigError):
        load_capability_config(bad)
    with pytest.raises(ConfigError):
        load_capability_config(tmp_path / "absent.yaml")
    with pytest.raises(ConfigError):
        config_from_dict({"dimensions": [{"name": "x"}]})


def test_report_serialisation():
    cfg = config_from_dict(one_dim([{"game": "werewolf", "scenario": "w", "w": 1.0, "metrics": ["IRP"]}]))
    report = score(cfg, [RunMetrics("werewolf", "w", 0, {"IRP": math.nan})])
    data = report.to_dict()
    assert data["overall"] is None
    assert "D" in report.format_table()


# -- fuzzed properties -------------------------------------------------------------

@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**31))
def test_matches_oracle_and_bounded(seed):
    cfg_dict, runs = fuzz_case(random.Random(seed))
    report = score(config_from_dict(cfg_dict), run_metrics(runs))
    dims, overall = oracle_scores(cfg_dict, runs)
    for d in cfg_dict["dimensions"]:
        got = report.dimension(d["name"]).score
        assert got == pytest.approx(dims[d["name"]], rel=1e-9, abs=1e-9)
        assert -1e-9 <= got <= 100 * d["beta"] + 1e-9
    assert report.overall == pytest.approx(overall, rel=1e-9, abs=1e-9)
    assert report.overall <= 100 * max(d["beta"] for d in cfg_dict["dimensions"]) + 1e-9


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**31), st.floats(0.0, 500.0))
def test_monotone_in_single_metric(seed, bump):
    rng = random.Random(seed)
    cfg_dict, runs = fuzz_case(rng)
    cfg = config_from_dict(cfg_dict)
    before = score(cfg, run_metrics(runs))
    i = rng.randrange(len(runs))
    game, name, run, values = runs[i]
    metric = rng.choice(sorted(values))
    bumped = list(runs)
    bumped[i] = (game, name, run, dict(values, **{metric: values[metric] + bump}))
    after = score(cfg, run_metrics(bumped))
    for d in before.dimensions:
        assert after.dimension(d.name).score >= d.score - 1e-9
    assert after.overall >= before.overall - 1e-9


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**31), st.floats(0.01, 100.0))
def test_homogeneity(seed, lam):
    cfg_dict, runs = fuzz_case(random.Random(seed))
    scaled_cfg = copy.deepcopy(cfg_dict)
    for d in scaled_cfg["dimensions"]:
        for s in d["scenarios"]:
            for m in s["metrics"]:
                m["bounds"] = [b * lam for b in m["bounds"]]
    scaled_runs = [(g, s, r, {k: v * lam for k, v in vals.items()}) for g, s, r, vals in runs]
    a = score(config_from_dict(cfg_dict), run_metrics(runs))
    b = score(config_from_dict(scaled_cfg), run_metrics(scaled_runs))
    assert b.overall == pytest.approx(a.overall, rel=1e-9, abs=1e-9)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**31))
def test_permutation_invariance(seed):
    rng = random.Random(seed)
    cfg_dict, runs = fuzz_case(rng)
    shuffled = copy.deepcopy(cfg_dict)
    rng.shuffle(shuffled["dimensions"])
    for d in shuffled["dimensions"]:
        rng.shuffle(d["scenarios"])
        for s in d["scenarios"]:
            rng.shuffle(s["metrics"])
    shuffled_runs = list(runs)
    rng.shuffle(shuffled_runs)
    a = score(config_from_dict(cfg_dict), run_metrics(runs))
    b = score(config_from_dict(shuffled), run_metrics(shuffled_runs))
    assert b.overall == pytest.approx(a.overall, rel=1e-12, abs=1e-12)
    for d in a.dimensions:
        assert b.dimension(d.name).score == pytest.approx(d.score, rel=1e-12, abs=1e-12)
