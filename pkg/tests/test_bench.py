import csv
import json
import math

import numpy as np
import pytest

from informed_rrt.analysis import rejection_bound
from informed_rrt.bench import (
    AGG_HEADER,
    RAW_HEADER,
    BenchConfig,
    aggregate,
    cost_at_times,
    median_ci,
    median_ci_columns,
    read_raw,
    rejection_acceptance,
    run_benchmark,
    sample_bench,
)
from informed_rrt.cli import main
from informed_rrt.geometry import make_rng
from informed_rrt.planner import VARIANTS, PlannerConfig, plan
from informed_rrt.worlds import random_toy_world


def test_median_ci_examples():
    assert median_ci([1, 2, 3])[0] == 2
    assert median_ci([1, 2, math.inf])[0] == 2
    assert median_ci([4, 1, 3, 2])[0] == 2
    assert median_ci([math.inf] * 5)[0] == math.inf
    with pytest.raises(ValueError):
        median_ci([])


def test_median_ci_ordering():
    rng = make_rng(0)
    for size in (1, 2, 5, 30, 100):
        v = rng.exponential(size=size)
        v[rng.random(size) < 0.2] = math.inf
        med, lo, hi = median_ci(v)
        assert lo <= med <= hi


def test_median_ci_coverage():
    rng = make_rng(1)
    draws = rng.random((100, 10_000))
    _, lo, hi = median_ci_columns(draws)
    assert np.mean((lo <= 0.5) & (0.5 <= hi)) >= 0.99


def test_median_ci_columns_matches_scalar():
    rng = make_rng(2)
    table = rng.random((30, 7))
    table[0, 3] = math.inf
    cols = median_ci_columns(table)
    for j in range(7):
        assert tuple(c[j] for c in cols) == median_ci(table[:, j])


def test_cost_at_times_step_hold():
    t = np.array([0.5, 1.5, 3.0])
    c = np.array([math.inf, 2.0, 1.5])
    out = cost_at_times(t, c, np.array([0.2, 1.0, 2.0, 3.0, 9.0]))
    assert np.array_equal(out, [math.inf, math.inf, 2.0, 1.5, 1.5])


def test_aggregate_rows():
    curves = [(np.array([1.0, 2.0]), np.array([math.inf, 3.0])), (np.array([0.5]), np.array([2.0]))]
    buckets, med, lo, hi, solved = aggregate(curves, 3.0)
    assert np.array_equal(buckets, [1.0, 2.0, 3.0])
    assert np.array_equal(solved, [50.0, 100.0, 100.0])
    assert np.all(lo <= med) and np.all(med <= hi)


def test_bench_config_validation(tmp_path):
    cfg = BenchConfig(dims=[2, 8])
    assert cfg.trials == 30 and cfg.budgets == {2: 3.0, 8: 30.0} and cfg.eta == {2: 0.3, 8: 0.9}
    full = BenchConfig(dims=[4], full_scale=True)
    assert full.trials == 100 and full.budgets[4] == 30.0
    for bad in ({"trials": 0}, {"kind": "nope"}, {"budgets": {"2": -1}}, {"eta": {"2": 0}},
                {"variants": ["bogus"]}):
        with pytest.raises(ValueError):
            BenchConfig(**bad)
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"kind": "grid", "dims": [2], "trials": 4}))
    cfg = BenchConfig.from_file(path, trials=2)
    assert cfg.kind == "grid" and cfg.trials == 2


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_run_benchmark_tiny(tmp_path):
    cfg = BenchConfig(kind="toy-tolerance", dims=[2], variants=["informed", "rrtstar"], trials=3,
                      budgets={2: 0.2}, out_dir=str(tmp_path))
    run_benchmark(cfg)
    echoed = json.loads((tmp_path / "config.json").read_text())
    assert echoed["trials"] == 3 and echoed["budgets"] == {"2": 0.2}
    for v in ("informed", "rrtstar"):
        raw = read_rows(tmp_path / f"raw_toy_n2_{v}.csv")
        assert raw[0] == RAW_HEADER
        for t, c in read_raw(tmp_path / f"raw_toy_n2_{v}.csv").values():
            assert np.all(c[1:] <= c[:-1]) and np.all(np.diff(t) >= 0)
        agg = read_rows(tmp_path / f"agg_toy_n2_{v}.csv")
        assert agg[0] == AGG_HEADER
        body = np.array([[float(x) for x in r] for r in agg[1:]])
        assert np.all(np.diff(body[:, 4]) >= 0)
        assert np.all(body[:, 2] <= body[:, 1]) and np.all(body[:, 1] <= body[:, 3])
        assert np.all((0 <= body[:, 4]) & (body[:, 4] <= 100))
    table = read_rows(tmp_path / "tolerance_n2.csv")
    assert table[0][:3] == ["variant", "tolerance", "pct_solved"]
    assert len(table) == 1 + 2 * len(cfg.tolerances)


def test_run_benchmark_single_trial_monotone(tmp_path):
    cfg = BenchConfig(kind="grid", dims=[2], variants=["prune"], trials=1, budgets={2: 0.1},
                      out_dir=str(tmp_path))
    run_benchmark(cfg)
    (t, c), = read_raw(tmp_path / "raw_grid_n2_prune.csv").values()
    assert c.size > 0 and np.all(c[1:] <= c[:-1])


def test_run_benchmark_deterministic_under_iteration_budget(tmp_path):
    def run(sub):
        cfg = BenchConfig(kind="toy-tolerance", dims=[2], variants=["combined"], trials=2, iterations=300,
                          out_dir=str(tmp_path / sub))
        run_benchmark(cfg)
        rows = read_rows(tmp_path / sub / "raw_toy_n2_combined.csv")
        return [(r[0], r[1], r[3]) for r in rows]

    assert run("a") == run("b")


def test_map_width_sweep(tmp_path):
    cfg = BenchConfig(kind="map-width", dims=[2], variants=["informed"], trials=2, widths=[2.0, 4.0],
                      budgets={2: 0.2}, out_dir=str(tmp_path))
    groups = run_benchmark(cfg)
    assert set(groups) == {"width_n2_l2_informed", "width_n2_l4_informed"}
    assert groups["width_n2_l4_informed"][0][1].world.measure == 16.0
    assert len(read_rows(tmp_path / "widths_n2.csv")) == 3


def test_failed_trials_are_logged_not_fatal(tmp_path, caplog):
    cfg = BenchConfig(kind="map-width", dims=[2], variants=["informed"], trials=2, widths=[0.5],
                      budgets={2: 0.1}, out_dir=str(tmp_path))
    groups = run_benchmark(cfg)
    assert groups["width_n2_l0.5_informed"] == []
    assert "failed" in caplog.text
    assert read_rows(tmp_path / "raw_width_n2_l0.5_informed.csv") == [RAW_HEADER]


def test_variants_share_the_stream_until_first_solution():
    problem = random_toy_world(2, 2.0, make_rng(3))
    records = {}
    for v in VARIANTS:
        res = plan(problem, PlannerConfig.for_variant(v, max_iterations=1500, seed=11))
        first = int(np.flatnonzero(np.isfinite(res.cost))[0])
        records[v] = (first, res.cost[first])
    assert len(set(records.values())) == 1


def test_sample_bench_rows(tmp_path):
    path = tmp_path / "sb.csv"
    rows = sample_bench([2, 4, 16], 2000, time_cap=1.0, path=path, batch=20_000)
    assert read_rows(path)[0][:3] == ["dimension", "method", "samples"]
    direct = {r["dimension"]: r["per_sample_s"] for r in rows if r["method"] == "direct"}
    assert direct[16] < 512 * direct[2]
    rej16 = next(r for r in rows if r["method"] == "rejection" and r["dimension"] == 16)
    assert not rej16["complete"]
    assert rej16["expected_acceptance"] == pytest.approx(rejection_bound(16))
    with pytest.raises(ValueError):
        sample_bench([1], 10)


@pytest.mark.parametrize("n", [2, 4, 6])
def test_rejection_acceptance_matches_bound(n):
    m = 100_000
    p = rejection_bound(n)
    assert abs(rejection_acceptance(n, m, make_rng(n)) - p) <= 3 * math.sqrt(p * (1 - p) / m)


def test_cli_rates(capsys):
    assert main(["rates", "--dims", "2,8"]) == 0
    out = capsys.readouterr().out
    assert "0.785398" in out and "0.333333" in out


def test_cli_plan(capsys):
    assert main(["plan", "--iterations", "300", "--compact"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["path"][0] == [-0.5, 0.0]
    assert out["cost"] is None or out["cost"] >= out["c_opt"] - 1e-3


def test_cli_plan_problem_file(tmp_path, capsys):
    from informed_rrt.worlds import toy_world

    path = tmp_path / "p.json"
    toy_world(3, 2.0, 0.2).save(path)
    assert main(["plan", "--problem", str(path), "--iterations", "100", "--compact"]) == 0
    assert len(json.loads(capsys.readouterr().out)["path"][0]) == 3


def test_cli_bench_and_errors(tmp_path, capsys):
    out = tmp_path / "b"
    assert main(["bench", "--kind", "grid", "--dims", "2", "--trials", "1", "--budget", "0.1",
                 "--variants", "informed", "--out", str(out)]) == 0
    assert (out / "raw_grid_n2_informed.csv").exists()
    assert main(["bench", "--trials", "0", "--out", str(out)]) != 0
    assert main(["bench", "--config", str(tmp_path / "missing.json")]) != 0
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["bench", "--config", str(bad)]) != 0
    with pytest.raises(SystemExit) as exc:
        main(["bench", "--kind", "bogus"])
    assert exc.value.code != 0


def test_cli_converge_and_sample_bench(tmp_path, capsys):
    conv = tmp_path / "c.csv"
    assert main(["converge", "--trials", "20", "--iterations", "40", "--out", str(conv)]) == 0
    assert read_rows(conv)[0] == ["iteration", "mean_log_error", "predicted_log_error", "n_trials"]
    sb = tmp_path / "s.csv"
    assert main(["sample-bench", "--dims", "2,3", "--samples", "500", "--out", str(sb)]) == 0
    assert len(read_rows(sb)) == 5
    assert main(["converge", "--trials", "10", "--iterations", "2", "--out", str(conv)]) != 0
