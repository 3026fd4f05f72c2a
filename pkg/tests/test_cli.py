import csv
import json

import pytest

from cli.handlers import parse_int_list
from controllers import CONTROLLER_NAMES
from main import main
from processors.csv_processor import CSVProcessor
from processors.metrics import aggregate, percent_obs_counts
from utils.errors import ConfigurationError


def test_single_run_writes_table_and_summary(tmp_path):
    code = main(["run", "--scenario", "hall", "--controller", "stat", "--targets", "5", "--steps", "100",
                 "--seed", "7", "--out", str(tmp_path)])
    assert code == 0
    assert sorted(p.name for p in tmp_path.iterdir()) == ["hall_stat_m5_s7.csv", "hall_stat_m5_s7_summary.json"]

    summary = json.loads((tmp_path / "hall_stat_m5_s7_summary.json").read_text())
    assert summary["controller"] == "stat" and summary["seed"] == 7 and summary["tau"] == 100
    m_obs = CSVProcessor.read_m_obs(tmp_path / "hall_stat_m5_s7.csv")
    assert len(m_obs) == 100
    assert summary["per_step_obs"] == m_obs
    assert summary["percent_obs"] == pytest.approx(percent_obs_counts(m_obs, 5))
    assert "generated_at" in summary


def test_unknown_controller_exits_with_config_error(tmp_path, capsys):
    code = main(["run", "--scenario", "hall", "--controller", "greedy", "--out", str(tmp_path)])
    assert code == 2
    err = capsys.readouterr().err
    for name in CONTROLLER_NAMES:
        assert name in err
    assert list(tmp_path.iterdir()) == []


def test_missing_scenario_and_bad_arguments(tmp_path):
    assert main(["run", "--scenario", "atlantis", "--out", str(tmp_path)]) == 2
    assert main(["run", "--scenario", "lab", "--seeds", "5..1", "--out", str(tmp_path)]) == 2
    with pytest.raises(SystemExit) as info:
        main(["run"])
    assert info.value.code == 2


def test_multi_seed_aggregate_matches_run_tables(tmp_path):
    code = main(["run", "--scenario", "lab", "--controller", "sys", "--steps", "8", "--seeds", "1..20",
                 "--out", str(tmp_path)])
    assert code == 0
    tables = sorted(tmp_path.glob("lab_sys_m3_s*.csv"))
    assert len(tables) == 20
    assert len(list(tmp_path.glob("lab_sys_m3_s*_summary.json"))) == 20

    recomputed = aggregate([percent_obs_counts(CSVProcessor.read_m_obs(p), 3) for p in tables])
    doc = json.loads((tmp_path / "lab_sys_m3_aggregate.json").read_text())
    assert doc["seeds"] == list(range(1, 21))
    assert doc["percent_obs"]["count"] == 20
    assert doc["percent_obs"]["mean"] == pytest.approx(recomputed.mean, abs=1e-9)
    assert doc["percent_obs"]["stddev"] == pytest.approx(recomputed.stddev, abs=1e-9)
    assert (tmp_path / "lab_sys_m3_report.md").read_text().startswith("# Run summary: lab / sys")


def test_run_extras(tmp_path):
    code = main(["run", "--scenario", "lab", "--steps", "3", "--seed", "2", "--emit-beliefs",
                 "--verbose-values", "--render", "--out", str(tmp_path)])
    assert code == 0
    stem = tmp_path / "lab_pomdp_m3_s2"
    beliefs = stem.with_name(stem.name + "_beliefs.jsonl").read_text().splitlines()
    assert len(beliefs) == 3 * 3
    first = json.loads(beliefs[0])
    assert first["step"] == 0 and first["target"] == 0 and "top" in first
    values = [json.loads(line) for line in stem.with_name(stem.name + "_values.jsonl").read_text().splitlines()]
    assert [v["step"] for v in values] == [0, 1, 2]
    assert len(values[0]["values"]) == 27
    assert stem.with_name(stem.name + ".png").exists()


def test_compare_is_seed_matched(tmp_path):
    code = main(["compare", "--scenario", "lab", "--targets", "2,3", "--seeds", "1..2", "--steps", "6",
                 "--keep-runs", "--out", str(tmp_path)])
    assert code == 0

    with open(tmp_path / "comparison.csv", newline="") as f:
        rows = [r for r in csv.DictReader(line for line in f if not line.startswith("#"))]
    assert [(r["controller"], r["m"]) for r in rows] == [(c, m) for m in ("2", "3") for c in CONTROLLER_NAMES]
    assert all(r["seeds"] == "2" and r["count"] == "2" for r in rows)

    doc = json.loads((tmp_path / "comparison.json").read_text())
    assert doc["m_values"] == [2, 3] and doc["seeds"] == [1, 2]
    assert "| controller | m=2 | m=3 |" in (tmp_path / "comparison.md").read_text()

    for m in (2, 3):
        for seed in (1, 2):
            truths = set()
            for name in CONTROLLER_NAMES:
                table_rows, _ = CSVProcessor.read_run_table(tmp_path / f"lab_{name}_m{m}_s{seed}.csv")
                truths.add(tuple(tuple(r[f"t{k}_true_cell"] for k in range(m)) for r in table_rows))
            assert len(truths) == 1


def test_compare_keeps_scripted_targets(tmp_path):
    # two targets scripted onto the same cell; a random spawn could not place them
    scenario = tmp_path / "still.scn"
    scenario.write_text(json.dumps({
        "name": "still",
        "map": {"ascii": ["."]},
        "cameras": [{"id": 0, "states": [{"fov": [0]}]}],
        "targets": [{"cell": 0}, {"cell": 0, "direction": 4}],
        "tau": 3,
    }))
    out = tmp_path / "out"
    assert main(["compare", "--scenario", str(scenario), "--seeds", "1", "--keep-runs", "--out", str(out)]) == 0

    doc = json.loads((out / "comparison.json").read_text())
    assert doc["m_values"] == [2]
    assert [row["mean"] for row in doc["rows"]] == [100.0] * len(CONTROLLER_NAMES)
    rows, _ = CSVProcessor.read_run_table(out / "still_pomdp_m2_s1.csv")
    assert {(r["t0_true_cell"], r["t1_true_cell"]) for r in rows} == {("0", "0")}


def test_compare_with_zero_targets_reports_undefined(tmp_path):
    code = main(["compare", "--scenario", "lab", "--targets", "0,2", "--seeds", "1", "--steps", "3",
                 "--out", str(tmp_path)])
    assert code == 0

    doc = json.loads((tmp_path / "comparison.json").read_text())
    empty = [row for row in doc["rows"] if row["m"] == 0]
    assert len(empty) == len(CONTROLLER_NAMES)
    assert all(row["mean"] is None and row["count"] == 0 and row["seeds"] == 0 for row in empty)
    assert all(row["count"] == 1 for row in doc["rows"] if row["m"] == 2)

    report = (tmp_path / "comparison.md").read_text()
    assert "| pomdp | n/a |" in report
    assert "- m=0: PercentObs undefined" in report
    assert "- m=2: best " in report


def test_bench_with_stub_planner(tmp_path):
    code = main(["bench", "--scenario", "lab", "--m-values", "1,2,4", "--repeats", "2", "--stub",
                 "--reproducible", "--out", str(tmp_path)])
    assert code == 0
    doc = json.loads((tmp_path / "bench.json").read_text())
    assert doc["kind"] == "scaling" and doc["planner"] == "stub"
    assert [row["m"] for row in doc["rows"]] == [1, 2, 4]
    assert 0.0 <= doc["fit"]["r_squared"] <= 1.0
    assert "generated_at" not in doc
    assert main(["bench", "--scenario", "lab", "--m-values", "4,2,1", "--out", str(tmp_path)]) == 2


def test_reproducible_runs_are_byte_identical(tmp_path):
    args = ["run", "--scenario", "lab", "--steps", "10", "--seed", "3", "--reproducible"]
    assert main(args + ["--out", str(tmp_path / "a")]) == 0
    assert main(args + ["--out", str(tmp_path / "b")]) == 0
    names = sorted(p.name for p in (tmp_path / "a").iterdir())
    assert names == sorted(p.name for p in (tmp_path / "b").iterdir())
    for name in names:
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_parse_int_list():
    assert parse_int_list("5, 10,5,20", "--targets") == [5, 10, 20]
    with pytest.raises(ConfigurationError, match="not an integer"):
        parse_int_list("5,x", "--targets")
    with pytest.raises(ConfigurationError, match="empty"):
        parse_int_list(",", "--targets")
