import numpy as np
import pytest

from processors.csv_processor import CSVGenerator, CSVProcessor, dash_join, run_table_fields
from processors.metrics import AggregateStats, MetricSummary
from processors.report_exporter import report_exporter
from processors.simulator import RunRecord, StepRow, TargetRow
from processors.snapshot_renderer import SnapshotRenderer
from storage import OutputStore
from utils.errors import ConfigurationError
from utils.run_pool import RunPool


@pytest.fixture
def record():
    rows = [
        StepRow(0, (1, 0), (TargetRow(4, True, 4), TargetRow(9, False, None)), 1),
        StepRow(1, (2, 0), (TargetRow(5, False, None), TargetRow(9, False, None)), 0),
    ]
    return RunRecord("lab", "abc123", "pomdp", 7, 2, rows)


def test_run_table_round_trip(tmp_path, record):
    store = OutputStore(tmp_path)
    path = CSVGenerator.write_run_table(store, "run.csv", record)
    rows, footer = CSVProcessor.read_run_table(path)
    assert list(rows[0]) == run_table_fields(2)
    assert rows[0] == {"step": "0", "controller": "pomdp", "camera_state": "1-0",
                       "t0_true_cell": "4", "t0_obs": "4", "t1_true_cell": "9", "t1_obs": "phi"}
    assert rows[1]["t0_obs"] == "phi"
    assert footer == {"m_obs": "1,0", "scenario_hash": "abc123", "seed": "7"}
    assert CSVProcessor.read_m_obs(path) == [1, 0]


def test_dash_join():
    assert dash_join((0, 2, 1)) == "0-2-1"
    assert dash_join(()) == ""


def test_summary_report():
    summaries = [MetricSummary(75.0, [2, 1], 2, 2, 1), MetricSummary(50.0, [1, 1], 2, 2, 2)]
    stats = AggregateStats(62.5, 12.5, 50.0, 75.0, 2)
    text = report_exporter.create_summary_report("lab", "pomdp", "abc", "ptzwatch 1.0.0", summaries,
                                                 aggregate=stats, conflicts=3)
    assert text.startswith("# Run summary: lab / pomdp")
    assert "| 1 | 75.00 |" in text and "| 2 | 50.00 |" in text
    assert "Mean 62.50, stddev 12.50, min 50.00, max 75.00" in text
    assert "Belief conflicts recovered: 3" in text

    single = report_exporter.create_summary_report("lab", "pomdp", "abc", "v", summaries[:1], aggregate=stats)
    assert "Mean" not in single and "conflicts" not in single
    with pytest.raises(ConfigurationError):
        report_exporter.create_summary_report("lab", "pomdp", "abc", "v", [])


def test_comparison_report():
    table = {
        "pomdp": {5: AggregateStats(80.0, 2.0, 78.0, 82.0, 2), 10: AggregateStats(60.0, 1.0, 59.0, 61.0, 2)},
        "stat": {5: AggregateStats(80.0, 0.0, 80.0, 80.0, 2), 10: AggregateStats(40.0, 0.5, 39.5, 40.5, 2)},
    }
    text = report_exporter.create_comparison_report("hall", "abc", "v", [1, 2], table)
    assert "| controller | m=5 | m=10 |" in text
    assert "| pomdp | 80.00 ± 2.00 | 60.00 ± 1.00 |" in text
    assert "| stat | 80.00 ± 0.00 | 40.00 ± 0.50 |" in text
    # tie at m=5 goes to the first controller listed
    assert "- m=5: best pomdp" in text
    assert "- m=10: best pomdp" in text
    assert "Generated" not in text
    assert "Generated 2026-01-01T00:00:00" in report_exporter.create_comparison_report(
        "hall", "abc", "v", [1], table, generated_at="2026-01-01T00:00:00")



def test_comparison_report_with_undefined_cells():
    table = {
        "pomdp": {0: None, 5: AggregateStats(70.0, 1.0, 69.0, 71.0, 2)},
        "stat": {0: None, 5: AggregateStats(72.0, 0.0, 72.0, 72.0, 2)},
    }
    text = report_exporter.create_comparison_report("hall", "abc", "v", [1, 2], table)
    assert "| pomdp | n/a | 70.00 ± 1.00 |" in text
    assert "- m=0: PercentObs undefined" in text
    assert "- m=5: best stat" in text


def test_comparison_table_carries_the_seed_count(tmp_path):
    rows = [{"controller": "pomdp", "m": 5, **AggregateStats(70.0, 1.0, 69.0, 71.0, 2).to_dict(), "seeds": 2},
            {"controller": "stat", "m": 0, **AggregateStats.undefined_dict(), "seeds": 0}]
    path = CSVGenerator.write_comparison(OutputStore(tmp_path), "comparison.csv", rows)
    assert path.read_text().splitlines() == [
        "controller,m,mean,stddev,min,max,count,seeds",
        "pomdp,5,70.0,1.0,69.0,71.0,2,2",
        "stat,0,,,,,0,0",
    ]


def test_snapshot_renderer(make_area):
    area = make_area(5, 3, [[{0, 1}]], blocked={7})
    heat = np.zeros(area.grid.n_locations)
    heat[area.grid.location_of(12)] = 2.0
    image = SnapshotRenderer(cell_px=10).render(area, (0,), target_cells=[3], heat=heat)
    assert image.size == (50, 30)
    assert image.getpixel((25, 15)) == (20, 20, 20)  # blocked cell 7
    assert image.getpixel((5, 5)) == (150, 190, 240)  # fov cell 0
    assert image.getpixel((35, 5)) == (20, 120, 40)  # target on cell 3
    red, green, _ = image.getpixel((25, 25))  # hottest cell 12
    assert red > green
    with pytest.raises(ValueError):
        SnapshotRenderer(cell_px=1)


def test_run_pool_keeps_item_order():
    progress = []
    assert RunPool(2).map(abs, [-3, 1, -2, 5], progress=lambda i, n: progress.append(i)) == [3, 1, 2, 5]
    assert sorted(progress) == [1, 2, 3, 4]
    assert RunPool(1).map(abs, [-1]) == [1]
