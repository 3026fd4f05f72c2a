"""
CSV Processor
Run tables (one row per step) and comparison tables
"""

import csv
from pathlib import Path
from typing import Dict, List, Sequence, Tuple

from processors.simulator import RunRecord
from storage import OutputStore
from world.sensing import format_observation

COMPARISON_FIELDS = ["controller", "m", "mean", "stddev", "min", "max", "count", "seeds"]


def run_table_fields(m_total: int) -> List[str]:
    fields = ["step", "controller", "camera_state"]
    for k in range(m_total):
        fields += [f"t{k}_true_cell", f"t{k}_obs"]
    return fields


def dash_join(values) -> str:
    return "-".join(str(v) for v in values)


class CSVGenerator:
    @staticmethod
    def run_rows(record: RunRecord) -> List[Dict]:
        rows = []
        for row in record.rows:
            out = {"step": row.step, "controller": record.controller, "camera_state": dash_join(row.camera_state)}
            for k, target in enumerate(row.targets):
                out[f"t{k}_true_cell"] = target.true_cell
                out[f"t{k}_obs"] = format_observation(target.observation)
            rows.append(out)
        return rows

    @staticmethod
    def write_run_table(store: OutputStore, name: str, record: RunRecord) -> Path:
        """Per-step log with an M_obs / scenario hash / seed footer"""
        footer = {
            "m_obs": ",".join(str(m) for m in record.per_step_obs),
            "scenario_hash": record.scenario_hash,
            "seed": str(record.seed),
        }
        return store.write_table(name, run_table_fields(record.m_total), CSVGenerator.run_rows(record), footer)

    @staticmethod
    def write_comparison(store: OutputStore, name: str, rows: Sequence[Dict]) -> Path:
        return store.write_table(name, COMPARISON_FIELDS, rows)


class CSVProcessor:
    @staticmethod
    def read_run_table(csv_path: Path) -> Tuple[List[Dict], Dict[str, str]]:
        """Rows and footer of a run table"""
        rows, footer = [], {}
        with open(csv_path, "r", encoding="utf-8", newline="") as f:
            lines = []
            for line in f:
                if line.startswith("# "):
                    key, _, value = line[2:].rstrip("\n").partition(": ")
                    footer[key] = value
                else:
                    lines.append(line)
        for row in csv.DictReader(lines):
            rows.append(row)
        return rows, footer

    @staticmethod
    def read_m_obs(csv_path: Path) -> List[int]:
        _, footer = CSVProcessor.read_run_table(csv_path)
        text = footer.get("m_obs", "")
        return [int(v) for v in text.split(",")] if text else []
