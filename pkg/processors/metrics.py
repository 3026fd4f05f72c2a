"""
Metrics - PercentObs and multi-seed aggregation
PercentObs = 100 / (tau * M_tot) * sum of M_obs over the steps of a run
"""

from dataclasses import dataclass
from typing import Iterable, List, Sequence

import numpy as np

from processors.simulator import RunRecord
from utils.errors import UndefinedMetricError


@dataclass(frozen=True)
class MetricSummary:
    percent_obs: float
    per_step_obs: List[int]
    m_total: int
    tau: int
    seed: int

    def to_dict(self) -> dict:
        return {
            "percent_obs": self.percent_obs,
            "per_step_obs": list(self.per_step_obs),
            "m_total": self.m_total,
            "tau": self.tau,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class AggregateStats:
    mean: float
    stddev: float
    min: float
    max: float
    count: int

    def to_dict(self) -> dict:
        return {"mean": self.mean, "stddev": self.stddev, "min": self.min, "max": self.max, "count": self.count}

    @staticmethod
    def undefined_dict() -> dict:
        return {"mean": None, "stddev": None, "min": None, "max": None, "count": 0}


def percent_obs_counts(per_step_obs: Sequence[int], m_total: int) -> float:
    tau = len(per_step_obs)
    if tau == 0:
        raise UndefinedMetricError("PercentObs is undefined for a run with no steps")
    if m_total <= 0:
        raise UndefinedMetricError("PercentObs is undefined with no targets")
    return 100.0 * float(sum(per_step_obs)) / (tau * m_total)


def percent_obs(record: RunRecord) -> float:
    return percent_obs_counts(record.per_step_obs, record.m_total)


def summarize(record: RunRecord) -> MetricSummary:
    return MetricSummary(
        percent_obs=percent_obs(record),
        per_step_obs=record.per_step_obs,
        m_total=record.m_total,
        tau=record.tau,
        seed=record.seed,
    )


def aggregate(summaries: Iterable) -> AggregateStats:
    """Mean, population stddev, min and max of percent_obs (summaries or plain numbers)"""
    values = np.array([getattr(s, "percent_obs", s) for s in summaries], dtype=float)
    if values.size == 0:
        raise UndefinedMetricError("cannot aggregate an empty set of summaries")
    return AggregateStats(
        mean=float(values.mean()),
        stddev=float(values.std(ddof=0)),
        min=float(values.min()),
        max=float(values.max()),
        count=int(values.size),
    )


def concat_records(records: Sequence[RunRecord]) -> RunRecord:
    """Back-to-back concatenation of runs over the same target count"""
    if not records:
        raise UndefinedMetricError("nothing to concatenate")
    m_totals = {r.m_total for r in records}
    if len(m_totals) != 1:
        raise UndefinedMetricError(f"cannot concatenate runs with different target counts {sorted(m_totals)}")
    first = records[0]
    rows = [row for r in records for row in r.rows]
    return RunRecord(first.scenario_name, first.scenario_hash, first.controller, first.seed, first.m_total, rows)
