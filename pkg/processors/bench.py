"""
Scaling Bench - plan() runtime against the number of targets

Times only the planner call on a prepared belief, repeats each point, drops
the first (cold) repeat and keeps the median. Runs inline in the calling
process so timings are not skewed by sibling workers.
"""

import logging
import math
import statistics
import time
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence

import numpy as np
from scipy import stats

from config import config
from controllers.planner import Planner, StubPlanner
from processors.scenario import Scenario
from processors.simulator import World, build_world
from utils.errors import ConfigurationError
from world.belief import JointBelief, uniform_belief

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ScalingReport:
    m_values: List[int]
    runtimes: List[float]  # median seconds per plan call
    slope: float
    intercept: float
    r_squared: float
    residuals: List[float]
    endpoint_ratio: float
    repeats: int
    planner: str

    def to_dict(self) -> dict:
        return {
            "planner": self.planner,
            "repeats": self.repeats,
            "rows": [{"m": m, "median_seconds": t} for m, t in zip(self.m_values, self.runtimes)],
            "fit": {
                "slope": self.slope,
                "intercept": self.intercept,
                "r_squared": self.r_squared,
                "residuals": list(self.residuals),
            },
            "endpoint_ratio": self.endpoint_ratio,
        }


def check_m_values(m_values: Sequence[int]) -> List[int]:
    m_values = [int(m) for m in m_values]
    if len(m_values) < 3:
        raise ConfigurationError(f"bench needs at least 3 m values, got {m_values}")
    if any(m < 1 for m in m_values):
        raise ConfigurationError(f"bench m values must be >= 1, got {m_values}")
    if any(b <= a for a, b in zip(m_values, m_values[1:])):
        raise ConfigurationError(f"bench m values must be strictly ascending, got {m_values}")
    return m_values


def linear_fit(xs: Sequence[float], ys: Sequence[float]):
    """Least-squares line; returns slope, intercept, R² and residuals"""
    fit = stats.linregress(np.asarray(xs, dtype=float), np.asarray(ys, dtype=float))
    r_squared = float(fit.rvalue ** 2)
    if math.isnan(r_squared):
        r_squared = 0.0
    predicted = fit.intercept + fit.slope * np.asarray(xs, dtype=float)
    residuals = [float(r) for r in np.asarray(ys, dtype=float) - predicted]
    return float(fit.slope), float(fit.intercept), min(max(r_squared, 0.0), 1.0), residuals


def endpoint_ratio(m_values: Sequence[int], runtimes: Sequence[float]) -> float:
    """runtime(max m) / runtime(max m / 4), falling back to the smallest m"""
    by_m = dict(zip(m_values, runtimes))
    top = m_values[-1]
    reference = by_m.get(top // 4) if top % 4 == 0 else None
    if reference is None:
        reference = by_m[m_values[0]]
    return float(by_m[top] / reference) if reference > 0 else math.inf


def time_plan(planner: Planner, belief: JointBelief, repeats: int,
              timer: Callable[[], float] = time.perf_counter) -> float:
    samples = []
    for _ in range(repeats):
        start = timer()
        planner.plan(belief)
        samples.append(timer() - start)
    return statistics.median(samples[1:])


def scaling_bench(scenario: Scenario, m_values: Sequence[int] = config.BENCH_M_VALUES,
                  repeats: int = config.BENCH_REPEATS, stub: bool = False,
                  world: Optional[World] = None, progress: Optional[Callable[[int, int], None]] = None,
                  timer: Callable[[], float] = time.perf_counter) -> ScalingReport:
    m_values = check_m_values(m_values)
    if repeats < 2:
        raise ConfigurationError(f"bench repeats must be >= 2 (first is discarded), got {repeats}")

    world = world or build_world(scenario)
    planner_cls = StubPlanner if stub else Planner
    planner = planner_cls(world.area, world.table, world.sensor)
    prior = uniform_belief(world.table.space)
    camera_state = world.area.initial_state()

    runtimes = []
    for i, m in enumerate(m_values):
        belief = JointBelief(tuple(prior for _ in range(m)), camera_state)
        runtimes.append(time_plan(planner, belief, repeats, timer))
        logger.info(f"🔄 m={m}: median plan {runtimes[-1] * 1000:.3f} ms")
        if progress is not None:
            progress(i + 1, len(m_values))

    slope, intercept, r_squared, residuals = linear_fit(m_values, runtimes)
    report = ScalingReport(
        m_values=m_values,
        runtimes=runtimes,
        slope=slope,
        intercept=intercept,
        r_squared=r_squared,
        residuals=residuals,
        endpoint_ratio=endpoint_ratio(m_values, runtimes),
        repeats=repeats,
        planner="stub" if stub else "factored",
    )
    logger.info(f"✅ Scaling fit: slope {slope:.3e} s/target, R² {r_squared:.4f}")
    return report
