"""
Run Orchestrator - one simulation job per (scenario, controller, seed)
Jobs and outcomes are plain picklable values so they can cross process boundaries
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from controllers import build_controller
from processors.metrics import MetricSummary, summarize
from processors.scenario import Scenario
from processors.simulator import RunRecord, build_world, run
from utils.errors import UndefinedMetricError
from world.gridworld import JointCameraState

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RunJob:
    scenario: Scenario
    controller: str
    seed: int
    emit_beliefs: bool = False
    top_k: Optional[int] = None
    verbose_values: bool = False
    capture_final: bool = False


@dataclass
class RunOutcome:
    job: RunJob
    record: RunRecord
    summary: Optional[MetricSummary]
    beliefs: List[dict] = field(default_factory=list)
    values: List[dict] = field(default_factory=list)
    conflicts: int = 0
    final_camera_state: Optional[JointCameraState] = None
    final_cells: Tuple[int, ...] = ()
    final_heat: Optional[np.ndarray] = None


def execute_run(job: RunJob) -> RunOutcome:
    """Build the world, run the controller for one seed, collect everything the writers need"""
    scenario = job.scenario
    world = build_world(scenario)
    controller = build_controller(
        job.controller, world.area, world.table, world.sensor,
        scenario.controller_params, nominal_velocity=scenario.nominal_velocity,
    )

    beliefs: List[dict] = []
    values: List[dict] = []

    def collect_value(step, report):
        record = {"step": step, **report.to_record(verbose=True)}
        values.append(record)
        logger.debug(f"Step {step}: {record}")

    record = run(
        scenario,
        controller,
        seed=job.seed,
        world=world,
        belief_sink=beliefs.append if job.emit_beliefs else None,
        value_sink=collect_value if job.verbose_values else None,
        top_k=job.top_k,
    )

    try:
        summary = summarize(record)
    except UndefinedMetricError as e:
        logger.warning(f"⚠️ {scenario.name}/{job.controller} seed {job.seed}: {e}")
        summary = None

    outcome = RunOutcome(
        job=job,
        record=record,
        summary=summary,
        beliefs=beliefs,
        values=values,
        conflicts=getattr(controller, "conflicts", 0),
    )
    if job.capture_final and record.rows:
        last = record.rows[-1]
        outcome.final_camera_state = last.camera_state
        outcome.final_cells = tuple(t.true_cell for t in last.targets)
        stacked = [np.asarray(r["location_marginal"]) for r in controller.belief_records(last.step, 1)]
        outcome.final_heat = np.sum(stacked, axis=0) if stacked else None
    return outcome
