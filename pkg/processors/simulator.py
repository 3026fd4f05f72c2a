"""
Simulator - ground-truth targets, camera moves and the per-step loop

Each step: controller acts, cameras move, targets advance, observations are
drawn from the new camera state, the controller updates, M_obs is scored
against ground truth.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np

from controllers import Controller, build_controller
from processors.scenario import Scenario
from storage import TableCache, table_cache
from utils.errors import ConfigurationError, SimulationError
from utils.hashing import content_hash
from utils.rng import SeededStreams
from world.gridworld import GridMap, JointCameraState, SurveillanceArea
from world.motion import N_DIRECTIONS, TargetState, TransitionTable
from world.sensing import Observation, SensorModel

logger = logging.getLogger(__name__)

BeliefSink = Callable[[dict], None]
ValueSink = Callable[[int, object], None]


@dataclass
class World:
    area: SurveillanceArea
    table: TransitionTable
    sensor: SensorModel


@dataclass
class WorldState:
    step: int
    targets: List[TargetState]
    camera_state: JointCameraState
    rng: np.random.Generator = field(repr=False)


@dataclass(frozen=True)
class TargetRow:
    true_cell: int
    observed: bool
    observation: Observation


@dataclass(frozen=True)
class StepRow:
    step: int
    camera_state: JointCameraState
    targets: Tuple[TargetRow, ...]
    m_obs: int


@dataclass
class RunRecord:
    scenario_name: str
    scenario_hash: str
    controller: str
    seed: int
    m_total: int
    rows: List[StepRow] = field(default_factory=list)

    @property
    def tau(self) -> int:
        return len(self.rows)

    @property
    def per_step_obs(self) -> List[int]:
        return [row.m_obs for row in self.rows]

    def truth_columns(self) -> List[Tuple[int, ...]]:
        """Per-step true cells; equal across controllers for a shared seed"""
        return [tuple(t.true_cell for t in row.targets) for row in self.rows]

    def truth_digest(self) -> str:
        return content_hash(self.truth_columns())


def build_world(scenario: Scenario, cache: Optional[TableCache] = None) -> World:
    area = scenario.area()
    table = (cache or table_cache).load_or_build(scenario.grid, scenario.motion)
    return World(area, table, SensorModel(area))


def spawn_targets(grid: GridMap, placement: Union[int, Sequence[TargetState]], rng: np.random.Generator,
                  nominal_velocity_index: int = 0) -> List[TargetState]:
    """Initial ground truth: scripted states verbatim, or m uniform spawns on distinct cells"""
    if not isinstance(placement, int):
        return [TargetState(*t) for t in placement]

    m = placement
    if m < 0:
        raise ConfigurationError(f"target count must be >= 0, got {m}")
    if m > grid.n_locations:
        raise ConfigurationError(f"cannot spawn {m} targets on {grid.n_locations} free cells")
    if m == 0:
        return []
    cells = rng.choice(np.asarray(grid.free_cells), size=m, replace=False)
    directions = rng.integers(0, N_DIRECTIONS, size=m)
    return [TargetState(int(c), int(d), nominal_velocity_index) for c, d in zip(cells, directions)]


def advance_targets(targets: Sequence[TargetState], table: TransitionTable,
                    rng: np.random.Generator) -> List[TargetState]:
    """Every target moves independently by a draw from its transition row"""
    return table.sample(targets, rng)


def count_observed(targets: Sequence[TargetState], C: JointCameraState, area: SurveillanceArea) -> int:
    fov = area.fov(C)
    return sum(1 for t in targets if t.location in fov)


def run(scenario: Scenario, controller: Optional[Controller] = None, seed: Optional[int] = None,
        world: Optional[World] = None, belief_sink: Optional[BeliefSink] = None,
        value_sink: Optional[ValueSink] = None, top_k: Optional[int] = None) -> RunRecord:
    """Simulate scenario.tau steps; a pure function of (scenario, controller config, seed)"""
    world = world or build_world(scenario)
    if controller is None:
        controller = build_controller(
            scenario.controller, world.area, world.table, world.sensor,
            scenario.controller_params, nominal_velocity=scenario.nominal_velocity,
        )
    seed = scenario.seed if seed is None else seed
    streams = SeededStreams(seed)
    truth_rng = streams.generator("truth")
    sensing_rng = streams.generator("sensing")

    targets = spawn_targets(scenario.grid, scenario.targets, truth_rng, scenario.nominal_velocity_index)
    camera_state = controller.reset(len(targets), streams.generator("controller"))
    state = WorldState(0, targets, camera_state, truth_rng)
    record = RunRecord(
        scenario_name=scenario.name,
        scenario_hash=scenario.content_hash(),
        controller=controller.name,
        seed=seed,
        m_total=len(targets),
    )

    for step in range(scenario.tau):
        try:
            row = _step(state, controller, world, sensing_rng)
            if belief_sink is not None:
                for snapshot in controller.belief_records(step, top_k):
                    belief_sink(snapshot)
            if value_sink is not None and controller.last_report is not None:
                value_sink(step, controller.last_report)
        except ConfigurationError:
            raise
        except SimulationError:
            raise
        except Exception as e:
            raise SimulationError(f"{type(e).__name__}: {e}", step=step) from e
        record.rows.append(row)

    logger.debug(
        f"Run {scenario.name}/{controller.name} seed {seed}: "
        f"{sum(record.per_step_obs)} observations over {record.tau} steps"
    )
    return record


def _step(state: WorldState, controller: Controller, world: World, sensing_rng) -> StepRow:
    step = state.step
    action = controller.choose(step)
    state.camera_state = world.area.apply_action(state.camera_state, action)
    state.targets = advance_targets(state.targets, world.table, state.rng)
    locations = [t.location for t in state.targets]
    observations = world.sensor.sample_joint(locations, state.camera_state, sensing_rng)
    controller.observe(step, observations, state.camera_state, state.targets)

    m_obs = count_observed(state.targets, state.camera_state, world.area)
    rows = tuple(TargetRow(l, z is not None, z) for l, z in zip(locations, observations))
    state.step += 1
    return StepRow(step, state.camera_state, rows, m_obs)
