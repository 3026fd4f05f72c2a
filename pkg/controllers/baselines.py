"""
Baseline Controllers - MP, MSP, Sys and Stat

MP keeps a point estimate per target from active-camera observations only and
scores actions by how many predicted estimates fall into the post-action fov.
MSP adds a wide-view static camera whose location reports get noisier with
distance and which cannot see through obstacles. Sys sweeps every camera
round-robin; Stat parks the cameras on the joint state covering most cells.
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Optional, Sequence

import numpy as np

from config import config
from controllers.base import Controller, ControllerParams, first_best
from utils.errors import ConfigurationError
from world.gridworld import JointAction, JointCameraState, SurveillanceArea
from world.motion import N_DIRECTIONS, TargetState, TransitionTable
from world.sensing import SensorModel

logger = logging.getLogger(__name__)


@dataclass
class PointEstimate:
    state: Optional[TargetState] = None
    staleness: int = 0  # steps since the last direct report

    @property
    def known(self) -> bool:
        return self.state is not None


def direction_from_displacement(dx: float, dy: float) -> int:
    """Nearest of the 8 direction indices for a grid displacement (row axis points down)"""
    angle = math.degrees(math.atan2(-dy, dx))
    return int(round(angle / (360.0 / N_DIRECTIONS))) % N_DIRECTIONS


class MDPController(Controller):
    """MP: point estimates from active cameras, most-likely propagation while unseen"""

    name = "mp"

    def __init__(self, area: SurveillanceArea, table: TransitionTable, sensor: SensorModel,
                 params: Optional[ControllerParams] = None,
                 nominal_velocity: float = config.NOMINAL_VELOCITY):
        super().__init__(area, table, sensor, params)
        self.nominal_velocity_index = table.params.velocity_index(nominal_velocity)
        self.estimates: List[PointEstimate] = []
        self._masks = area.action_masks()

    def reset(self, n_targets, rng=None):
        C = super().reset(n_targets, rng)
        self.estimates = [PointEstimate() for _ in range(n_targets)]
        return C

    def predicted_locations(self) -> List[int]:
        """Next-step location of every known estimate under the most likely transition"""
        return [self.table.most_likely(e.state).location for e in self.estimates if e.known]

    def action_scores(self) -> np.ndarray:
        predicted = self.predicted_locations()
        if not predicted:
            return np.zeros(len(self.area.joint_actions))
        locs = np.array([self.area.grid.location_of(c) for c in predicted], dtype=np.int64)
        return self._masks[:, locs].sum(axis=1)

    def choose(self, step: int) -> JointAction:
        scores = self.action_scores()
        return self.area.joint_actions[first_best(scores, 0.5)]

    def observe(self, step, observations, camera_state, truth):
        super().observe(step, observations, camera_state, truth)
        for k, z in enumerate(observations):
            if z is not None:
                self.observe_location(k, z)
            else:
                self.propagate(k)

    def observe_location(self, k: int, cell: int):
        """Direct sighting: location is exact, direction and velocity are inferred"""
        estimate = self.estimates[k]
        direction, velocity = 0, self.nominal_velocity_index
        if estimate.known:
            direction, velocity = estimate.state.direction, estimate.state.velocity
            if estimate.staleness == 0 and estimate.state.location != cell:
                # consecutive sightings: read motion off the displacement
                x0, y0 = self.area.grid.coords(estimate.state.location)
                x1, y1 = self.area.grid.coords(cell)
                direction = direction_from_displacement(x1 - x0, y1 - y0)
                velocity = self.table.params.velocity_index(math.hypot(x1 - x0, y1 - y0))
        self.estimates[k] = PointEstimate(TargetState(cell, direction, velocity), 0)

    def observe_states(self, reports: Dict[int, TargetState]):
        """Full-state reports replace the estimates outright"""
        for k, state in reports.items():
            self.estimates[k] = PointEstimate(state, 0)

    def propagate(self, k: int):
        estimate = self.estimates[k]
        if not estimate.known:
            return
        staleness = estimate.staleness + 1
        cap = self.params.staleness_cap
        if cap is not None and staleness > cap:
            self.estimates[k] = PointEstimate()
            return
        self.estimates[k] = PointEstimate(self.table.most_likely(estimate.state), staleness)


@dataclass(frozen=True)
class StaticSensorModel:
    camera_cell: int
    coverage: FrozenSet[int]
    sigma0: float
    growth: float

    @classmethod
    def build(cls, area: SurveillanceArea, params: ControllerParams) -> "StaticSensorModel":
        grid = area.grid
        camera_cell = params.static_cell if params.static_cell is not None else central_free_cell(area)
        if not grid.is_free(camera_cell):
            raise ConfigurationError(f"controller_params.static_cell {camera_cell} is not a free cell")
        if params.static_coverage is not None:
            coverage = frozenset(params.static_coverage)
            bad = sorted(c for c in coverage if not grid.is_free(c))
            if bad:
                raise ConfigurationError(f"controller_params.static_coverage has non-free cells {bad[:5]}")
        else:
            coverage = frozenset(c for c in grid.free_cells if area.line_of_sight(camera_cell, c))
        return cls(camera_cell, coverage, params.sigma0, params.growth)

    def variance(self, cell: int, grid) -> float:
        x0, y0 = grid.coords(self.camera_cell)
        x1, y1 = grid.coords(cell)
        return self.sigma0 ** 2 * (1.0 + self.growth * math.hypot(x1 - x0, y1 - y0))

    def noisy_cell(self, cell: int, grid, rng: np.random.Generator) -> int:
        std = math.sqrt(self.variance(cell, grid))
        if std == 0.0:
            return cell
        x, y = grid.coords(cell)
        dx, dy = rng.normal(0.0, std, size=2)
        return nearest_free_cell(grid, math.floor(x + dx + 0.5), math.floor(y + dy + 0.5))

    def report(self, truth: Sequence[TargetState], grid, rng: np.random.Generator) -> Dict[int, TargetState]:
        """Noisy location, true direction and velocity, for every covered target"""
        reports = {}
        for k, t in enumerate(truth):
            if t.location in self.coverage:
                reports[k] = TargetState(self.noisy_cell(t.location, grid, rng), t.direction, t.velocity)
        return reports


def nearest_free_cell(grid, x: int, y: int) -> int:
    """Closest free cell by Manhattan distance; smallest cell index on ties"""
    if grid.in_bounds(x, y) and grid.is_free(grid.cell_index(x, y)):
        return grid.cell_index(x, y)
    limit = grid.width + grid.height + abs(x) + abs(y)
    for radius in range(1, limit + 1):
        found = []
        for ox in range(-radius, radius + 1):
            rest = radius - abs(ox)
            for oy in {-rest, rest}:
                cx, cy = x + ox, y + oy
                if grid.in_bounds(cx, cy) and grid.is_free(grid.cell_index(cx, cy)):
                    found.append(grid.cell_index(cx, cy))
        if found:
            return min(found)
    raise ConfigurationError("grid has no free cells")


def central_free_cell(area: SurveillanceArea) -> int:
    grid = area.grid
    return nearest_free_cell(grid, (grid.width - 1) // 2, (grid.height - 1) // 2)


class StaticSupportedMDPController(MDPController):
    """MSP: MP fed by a static camera as well as the active cameras"""

    name = "msp"

    def __init__(self, area, table, sensor, params=None, nominal_velocity=config.NOMINAL_VELOCITY):
        super().__init__(area, table, sensor, params, nominal_velocity)
        self.static = StaticSensorModel.build(area, self.params)
        logger.debug(f"Static camera at cell {self.static.camera_cell}, covering {len(self.static.coverage)} cells")

    def observe(self, step, observations, camera_state, truth):
        Controller.observe(self, step, observations, camera_state, truth)
        rng = self.rng if self.rng is not None else np.random.default_rng(0)
        reports = self.static.report(truth, self.area.grid, rng)
        self.observe_states(reports)
        for k, z in enumerate(observations):
            if z is not None:
                if k in reports:
                    # active cameras are exact; keep the reported motion
                    state = self.estimates[k].state
                    self.estimates[k] = PointEstimate(TargetState(z, state.direction, state.velocity), 0)
                else:
                    self.observe_location(k, z)
            elif k not in reports:
                self.propagate(k)


class SystematicController(Controller):
    """Sys: camera i sits in state (step + phase_i) mod |C_i|"""

    name = "sys"

    def __init__(self, area, table, sensor, params=None):
        super().__init__(area, table, sensor, params)
        phases = self.params.phases or tuple(0 for _ in area.cameras)
        if len(phases) != area.n_cameras:
            raise ConfigurationError(
                f"controller_params.phases has {len(phases)} entries for {area.n_cameras} cameras"
            )
        self.phases = phases

    def state_at(self, step: int) -> JointCameraState:
        return tuple((step + phase) % cam.n_states for cam, phase in zip(self.area.cameras, self.phases))

    def initial_state(self):
        return self.state_at(0)

    def choose(self, step: int) -> JointAction:
        return self.state_at(step)


def max_coverage_state(area: SurveillanceArea) -> JointCameraState:
    """Joint state with the largest fov union; lexicographically first on ties"""
    sizes = np.array([len(area.fov(C)) for C in area.joint_actions], dtype=float)
    return area.joint_actions[first_best(sizes, 0.5)]


class StaticController(Controller):
    """Stat: cameras fixed on the maximum-coverage joint state"""

    name = "stat"

    def __init__(self, area, table, sensor, params=None):
        super().__init__(area, table, sensor, params)
        self.fixed_state = max_coverage_state(area)

    def initial_state(self):
        return self.fixed_state

    def choose(self, step: int) -> JointAction:
        return self.fixed_state
