"""Controller interface shared by the POMDP planner and the baselines"""
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from utils.errors import ConfigurationError
from world.gridworld import JointAction, JointCameraState, SurveillanceArea
from world.motion import TargetState, TransitionTable
from world.sensing import Observation, SensorModel


@dataclass(frozen=True)
class ControllerParams:
    # mp / msp
    staleness_cap: Optional[int] = None  # None keeps estimates forever
    # msp static camera
    sigma0: float = 0.5  # cells
    growth: float = 0.1  # variance growth per cell of distance
    static_cell: Optional[int] = None  # None picks the free cell nearest the map centre
    static_coverage: Optional[Tuple[int, ...]] = None  # None derives line-of-sight coverage
    # sys
    phases: Optional[Tuple[int, ...]] = None

    def __post_init__(self):
        if self.staleness_cap is not None and self.staleness_cap < 0:
            raise ConfigurationError("controller_params.staleness_cap must be >= 0")
        if self.sigma0 < 0:
            raise ConfigurationError("controller_params.sigma0 must be >= 0")
        if self.growth < 0:
            raise ConfigurationError("controller_params.growth must be >= 0")
        if self.phases is not None:
            object.__setattr__(self, "phases", tuple(int(p) for p in self.phases))
        if self.static_coverage is not None:
            object.__setattr__(self, "static_coverage", tuple(sorted(int(c) for c in self.static_coverage)))

    def to_dict(self) -> dict:
        return {
            "staleness_cap": self.staleness_cap,
            "sigma0": self.sigma0,
            "growth": self.growth,
            "static_cell": self.static_cell,
            "static_coverage": list(self.static_coverage) if self.static_coverage is not None else None,
            "phases": list(self.phases) if self.phases is not None else None,
        }


class Controller(ABC):
    """Chooses a joint PTZ action each step from whatever it has observed"""

    name = "controller"

    def __init__(self, area: SurveillanceArea, table: TransitionTable, sensor: SensorModel,
                 params: Optional[ControllerParams] = None):
        self.area = area
        self.table = table
        self.sensor = sensor
        self.params = params or ControllerParams()
        self.camera_state: JointCameraState = area.initial_state()
        self.n_targets = 0
        self.rng: Optional[np.random.Generator] = None

    def initial_state(self) -> JointCameraState:
        return self.area.initial_state()

    def reset(self, n_targets: int, rng: Optional[np.random.Generator] = None) -> JointCameraState:
        """Start a run with n_targets; returns the initial joint camera state"""
        self.n_targets = n_targets
        self.rng = rng
        self.camera_state = self.initial_state()
        return self.camera_state

    @abstractmethod
    def choose(self, step: int) -> JointAction:
        """Joint action for this step"""

    def observe(self, step: int, observations: Sequence[Observation], camera_state: JointCameraState,
                truth: Sequence[TargetState]):
        """Receive this step's active-camera observations after the cameras moved.

        truth is only consulted by controllers modelling extra sensors (static cameras).
        """
        self.camera_state = tuple(camera_state)

    def belief_records(self, step: int, top_k: Optional[int] = None) -> List[dict]:
        return []

    @property
    def last_report(self):
        return None


def first_best(values: np.ndarray, tolerance: float) -> int:
    """Index of the first entry within tolerance of the maximum"""
    if values.size == 0:
        raise ConfigurationError("no joint actions to choose from")
    best = values.max()
    return int(np.flatnonzero(values >= best - tolerance)[0])
