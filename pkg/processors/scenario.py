"""
Scenario Loader - JSON scenario files
Map, cameras, motion parameters, controller choice, targets, horizon and seed
"""

import dataclasses
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Tuple, Union

from config import config
from controllers import CONTROLLER_NAMES, ControllerParams, check_controller_name
from utils.errors import ConfigurationError, ScenarioParseError
from utils.hashing import content_hash
from world.gridworld import CameraModel, GridMap, SurveillanceArea
from world.motion import N_DIRECTIONS, MotionParams, StateSpace, TargetState

logger = logging.getLogger(__name__)

SCENARIO_SUFFIX = ".scn"
_CONTROLLER_PARAM_FIELDS = {f.name for f in dataclasses.fields(ControllerParams)}


@dataclass(frozen=True)
class Scenario:
    name: str
    grid: GridMap
    cameras: Tuple[CameraModel, ...]
    motion: MotionParams = field(default_factory=MotionParams)
    controller: str = "pomdp"
    controller_params: ControllerParams = field(default_factory=ControllerParams)
    targets: Union[int, Tuple[TargetState, ...]] = config.DEFAULT_TARGETS
    tau: int = config.DEFAULT_TAU
    seed: int = 0
    nominal_velocity: float = config.NOMINAL_VELOCITY
    note: str = ""

    def __post_init__(self):
        object.__setattr__(self, "cameras", tuple(self.cameras))
        check_controller_name(self.controller)
        if not self.cameras:
            raise ConfigurationError("cameras: at least one camera is required")
        ids = [cam.id for cam in self.cameras]
        if len(set(ids)) != len(ids):
            raise ConfigurationError(f"cameras: duplicate camera ids {ids}")
        for cam in self.cameras:
            cam.validate(self.grid)

        if isinstance(self.targets, int):
            if self.targets < 0:
                raise ConfigurationError(f"targets must be >= 0, got {self.targets}")
            if self.targets > self.grid.n_locations:
                raise ConfigurationError(
                    f"targets: {self.targets} targets cannot spawn on {self.grid.n_locations} free cells"
                )
        else:
            states = tuple(TargetState(*(int(v) for v in t)) for t in self.targets)
            space = StateSpace(self.grid, len(self.motion.velocities))
            for k, t in enumerate(states):
                try:
                    space.validate(t)
                except ConfigurationError as e:
                    raise ConfigurationError(f"targets[{k}]: {e}") from None
            object.__setattr__(self, "targets", states)

        if self.tau < 0:
            raise ConfigurationError(f"tau must be >= 0, got {self.tau}")
        if self.seed < 0:
            raise ConfigurationError(f"seed must be >= 0, got {self.seed}")
        if not self.nominal_velocity > 0:
            raise ConfigurationError(f"nominal_velocity must be > 0, got {self.nominal_velocity}")

    @property
    def scripted(self) -> bool:
        return not isinstance(self.targets, int)

    @property
    def n_targets(self) -> int:
        return len(self.targets) if self.scripted else self.targets

    @property
    def nominal_velocity_index(self) -> int:
        return self.motion.velocity_index(self.nominal_velocity)

    def area(self) -> SurveillanceArea:
        return SurveillanceArea(self.grid, self.cameras)

    def content_hash(self) -> str:
        return content_hash(scenario_to_dict(self))

    def replace(self, **changes) -> "Scenario":
        """Copy with fields overridden (command-line flags win over the file)"""
        changes = {k: v for k, v in changes.items() if v is not None}
        return dataclasses.replace(self, **changes)


# ==================== PARSING ====================

def _require(data: dict, key: str, where: str):
    if key not in data:
        raise ConfigurationError(f"{where}: missing field {key!r}")
    return data[key]


def _as_int(value, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigurationError(f"{where}: expected an integer, got {value!r}")
    return value


def _parse_map(data) -> GridMap:
    if not isinstance(data, dict):
        raise ConfigurationError("map: expected an object")
    if "ascii" in data:
        return GridMap.from_ascii(data["ascii"])
    width = _as_int(_require(data, "width", "map"), "map.width")
    height = _as_int(_require(data, "height", "map"), "map.height")
    blocked = [_as_int(c, f"map.blocked[{i}]") for i, c in enumerate(data.get("blocked", []))]
    return GridMap(width, height, frozenset(blocked))


def _parse_cameras(data) -> Tuple[CameraModel, ...]:
    if not isinstance(data, list):
        raise ConfigurationError("cameras: expected a list")
    cameras = []
    for i, cam in enumerate(data):
        where = f"cameras[{i}]"
        states = _require(cam, "states", where)
        fovs = []
        for s, state in enumerate(states):
            cells = _require(state, "fov", f"{where}.states[{s}]")
            fovs.append(frozenset(_as_int(c, f"{where}.states[{s}].fov") for c in cells))
        cameras.append(CameraModel(id=_as_int(cam.get("id", i), f"{where}.id"), fovs=tuple(fovs)))
    return tuple(cameras)


def _parse_motion(data) -> MotionParams:
    data = data or {}
    unknown = set(data) - {"velocities", "sigma_d", "sigma_v"}
    if unknown:
        raise ConfigurationError(f"motion: unknown fields {sorted(unknown)}")
    return MotionParams(
        velocities=tuple(data.get("velocities", config.DEFAULT_VELOCITIES)),
        sigma_d=data.get("sigma_d", config.DEFAULT_SIGMA_D),
        sigma_v=data.get("sigma_v", config.DEFAULT_SIGMA_V),
    )


def _parse_controller_params(data) -> ControllerParams:
    data = data or {}
    unknown = set(data) - _CONTROLLER_PARAM_FIELDS
    if unknown:
        raise ConfigurationError(f"controller_params: unknown fields {sorted(unknown)}")
    return ControllerParams(**data)


def _parse_targets(data):
    if isinstance(data, int) and not isinstance(data, bool):
        return data
    if not isinstance(data, list):
        raise ConfigurationError("targets: expected a count or a list of states")
    states = []
    for k, t in enumerate(data):
        where = f"targets[{k}]"
        direction = _as_int(t.get("direction", 0), f"{where}.direction")
        if not 0 <= direction < N_DIRECTIONS:
            raise ConfigurationError(f"{where}.direction: {direction} outside 0..{N_DIRECTIONS - 1}")
        states.append(TargetState(
            _as_int(_require(t, "cell", where), f"{where}.cell"),
            direction,
            _as_int(t.get("velocity", 0), f"{where}.velocity"),
        ))
    return tuple(states)


def parse_scenario(data: dict, default_name: str = "scenario") -> Scenario:
    """Build a validated Scenario from its JSON object form"""
    if not isinstance(data, dict):
        raise ConfigurationError("scenario: expected a JSON object")
    return Scenario(
        name=str(data.get("name", default_name)),
        note=str(data.get("note", "")),
        grid=_parse_map(_require(data, "map", "scenario")),
        cameras=_parse_cameras(_require(data, "cameras", "scenario")),
        motion=_parse_motion(data.get("motion")),
        nominal_velocity=float(data.get("nominal_velocity", config.NOMINAL_VELOCITY)),
        controller=str(data.get("controller", "pomdp")),
        controller_params=_parse_controller_params(data.get("controller_params")),
        targets=_parse_targets(data.get("targets", config.DEFAULT_TARGETS)),
        tau=_as_int(data.get("tau", config.DEFAULT_TAU), "tau"),
        seed=_as_int(data.get("seed", 0), "seed"),
    )


def load_scenario(path: Union[str, Path]) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigurationError(f"cannot read scenario {path}: {e.strerror or e}") from None

    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ScenarioParseError(e.msg, path=path, line=e.lineno, column=e.colno) from None

    try:
        scenario = parse_scenario(data, default_name=path.stem)
    except ScenarioParseError:
        raise
    except (ConfigurationError, TypeError, AttributeError) as e:
        raise ConfigurationError(f"{path}: {e}") from None

    logger.info(
        f"✅ Scenario {scenario.name} loaded: {scenario.grid.n_locations} locations, "
        f"{len(scenario.cameras)} cameras"
    )
    return scenario


def resolve_scenario_path(name: Union[str, Path]) -> Path:
    """Path as given, else a bundled scenario by file name or stem"""
    path = Path(name)
    if path.exists():
        return path
    for candidate in (config.SCENARIO_DIR / path.name, config.SCENARIO_DIR / f"{path.name}{SCENARIO_SUFFIX}"):
        if candidate.exists():
            return candidate
    raise ConfigurationError(f"scenario {name} not found (bundled: {', '.join(bundled_scenarios())})")


def bundled_scenarios():
    return sorted(p.name for p in config.SCENARIO_DIR.glob(f"*{SCENARIO_SUFFIX}"))


# ==================== SERIALIZATION ====================

def scenario_to_dict(scenario: Scenario) -> dict:
    data = {
        "name": scenario.name,
        "map": {
            "width": scenario.grid.width,
            "height": scenario.grid.height,
            "blocked": sorted(scenario.grid.blocked),
        },
        "cameras": [
            {"id": cam.id, "states": [{"fov": sorted(f)} for f in cam.fovs]}
            for cam in scenario.cameras
        ],
        "motion": scenario.motion.to_dict(),
        "nominal_velocity": scenario.nominal_velocity,
        "controller": scenario.controller,
        "controller_params": {k: v for k, v in scenario.controller_params.to_dict().items() if v is not None},
        "targets": (
            [{"cell": t.location, "direction": t.direction, "velocity": t.velocity} for t in scenario.targets]
            if scenario.scripted else scenario.targets
        ),
        "tau": scenario.tau,
        "seed": scenario.seed,
    }
    if scenario.note:
        data["note"] = scenario.note
    return data


def save_scenario(scenario: Scenario, path: Union[str, Path]):
    Path(path).write_text(json.dumps(scenario_to_dict(scenario), indent=2) + "\n", encoding="utf-8")


__all__ = [
    "CONTROLLER_NAMES",
    "Scenario",
    "bundled_scenarios",
    "load_scenario",
    "parse_scenario",
    "resolve_scenario_path",
    "save_scenario",
    "scenario_to_dict",
]
