"""Controller registry: name -> class, plus a factory wired from a scenario"""
from typing import Optional

from controllers.base import Controller, ControllerParams
from controllers.baselines import (MDPController, StaticController, StaticSupportedMDPController,
                                   SystematicController)
from controllers.planner import POMDPController
from utils.errors import ConfigurationError

CONTROLLERS = {
    POMDPController.name: POMDPController,
    MDPController.name: MDPController,
    StaticSupportedMDPController.name: StaticSupportedMDPController,
    SystematicController.name: SystematicController,
    StaticController.name: StaticController,
}
CONTROLLER_NAMES = tuple(CONTROLLERS)


def check_controller_name(name: str) -> str:
    if name not in CONTROLLERS:
        raise ConfigurationError(
            f"unknown controller {name!r}; valid names: {', '.join(CONTROLLER_NAMES)}"
        )
    return name


def build_controller(name: str, area, table, sensor, params: Optional[ControllerParams] = None,
                     nominal_velocity: Optional[float] = None) -> Controller:
    cls = CONTROLLERS[check_controller_name(name)]
    if issubclass(cls, MDPController) and nominal_velocity is not None:
        return cls(area, table, sensor, params, nominal_velocity=nominal_velocity)
    return cls(area, table, sensor, params)


__all__ = ["CONTROLLER_NAMES", "Controller", "ControllerParams", "build_controller", "check_controller_name"]
