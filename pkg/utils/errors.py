"""Error types shared across the engine"""


class PTZWatchError(Exception):
    """Base class for every engine error"""


class ConfigurationError(PTZWatchError, ValueError):
    """Invalid scenario, camera state, command or setting"""


class ScenarioParseError(ConfigurationError):
    """Scenario file could not be parsed"""

    def __init__(self, message, path=None, line=None, column=None):
        self.path = path
        self.line = line
        self.column = column
        where = ""
        if path is not None:
            where = f"{path}"
            if line is not None:
                where += f":{line}:{column or 0}"
            where += ": "
        super().__init__(f"{where}{message}")


class BeliefConflictError(PTZWatchError):
    """Observation has zero probability under the predicted belief"""

    def __init__(self, observation, camera_state, target_id=None):
        self.observation = observation
        self.camera_state = tuple(camera_state)
        self.target_id = target_id
        label = "phi" if observation is None else str(observation)
        who = f"target {target_id}: " if target_id is not None else ""
        super().__init__(
            f"{who}observation {label} impossible under belief at camera state {self.camera_state}"
        )


class EnumerationLimitError(PTZWatchError):
    """Brute-force enumeration would exceed its size guard"""

    def __init__(self, size, limit):
        self.size = size
        self.limit = limit
        super().__init__(f"joint observation space of size {size} exceeds limit {limit}")


class UndefinedMetricError(PTZWatchError, ValueError):
    """Metric requested on an empty run or empty input"""


class SimulationError(PTZWatchError):
    """Unexpected failure inside a run, with step context"""

    def __init__(self, message, step=None):
        self.step = step
        prefix = f"step {step}: " if step is not None else ""
        super().__init__(f"{prefix}{message}")
