"""
Configuration Module - Engine Settings
Environment variables, model defaults and directory layout
"""

import os
from pathlib import Path


def _env_flag(name, default="false"):
    return os.getenv(name, default).strip().lower() in ("1", "true", "yes", "on")


def _optional_path(name, default):
    """Path from the environment; an empty value disables it"""
    value = os.getenv(name, str(default))
    return Path(value) if value else None


class Config:
    # Application Information
    APP_NAME = "ptzwatch"
    APP_VERSION = "1.0.0"

    # Directory Configuration
    BASE_DIR = Path(__file__).parent
    SCENARIO_DIR = BASE_DIR / "scenarios"
    OUTPUT_DIR = Path(os.getenv("PTZ_OUTPUT_DIR", str(BASE_DIR / "output")))
    CACHE_DIR = _optional_path("PTZ_CACHE_DIR", BASE_DIR / ".cache")

    # Runtime Settings
    LOG_LEVEL = os.getenv("PTZ_LOG_LEVEL", "INFO").upper()
    JOBS = int(os.getenv("PTZ_JOBS", "1"))
    REPRODUCIBLE = _env_flag("PTZ_REPRODUCIBLE")

    # Motion Model Defaults (chosen, not learned from trajectory data)
    DEFAULT_SIGMA_D = 45.0  # degrees
    DEFAULT_SIGMA_V = 0.25  # cells per step
    DEFAULT_VELOCITIES = (1.0, 1.5, 2.0)
    NOMINAL_VELOCITY = 1.5

    # Simulation Settings
    DEFAULT_TAU = 100
    DEFAULT_TARGETS = 5

    # Planner Settings
    BRUTEFORCE_LIMIT = 10 ** 6
    TIE_TOLERANCE = 1e-12

    # Output Settings
    BELIEF_TOP_K = 10

    # Benchmark Settings
    BENCH_M_VALUES = (5, 10, 20, 40)
    BENCH_REPEATS = 11

    # Validation
    if JOBS < 1:
        raise ValueError("❌ PTZ_JOBS must be at least 1")

    if LOG_LEVEL not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
        raise ValueError(f"❌ PTZ_LOG_LEVEL not recognized: {LOG_LEVEL}")

    def describe(self):
        """Short multi-line summary for startup logging"""
        return (
            f"{self.APP_NAME} v{self.APP_VERSION}\n"
            f"   - Output: {self.OUTPUT_DIR}\n"
            f"   - Cache: {self.CACHE_DIR or 'disabled'}\n"
            f"   - Jobs: {self.JOBS}\n"
            f"   - Reproducible: {'Enabled' if self.REPRODUCIBLE else 'Disabled'}"
        )


# Create global config instance
config = Config()
