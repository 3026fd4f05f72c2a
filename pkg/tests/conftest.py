"""Shared fixtures: small worlds, deterministic motion and random fixture families"""
import numpy as np
import pytest
from scipy.sparse import identity

from storage import table_cache
from world.gridworld import CameraModel, GridMap, SurveillanceArea
from world.motion import MotionParams, StateSpace, TransitionTable, build_transition_table
from world.sensing import SensorModel

# sigma this small puts all kernel mass on the current direction/velocity
DETERMINISTIC = dict(sigma_d=1e-3, sigma_v=1e-3)


@pytest.fixture(autouse=True)
def memory_only_table_cache(monkeypatch):
    monkeypatch.setattr(table_cache, "root", None)
    table_cache.clear_memory()
    yield
    table_cache.clear_memory()


@pytest.fixture
def make_area():
    def _make(width, height, camera_fovs, blocked=()):
        grid = GridMap(width, height, frozenset(blocked))
        cameras = [CameraModel(i, tuple(frozenset(f) for f in fovs)) for i, fovs in enumerate(camera_fovs)]
        return SurveillanceArea(grid, cameras)
    return _make


@pytest.fixture
def deterministic_params():
    return MotionParams(velocities=(1.0,), **DETERMINISTIC)


@pytest.fixture
def identity_table():
    def _make(grid, n_velocities=1):
        space = StateSpace(grid, n_velocities)
        return TransitionTable(space, MotionParams(velocities=tuple(1.0 + 0.5 * i for i in range(n_velocities))),
                               identity(space.size, format="csr"))
    return _make


def _random_subset(rng, cells, p):
    return frozenset(c for c in cells if rng.random() < p)


@pytest.fixture
def random_world():
    """Random small map, cameras and motion: (area, table, sensor)"""
    def _make(rng, max_cells=16, velocities=None):
        while True:
            width = int(rng.integers(2, 5))
            height = int(rng.integers(1, max_cells // width + 1))
            if width * height <= max_cells:
                break
        n_cells = width * height
        n_blocked = int(rng.integers(0, min(3, n_cells - 2) + 1))
        blocked = frozenset(int(c) for c in rng.choice(n_cells, size=n_blocked, replace=False))
        grid = GridMap(width, height, blocked)

        cameras = []
        for cam_id in range(int(rng.integers(1, 3))):
            fovs = tuple(_random_subset(rng, grid.free_cells, 0.35) for _ in range(int(rng.integers(1, 4))))
            cameras.append(CameraModel(cam_id, fovs))
        area = SurveillanceArea(grid, cameras)

        if velocities is None:
            velocities = (1.0,) if rng.random() < 0.5 else (1.0, 1.5)
        params = MotionParams(velocities=velocities, sigma_d=float(rng.uniform(20.0, 90.0)), sigma_v=0.3)
        table = build_transition_table(grid, params)
        return area, table, SensorModel(area)
    return _make


@pytest.fixture
def random_belief():
    def _make(rng, size):
        return rng.dirichlet(np.full(size, 0.7))
    return _make
