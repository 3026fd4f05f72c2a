"""
Target Motion Model - direction, velocity and location transitions

P(t'|t) = P(t'_l | t_l, t'_d, t'_v) * P(t'_d | t_d) * P(t'_v | t_v)

Direction and velocity follow Gaussian kernels centred on the current value,
evaluated at the discrete bins and normalized. The location step displaces a
unit cell footprint by (v cos θ, -v sin θ) and splits mass over the overlapped
cells by area; mass landing on a blocked or out-of-bounds cell stays put.
Direction 90° points towards row 0.
"""

import logging
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, List, NamedTuple, Sequence, Tuple

import numpy as np
from scipy.sparse import csr_matrix

from config import config
from utils.errors import ConfigurationError
from utils.hashing import content_hash
from world.gridworld import GridMap

logger = logging.getLogger(__name__)

DIRECTION_ANGLES = (0.0, 45.0, 90.0, 135.0, 180.0, -135.0, -90.0, -45.0)
N_DIRECTIONS = len(DIRECTION_ANGLES)
TABLE_FORMAT_VERSION = 1


class TargetState(NamedTuple):
    location: int  # free cell index
    direction: int  # index into DIRECTION_ANGLES
    velocity: int  # index into MotionParams.velocities


@dataclass(frozen=True)
class MotionParams:
    velocities: Tuple[float, ...] = config.DEFAULT_VELOCITIES
    sigma_d: float = config.DEFAULT_SIGMA_D
    sigma_v: float = config.DEFAULT_SIGMA_V

    def __post_init__(self):
        velocities = tuple(float(v) for v in self.velocities)
        if not velocities:
            raise ConfigurationError("motion.velocities must not be empty")
        if any(v <= 0 for v in velocities):
            raise ConfigurationError(f"motion.velocities must all be > 0, got {velocities}")
        if not self.sigma_d > 0:
            raise ConfigurationError(f"motion.sigma_d must be > 0, got {self.sigma_d}")
        if not self.sigma_v > 0:
            raise ConfigurationError(f"motion.sigma_v must be > 0, got {self.sigma_v}")
        object.__setattr__(self, "velocities", velocities)
        object.__setattr__(self, "sigma_d", float(self.sigma_d))
        object.__setattr__(self, "sigma_v", float(self.sigma_v))

    @property
    def directions(self) -> Tuple[float, ...]:
        return DIRECTION_ANGLES

    def velocity_index(self, speed: float) -> int:
        """Index of the velocity bin closest to speed (smallest index on ties)"""
        return int(np.argmin([abs(v - speed) for v in self.velocities]))

    def to_dict(self) -> dict:
        return {
            "velocities": list(self.velocities),
            "sigma_d": self.sigma_d,
            "sigma_v": self.sigma_v,
        }


@dataclass(frozen=True)
class StateSpace:
    """Indexing of the per-target state set: location-major, then direction, then velocity"""

    grid: GridMap
    n_velocities: int

    @property
    def n_directions(self) -> int:
        return N_DIRECTIONS

    @property
    def n_locations(self) -> int:
        return self.grid.n_locations

    @property
    def size(self) -> int:
        return self.grid.n_locations * N_DIRECTIONS * self.n_velocities

    @property
    def shape(self) -> Tuple[int, int, int]:
        return self.grid.n_locations, N_DIRECTIONS, self.n_velocities

    def validate(self, t: TargetState):
        if not self.grid.is_free(t.location):
            raise ConfigurationError(f"target location {t.location} is not a free cell")
        if not 0 <= t.direction < N_DIRECTIONS:
            raise ConfigurationError(f"direction index {t.direction} outside 0..{N_DIRECTIONS - 1}")
        if not 0 <= t.velocity < self.n_velocities:
            raise ConfigurationError(f"velocity index {t.velocity} outside 0..{self.n_velocities - 1}")

    def index(self, t: TargetState) -> int:
        loc = self.grid.location_of(t.location)
        return (loc * N_DIRECTIONS + t.direction) * self.n_velocities + t.velocity

    def state(self, index: int) -> TargetState:
        rest, velocity = divmod(int(index), self.n_velocities)
        loc, direction = divmod(rest, N_DIRECTIONS)
        return TargetState(self.grid.free_cells[loc], direction, velocity)

    @cached_property
    def location_of_state(self) -> np.ndarray:
        """Location position of every state index"""
        return np.repeat(np.arange(self.n_locations), N_DIRECTIONS * self.n_velocities)


def direction_transition(d: int, params: MotionParams) -> np.ndarray:
    """P(d' | d): wrapped Gaussian over the 8 directions centred on d"""
    steps = np.abs(np.arange(N_DIRECTIONS) - d)
    steps = np.minimum(steps, N_DIRECTIONS - steps)
    delta = steps * (360.0 / N_DIRECTIONS)
    weights = np.exp(-(delta ** 2) / (2.0 * params.sigma_d ** 2))
    return weights / weights.sum()


def velocity_transition(v: int, params: MotionParams) -> np.ndarray:
    """P(v' | v): Gaussian over the velocity set centred on velocities[v]"""
    values = np.asarray(params.velocities)
    delta = values - values[v]
    weights = np.exp(-(delta ** 2) / (2.0 * params.sigma_v ** 2))
    return weights / weights.sum()


def _location_entries(cell: int, direction: int, velocity: int, grid: GridMap,
                      params: MotionParams) -> Dict[int, float]:
    """Sparse location distribution {location position: probability}"""
    x, y = grid.coords(cell)
    theta = math.radians(DIRECTION_ANGLES[direction])
    speed = params.velocities[velocity]
    # rounding removes cos/sin noise such as cos(90°) = 6e-17
    fx = x + round(speed * math.cos(theta), 9)
    fy = y + round(-speed * math.sin(theta), 9)
    x0, y0 = math.floor(fx), math.floor(fy)
    ax, ay = fx - x0, fy - y0

    entries: Dict[int, float] = {}
    stay = grid.location_of(cell)
    for cx, cy, area in (
        (x0, y0, (1.0 - ax) * (1.0 - ay)),
        (x0 + 1, y0, ax * (1.0 - ay)),
        (x0, y0 + 1, (1.0 - ax) * ay),
        (x0 + 1, y0 + 1, ax * ay),
    ):
        if area <= 0.0:
            continue
        target = stay
        if grid.in_bounds(cx, cy):
            idx = grid.cell_index(cx, cy)
            if grid.is_free(idx):
                target = grid.location_of(idx)
        entries[target] = entries.get(target, 0.0) + area
    return entries


def location_transition(l: int, d: int, v: int, grid: GridMap, params: MotionParams) -> np.ndarray:
    """P(l' | l, d', v') as a vector over location positions"""
    if not grid.is_free(l):
        raise ConfigurationError(f"location {l} is not a free cell")
    out = np.zeros(grid.n_locations)
    for loc, p in _location_entries(l, d, v, grid, params).items():
        out[loc] += p
    return out


class TransitionTable:
    """Sparse row-stochastic matrix over the target state space (rows = current state)"""

    def __init__(self, space: StateSpace, params: MotionParams, matrix: csr_matrix):
        matrix = csr_matrix(matrix, dtype=float)
        matrix.sum_duplicates()
        matrix.eliminate_zeros()
        matrix.sort_indices()
        if matrix.shape != (space.size, space.size):
            raise ConfigurationError(
                f"transition matrix shape {matrix.shape} does not match state space {space.size}"
            )
        self.space = space
        self.params = params
        self.matrix = matrix
        self._predictor = matrix.T.tocsr()

    @property
    def size(self) -> int:
        return self.space.size

    @cached_property
    def content_hash(self) -> str:
        return transition_table_key(self.space.grid, self.params)

    @cached_property
    def _row_cdf(self) -> np.ndarray:
        data = self.matrix.data
        indptr = self.matrix.indptr
        cs = np.cumsum(data)
        offsets = np.concatenate(([0.0], cs))[indptr[:-1]]
        return cs - np.repeat(offsets, np.diff(indptr))

    @cached_property
    def _most_likely(self) -> np.ndarray:
        indptr, indices, data = self.matrix.indptr, self.matrix.indices, self.matrix.data
        best = np.empty(self.size, dtype=np.int64)
        for i in range(self.size):
            start, end = indptr[i], indptr[i + 1]
            best[i] = indices[start + int(np.argmax(data[start:end]))]
        return best

    def row(self, t: TargetState) -> List[Tuple[TargetState, float]]:
        i = self.space.index(t)
        start, end = self.matrix.indptr[i], self.matrix.indptr[i + 1]
        return [
            (self.space.state(j), float(p))
            for j, p in zip(self.matrix.indices[start:end], self.matrix.data[start:end])
        ]

    def row_sums(self) -> np.ndarray:
        return np.asarray(self.matrix.sum(axis=1)).ravel()

    def predict(self, probs: np.ndarray) -> np.ndarray:
        """Σ_t P(t'|t) b(t); accepts one vector or a (size, m) stack"""
        return self._predictor @ probs

    def most_likely(self, t: TargetState) -> TargetState:
        return self.space.state(self._most_likely[self.space.index(t)])

    def sample(self, states: Sequence[TargetState], rng: np.random.Generator) -> List[TargetState]:
        """Draw each next state independently from its row"""
        indptr, indices = self.matrix.indptr, self.matrix.indices
        cdf = self._row_cdf
        draws = rng.random(len(states))
        out = []
        for t, u in zip(states, draws):
            i = self.space.index(t)
            start, end = indptr[i], indptr[i + 1]
            row_cdf = cdf[start:end]
            j = start + int(np.searchsorted(row_cdf, u * row_cdf[-1], side="right"))
            out.append(self.space.state(indices[min(j, end - 1)]))
        return out


def transition_table_key(grid: GridMap, params: MotionParams) -> str:
    return content_hash({
        "format": TABLE_FORMAT_VERSION,
        "width": grid.width,
        "height": grid.height,
        "blocked": sorted(grid.blocked),
        "motion": params.to_dict(),
    })


def build_transition_table(grid: GridMap, params: MotionParams) -> TransitionTable:
    space = StateSpace(grid, len(params.velocities))
    n_dir, n_vel = N_DIRECTIONS, len(params.velocities)
    dir_kernel = np.array([direction_transition(d, params) for d in range(n_dir)])
    vel_kernel = np.array([velocity_transition(v, params) for v in range(n_vel)])

    src, d_next, v_next, dest, prob = [], [], [], [], []
    for loc, cell in enumerate(grid.free_cells):
        for d2 in range(n_dir):
            for v2 in range(n_vel):
                for target, p in sorted(_location_entries(cell, d2, v2, grid, params).items()):
                    src.append(loc)
                    d_next.append(d2)
                    v_next.append(v2)
                    dest.append(target)
                    prob.append(p)

    src = np.asarray(src, dtype=np.int64)
    d_next = np.asarray(d_next, dtype=np.int64)
    v_next = np.asarray(v_next, dtype=np.int64)
    dest = np.asarray(dest, dtype=np.int64)
    prob = np.asarray(prob)
    cols = (dest * n_dir + d_next) * n_vel + v_next

    rows, columns, data = [], [], []
    for d in range(n_dir):
        for v in range(n_vel):
            rows.append((src * n_dir + d) * n_vel + v)
            columns.append(cols)
            data.append(prob * dir_kernel[d, d_next] * vel_kernel[v, v_next])

    matrix = csr_matrix(
        (np.concatenate(data), (np.concatenate(rows), np.concatenate(columns))),
        shape=(space.size, space.size),
    )
    table = TransitionTable(space, params, matrix)
    logger.info(f"✅ Transition table built: {space.size} states, {table.matrix.nnz} entries")
    return table
