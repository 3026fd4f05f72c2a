"""
Sensing Model - per-target observation likelihood P(z | t_l, C)

Inside the joint fov the observation is the target's exact cell. Outside it
the only possible observation is the null symbol (None), with likelihood
1/|complement of fov(C)|. That value does not make the likelihood sum to one
over z; posteriors are unaffected because it is constant over out-of-fov
locations. normalize_null=True replaces it with 1 so the channel is proper.
"""

from typing import Optional, Sequence

import numpy as np

from utils.errors import ConfigurationError
from world.gridworld import JointCameraState, SurveillanceArea

Observation = Optional[int]
NULL = None
NULL_TOKEN = "phi"


def format_observation(z: Observation) -> str:
    return NULL_TOKEN if z is None else str(int(z))


def parse_observation(text: str) -> Observation:
    text = str(text).strip()
    if text == NULL_TOKEN:
        return None
    try:
        return int(text)
    except ValueError:
        raise ConfigurationError(f"invalid observation token {text!r}") from None


class SensorModel:
    def __init__(self, area: SurveillanceArea, normalize_null: bool = False):
        self.area = area
        self.normalize_null = normalize_null

    def null_likelihood(self, C: JointCameraState) -> float:
        """Likelihood of the null observation for a location outside fov(C)"""
        complement = self.area.complement_size(C)
        if complement == 0:
            return 0.0
        return 1.0 if self.normalize_null else 1.0 / complement

    def likelihood(self, z: Observation, t_l: int, C: JointCameraState) -> float:
        fov = self.area.fov(C)
        if z is None:
            return 0.0 if t_l in fov else self.null_likelihood(C)
        return 1.0 if (z == t_l and t_l in fov) else 0.0

    def likelihood_vector(self, z: Observation, C: JointCameraState) -> np.ndarray:
        """P(z | l, C) for every location position l"""
        grid = self.area.grid
        mask = self.area.fov_mask(C)
        if z is None:
            return np.where(mask, 0.0, self.null_likelihood(C))
        if not grid.is_free(z):
            raise ConfigurationError(f"observation names cell {z}, which is not free")
        out = np.zeros(grid.n_locations)
        loc = grid.location_of(z)
        if mask[loc]:
            out[loc] = 1.0
        return out

    def observation_matrix(self, C: JointCameraState):
        """In-fov observations and their likelihood rows.

        Returns (cells, M) with cells sorted and M[i, l] = P(z=cells[i] | l, C).
        """
        grid = self.area.grid
        cells = sorted(self.area.fov(C))
        matrix = np.zeros((len(cells), grid.n_locations))
        for i, cell in enumerate(cells):
            matrix[i, grid.location_of(cell)] = 1.0
        return cells, matrix

    def sample_observation(self, t_l: int, C: JointCameraState, rng=None) -> Observation:
        # rng kept for interface uniformity; the channel is deterministic
        return t_l if t_l in self.area.fov(C) else None

    def sample_joint(self, locations: Sequence[int], C: JointCameraState, rng=None):
        return tuple(self.sample_observation(l, C, rng) for l in locations)
