"""
Grid World - cells, obstacles, camera state spaces and fields of view

Cells are indexed row-major: cell = y * width + x. The ordered list of free
cells is the target location set; belief vectors and fov masks index it by
location position (0..n_locations-1), not by raw cell index.
"""

import itertools
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, Iterator, List, Sequence, Tuple

import numpy as np

from utils.errors import ConfigurationError

JointCameraState = Tuple[int, ...]
JointAction = Tuple[int, ...]


@dataclass(frozen=True)
class GridMap:
    width: int
    height: int
    blocked: FrozenSet[int] = frozenset()
    free_cells: Tuple[int, ...] = field(init=False)
    _location_of: Dict[int, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ConfigurationError(f"grid must be at least 1x1, got {self.width}x{self.height}")

        blocked = frozenset(int(c) for c in self.blocked)
        total = self.width * self.height
        outside = sorted(c for c in blocked if not 0 <= c < total)
        if outside:
            raise ConfigurationError(f"blocked cells outside the grid: {outside[:5]}")

        free = tuple(c for c in range(total) if c not in blocked)
        if not free:
            raise ConfigurationError("grid has no free cells")

        object.__setattr__(self, "blocked", blocked)
        object.__setattr__(self, "free_cells", free)
        object.__setattr__(self, "_location_of", {c: i for i, c in enumerate(free)})

    @classmethod
    def from_ascii(cls, rows: Sequence[str]) -> "GridMap":
        """Build a map from rows of '#' (blocked) and '.' (free)"""
        rows = [r.rstrip("\n") for r in rows if r.strip()]
        if not rows:
            raise ConfigurationError("ascii map is empty")

        width = len(rows[0])
        blocked = set()
        for y, row in enumerate(rows):
            if len(row) != width:
                raise ConfigurationError(f"ascii map row {y} has width {len(row)}, expected {width}")
            for x, ch in enumerate(row):
                if ch == "#":
                    blocked.add(y * width + x)
                elif ch != ".":
                    raise ConfigurationError(f"ascii map row {y} has unknown symbol {ch!r}")

        return cls(width=width, height=len(rows), blocked=frozenset(blocked))

    @property
    def n_cells(self) -> int:
        return self.width * self.height

    @property
    def n_locations(self) -> int:
        return len(self.free_cells)

    def cell_index(self, x: int, y: int) -> int:
        return y * self.width + x

    def coords(self, cell: int) -> Tuple[int, int]:
        return cell % self.width, cell // self.width

    def in_bounds(self, x: int, y: int) -> bool:
        return 0 <= x < self.width and 0 <= y < self.height

    def is_free(self, cell: int) -> bool:
        return cell in self._location_of

    def location_of(self, cell: int) -> int:
        """Position of a free cell in the canonical location ordering"""
        try:
            return self._location_of[cell]
        except KeyError:
            raise ConfigurationError(f"cell {cell} is not a free cell") from None

    def to_ascii(self) -> List[str]:
        return [
            "".join("#" if self.cell_index(x, y) in self.blocked else "." for x in range(self.width))
            for y in range(self.height)
        ]


@dataclass(frozen=True)
class CameraModel:
    id: int
    fovs: Tuple[FrozenSet[int], ...]

    def __post_init__(self):
        fovs = tuple(frozenset(int(c) for c in f) for f in self.fovs)
        if not fovs:
            raise ConfigurationError(f"camera {self.id} has no states")
        object.__setattr__(self, "fovs", fovs)

    @property
    def n_states(self) -> int:
        return len(self.fovs)

    @property
    def states(self) -> range:
        return range(len(self.fovs))

    def fov(self, state: int) -> FrozenSet[int]:
        if not 0 <= state < len(self.fovs):
            raise ConfigurationError(
                f"camera {self.id} has no state {state} (valid: 0..{len(self.fovs) - 1})"
            )
        return self.fovs[state]

    def validate(self, grid: GridMap):
        for state, cells in enumerate(self.fovs):
            for cell in sorted(cells):
                if not grid.is_free(cell):
                    raise ConfigurationError(
                        f"camera {self.id} state {state}: fov cell {cell} is not a free cell"
                    )


def _check_vector(cams: Sequence[CameraModel], vector: Sequence[int], what: str):
    if len(vector) != len(cams):
        raise ConfigurationError(f"{what} has {len(vector)} entries for {len(cams)} cameras")
    for cam, value in zip(cams, vector):
        if not 0 <= value < cam.n_states:
            raise ConfigurationError(
                f"{what}: camera {cam.id} has no state {value} (valid: 0..{cam.n_states - 1})"
            )


def joint_fov(cams: Sequence[CameraModel], C: JointCameraState) -> FrozenSet[int]:
    """Union of the per-camera fov sets for joint state C"""
    _check_vector(cams, C, "joint camera state")
    covered = set()
    for cam, state in zip(cams, C):
        covered |= cam.fovs[state]
    return frozenset(covered)


def fov_complement_size(grid: GridMap, cams: Sequence[CameraModel], C: JointCameraState) -> int:
    return grid.n_locations - len(joint_fov(cams, C))


def apply_action(cams: Sequence[CameraModel], C: JointCameraState, A: JointAction) -> JointCameraState:
    """Deterministic camera transition: each command moves its camera to the named state"""
    _check_vector(cams, C, "joint camera state")
    _check_vector(cams, A, "joint action")
    return tuple(int(a) for a in A)


def joint_states(cams: Sequence[CameraModel]) -> Iterator[JointCameraState]:
    """All joint states (equivalently joint actions) in lexicographic order"""
    return itertools.product(*(cam.states for cam in cams))


def bresenham(x0: int, y0: int, x1: int, y1: int) -> List[Tuple[int, int]]:
    """Grid cells along the line from (x0, y0) to (x1, y1), endpoints included"""
    cells = []
    dx = abs(x1 - x0)
    dy = abs(y1 - y0)
    sx = 1 if x0 < x1 else -1
    sy = 1 if y0 < y1 else -1
    err = dx - dy
    x, y = x0, y0

    while True:
        cells.append((x, y))
        if x == x1 and y == y1:
            break
        e2 = 2 * err
        if e2 > -dy:
            err -= dy
            x += sx
        if e2 < dx:
            err += dx
            y += sy

    return cells


class SurveillanceArea:
    """Map plus camera network, with cached joint-fov masks"""

    def __init__(self, grid: GridMap, cameras: Iterable[CameraModel]):
        self.grid = grid
        self.cameras = tuple(cameras)
        for cam in self.cameras:
            cam.validate(grid)
        self._fovs: Dict[JointCameraState, FrozenSet[int]] = {}
        self._masks: Dict[JointCameraState, np.ndarray] = {}
        self._joint_actions = tuple(joint_states(self.cameras))
        self._action_masks = None

    @property
    def n_cameras(self) -> int:
        return len(self.cameras)

    @property
    def joint_actions(self) -> Tuple[JointAction, ...]:
        return self._joint_actions

    def initial_state(self) -> JointCameraState:
        return tuple(0 for _ in self.cameras)

    def fov(self, C: JointCameraState) -> FrozenSet[int]:
        C = tuple(C)
        cached = self._fovs.get(C)
        if cached is None:
            cached = joint_fov(self.cameras, C)
            self._fovs[C] = cached
        return cached

    def fov_mask(self, C: JointCameraState) -> np.ndarray:
        """Boolean vector over locations, True where covered by joint fov"""
        C = tuple(C)
        mask = self._masks.get(C)
        if mask is None:
            mask = np.zeros(self.grid.n_locations, dtype=bool)
            for cell in self.fov(C):
                mask[self.grid.location_of(cell)] = True
            mask.setflags(write=False)
            self._masks[C] = mask
        return mask

    def action_masks(self) -> np.ndarray:
        """Float matrix (|A|, n_locations) of post-action fov masks in joint_actions order"""
        if self._action_masks is None:
            masks = np.array([self.fov_mask(A) for A in self._joint_actions], dtype=float)
            masks.setflags(write=False)
            self._action_masks = masks
        return self._action_masks

    def complement_size(self, C: JointCameraState) -> int:
        return self.grid.n_locations - len(self.fov(C))

    def apply_action(self, C: JointCameraState, A: JointAction) -> JointCameraState:
        return apply_action(self.cameras, C, A)

    def line_of_sight(self, origin: int, cell: int) -> bool:
        """True when no blocked cell lies strictly between origin and cell"""
        x0, y0 = self.grid.coords(origin)
        x1, y1 = self.grid.coords(cell)
        for x, y in bresenham(x0, y0, x1, y1)[1:-1]:
            if self.grid.cell_index(x, y) in self.grid.blocked:
                return False
        return True
