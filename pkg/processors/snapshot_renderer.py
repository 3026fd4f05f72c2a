"""Snapshot Rendering - map, joint fov, belief heat and true targets as a PNG"""
import logging
from typing import Optional, Sequence

import numpy as np
from PIL import Image, ImageDraw

from world.gridworld import JointCameraState, SurveillanceArea

logger = logging.getLogger(__name__)

FREE = (245, 245, 245)
BLOCKED = (20, 20, 20)
FOV = (150, 190, 240)
HEAT = (220, 40, 40)
TARGET = (20, 120, 40)
GRID_LINE = (200, 200, 200)


def _blend(base, tint, alpha: float):
    return tuple(int(round(b * (1.0 - alpha) + t * alpha)) for b, t in zip(base, tint))


class SnapshotRenderer:
    def __init__(self, cell_px: int = 16):
        if cell_px < 2:
            raise ValueError("cell_px must be at least 2")
        self.cell_px = cell_px

    def render(self, area: SurveillanceArea, camera_state: JointCameraState,
               target_cells: Sequence[int] = (), heat: Optional[np.ndarray] = None) -> Image.Image:
        """heat is a per-location weight (e.g. summed location marginals), scaled to its maximum"""
        grid = area.grid
        px = self.cell_px
        image = Image.new("RGB", (grid.width * px, grid.height * px), FREE)
        draw = ImageDraw.Draw(image)
        fov = area.fov(camera_state)

        peak = float(heat.max()) if heat is not None and heat.size and heat.max() > 0 else 0.0
        for cell in range(grid.n_cells):
            x, y = grid.coords(cell)
            if cell in grid.blocked:
                colour = BLOCKED
            else:
                colour = FOV if cell in fov else FREE
                if peak > 0:
                    colour = _blend(colour, HEAT, 0.85 * float(heat[grid.location_of(cell)]) / peak)
            draw.rectangle([x * px, y * px, (x + 1) * px - 1, (y + 1) * px - 1], fill=colour, outline=GRID_LINE)

        pad = max(1, px // 4)
        for cell in target_cells:
            x, y = grid.coords(cell)
            draw.ellipse([x * px + pad, y * px + pad, (x + 1) * px - 1 - pad, (y + 1) * px - 1 - pad], fill=TARGET)

        return image
