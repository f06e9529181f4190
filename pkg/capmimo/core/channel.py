"""Per-scenario channel bundle: grid, index set, Green samples and their projections"""

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .config import ScenarioConfig
from .em import Medium, aperture_grid, green_on_grid
from .fourier import index_set, project_channel
from .models import ApertureGrid, ComplexArray, IndexSet, RealArray

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Channel:
    """Everything the optimizer and baselines need about one scenario, computed once"""
    medium: Medium
    grid: ApertureGrid
    indices: IndexSet
    receivers: RealArray        # (K, 3)
    green: ComplexArray         # (K, I_s, 3, 3)
    omega: ComplexArray         # (K, N_F, 3, 3)

    @property
    def num_users(self) -> int:
        return int(self.receivers.shape[0])

    def restricted_to(self, users: Sequence[int]) -> 'Channel':
        """Sub-channel seen by a subset of receivers"""
        users = list(users)
        return Channel(
            medium=self.medium,
            grid=self.grid,
            indices=self.indices,
            receivers=self.receivers[users],
            green=self.green[users],
            omega=self.omega[users],
        )


def build_channel(config: ScenarioConfig) -> Channel:
    """Sample every receiver's Green function on the aperture grid and project it"""
    medium = config.medium()
    grid = aperture_grid(
        config.aperture.lx_m,
        config.aperture.ly_m,
        config.quadrature_samples,
        adjust=config.adjust_quadrature,
    )
    indices = index_set(config.truncation.nx, config.truncation.ny, config.truncation.nz)
    receivers = np.array(config.receivers_m, dtype=float).reshape(-1, 3)
    green = np.stack([green_on_grid(r, grid, medium) for r in receivers])
    omega = project_channel(green, indices, grid)

    logger.info(
        f"Built channel: K={receivers.shape[0]}, A_T={grid.area:.4g} m^2, "
        f"I_s={grid.num_nodes}, N_F={indices.count}"
    )
    return Channel(medium=medium, grid=grid, indices=indices, receivers=receivers, green=green, omega=omega)
