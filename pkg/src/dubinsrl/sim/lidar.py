"""Eight-ray range sensor against arena walls and obstacle edges."""

from __future__ import annotations

import math

import numpy as np

from ..errors import GeometryError
from .geometry import blocking_segments, ray_distances
from .scenario import Scenario
from .vehicle import VehicleState

N_RAYS = 8
RAY_SPACING = math.pi / 4.0  # fixed 45 deg offsets in the body frame


def lidar_scan(state: VehicleState, scenario: Scenario) -> np.ndarray:
    """Distances along 8 body-frame rays, clamped to scenario.lidar_range.

    Ray k points at heading + k * 45 deg. Uses exact segment intersection,
    not sampling. The vehicle must be inside the arena.
    """
    if not (0.0 <= state.x <= scenario.width and 0.0 <= state.y <= scenario.height):
        raise GeometryError(f"lidar scan from outside the arena: {state.position}")
    angles = state.heading + RAY_SPACING * np.arange(N_RAYS)
    segments = blocking_segments(scenario)
    return ray_distances(state.x, state.y, angles, segments, scenario.lidar_range)
