"""Segment geometry for raycasting and motion collision handling.

The arena boundary and every obstacle edge are represented as oriented
segments (ax, ay, bx, by, nx, ny) where (nx, ny) is the unit normal
pointing into free space.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

_PARALLEL_EPS = 1e-12


@dataclass(frozen=True)
class Rect:
    """Axis-aligned rectangle, used for obstacles."""

    min_x: float
    min_y: float
    max_x: float
    max_y: float

    def contains(self, x: float, y: float, strict: bool = False) -> bool:
        if strict:
            return self.min_x < x < self.max_x and self.min_y < y < self.max_y
        return self.min_x <= x <= self.max_x and self.min_y <= y <= self.max_y

    def inflate(self, margin: float) -> "Rect":
        return Rect(self.min_x - margin, self.min_y - margin,
                    self.max_x + margin, self.max_y + margin)

    @property
    def width(self) -> float:
        return self.max_x - self.min_x

    @property
    def height(self) -> float:
        return self.max_y - self.min_y

    def edges(self) -> list[tuple[float, float, float, float, float, float]]:
        """Four edges with normals pointing away from the rectangle interior."""
        return [
            (self.min_x, self.min_y, self.min_x, self.max_y, -1.0, 0.0),  # left face
            (self.max_x, self.min_y, self.max_x, self.max_y, 1.0, 0.0),   # right face
            (self.min_x, self.min_y, self.max_x, self.min_y, 0.0, -1.0),  # bottom face
            (self.min_x, self.max_y, self.max_x, self.max_y, 0.0, 1.0),   # top face
        ]


def arena_walls(width: float, height: float) -> list[tuple[float, float, float, float, float, float]]:
    """Boundary segments with normals pointing into the arena."""
    return [
        (0.0, 0.0, width, 0.0, 0.0, 1.0),        # south wall
        (0.0, height, width, height, 0.0, -1.0),  # north wall
        (0.0, 0.0, 0.0, height, 1.0, 0.0),        # west wall
        (width, 0.0, width, height, -1.0, 0.0),   # east wall
    ]


@lru_cache(maxsize=128)
def blocking_segments(scenario) -> np.ndarray:
    """All wall and obstacle segments of a scenario as an (S, 6) array."""
    segs = arena_walls(scenario.width, scenario.height)
    for rect in scenario.obstacles:
        segs.extend(rect.edges())
    return np.asarray(segs, dtype=np.float64)


def ray_distances(px: float, py: float, angles: np.ndarray,
                  segments: np.ndarray, max_range: float) -> np.ndarray:
    """Distance from (px, py) along each angle to the nearest segment.

    Exact parametric ray/segment intersection; readings with no hit inside
    max_range are clamped to max_range.
    """
    ax, ay = segments[:, 0], segments[:, 1]
    ex = segments[:, 2] - ax
    ey = segments[:, 3] - ay
    sx = ax - px
    sy = ay - py
    out = np.full(len(angles), max_range, dtype=np.float64)
    for i, angle in enumerate(angles):
        dx, dy = np.cos(angle), np.sin(angle)
        denom = dx * ey - dy * ex
        ok = np.abs(denom) > _PARALLEL_EPS
        with np.errstate(divide="ignore", invalid="ignore"):
            t = (sx * ey - sy * ex) / denom
            u = (sx * dy - sy * dx) / denom
        valid = ok & (t >= 0.0) & (u >= -1e-9) & (u <= 1.0 + 1e-9)
        if np.any(valid):
            out[i] = min(max_range, float(t[valid].min()))
    return out


def first_crossing(p0, p1, segments: np.ndarray):
    """Earliest crossing of the motion segment p0 -> p1 with any segment.

    Returns (t, cx, cy, nx, ny) with t in (0, 1], or None. t very close to 0
    is ignored so a vehicle resting on a boundary can move away from it.
    """
    dx = p1[0] - p0[0]
    dy = p1[1] - p0[1]
    if dx == 0.0 and dy == 0.0:
        return None
    ax, ay = segments[:, 0], segments[:, 1]
    ex = segments[:, 2] - ax
    ey = segments[:, 3] - ay
    sx = ax - p0[0]
    sy = ay - p0[1]
    denom = dx * ey - dy * ex
    ok = np.abs(denom) > _PARALLEL_EPS
    with np.errstate(divide="ignore", invalid="ignore"):
        t = (sx * ey - sy * ex) / denom
        u = (sx * dy - sy * dx) / denom
    valid = ok & (t > 1e-12) & (t <= 1.0) & (u >= -1e-9) & (u <= 1.0 + 1e-9)
    if not np.any(valid):
        return None
    idx = int(np.flatnonzero(valid)[np.argmin(t[valid])])
    tc = float(t[idx])
    return (tc, p0[0] + tc * dx, p0[1] + tc * dy, float(segments[idx, 4]), float(segments[idx, 5]))


def point_blocked(x: float, y: float, scenario) -> bool:
    """True when the point is outside the arena or inside an obstacle."""
    if x < 0.0 or x > scenario.width or y < 0.0 or y > scenario.height:
        return True
    return any(r.contains(x, y) for r in scenario.obstacles)
