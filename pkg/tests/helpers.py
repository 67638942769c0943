"""Shared test utilities: randomized scene generation and brute-force oracles."""

from __future__ import annotations

import math

import numpy as np

from dubinsrl.sim import Rect, Scenario, VEHICLE_LENGTH


def random_scenario(rng: np.random.Generator, max_obstacles: int = 6) -> Scenario:
    """Random legal arena with 0..max_obstacles non-overlapping rectangles."""
    width = float(rng.uniform(400.0, 1600.0))
    height = float(rng.uniform(400.0, 1600.0))
    n_obstacles = int(rng.integers(0, max_obstacles + 1))
    obstacles: list[Rect] = []
    tries = 0
    while len(obstacles) < n_obstacles and tries < 200:
        tries += 1
        w = float(rng.uniform(20.0, 0.25 * width))
        h = float(rng.uniform(20.0, 0.25 * height))
        x0 = float(rng.uniform(1.0, width - w - 1.0))
        y0 = float(rng.uniform(1.0, height - h - 1.0))
        cand = Rect(x0, y0, x0 + w, y0 + h)
        grown = cand.inflate(10.0)
        if any(not (grown.max_x < o.min_x or o.max_x < grown.min_x
                    or grown.max_y < o.min_y or o.max_y < grown.min_y)
               for o in obstacles):
            continue
        obstacles.append(cand)
    goal_radius = 50.0
    for _ in range(1000):
        gx = float(rng.uniform(goal_radius + 1.0, width - goal_radius - 1.0))
        gy = float(rng.uniform(goal_radius + 1.0, height - goal_radius - 1.0))
        if not any(o.contains(gx, gy) for o in obstacles):
            break
    return Scenario(width=width, height=height, goal=(gx, gy), goal_radius=goal_radius,
                    obstacles=tuple(obstacles), lidar_range=float(rng.uniform(200.0, 1200.0)))


def free_point(scenario: Scenario, rng: np.random.Generator,
               clearance: float = 0.0) -> tuple[float, float]:
    """Point inside the arena, outside all obstacles inflated by clearance."""
    inflated = [o.inflate(clearance) for o in scenario.obstacles]
    for _ in range(10000):
        x = float(rng.uniform(clearance, scenario.width - clearance))
        y = float(rng.uniform(clearance, scenario.height - clearance))
        if not any(r.contains(x, y) for r in inflated):
            return (x, y)
    raise RuntimeError("could not sample a free point")


def lidar_oracle(x: float, y: float, heading: float, scenario: Scenario,
                 step: float = 0.25) -> np.ndarray:
    """Dense-sampling raycast: march each ray, report the first blocked sample.

    Independent of the analytic implementation; blocked means outside the
    arena or inside an obstacle.
    """
    readings = np.full(8, scenario.lidar_range)
    distances = np.arange(step, scenario.lidar_range + step, step)
    for k in range(8):
        angle = heading + k * math.pi / 4.0
        px = x + distances * math.cos(angle)
        py = y + distances * math.sin(angle)
        blocked = (px < 0) | (px > scenario.width) | (py < 0) | (py > scenario.height)
        for rect in scenario.obstacles:
            blocked |= (px >= rect.min_x) & (px <= rect.max_x) \
                & (py >= rect.min_y) & (py <= rect.max_y)
        hits = np.flatnonzero(blocked)
        if hits.size:
            readings[k] = distances[hits[0]]
    return readings
