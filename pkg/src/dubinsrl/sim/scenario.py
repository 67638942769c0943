"""Arena description: geometry, goal, reward constants, dogfight thresholds.

Scenario files are JSON. Distances are meters; the dogfight angle
thresholds are carried in degrees (``*_deg`` keys) and converted to
radians on load.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field, replace

from ..errors import ScenarioError
from .geometry import Rect
from .vehicle import VEHICLE_LENGTH


@dataclass(frozen=True)
class Scenario:
    width: float
    height: float
    goal: tuple[float, float]
    goal_radius: float = 50.0
    obstacles: tuple[Rect, ...] = ()
    dt: float = 0.1
    max_steps: int = 1000
    lidar_range: float = 1000.0
    # goal-reaching reward constants
    goal_bonus: float = 10000.0
    wall_penalty: float = -100.0
    distance_coeff: float = 1e-5
    # dogfight engagement band and angle thresholds (radians)
    r_min: float = 100.0
    r_max: float = 2000.0
    aa_fire: float = math.radians(60.0)
    ata_fire: float = math.radians(30.0)
    aa_tail: float = math.radians(150.0)
    ata_tail: float = math.radians(120.0)
    # dogfight reward values (g_hit is reserved for future weapon events)
    g_hit: float = 10.0
    g_advantage: float = 1.0
    g_disadvantage: float = -1.0
    g_collision: float = -10.0

    def __post_init__(self):
        if not (self.width > 0 and self.height > 0):
            raise ScenarioError("arena dimensions must be positive")
        if min(self.width, self.height) <= 2 * VEHICLE_LENGTH:
            raise ScenarioError("arena must be wider than twice the vehicle length")
        if self.dt <= 0:
            raise ScenarioError("dt must be positive")
        if self.max_steps < 1:
            raise ScenarioError("max_steps must be at least 1")
        if self.goal_radius <= 0 or self.lidar_range <= 0:
            raise ScenarioError("goal_radius and lidar_range must be positive")
        if not (0 < self.r_min < self.r_max):
            raise ScenarioError("need 0 < r_min < r_max")
        gx, gy = self.goal
        for rect in self.obstacles:
            if rect.width <= 0 or rect.height <= 0:
                raise ScenarioError(f"obstacle {rect} has non-positive area")
            if not (0 < rect.min_x and rect.max_x < self.width
                    and 0 < rect.min_y and rect.max_y < self.height):
                raise ScenarioError(f"obstacle {rect} must lie strictly inside the arena")
            if rect.contains(gx, gy):
                raise ScenarioError("goal lies inside an obstacle")
        if not (0 <= gx <= self.width and 0 <= gy <= self.height):
            raise ScenarioError("goal lies outside the arena")
        wall_clearance = min(gx, self.width - gx, gy, self.height - gy)
        if wall_clearance <= self.goal_radius:
            raise ScenarioError("goal must be further than goal_radius from every wall")

    @property
    def dims(self) -> tuple[float, float]:
        return (self.width, self.height)

    def with_max_steps(self, max_steps: int) -> "Scenario":
        return replace(self, max_steps=max_steps)

    def to_dict(self) -> dict:
        return {
            "arena": {"width": self.width, "height": self.height, "dt": self.dt},
            "obstacles": [
                {"min_x": r.min_x, "min_y": r.min_y, "max_x": r.max_x, "max_y": r.max_y}
                for r in self.obstacles
            ],
            "goal": {"x": self.goal[0], "y": self.goal[1], "radius": self.goal_radius},
            "rewards": {
                "goal_bonus": self.goal_bonus,
                "wall_penalty": self.wall_penalty,
                "distance_coeff": self.distance_coeff,
            },
            "lidar": {"range": self.lidar_range},
            "episode": {"max_steps": self.max_steps},
            "dogfight": {
                "r_min": self.r_min,
                "r_max": self.r_max,
                "aa_fire_deg": math.degrees(self.aa_fire),
                "ata_fire_deg": math.degrees(self.ata_fire),
                "aa_tail_deg": math.degrees(self.aa_tail),
                "ata_tail_deg": math.degrees(self.ata_tail),
                "g_hit": self.g_hit,
                "g_advantage": self.g_advantage,
                "g_disadvantage": self.g_disadvantage,
                "g_collision": self.g_collision,
            },
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Scenario":
        try:
            arena = data["arena"]
            goal = data["goal"]
        except (KeyError, TypeError) as exc:
            raise ScenarioError(f"scenario file missing section: {exc}") from exc
        rewards = data.get("rewards", {})
        dogfight = data.get("dogfight", {})
        episode = data.get("episode", {})
        lidar = data.get("lidar", {})
        kwargs = dict(
            width=float(arena["width"]),
            height=float(arena["height"]),
            dt=float(arena.get("dt", 0.1)),
            goal=(float(goal["x"]), float(goal["y"])),
            goal_radius=float(goal.get("radius", 50.0)),
            obstacles=tuple(
                Rect(float(o["min_x"]), float(o["min_y"]), float(o["max_x"]), float(o["max_y"]))
                for o in data.get("obstacles", [])
            ),
            max_steps=int(episode.get("max_steps", 1000)),
            lidar_range=float(lidar.get("range", 1000.0)),
        )
        for key in ("goal_bonus", "wall_penalty", "distance_coeff"):
            if key in rewards:
                kwargs[key] = float(rewards[key])
        for key in ("r_min", "r_max", "g_hit", "g_advantage", "g_disadvantage", "g_collision"):
            if key in dogfight:
                kwargs[key] = float(dogfight[key])
        for key in ("aa_fire", "ata_fire", "aa_tail", "ata_tail"):
            if key + "_deg" in dogfight:
                kwargs[key] = math.radians(float(dogfight[key + "_deg"]))
        return cls(**kwargs)

    def canonical_hash(self) -> str:
        """Stable digest of the scenario, used in the remote-env handshake."""
        payload = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def load_scenario(path) -> Scenario:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ScenarioError(f"cannot parse scenario file {path}: {exc}") from exc
    return Scenario.from_dict(data)


def save_scenario(scenario: Scenario, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(scenario.to_dict(), fh, indent=2)
        fh.write("\n")


def empty_arena(width: float = 4000.0, height: float = 4000.0,
                goal: tuple[float, float] = (3000.0, 3000.0), **overrides) -> Scenario:
    """Obstacle-free walled arena, full size by default."""
    return Scenario(width=width, height=height, goal=goal, **overrides)


def obstacle_course(**overrides) -> Scenario:
    """Full-size arena with a fixed block layout between spawn areas and the goal."""
    obstacles = (
        Rect(900.0, 900.0, 1500.0, 1500.0),
        Rect(2400.0, 700.0, 2900.0, 1800.0),
        Rect(900.0, 2300.0, 2100.0, 2700.0),
        Rect(2600.0, 2500.0, 3400.0, 2900.0),
        Rect(1700.0, 3200.0, 2300.0, 3700.0),
    )
    defaults = dict(width=4000.0, height=4000.0, goal=(3400.0, 3500.0), obstacles=obstacles)
    defaults.update(overrides)
    return Scenario(**defaults)
