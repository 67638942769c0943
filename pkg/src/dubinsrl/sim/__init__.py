from .env import (
    ACTION_DIM,
    DOGFIGHT_OBS_DIM,
    GOAL_OBS_DIM,
    DogfightWorld,
    GoalReachEnv,
    StepResult,
    dogfight_observation,
    goal_descriptor,
    goal_observation,
    sample_start,
)
from .geometry import Rect
from .lidar import N_RAYS, lidar_scan
from .rewards import (
    EVENT_GOAL_REACHED,
    EVENT_PROXIMITY_KILL,
    EVENT_TIMEOUT,
    EVENT_WALL_HIT,
    aa_ata,
    dogfight_reward,
    goal_reward,
)
from .scenario import Scenario, empty_arena, load_scenario, obstacle_course, save_scenario
from .vehicle import (
    ACCEL_GAIN,
    FRICTION_DECEL,
    MAX_ACCEL,
    MAX_SPEED,
    MAX_TURN,
    STEER_DEAD_ZONE,
    THROTTLE_DEAD_ZONE,
    VEHICLE_LENGTH,
    VehicleState,
    apply_action,
    wrap_angle,
)

__all__ = [name for name in dir() if not name.startswith("_")]
