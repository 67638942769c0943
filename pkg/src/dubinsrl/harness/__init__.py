from .config import BcConfig, RemoteConfig, RunConfig, ScheduleConfig, load_run_config
from .metrics import MetricsWriter, read_metrics, strip_wall_clock
from .plots import emit_plots, moving_average, render_trajectory, save_trajectory
from .train import (
    DOGFIGHT_INPUT_DIM,
    GOAL_INPUT_DIM,
    TrainResult,
    derive_seed,
    network_input,
    relabel_reward_fn,
    train,
    train_dogfight,
    validate,
)

__all__ = [name for name in dir() if not name.startswith("_")]
