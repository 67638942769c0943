"""Run configuration: schedule, hyperparameters, seeds, and I/O locations.

Run config files are JSON mirroring the dataclass fields below; CLI flags
override individual keys.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

from ..errors import ConfigError
from ..td3 import Td3Config


@dataclass
class ScheduleConfig:
    exploration_episodes: int = 200
    steps_per_episode: int = 1000
    validation_every: int = 100      # training episodes between validations
    validation_episodes: int = 30
    total_episodes: int = 1000
    stop_success_rate: float | None = None  # early stop once validation reaches this

    def __post_init__(self):
        if min(self.exploration_episodes, self.validation_episodes) < 0:
            raise ConfigError("episode counts cannot be negative")
        if min(self.steps_per_episode, self.validation_every, self.total_episodes) < 1:
            raise ConfigError("steps_per_episode, validation_every, total_episodes must be >= 1")
        if self.validation_every > self.total_episodes:
            raise ConfigError("validation_every must not exceed total_episodes")


@dataclass
class BcConfig:
    demo_episodes: int = 0           # expert episodes to collect (0 disables BC entirely)
    seed_buffer: bool = True         # push expert episodes into the replay buffer
    pretrain_actor: bool = False     # supervised actor pretraining before exploration
    pretrain_epochs: int = 50
    pretrain_lr: float = 1e-3
    pretrain_lr_decay: float = 1.0
    pretrain_batch_size: int = 256
    holdout_fraction: float = 0.2


@dataclass
class RemoteConfig:
    mode: str = "local"              # "local" or "remote"
    addresses: list[str] = field(default_factory=list)  # "host:port" per environment

    def __post_init__(self):
        if self.mode not in ("local", "remote"):
            raise ConfigError(f"remote.mode must be 'local' or 'remote', got {self.mode!r}")
        if self.mode == "remote" and not self.addresses:
            raise ConfigError("remote mode requires at least one server address")


@dataclass
class RunConfig:
    scenario: str = ""
    output_dir: str = "runs/out"
    env_seed: int = 1
    agent_seed: int = 2
    her_enabled: bool = True
    hidden: tuple[int, ...] = (256, 256)
    buffer_capacity: int = 1_000_000
    td3: Td3Config = field(default_factory=Td3Config)
    schedule: ScheduleConfig = field(default_factory=ScheduleConfig)
    bc: BcConfig = field(default_factory=BcConfig)
    remote: RemoteConfig = field(default_factory=RemoteConfig)

    def to_dict(self) -> dict:
        data = asdict(self)
        data["hidden"] = list(self.hidden)
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        kwargs = dict(data)
        try:
            if "hidden" in kwargs:
                kwargs["hidden"] = tuple(int(h) for h in kwargs["hidden"])
            if "td3" in kwargs:
                kwargs["td3"] = Td3Config(**kwargs["td3"])
            if "schedule" in kwargs:
                kwargs["schedule"] = ScheduleConfig(**kwargs["schedule"])
            if "bc" in kwargs:
                kwargs["bc"] = BcConfig(**kwargs["bc"])
            if "remote" in kwargs:
                kwargs["remote"] = RemoteConfig(**kwargs["remote"])
            return cls(**kwargs)
        except TypeError as exc:
            raise ConfigError(f"bad config structure: {exc}") from exc


def load_run_config(path) -> RunConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"cannot parse config file {path}: {exc}") from exc
    return RunConfig.from_dict(data)


def save_run_config(config: RunConfig, path) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(config.to_dict(), fh, indent=2)
        fh.write("\n")
