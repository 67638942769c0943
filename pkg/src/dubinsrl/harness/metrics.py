"""Line-delimited JSON metrics, one record per episode or validation run.

Record fields:

    train/explore: phase, episode, steps, total_env_steps, return, success,
                   wall_hits, actor_loss, critic_loss1, critic_loss2,
                   wall_seconds (dogfight records add an "agent" field)
    validate:      phase, index, after_episode, total_env_steps, mean_return,
                   success_rate, wall_seconds

Every field except wall_seconds is deterministic under fixed seeds.
"""

from __future__ import annotations

import json
from pathlib import Path

from ..errors import ConfigError


class MetricsWriter:
    def __init__(self, path):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._fh = open(self.path, "w", encoding="utf-8")

    def write(self, record: dict) -> None:
        self._fh.write(json.dumps(record, separators=(",", ":")))
        self._fh.write("\n")
        self._fh.flush()

    def close(self) -> None:
        self._fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def read_metrics(path) -> list[dict]:
    records = []
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, 1):
                line = line.strip()
                if not line:
                    continue
                try:
                    records.append(json.loads(line))
                except json.JSONDecodeError as exc:
                    raise ConfigError(f"{path}:{line_no}: corrupt metrics line") from exc
    except FileNotFoundError:
        raise ConfigError(f"metrics file not found: {path}")
    return records


def strip_wall_clock(records: list[dict]) -> list[dict]:
    """Drop the only non-deterministic field, for reproducibility comparisons."""
    return [{k: v for k, v in r.items() if k != "wall_seconds"} for r in records]
