"""Post-hoc chart emission and trajectory rendering (SVG plus CSV tables)."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from ..errors import ConfigError
from ..sim.scenario import Scenario
from .metrics import read_metrics


def _plt():
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    return plt


def moving_average(values, window: int = 100) -> np.ndarray:
    """Trailing mean over up to `window` previous points."""
    values = np.asarray(values, dtype=np.float64)
    out = np.empty_like(values)
    cumulative = np.cumsum(values)
    for i in range(len(values)):
        lo = max(0, i - window + 1)
        total = cumulative[i] - (cumulative[lo - 1] if lo > 0 else 0.0)
        out[i] = total / (i - lo + 1)
    return out


def _write_csv(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _line_chart(plt, xs, ys, title, xlabel, ylabel, path):
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(xs, ys, linewidth=1.2)
    ax.set_title(title)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)


def emit_plots(metrics_path, output_dir) -> list[str]:
    """Four line charts per run: actor loss, critic loss, 100-episode moving
    average reward, and validation reward, with matching CSV tables."""
    records = read_metrics(metrics_path)
    train = [r for r in records if r.get("phase") == "train"]
    validations = [r for r in records if r.get("phase") == "validate"]
    episodic = [r for r in records if r.get("phase") in ("explore", "train")]
    if not episodic and not validations:
        raise ConfigError(f"metrics log {metrics_path} holds no records to plot")

    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    plt = _plt()
    written: list[str] = []

    def emit(name, xs, ys, title, xlabel, ylabel):
        svg = out / f"{name}.svg"
        table = out / f"{name}.csv"
        _line_chart(plt, xs, ys, title, xlabel, ylabel, svg)
        _write_csv(table, [xlabel, ylabel], list(zip(xs, ys)))
        written.extend([str(svg), str(table)])

    actor_points = [(r["total_env_steps"], r["actor_loss"])
                    for r in train if r.get("actor_loss") is not None]
    if actor_points:
        xs, ys = zip(*actor_points)
        emit("actor_loss", xs, ys, "Actor loss", "environment steps", "actor loss")

    critic_points = [
        (r["total_env_steps"], 0.5 * (r["critic_loss1"] + r["critic_loss2"]))
        for r in train
        if r.get("critic_loss1") is not None and r.get("critic_loss2") is not None
    ]
    if critic_points:
        xs, ys = zip(*critic_points)
        emit("critic_loss", xs, ys, "Critic loss (twin mean)", "environment steps",
             "critic loss")

    if episodic:
        returns = [r["return"] for r in episodic]
        xs = list(range(len(returns)))
        emit("reward_ma100", xs, moving_average(returns, 100),
             "Reward, trailing 100-episode average", "episode", "average reward")

    if validations:
        xs = [r["index"] for r in validations]
        ys = [r["mean_return"] for r in validations]
        emit("validation", xs, ys, "Validation mean return", "validation index",
             "mean return")

    return written


def render_trajectory(trajectory: dict, output_path) -> str:
    """Draw a stored episode (arena, obstacles, goal disc, path) as SVG."""
    scenario = Scenario.from_dict(trajectory["scenario"])
    positions = np.asarray(trajectory["positions"], dtype=np.float64)
    if positions.ndim != 2 or positions.shape[1] != 2 or len(positions) == 0:
        raise ConfigError("trajectory positions must be a non-empty list of [x, y]")
    plt = _plt()
    fig, ax = plt.subplots(figsize=(6, 6))
    ax.add_patch(plt.Rectangle((0, 0), scenario.width, scenario.height,
                               fill=False, edgecolor="black", linewidth=1.5))
    for rect in scenario.obstacles:
        ax.add_patch(plt.Rectangle((rect.min_x, rect.min_y), rect.width, rect.height,
                                   facecolor="0.7", edgecolor="0.3"))
    ax.add_patch(plt.Circle(scenario.goal, scenario.goal_radius,
                            facecolor="tab:green", alpha=0.4, edgecolor="tab:green"))
    ax.plot(positions[:, 0], positions[:, 1], color="tab:blue", linewidth=1.0)
    ax.plot(positions[0, 0], positions[0, 1], marker="o", color="tab:blue")
    ax.plot(positions[-1, 0], positions[-1, 1], marker="x", color="tab:red")
    ax.set_xlim(-0.05 * scenario.width, 1.05 * scenario.width)
    ax.set_ylim(-0.05 * scenario.height, 1.05 * scenario.height)
    ax.set_aspect("equal")
    ax.set_title(trajectory.get("title", "episode trajectory"))
    fig.tight_layout()
    fig.savefig(output_path, format="svg")
    plt.close(fig)
    return str(output_path)


def load_trajectory(path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"trajectory file not found: {path}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"cannot parse trajectory file {path}: {exc}") from exc


def save_trajectory(scenario: Scenario, positions, path, title: str | None = None) -> None:
    data = {
        "scenario": scenario.to_dict(),
        "positions": [[float(x), float(y)] for x, y in positions],
    }
    if title:
        data["title"] = title
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(data, fh)
        fh.write("\n")
