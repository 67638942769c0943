"""Command-line surface.

Subcommands: train, train-dogfight, evaluate, bc-pretrain, serve-env, plot,
replay. Every subcommand accepts --config with a JSON run config; explicit
flags override config keys. Exit status 0 on success, nonzero with a
one-line diagnostic otherwise.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from ..errors import (
    CheckpointError,
    ConfigError,
    InputError,
    ProtocolError,
    ScenarioError,
)
from .config import RunConfig, load_run_config

_KNOWN_ERRORS = (ConfigError, ScenarioError, CheckpointError, InputError,
                 ProtocolError, FileNotFoundError, OSError)


def _base_config(args) -> RunConfig:
    config = load_run_config(args.config) if args.config else RunConfig()
    if getattr(args, "scenario", None):
        config.scenario = args.scenario
    if getattr(args, "output_dir", None):
        config.output_dir = args.output_dir
    if getattr(args, "seed_env", None) is not None:
        config.env_seed = args.seed_env
    if getattr(args, "seed_agent", None) is not None:
        config.agent_seed = args.seed_agent
    if getattr(args, "total_episodes", None) is not None:
        config.schedule.total_episodes = args.total_episodes
    if getattr(args, "exploration_episodes", None) is not None:
        config.schedule.exploration_episodes = args.exploration_episodes
    if getattr(args, "steps_per_episode", None) is not None:
        config.schedule.steps_per_episode = args.steps_per_episode
    if getattr(args, "her", None) is not None:
        config.her_enabled = args.her
    if getattr(args, "remote", None):
        config.remote.mode = "remote"
        config.remote.addresses = [a.strip() for a in args.remote.split(",") if a.strip()]
    config.schedule.__post_init__()
    config.remote.__post_init__()
    return config


def _add_train_flags(parser):
    parser.add_argument("--config", help="JSON run config file")
    parser.add_argument("--scenario", help="scenario file (overrides config)")
    parser.add_argument("--output-dir")
    parser.add_argument("--seed-env", type=int)
    parser.add_argument("--seed-agent", type=int)
    parser.add_argument("--total-episodes", type=int)
    parser.add_argument("--exploration-episodes", type=int)
    parser.add_argument("--steps-per-episode", type=int)
    her = parser.add_mutually_exclusive_group()
    her.add_argument("--her", dest="her", action="store_true", default=None)
    her.add_argument("--no-her", dest="her", action="store_false", default=None)
    parser.add_argument("--remote", help="comma-separated host:port environment servers")


def _cmd_train(args) -> int:
    from .train import train
    result = train(_base_config(args))
    if result.validations:
        last = result.validations[-1]
        print(f"trained; last validation mean return {last.mean_return:.2f}, "
              f"success rate {last.success_rate:.2f}")
    print(f"metrics: {result.metrics_path}")
    print(f"final checkpoint: {result.final_checkpoint}")
    if result.diverged:
        print("error: training diverged (non-finite loss); "
              "last good parameters checkpointed", file=sys.stderr)
        return 1
    return 0


def _cmd_train_dogfight(args) -> int:
    from .train import train_dogfight
    res0, res1 = train_dogfight(_base_config(args))
    print(f"metrics: {res0.metrics_path}")
    print(f"checkpoints: {res0.final_checkpoint}, {res1.final_checkpoint}")
    if res0.diverged or res1.diverged:
        print("error: training diverged (non-finite loss)", file=sys.stderr)
        return 1
    return 0


def _cmd_evaluate(args) -> int:
    from ..sim.env import GoalReachEnv
    from ..sim.scenario import load_scenario
    from ..td3 import DETERMINISTIC, Td3Agent, Td3Config, select_action
    from .train import GOAL_INPUT_DIM, derive_seed, network_input, validate
    from .plots import save_trajectory

    if not Path(args.checkpoint).exists():
        print(f"error: checkpoint not found: {args.checkpoint}", file=sys.stderr)
        return 1
    config = load_run_config(args.config) if args.config else RunConfig()
    scenario_path = args.scenario or config.scenario
    if not scenario_path:
        print("error: --scenario (or a config with one) is required", file=sys.stderr)
        return 1
    scenario = load_scenario(scenario_path)
    if args.steps_per_episode:
        scenario = scenario.with_max_steps(args.steps_per_episode)
    agent = Td3Agent.load(args.checkpoint, expected_input_dim=GOAL_INPUT_DIM,
                          expected_action_dim=2)
    mean_return, success_rate = validate(agent, scenario, args.episodes, seed=args.seed)
    print(f"episodes: {args.episodes}")
    print(f"mean return: {mean_return:.4f}")
    print(f"success rate: {success_rate:.4f}")
    if args.save_trajectory:
        env = GoalReachEnv(scenario)
        state, obs = env.reset(derive_seed(args.seed, 1, 0))
        positions = [state.position]
        td3_config = Td3Config()
        while not env.done:
            x = network_input(obs, env.state.position, scenario)
            result = env.step(select_action(agent, x, DETERMINISTIC, None, td3_config))
            positions.append(result.achieved)
            obs = result.observation
        save_trajectory(scenario, positions, args.save_trajectory,
                        title=f"evaluation episode (seed {args.seed})")
        print(f"trajectory: {args.save_trajectory}")
    return 0


def _cmd_bc_pretrain(args) -> int:
    from ..expert import bc_pretrain, collect_demonstrations, save_demos
    from ..nn import init_mlp, save_networks
    from ..sim.scenario import load_scenario
    from .train import GOAL_INPUT_DIM

    config = load_run_config(args.config) if args.config else RunConfig()
    scenario_path = args.scenario or config.scenario
    if not scenario_path:
        print("error: --scenario (or a config with one) is required", file=sys.stderr)
        return 1
    scenario = load_scenario(scenario_path)
    out = Path(args.output_dir or config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    episodes, demos = collect_demonstrations(scenario, args.demo_episodes, args.seed)
    save_demos(demos, out / "demos.bin")
    actor = init_mlp((GOAL_INPUT_DIM, *config.hidden, 2), "tanh", seed=args.seed)
    train_curve, holdout_curve = bc_pretrain(
        actor, demos, epochs=args.epochs, lr=args.lr,
        holdout_fraction=args.holdout_fraction,
        rng=np.random.default_rng(args.seed), batch_size=args.batch_size,
        lr_decay=args.lr_decay)
    save_networks(out / "bc_actor.ckpt", {"actor": actor})
    print(f"demonstrations: {len(demos)} pairs from {len(episodes)} episodes")
    print(f"final train MSE: {train_curve[-1]:.6f}")
    print(f"final holdout MSE: {holdout_curve[-1]:.6f}")
    print(f"wrote {out / 'demos.bin'} and {out / 'bc_actor.ckpt'}")
    return 0


def _cmd_serve_env(args) -> int:
    from ..net.server import serve
    from ..sim.scenario import load_scenario

    config = load_run_config(args.config) if args.config else RunConfig()
    scenario_path = args.scenario or config.scenario
    if not scenario_path:
        print("error: --scenario (or a config with one) is required", file=sys.stderr)
        return 1
    serve(load_scenario(scenario_path), args.bind)
    return 0


def _cmd_plot(args) -> int:
    from .plots import emit_plots
    written = emit_plots(args.metrics, args.output_dir)
    for path in written:
        print(path)
    return 0


def _cmd_replay(args) -> int:
    from .plots import load_trajectory, render_trajectory, save_trajectory

    if args.trajectory:
        trajectory = load_trajectory(args.trajectory)
    else:
        if not (args.checkpoint and args.scenario):
            print("error: replay needs --trajectory, or --checkpoint with --scenario",
                  file=sys.stderr)
            return 1
        from ..sim.env import GoalReachEnv
        from ..sim.scenario import load_scenario
        from ..td3 import DETERMINISTIC, Td3Agent, Td3Config, select_action
        from .train import GOAL_INPUT_DIM, network_input

        scenario = load_scenario(args.scenario)
        agent = Td3Agent.load(args.checkpoint, expected_input_dim=GOAL_INPUT_DIM)
        env = GoalReachEnv(scenario)
        state, obs = env.reset(args.seed)
        positions = [state.position]
        config = Td3Config()
        while not env.done:
            x = network_input(obs, env.state.position, scenario)
            result = env.step(select_action(agent, x, DETERMINISTIC, None, config))
            positions.append(result.achieved)
            obs = result.observation
        trajectory = {
            "scenario": scenario.to_dict(),
            "positions": [list(p) for p in positions],
            "title": f"replay (seed {args.seed})",
        }
    render_trajectory(trajectory, args.output)
    print(args.output)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dubinsrl",
        description="Goal-reaching and 1v1 dogfight RL for a planar Dubins vehicle")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="goal-reaching training run")
    _add_train_flags(p)
    p.set_defaults(handler=_cmd_train)

    p = sub.add_parser("train-dogfight", help="1v1 shared-buffer self-play")
    _add_train_flags(p)
    p.set_defaults(handler=_cmd_train_dogfight)

    p = sub.add_parser("evaluate", help="deterministic evaluation of a checkpoint")
    p.add_argument("--config")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--scenario")
    p.add_argument("--episodes", type=int, default=30)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--steps-per-episode", type=int)
    p.add_argument("--save-trajectory", help="write the first episode as a trajectory JSON")
    p.set_defaults(handler=_cmd_evaluate)

    p = sub.add_parser("bc-pretrain", help="collect expert demos and pretrain an actor")
    p.add_argument("--config")
    p.add_argument("--scenario")
    p.add_argument("--output-dir")
    p.add_argument("--demo-episodes", type=int, default=160)
    p.add_argument("--epochs", type=int, default=50)
    p.add_argument("--lr", type=float, default=1e-3)
    p.add_argument("--lr-decay", type=float, default=1.0)
    p.add_argument("--batch-size", type=int, default=256)
    p.add_argument("--holdout-fraction", type=float, default=0.2)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(handler=_cmd_bc_pretrain)

    p = sub.add_parser("serve-env", help="serve a scenario to remote learners")
    p.add_argument("--config")
    p.add_argument("--scenario")
    p.add_argument("--bind", required=True, help="host:port to listen on")
    p.set_defaults(handler=_cmd_serve_env)

    p = sub.add_parser("plot", help="emit charts and CSV tables from a metrics log")
    p.add_argument("--config")
    p.add_argument("--metrics", required=True)
    p.add_argument("--output-dir", required=True)
    p.set_defaults(handler=_cmd_plot)

    p = sub.add_parser("replay", help="render a stored or freshly rolled trajectory")
    p.add_argument("--config")
    p.add_argument("--trajectory", help="trajectory JSON produced by evaluate")
    p.add_argument("--checkpoint")
    p.add_argument("--scenario")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", required=True, help="output SVG path")
    p.set_defaults(handler=_cmd_replay)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except _KNOWN_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
