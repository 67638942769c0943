"""dubinsrl: TD3 + hindsight replay for a planar Dubins vehicle.

A goal-reaching and 1v1 dogfight reinforcement-learning stack on a
from-scratch dense-network core, with a scripted-expert behavioral-cloning
pretrainer and a lockstep remote-environment protocol.
"""

from . import expert, harness, net, nn, replay, sim, td3
from .replay import ReplayBuffer, Transition, her_relabel, store_episode
from .sim import DogfightWorld, GoalReachEnv, Scenario, VehicleState, empty_arena
from .td3 import Td3Agent, Td3Config, select_action, train_step

__version__ = "0.1.0"
__all__ = [
    "DogfightWorld", "GoalReachEnv", "ReplayBuffer", "Scenario", "Td3Agent",
    "Td3Config", "Transition", "VehicleState", "empty_arena", "expert",
    "harness", "her_relabel", "net", "nn", "replay", "select_action", "sim",
    "store_episode", "td3", "train_step",
]
