"""Remote environment client and lockstep multi-environment collection."""

from __future__ import annotations

import socket
from dataclasses import dataclass

import numpy as np

from ..errors import (
    CollectionError,
    ConnectionLostError,
    ProtocolError,
    RemoteEnvError,
    RemoteTimeoutError,
    ServerFault,
)
from ..sim.scenario import Scenario
from .wire import PROTOCOL_VERSION, read_frame, write_frame

STATE_CONNECTED = "connected"
STATE_READY = "ready"
STATE_MID_EPISODE = "mid_episode"
STATE_DONE = "done"
STATE_FAILED = "failed"


@dataclass(frozen=True)
class RemoteStep:
    observation: np.ndarray
    reward: float
    done: bool
    events: frozenset
    achieved: tuple[float, float]


@dataclass(frozen=True)
class RolloutRecord:
    """One transition collected from a remote environment."""

    obs: np.ndarray
    action: np.ndarray
    reward: float
    next_obs: np.ndarray
    done: bool
    events: frozenset
    achieved: tuple[float, float]
    achieved_next: tuple[float, float]


class RemoteEnv:
    """Blocking request/response mirror of the local goal-reaching world.

    A response missing its deadline or a server ERROR marks the session
    failed; a failed session refuses further use rather than returning stale
    data.
    """

    def __init__(self, sock: socket.socket, timeout: float):
        self._sock = sock
        self._timeout = timeout
        self.state = STATE_CONNECTED
        self.last_observation: np.ndarray | None = None
        self.last_achieved: tuple[float, float] | None = None

    @classmethod
    def connect(cls, address: tuple[str, int], scenario: Scenario,
                timeout: float = 10.0) -> "RemoteEnv":
        sock = socket.create_connection(address, timeout=timeout)
        sock.settimeout(timeout)
        env = cls(sock, timeout)
        try:
            write_frame(sock, "HELLO", protocol_version=PROTOCOL_VERSION,
                        scenario_hash=scenario.canonical_hash())
            ack = env._read_reply()
        except RemoteEnvError:
            env.state = STATE_FAILED
            raise
        if ack["kind"] != "HELLO_ACK":
            env.state = STATE_FAILED
            raise ProtocolError(f"expected HELLO_ACK, got {ack['kind']}")
        if ack["scenario_hash"] != scenario.canonical_hash():
            env.state = STATE_FAILED
            raise ProtocolError("server is serving a different scenario")
        env.state = STATE_READY
        return env

    def _fail(self) -> None:
        self.state = STATE_FAILED
        try:
            self._sock.close()
        except OSError:
            pass

    def _read_reply(self) -> dict:
        try:
            reply = read_frame(self._sock)
        except socket.timeout as exc:
            self._fail()
            raise RemoteTimeoutError(
                f"no response within {self._timeout}s deadline") from exc
        except (ConnectionLostError, OSError) as exc:
            self._fail()
            raise ConnectionLostError(f"connection lost: {exc}") from exc
        if reply["kind"] == "ERROR":
            self._fail()
            raise ServerFault(reply["code"], reply["message"])
        return reply

    def _require_usable(self) -> None:
        if self.state == STATE_FAILED:
            raise RemoteEnvError("session has failed; reconnect to continue")

    def reset(self, seed: int) -> tuple[np.ndarray, tuple[float, float]]:
        self._require_usable()
        try:
            write_frame(self._sock, "RESET", seed=int(seed))
        except OSError as exc:
            self._fail()
            raise ConnectionLostError(f"send failed: {exc}") from exc
        ack = self._read_reply()
        if ack["kind"] != "RESET_ACK":
            self._fail()
            raise ProtocolError(f"expected RESET_ACK, got {ack['kind']}")
        self.last_observation = np.array(ack["observation"], dtype=np.float64)
        self.last_achieved = (ack["achieved"][0], ack["achieved"][1])
        self.state = STATE_MID_EPISODE
        return self.last_observation, self.last_achieved

    def send_step(self, action) -> None:
        """Dispatch a STEP without waiting; pair with recv_step_ack."""
        self._require_usable()
        if self.state != STATE_MID_EPISODE:
            raise RemoteEnvError(f"cannot STEP in state {self.state!r}")
        try:
            write_frame(self._sock, "STEP", action=[float(action[0]), float(action[1])])
        except OSError as exc:
            self._fail()
            raise ConnectionLostError(f"send failed: {exc}") from exc

    def recv_step_ack(self) -> RemoteStep:
        ack = self._read_reply()
        if ack["kind"] != "STEP_ACK":
            self._fail()
            raise ProtocolError(f"expected STEP_ACK, got {ack['kind']}")
        step = RemoteStep(
            observation=np.array(ack["observation"], dtype=np.float64),
            reward=float(ack["reward"]),
            done=bool(ack["done"]),
            events=frozenset(ack["events"]),
            achieved=(ack["achieved"][0], ack["achieved"][1]),
        )
        self.last_observation = step.observation
        self.last_achieved = step.achieved
        self.state = STATE_DONE if step.done else STATE_MID_EPISODE
        return step

    def step(self, action) -> RemoteStep:
        self.send_step(action)
        return self.recv_step_ack()

    def close(self) -> None:
        if self.state != STATE_FAILED:
            try:
                write_frame(self._sock, "BYE")
            except OSError:
                pass
        try:
            self._sock.close()
        except OSError:
            pass


def vector_collect(envs: list[RemoteEnv], policy, steps: int,
                   seed_streams: list) -> list[list[RolloutRecord]]:
    """Lockstep collection: one policy query, one STEP, one transition per
    environment per tick.

    policy(env_index, observation) -> action. Environments in the ready
    state are reset from their seed stream before the first tick, and a
    finished episode is auto-reset with that env's next seed. Any session
    failure aborts the collection with the failed env named and all streams
    truncated to the last complete tick.
    """
    if len(seed_streams) != len(envs):
        raise ValueError("need one seed stream per environment")
    streams: list[list[RolloutRecord]] = [[] for _ in envs]
    iterators = [iter(s) for s in seed_streams]

    def abort(index: int, exc: Exception, complete_ticks: int):
        partial = [s[:complete_ticks] for s in streams]
        raise CollectionError(index, partial, exc) from exc

    for i, env in enumerate(envs):
        if env.state in (STATE_READY, STATE_DONE):
            try:
                env.reset(next(iterators[i]))
            except RemoteEnvError as exc:
                abort(i, exc, 0)
    for tick in range(steps):
        pre = [(env.last_observation, env.last_achieved) for env in envs]
        actions = [np.asarray(policy(i, pre[i][0]), dtype=np.float64)
                   for i in range(len(envs))]
        for i, env in enumerate(envs):
            try:
                env.send_step(actions[i])
            except RemoteEnvError as exc:
                abort(i, exc, tick)
        for i, env in enumerate(envs):
            try:
                ack = env.recv_step_ack()
            except RemoteEnvError as exc:
                abort(i, exc, tick)
            streams[i].append(RolloutRecord(
                obs=pre[i][0],
                action=actions[i],
                reward=ack.reward,
                next_obs=ack.observation,
                done=ack.done,
                events=ack.events,
                achieved=pre[i][1],
                achieved_next=ack.achieved,
            ))
        for i, env in enumerate(envs):
            if env.state == STATE_DONE:
                try:
                    env.reset(next(iterators[i]))
                except RemoteEnvError as exc:
                    abort(i, exc, tick + 1)
    return streams
