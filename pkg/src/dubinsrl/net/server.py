"""TCP environment server: one private world per connection, strict
request/response, explicit session state machine.

Sessions move connected -> ready (after HELLO) -> mid-episode (after RESET)
-> done, and back to mid-episode via RESET. Protocol violations answer with
an ERROR frame and close the connection.
"""

from __future__ import annotations

import socket
import threading

from ..errors import ConnectionLostError, WireDecodeError
from ..sim.env import GoalReachEnv
from ..sim.rewards import EVENT_GOAL_REACHED, EVENT_TIMEOUT
from ..sim.scenario import Scenario
from .wire import (
    ERR_BAD_PAYLOAD,
    ERR_BAD_STATE,
    ERR_BAD_VERSION,
    ERR_INTERNAL,
    PROTOCOL_VERSION,
    read_frame,
    write_frame,
)


class EnvServer:
    """Serves one scenario to any number of independent sessions."""

    def __init__(self, scenario: Scenario, host: str = "127.0.0.1", port: int = 0):
        self.scenario = scenario
        self._hash = scenario.canonical_hash()
        self._listener = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        self._listener.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        self._listener.bind((host, port))
        self._listener.listen(32)
        self.host, self.port = self._listener.getsockname()
        self._stop = threading.Event()
        self._threads: list[threading.Thread] = []
        self._accept_thread: threading.Thread | None = None

    @property
    def address(self) -> tuple[str, int]:
        return (self.host, self.port)

    def start(self) -> "EnvServer":
        """Accept connections on a background thread (for embedding in tests
        and in-process vector collection)."""
        self._accept_thread = threading.Thread(target=self._accept_loop, daemon=True)
        self._accept_thread.start()
        return self

    def serve_forever(self) -> None:
        """Blocking accept loop (the CLI entry point)."""
        self._accept_loop()

    def shutdown(self) -> None:
        self._stop.set()
        try:
            # close() alone does not wake a blocked accept(); shutdown() does
            self._listener.shutdown(socket.SHUT_RDWR)
        except OSError:
            pass
        try:
            self._listener.close()
        except OSError:
            pass
        if self._accept_thread is not None:
            self._accept_thread.join(timeout=5.0)
        for t in self._threads:
            t.join(timeout=5.0)

    def _accept_loop(self) -> None:
        while not self._stop.is_set():
            try:
                conn, _ = self._listener.accept()
            except OSError:
                break
            thread = threading.Thread(target=self._serve_connection, args=(conn,), daemon=True)
            thread.start()
            self._threads.append(thread)

    def _serve_connection(self, conn: socket.socket) -> None:
        env = GoalReachEnv(self.scenario)
        mid_episode = False
        try:
            hello = read_frame(conn)
            if hello["kind"] != "HELLO":
                write_frame(conn, "ERROR", code=ERR_BAD_STATE,
                            message=f"expected HELLO, got {hello['kind']}")
                return
            if hello["protocol_version"] != PROTOCOL_VERSION:
                write_frame(conn, "ERROR", code=ERR_BAD_VERSION,
                            message=f"server speaks version {PROTOCOL_VERSION}")
                return
            write_frame(conn, "HELLO_ACK", protocol_version=PROTOCOL_VERSION,
                        scenario_hash=self._hash)
            while not self._stop.is_set():
                message = read_frame(conn)
                kind = message["kind"]
                if kind == "BYE":
                    return
                if kind == "RESET":
                    state, obs = env.reset(message["seed"])
                    mid_episode = True
                    write_frame(conn, "RESET_ACK",
                                observation=[float(v) for v in obs],
                                achieved=[state.x, state.y])
                elif kind == "STEP":
                    if not mid_episode or env.done:
                        write_frame(conn, "ERROR", code=ERR_BAD_STATE,
                                    message="STEP is only legal mid-episode; RESET first")
                        return
                    result = env.step(message["action"])
                    if result.done:
                        mid_episode = False
                    write_frame(conn, "STEP_ACK",
                                observation=[float(v) for v in result.observation],
                                reward=result.reward,
                                done=result.done,
                                events=sorted(result.events),
                                achieved=[result.achieved[0], result.achieved[1]])
                else:
                    write_frame(conn, "ERROR", code=ERR_BAD_STATE,
                                message=f"unexpected {kind} in session")
                    return
        except WireDecodeError as exc:
            try:
                write_frame(conn, "ERROR", code=ERR_BAD_PAYLOAD, message=str(exc))
            except OSError:
                pass
        except (ConnectionLostError, OSError):
            pass
        except Exception as exc:  # pragma: no cover - defensive
            try:
                write_frame(conn, "ERROR", code=ERR_INTERNAL, message=repr(exc))
            except OSError:
                pass
        finally:
            try:
                conn.close()
            except OSError:
                pass


def serve(scenario: Scenario, bind: str) -> None:
    """Blocking convenience entry: bind is 'host:port'."""
    host, _, port = bind.rpartition(":")
    server = EnvServer(scenario, host=host or "127.0.0.1", port=int(port))
    print(f"serving environment on {server.host}:{server.port}")
    server.serve_forever()
