"""Wire format for remote environment stepping.

Every frame is a 4-byte big-endian unsigned length followed by exactly that
many bytes of UTF-8 JSON. JSON's shortest-roundtrip float encoding is
lossless for finite doubles, which the protocol relies on: replaying the
same (scenario, seed, actions) through a server must reproduce local
results bit for bit.

Message kinds and payload fields:

    HELLO      {protocol_version, scenario_hash}
    HELLO_ACK  {protocol_version, scenario_hash}
    RESET      {seed}
    RESET_ACK  {observation, achieved}
    STEP       {action}
    STEP_ACK   {observation, reward, done, events, achieved}
    ERROR      {code, message}
    BYE        {}
"""

from __future__ import annotations

import json
import math
import socket
import struct

from ..errors import ConnectionLostError, WireDecodeError

PROTOCOL_VERSION = 1
MAX_FRAME_BYTES = 16 * 1024 * 1024
_LENGTH = struct.Struct(">I")

KINDS = ("HELLO", "HELLO_ACK", "RESET", "RESET_ACK", "STEP", "STEP_ACK", "ERROR", "BYE")

ERR_BAD_VERSION = "bad_version"
ERR_BAD_STATE = "bad_state"
ERR_BAD_PAYLOAD = "bad_payload"
ERR_INTERNAL = "internal"

_REQUIRED_FIELDS = {
    "HELLO": {"protocol_version": int, "scenario_hash": str},
    "HELLO_ACK": {"protocol_version": int, "scenario_hash": str},
    "RESET": {"seed": int},
    "RESET_ACK": {"observation": list, "achieved": list},
    "STEP": {"action": list},
    "STEP_ACK": {"observation": list, "reward": float, "done": bool,
                 "events": list, "achieved": list},
    "ERROR": {"code": str, "message": str},
    "BYE": {},
}


def encode_message(kind: str, **payload) -> bytes:
    """Build a full frame (length prefix included) for one message."""
    if kind not in KINDS:
        raise WireDecodeError(f"unknown message kind {kind!r}")
    body = dict(payload)
    body["kind"] = kind
    data = json.dumps(body, separators=(",", ":")).encode("utf-8")
    if len(data) > MAX_FRAME_BYTES:
        raise WireDecodeError(f"frame of {len(data)} bytes exceeds the limit")
    return _LENGTH.pack(len(data)) + data


def decode_message(data: bytes) -> dict:
    """Parse and validate one frame body; returns the payload dict with 'kind'."""
    try:
        body = json.loads(data.decode("utf-8"))
    except (ValueError, UnicodeDecodeError) as exc:
        raise WireDecodeError(f"unparsable frame: {exc}") from exc
    if not isinstance(body, dict) or "kind" not in body:
        raise WireDecodeError("frame is not an object with a 'kind' field")
    kind = body["kind"]
    if kind not in KINDS:
        raise WireDecodeError(f"unknown message kind {kind!r}")
    for name, expected in _REQUIRED_FIELDS[kind].items():
        if name not in body:
            raise WireDecodeError(f"{kind} frame missing field {name!r}")
        value = body[name]
        if expected is float:
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise WireDecodeError(f"{kind}.{name} must be a number")
        elif expected is int:
            if not isinstance(value, int) or isinstance(value, bool):
                raise WireDecodeError(f"{kind}.{name} must be an integer")
        elif not isinstance(value, expected):
            raise WireDecodeError(f"{kind}.{name} must be {expected.__name__}")
    if kind == "STEP":
        action = body["action"]
        if len(action) != 2 or not all(
                isinstance(a, (int, float)) and not isinstance(a, bool) and math.isfinite(a)
                for a in action):
            raise WireDecodeError("STEP.action must be two finite numbers")
    return body


def recv_exact(sock: socket.socket, n: int) -> bytes:
    """Read exactly n bytes or raise ConnectionLostError on EOF."""
    chunks = []
    remaining = n
    while remaining > 0:
        chunk = sock.recv(remaining)
        if not chunk:
            raise ConnectionLostError("connection closed mid-frame")
        chunks.append(chunk)
        remaining -= len(chunk)
    return b"".join(chunks)


def read_frame(sock: socket.socket) -> dict:
    """Read one length-prefixed frame from a socket and decode it."""
    header = recv_exact(sock, _LENGTH.size)
    (length,) = _LENGTH.unpack(header)
    if length > MAX_FRAME_BYTES:
        raise WireDecodeError(f"declared frame length {length} exceeds the limit")
    return decode_message(recv_exact(sock, length))


def write_frame(sock: socket.socket, kind: str, **payload) -> None:
    sock.sendall(encode_message(kind, **payload))
