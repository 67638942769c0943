"""Versioned binary container for parameters, optimizer state, and records.

Layout: 4 magic bytes, a big-endian uint32 format version, a big-endian
uint32 header length, a UTF-8 JSON header, then raw little-endian float64
array data concatenated in header manifest order. The same container family
backs network checkpoints, demonstration files, and replay-buffer snapshots.
"""

from __future__ import annotations

import json
import os
import struct

import numpy as np

from ..errors import (
    CheckpointVersionError,
    CorruptCheckpointError,
    ShapeMismatchError,
)
from .adam import AdamState, init_adam
from .mlp import Mlp, OUTPUT_ACTIVATIONS

MAGIC = b"DRNC"
FORMAT_VERSION = 1
_HEADER_STRUCT = struct.Struct(">4sII")


def write_container(path, arrays: dict[str, np.ndarray], meta: dict | None = None) -> None:
    """Write arrays (as float64) plus a JSON meta block, atomically."""
    manifest = []
    blobs = []
    for name, array in arrays.items():
        data = np.ascontiguousarray(array, dtype="<f8")
        manifest.append({"name": name, "shape": list(data.shape)})
        blobs.append(data.tobytes())
    header = json.dumps({"arrays": manifest, "meta": meta or {}}).encode("utf-8")
    tmp = f"{path}.tmp"
    with open(tmp, "wb") as fh:
        fh.write(_HEADER_STRUCT.pack(MAGIC, FORMAT_VERSION, len(header)))
        fh.write(header)
        for blob in blobs:
            fh.write(blob)
    os.replace(tmp, path)


def read_container(path) -> tuple[dict[str, np.ndarray], dict]:
    """Read a container back; validates framing fully before returning."""
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < _HEADER_STRUCT.size:
        raise CorruptCheckpointError(f"{path}: file shorter than the fixed header")
    magic, version, header_len = _HEADER_STRUCT.unpack_from(raw)
    if magic != MAGIC:
        raise CorruptCheckpointError(f"{path}: bad magic bytes {magic!r}")
    if version != FORMAT_VERSION:
        raise CheckpointVersionError(
            f"{path}: format version {version}, supported version {FORMAT_VERSION}")
    body_start = _HEADER_STRUCT.size + header_len
    if len(raw) < body_start:
        raise CorruptCheckpointError(f"{path}: truncated header")
    try:
        header = json.loads(raw[_HEADER_STRUCT.size:body_start].decode("utf-8"))
        manifest = header["arrays"]
        meta = header["meta"]
    except (ValueError, KeyError, UnicodeDecodeError) as exc:
        raise CorruptCheckpointError(f"{path}: unparsable header ({exc})") from exc
    expected = sum(int(np.prod(entry["shape"], dtype=np.int64)) for entry in manifest)
    if len(raw) - body_start != expected * 8:
        raise CorruptCheckpointError(
            f"{path}: body holds {len(raw) - body_start} bytes, manifest requires {expected * 8}")
    arrays = {}
    offset = body_start
    for entry in manifest:
        shape = tuple(int(s) for s in entry["shape"])
        count = int(np.prod(shape, dtype=np.int64))
        flat = np.frombuffer(raw, dtype="<f8", count=count, offset=offset)
        arrays[entry["name"]] = flat.reshape(shape).astype(np.float64)
        offset += count * 8
    return arrays, meta


def _network_arrays(name: str, net: Mlp) -> dict[str, np.ndarray]:
    out = {}
    for k, (w, b) in enumerate(zip(net.weights, net.biases)):
        out[f"{name}/w{k}"] = w
        out[f"{name}/b{k}"] = b
    return out


def _adam_arrays(name: str, state: AdamState) -> dict[str, np.ndarray]:
    out = {}
    for k in range(len(state.m_weights)):
        out[f"{name}/adam_mw{k}"] = state.m_weights[k]
        out[f"{name}/adam_vw{k}"] = state.v_weights[k]
        out[f"{name}/adam_mb{k}"] = state.m_biases[k]
        out[f"{name}/adam_vb{k}"] = state.v_biases[k]
    return out


def save_networks(path, nets: dict[str, Mlp],
                  adam: dict[str, AdamState] | None = None,
                  counters: dict[str, int] | None = None) -> None:
    """Single checkpoint file holding named networks and optimizer states."""
    adam = adam or {}
    arrays: dict[str, np.ndarray] = {}
    meta = {"kind": "networks", "networks": {}, "adam": {}, "counters": counters or {}}
    for name, net in nets.items():
        meta["networks"][name] = {
            "layer_sizes": list(net.layer_sizes),
            "output_activation": net.output_activation,
        }
        arrays.update(_network_arrays(name, net))
    for name, state in adam.items():
        if name not in nets:
            raise ShapeMismatchError(f"optimizer state {name!r} has no matching network")
        meta["adam"][name] = {
            "t": state.t, "beta1": state.beta1, "beta2": state.beta2, "eps": state.eps,
        }
        arrays.update(_adam_arrays(name, state))
    write_container(path, arrays, meta)


def load_networks(path) -> tuple[dict[str, Mlp], dict[str, AdamState], dict[str, int]]:
    arrays, meta = read_container(path)
    if meta.get("kind") != "networks":
        raise CorruptCheckpointError(f"{path}: container does not hold networks")
    nets: dict[str, Mlp] = {}
    for name, info in meta.get("networks", {}).items():
        sizes = tuple(int(s) for s in info["layer_sizes"])
        activation = info["output_activation"]
        if activation not in OUTPUT_ACTIVATIONS:
            raise CorruptCheckpointError(f"{path}: unknown activation {activation!r}")
        weights = []
        biases = []
        for k, (fan_in, fan_out) in enumerate(zip(sizes[:-1], sizes[1:])):
            try:
                w = arrays[f"{name}/w{k}"]
                b = arrays[f"{name}/b{k}"]
            except KeyError as exc:
                raise CorruptCheckpointError(f"{path}: missing array {exc}") from exc
            if w.shape != (fan_out, fan_in) or b.shape != (fan_out,):
                raise ShapeMismatchError(
                    f"{path}: stored {name} layer {k} has shape {w.shape}, "
                    f"manifest says {(fan_out, fan_in)}")
            weights.append(w.copy())
            biases.append(b.copy())
        nets[name] = Mlp(layer_sizes=sizes, weights=weights, biases=biases,
                         output_activation=activation)
    adam: dict[str, AdamState] = {}
    for name, info in meta.get("adam", {}).items():
        net = nets[name]
        state = init_adam(net, beta1=info["beta1"], beta2=info["beta2"], eps=info["eps"])
        state.t = int(info["t"])
        for k in range(len(net.weights)):
            state.m_weights[k] = arrays[f"{name}/adam_mw{k}"].copy()
            state.v_weights[k] = arrays[f"{name}/adam_vw{k}"].copy()
            state.m_biases[k] = arrays[f"{name}/adam_mb{k}"].copy()
            state.v_biases[k] = arrays[f"{name}/adam_vb{k}"].copy()
        adam[name] = state
    counters = {k: int(v) for k, v in meta.get("counters", {}).items()}
    return nets, adam, counters
