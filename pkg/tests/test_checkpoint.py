import numpy as np
import pytest

from dubinsrl.errors import (
    CheckpointVersionError,
    CorruptCheckpointError,
    ShapeMismatchError,
)
from dubinsrl.nn import (
    adam_step,
    forward,
    init_adam,
    init_mlp,
    load_networks,
    read_container,
    save_networks,
    write_container,
    zero_gradients,
)


def test_container_roundtrip(tmp_path):
    path = tmp_path / "c.bin"
    rng = np.random.default_rng(0)
    arrays = {"a": rng.normal(size=(3, 4)), "b": rng.normal(size=(7,))}
    write_container(path, arrays, {"note": "x", "n": 3})
    loaded, meta = read_container(path)
    assert meta == {"note": "x", "n": 3}
    for k in arrays:
        assert np.array_equal(loaded[k], arrays[k])


def test_network_roundtrip_bit_exact(tmp_path):
    path = tmp_path / "nets.ckpt"
    net = init_mlp((14, 32, 32, 2), "tanh", seed=4)
    adam = init_adam(net)
    adam_step(net, zero_gradients(net), adam, lr=0.0)  # advance t
    save_networks(path, {"actor": net}, {"actor": adam}, {"updates": 17})
    nets, adams, counters = load_networks(path)
    restored = nets["actor"]
    assert restored.layer_sizes == net.layer_sizes
    assert restored.output_activation == "tanh"
    rng = np.random.default_rng(1)
    for _ in range(100):
        x = rng.normal(size=14)
        y1, _ = forward(net, x)
        y2, _ = forward(restored, x)
        assert np.array_equal(y1, y2)
    assert adams["actor"].t == 1
    assert counters["updates"] == 17


def test_truncated_file_is_corrupt_error(tmp_path):
    path = tmp_path / "t.ckpt"
    save_networks(path, {"n": init_mlp((4, 8, 2), seed=0)})
    data = path.read_bytes()
    path.write_bytes(data[:-16])
    with pytest.raises(CorruptCheckpointError):
        load_networks(path)


def test_bad_magic_is_corrupt_error(tmp_path):
    path = tmp_path / "m.ckpt"
    save_networks(path, {"n": init_mlp((4, 8, 2), seed=0)})
    data = bytearray(path.read_bytes())
    data[:4] = b"XXXX"
    path.write_bytes(bytes(data))
    with pytest.raises(CorruptCheckpointError):
        load_networks(path)


def test_version_mismatch_is_distinct_error(tmp_path):
    path = tmp_path / "v.ckpt"
    save_networks(path, {"n": init_mlp((4, 8, 2), seed=0)})
    data = bytearray(path.read_bytes())
    data[4:8] = (99).to_bytes(4, "big")
    path.write_bytes(bytes(data))
    with pytest.raises(CheckpointVersionError):
        load_networks(path)


def test_agent_shape_expectation_mismatch(tmp_path):
    from dubinsrl.td3 import Td3Agent
    path = tmp_path / "agent.ckpt"
    Td3Agent(input_dim=16, action_dim=2, hidden=(8, 8), seed=0).save(path)
    with pytest.raises(ShapeMismatchError):
        Td3Agent.load(path, expected_input_dim=9)
    agent = Td3Agent.load(path, expected_input_dim=16, expected_action_dim=2)
    assert agent.input_dim == 16
