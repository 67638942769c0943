from .adam import AdamState, adam_step, init_adam
from .checkpoint import (
    FORMAT_VERSION,
    load_networks,
    read_container,
    save_networks,
    write_container,
)
from .gradcheck import finite_difference_grad, max_relative_error
from .mlp import ForwardCache, GradientSet, Mlp, backward, forward, init_mlp, zero_gradients

__all__ = [name for name in dir() if not name.startswith("_")]
