from .client import RemoteEnv, RemoteStep, RolloutRecord, vector_collect
from .server import EnvServer, serve
from .wire import (
    ERR_BAD_PAYLOAD,
    ERR_BAD_STATE,
    ERR_BAD_VERSION,
    ERR_INTERNAL,
    KINDS,
    PROTOCOL_VERSION,
    decode_message,
    encode_message,
    read_frame,
    write_frame,
)

__all__ = [name for name in dir() if not name.startswith("_")]
