"""Exception types shared across the package."""


class InputError(ValueError):
    """A caller passed non-finite or structurally invalid numeric input."""


class GeometryError(ValueError):
    """An operation is geometrically undefined (outside the arena, coincident points)."""


class ScenarioError(ValueError):
    """A scenario violates the documented constraints or has no feasible start region."""


class EpisodeDoneError(RuntimeError):
    """A finished episode was stepped again without a reset."""


class InsufficientDataError(RuntimeError):
    """A replay buffer cannot supply the requested batch size."""


class DivergenceError(RuntimeError):
    """A training update produced a non-finite loss or gradient."""


class ConfigError(ValueError):
    """A run configuration file or CLI override is invalid."""


class CheckpointError(RuntimeError):
    """Base class for checkpoint container failures."""


class CorruptCheckpointError(CheckpointError):
    """The container is truncated or its header cannot be parsed."""


class CheckpointVersionError(CheckpointError):
    """The container was written with an unsupported format version."""


class ShapeMismatchError(CheckpointError):
    """Stored array shapes do not match what the caller expects."""


class ProtocolError(RuntimeError):
    """Base class for remote-environment protocol failures."""


class WireDecodeError(ProtocolError):
    """A frame could not be decoded into a valid message."""


class RemoteEnvError(ProtocolError):
    """Base class for client-side session failures."""


class RemoteTimeoutError(RemoteEnvError):
    """The server did not answer within the configured deadline."""


class ConnectionLostError(RemoteEnvError):
    """The connection closed or broke mid-request."""


class ServerFault(RemoteEnvError):
    """The server answered with an ERROR message."""

    def __init__(self, code: str, message: str):
        super().__init__(f"server error [{code}]: {message}")
        self.code = code
        self.message = message


class CollectionError(RuntimeError):
    """A lockstep collection tick failed; carries partial per-env streams."""

    def __init__(self, env_index: int, partial_streams, cause: Exception):
        super().__init__(f"environment {env_index} failed during collection: {cause}")
        self.env_index = env_index
        self.partial_streams = partial_streams
        self.cause = cause
