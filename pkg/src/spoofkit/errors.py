"""Exception hierarchy shared across the toolkit."""


class SpoofkitError(Exception):
    """Base class for every error raised by this package."""


class ProfileSyntaxError(SpoofkitError):
    """Profile document is not decodable at all (broken JSON)."""


class SchemaError(SpoofkitError):
    """Profile document violates the schema.

    Carries the offending field path and, when produced by the collecting
    parser, the full diagnostic list.
    """

    def __init__(self, path, message, diagnostics=None):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path
        self.reason = message
        self.diagnostics = list(diagnostics or [])


class IncompatibleMode(SpoofkitError):
    """Signal mode cannot drive the requested sensor."""


class InvalidParams(SpoofkitError):
    """Signal parameters outside their domain."""


class EmptyTrace(SpoofkitError):
    """Operation needs at least one sample."""


class FormatError(SpoofkitError):
    """Malformed trace file or hook-plan document."""


class UnmappableOverride(SpoofkitError):
    """An override has no target API; signals an internal inconsistency,
    since validation rejects such profiles before compilation."""


class TransportError(SpoofkitError):
    """Channel-level send/receive failure."""


class AttachError(TransportError):
    """Target process not reachable."""


class ProtocolError(TransportError):
    """Peer sent bytes that do not decode to a protocol message."""


class IllegalStateError(SpoofkitError):
    """Session operation invoked from a state that does not allow it."""


class InjectError(SpoofkitError):
    """Hook plan was not accepted by the target."""


class RestoreError(SpoofkitError):
    """Restore was not acknowledged."""


class ConfigError(SpoofkitError):
    """Mock device configuration is invalid."""


class DuplicateProcess(SpoofkitError):
    """A mock process with that name is already registered."""
