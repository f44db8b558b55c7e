"""Exception types raised by the runtime."""


class ForkJoinError(RuntimeError):
    """Base class for all runtime errors."""


class ConfigConflictError(ForkJoinError):
    """The runtime is already started with a different configuration."""


class RuntimeStoppedError(ForkJoinError):
    """Operation rejected because the runtime has shut down (or is shutting down)."""


class OutsideTaskError(ForkJoinError):
    """Operation requires a task context but was called from plain code."""


class DoubleResumeError(ForkJoinError):
    """A wake token was resumed more than once."""


class LockOwnershipError(ForkJoinError):
    """Lock released by a non-owner, or released while not held."""


class LoopMismatchError(ForkJoinError):
    """Members of a team registered conflicting loop parameters."""


class OrderedViolationError(ForkJoinError):
    """Ordered region entered or exited out of protocol (duplicate or out-of-turn index)."""


class ChecksumMismatchError(ForkJoinError):
    """A benchmark kernel produced output differing from the serial reference."""
