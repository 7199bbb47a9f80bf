"""Exception types shared across the toolkit."""

from __future__ import annotations


class TrackingError(Exception):
    """Base class for all toolkit errors."""


class DecodeError(TrackingError):
    """An image byte stream could not be parsed."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


class ConfigError(TrackingError):
    """Invalid, unknown, or out-of-range configuration."""


class ScenarioError(TrackingError):
    """Unknown builtin scenario or malformed scene description."""


class DegeneracyError(TrackingError):
    """Every particle weight collapsed to zero."""


class InitializationError(TrackingError):
    """The detector did not find the expected number of targets."""

    def __init__(self, found: int, expected: int):
        super().__init__(
            f"initialization expected {expected} target(s), detector found {found}"
        )
        self.found = found
        self.expected = expected


class EvalError(TrackingError):
    """Trajectories and ground truth cannot be compared."""
