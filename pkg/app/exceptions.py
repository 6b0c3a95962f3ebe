"""Exception classes for rctrack.

Every error raised on purpose by the toolkit derives from ``RCTrackError`` so
that the command-line runner can map it onto an exit code.
"""

from typing import Optional


class RCTrackError(Exception):
    """Base exception for all rctrack errors"""


class ConfigError(RCTrackError):
    """Raised when an experiment configuration cannot be loaded or validated."""


class NonFiniteStateError(RCTrackError):
    """Raised when the plant produces NaN/inf values."""

    def __init__(self, message: str, step_index: Optional[int] = None):
        super().__init__(message)
        self.step_index = step_index


class UnreachablePointError(RCTrackError, ValueError):
    """Raised when an end-effector position lies outside the reachable annulus."""

    def __init__(
        self, message: str, bound: Optional[str] = None, index: Optional[int] = None
    ):
        super().__init__(message)
        self.bound = bound
        self.index = index


class BridgeError(UnreachablePointError):
    """Raised when the bridge chord leaves the reachable workspace."""


class DegeneratePathError(RCTrackError, ValueError):
    """Raised when a reference path has zero spatial extent."""


class DegenerateReservoirError(RCTrackError):
    """Raised when a recurrent matrix draw has zero spectral radius."""


class UntrainedReadoutError(RCTrackError):
    """Raised when the readout is used before training."""


class ReadoutTrainingError(RCTrackError):
    """Raised when the regularized Gram matrix cannot be solved."""


class ControllerFormatError(RCTrackError):
    """Raised when a controller file is corrupt or has the wrong version."""

    def __init__(self, message: str, version: Optional[str] = None):
        super().__init__(message)
        self.version = version
