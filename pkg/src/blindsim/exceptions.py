from __future__ import annotations


class BlindsimException(Exception):
    """Base class for all exceptions raised by blindsim."""

    message: str

    def __init__(self, message: str):
        self.message = message
        super().__init__(message)


class UserError(BlindsimException):
    """Exception raised when the API is used incorrectly, e.g. stepping a slot index twice."""


class ConfigError(BlindsimException):
    """Exception raised when a scenario configuration fails to parse or validate."""

    field: str | None
    """Dotted name of the offending key (``section.key``), when known."""

    line: int | None
    """1-based line in the config file, when the config came from a file."""

    detail: str
    """The message without its location prefix."""

    def __init__(self, message: str, field: str | None = None, line: int | None = None):
        self.detail = message
        self.field = field
        self.line = line
        location = ""
        if field is not None:
            location = f"{field}"
            if line is not None:
                location += f" (line {line})"
            location += ": "
        super().__init__(f"{location}{message}")


class UnbracketedBandError(BlindsimException):
    """Exception raised when a characterization power grid does not bracket the click band."""

    detector_id: str

    def __init__(self, detector_id: str, message: str):
        self.detector_id = detector_id
        super().__init__(f"detector {detector_id}: {message}")


class InsufficientDataError(BlindsimException):
    """Exception raised when a hypothesis test does not have the data it needs."""


class IncompleteProfileError(BlindsimException):
    """Exception raised when a threshold profile misses a detector or sample index."""


class DegenerateProfileError(BlindsimException):
    """Exception raised when a threshold profile makes a controllability ratio undefined."""
