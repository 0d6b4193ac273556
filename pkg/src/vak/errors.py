"""Exception types shared by every module in the toolkit."""


class ToolkitError(Exception):
    """Base class for all toolkit errors."""


class EmptyInput(ToolkitError):
    """An operation received an empty sequence where data is required."""


class InvalidValue(ToolkitError):
    """A value is outside its documented domain (non-finite, wrong range, ...)."""


class EmptyCalibration(ToolkitError):
    """A calibrator was asked to fit on an empty calibration set."""


class InvalidMultiprobability(ToolkitError):
    """A (p0, p1) pair violates 0 <= p0 <= p1 <= 1."""


class InvalidFraction(ToolkitError):
    """A split fraction is outside the open interval (0, 1)."""


class MissingTarget(ToolkitError):
    """A degree evaluation requires a real-valued target on every record."""


class DegenerateTargets(ToolkitError):
    """Degree targets have zero variance, so R^2 is undefined."""


class MissingLabels(ToolkitError):
    """Labels were required but at least one row has none."""


class DuplicateId(ToolkitError):
    """Two rows in one score file share an id."""


class ParseError(ToolkitError):
    """A score file failed to parse; carries the offending line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
