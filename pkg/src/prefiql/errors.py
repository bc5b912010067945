"""Exception types shared across the package."""


class ContractViolation(ValueError):
    """An operation was called with arguments that violate its contract."""


class ConfigError(ValueError):
    """A pipeline configuration failed validation."""


class DatasetCorruption(RuntimeError):
    """Stored dataset bytes do not match their manifest."""


class FormatVersionError(RuntimeError):
    """A persisted artifact declares an unknown format version."""


class InsufficientPairs(ValueError):
    """Not enough valid index pairs exist to satisfy a sampling request."""


class NonFiniteLoss(ArithmeticError):
    """A training loss evaluated to NaN or inf.

    Carries the index of the offending batch row when it can be attributed.
    """

    def __init__(self, message: str, batch_index: int | None = None):
        super().__init__(message)
        self.batch_index = batch_index


class TransportError(RuntimeError):
    """An HTTP request failed after exhausting its retry budget.

    ``attempts`` holds one short description per attempt, in order.
    """

    def __init__(self, message: str, attempts: list[str] | None = None):
        super().__init__(message)
        self.attempts = attempts or []


class NonRetryableHTTPError(RuntimeError):
    """The server answered with a 4xx status that retrying cannot fix."""

    def __init__(self, message: str, status: int):
        super().__init__(message)
        self.status = status


class LabelParseError(RuntimeError):
    """No preference token could be extracted from a model response."""


class StageError(RuntimeError):
    """A pipeline stage failed; partial artifacts remain on disk."""

    def __init__(self, stage: str, cause: BaseException):
        super().__init__(f"stage '{stage}' failed: {cause}")
        self.stage = stage
        self.cause = cause
