"""Exception hierarchy. Every engine error carries the CLI exit code it maps to."""


class BorelError(Exception):
    exit_code = 70


class InvalidRingError(BorelError, ValueError):
    exit_code = 3


class BcxSyntaxError(BorelError, ValueError):
    exit_code = 4

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ValidationError(BorelError):
    """Raised when a complex fails admissibility; ``report`` lists the violations."""

    exit_code = 5

    def __init__(self, report, message=None):
        self.report = report
        super().__init__(message or report.summary())


class WedgeError(BorelError):
    exit_code = 6


class AttachmentNotClosedError(BorelError):
    exit_code = 7


class HypothesisViolation(BorelError, ValueError):
    exit_code = 8


class SmashModelError(ValidationError):
    exit_code = 9


class FixedSphereMismatch(BorelError):
    exit_code = 10


class CochainMapError(ValidationError):
    exit_code = 11


class ExperimentalModuleError(BorelError):
    exit_code = 12


class ScanBoundError(BorelError, ValueError):
    exit_code = 13


class InternalInvariantError(BorelError, AssertionError):
    exit_code = 14
