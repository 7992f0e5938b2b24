"""Exception types raised across the package.

Split into two families so the CLI can map them to stable exit codes:
input/parse problems (exit 2) and estimation/statistical problems (exit 3).
"""


class NetDelayError(Exception):
    """Base class for all package errors."""


class InputError(NetDelayError):
    """Bad input data or unusable parameters (CLI exit code 2)."""


class EstimationError(NetDelayError):
    """Estimation or statistical procedure cannot proceed (CLI exit code 3)."""


# --- trace / parsing -------------------------------------------------------

class EmptyTrace(InputError):
    pass


class UnrecognizedFormat(InputError):
    pass


class AmbiguousFormat(UnrecognizedFormat):
    """Input matches more than one trace format; detection refuses to guess."""


class MissingSize(InputError):
    pass


class SchemaMismatch(InputError):
    pass


class RowError(InputError):
    def __init__(self, line_number, message):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


class ReportParseError(InputError):
    pass


# --- model estimation ------------------------------------------------------

class SizeConflict(EstimationError):
    pass


class NonPositiveSlope(EstimationError):
    pass


class DegenerateSizes(EstimationError):
    pass


class NegativeResult(EstimationError):
    pass


class NonPositiveScale(EstimationError):
    pass


class TooFewSamples(EstimationError):
    pass


# --- distributions / statistics -------------------------------------------

class InvalidProbability(NetDelayError):
    pass


class DegenerateVariance(EstimationError):
    pass


class ZeroExpected(EstimationError):
    pass


class TraceTooShort(EstimationError):
    pass


class EmptySchedule(InputError):
    pass
