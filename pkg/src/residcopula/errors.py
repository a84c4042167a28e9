"""Exception hierarchy.

Input problems derive from :class:`InputError` (CLI exit code 1); numerical
breakdowns of an estimator derive from :class:`EstimationError` (exit code 2).
"""


class ResidCopulaError(ValueError):
    """Base class for all package errors."""


class InputError(ResidCopulaError):
    """Malformed or invalid user input."""


class EstimationError(ResidCopulaError):
    """An estimator or solver failed on otherwise valid input."""


# dataset
class MissingColumn(InputError):
    pass


class NonNumericCell(InputError):
    def __init__(self, row, col, value=None):
        self.row = row
        self.col = col
        super().__init__(f"non-numeric cell at row {row}, column {col!r}: {value!r}")


class RowCountTooSmall(InputError):
    pass


class NonFiniteValue(InputError):
    pass


class ShapeMismatch(InputError):
    pass


# marginals
class RankDeficientDesign(InputError):
    pass


class NonPositiveResponseForLog(InputError):
    pass


class QuantileArgumentOutOfRange(InputError):
    pass


class UnsupportedLaw(InputError):
    pass


class UnknownMargin(InputError):
    pass


# ranks
class TiesDetected(InputError):
    def __init__(self, count, column=None):
        self.count = count
        self.column = column
        where = "" if column is None else f" in column {column}"
        super().__init__(f"{count} tied value(s){where}; pseudo-observations need continuous data")


class LengthMismatch(InputError):
    pass


# copulas
class UnknownFamily(InputError):
    pass


class ParameterOutOfDomain(EstimationError):
    pass


class PointOnBoundary(InputError):
    pass


class TauOutOfRange(EstimationError):
    pass


# estimate
class ConfigurationError(InputError):
    pass


class NoBracketFound(EstimationError):
    pass


class MaxIterations(EstimationError):
    pass


class AllPointsTrimmed(EstimationError):
    pass


class SingularInformation(EstimationError):
    pass


# montecarlo
class InvalidScenario(InputError):
    pass


class EmptyInput(InputError):
    pass


class ScenarioUnstable(EstimationError):
    def __init__(self, failures, reps, rows=None):
        self.failures = dict(failures)
        self.reps = reps
        self.rows = rows or []
        tally = ", ".join(f"{k}: {v}/{reps} failed" for k, v in self.failures.items())
        super().__init__(f"fewer than 95% of replications converged ({tally})")
