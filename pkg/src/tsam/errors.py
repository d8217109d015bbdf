"""Exception types shared across the package."""


class TsamError(Exception):
    """Base class for all package-specific errors."""


class NotPositiveDefinite(TsamError):
    """A matrix that must be symmetric positive definite is not."""


class DegenerateSeriesError(TsamError):
    """A series has zero variance (or too few points) for the requested statistic."""


class SolverFailure(TsamError):
    """An ODE trajectory left the admissible region (nonfinite or nonpositive state)."""


class TargetEvaluationError(TsamError):
    """A target density could not be evaluated; samplers treat this as log density -inf."""


class DataShapeError(TsamError):
    """Input arrays have inconsistent or invalid shapes."""


class SchemaError(TsamError):
    """A CSV file does not match the expected schema."""


class ParseError(TsamError):
    """A configuration file is not syntactically valid."""


class ValidationError(TsamError):
    """A configuration is syntactically valid but violates the schema.

    ``violations`` lists every problem found, not just the first.
    """

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))
