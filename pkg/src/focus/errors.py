"""Exception classes shared across the package."""


class FocusError(Exception):
    """Base class for every error raised by this package."""


class DimensionError(FocusError):
    """Input has the wrong number of rows/columns for the operation."""


class EmptySetError(FocusError):
    """A training set is empty where at least one point is required."""


class NumericInputError(FocusError):
    """Input contains NaN or infinite entries."""


class ConfigError(FocusError):
    """Invalid parameter value or inconsistent configuration."""


class IndefiniteDenominatorError(FocusError):
    """The cushioned denominator matrix is not positive definite.

    ``pivot`` is the zero-based index of the Cholesky pivot that failed.
    """

    def __init__(self, pivot: int, message: str | None = None):
        self.pivot = pivot
        super().__init__(
            message or f"denominator matrix is not positive definite (pivot {pivot})"
        )


class DegenerateModelError(FocusError):
    """Every direction was marked for removal; the mapping would be empty."""


class ModelVersionError(FocusError):
    """Model file was written with an unsupported format version."""


class ModelCorruptError(FocusError):
    """Model file is malformed or fails its checksum."""


class ScorerError(FocusError):
    """Anomaly scorer cannot run on the given input."""


class MetricError(FocusError):
    """Evaluation metrics cannot be computed from the given scores/labels."""
