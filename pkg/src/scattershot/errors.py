"""Error categories raised across the package.

Each class maps to one machine-readable category used by the CLI exit
handling, so callers can branch on failure kind without parsing messages.
"""


class ScattershotError(ValueError):
    """Base class for all package errors."""

    category = "error"


class InvalidDimensionError(ScattershotError):
    category = "invalid-dimension"


class InvalidConfigurationError(ScattershotError):
    category = "invalid-configuration"


class OracleScaleExceededError(ScattershotError):
    category = "oracle-scale-exceeded"


class InstanceTooLargeError(ScattershotError):
    category = "instance-too-large"


class InvalidDistributionError(ScattershotError):
    category = "invalid-distribution"


class InvalidComparisonError(ScattershotError):
    category = "invalid-comparison"


class DegenerateHypothesisError(ScattershotError):
    category = "degenerate-hypothesis"


class InsufficientDataError(ScattershotError):
    category = "insufficient-data"
