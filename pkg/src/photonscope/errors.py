"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Bad user-facing input (parameters out of range, malformed config)."""


class EnumerationLimitError(ValidationError):
    """A requested configuration space exceeds the hard enumeration limits."""


class DimensionLimitError(ValidationError):
    """A matrix is larger than the exact-permanent routines support."""


class InternalConsistencyError(RuntimeError):
    """Two supposedly equivalent computation paths disagree beyond tolerance."""
