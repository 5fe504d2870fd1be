"""Exception hierarchy shared across the engine."""


class RelsvError(Exception):
    """Base class for all engine errors."""


class StructuralError(RelsvError):
    """Operands are structurally incompatible (e.g. mismatched truncation)."""


class UnsupportedParameterError(RelsvError):
    """A Chern-polynomial parameter is not a single Laurent monomial."""


class LimitDoesNotExistError(RelsvError):
    """A negative power of t survives; the non-equivariant limit is undefined."""


class RegimeError(RelsvError):
    """An operation was called outside the (g, l) regime it is defined for."""


class BoundExceededError(RelsvError):
    """A configured enumeration or table-size bound would be exceeded."""


class InternalConsistencyError(RelsvError):
    """Two derivations of the same quantity disagree; indicates a bug."""


class CalibrationError(RelsvError):
    """No normalization of the stated shape fits the calibration points."""


class IncompleteTableError(RelsvError):
    """An intersection table is missing entries required by the evaluation."""


class SolveRankError(RelsvError):
    """The sample set does not determine the intersection table (rank deficit)."""


class SolveInconsistentError(RelsvError):
    """The linear system from the oracle values has no exact solution."""
