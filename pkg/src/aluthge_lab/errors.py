"""Exception taxonomy shared across the package.

DomainError and its subclasses signal bad inputs (CLI exit code 2).
InternalConsistencyError signals disagreement between two independent
computations of the same quantity, which means a bug in this package,
never a mathematical outcome (CLI exit code 3).
"""


class DomainError(ValueError):
    """Parameter outside its mathematical domain."""


class InvalidWeightsError(DomainError):
    """Weight sequence or table with non-positive or non-finite entries."""


class WindowError(DomainError):
    """Evaluation window or truncation level too small for the request."""


class NonCommutingInputError(DomainError):
    """Weight data that fails the commutativity identity.

    Carries the worst offending lattice point and its residual.
    """

    def __init__(self, message, witness=None, residual=None):
        super().__init__(message)
        self.witness = witness
        self.residual = residual


class InfeasibleConstantError(DomainError):
    """Completion constant C not strictly above every squared row weight."""


class InternalConsistencyError(RuntimeError):
    """Two routes to the same quantity disagreed; indicates a package bug."""
