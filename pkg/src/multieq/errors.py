"""Exception hierarchy.

``ModelError`` subclasses mean the input violates the model (bad network,
unknown nonlinearity); ``NumericalError`` subclasses mean a solver failed on
valid input. The CLI maps them to exit codes 2 and 3.
"""


class MultieqError(Exception):
    """Base class for all package errors."""


class ModelError(MultieqError, ValueError):
    """The supplied network or nonlinearity breaks a model assumption."""


class NegativeEntry(ModelError):
    def __init__(self, indices):
        self.indices = [tuple(int(k) for k in ij) for ij in indices]
        super().__init__(f"negative weights at {self.indices}")


class NonzeroDiagonal(ModelError):
    def __init__(self, indices):
        self.indices = [int(i) for i in indices]
        super().__init__(f"nonzero diagonal entries at {self.indices}")


class NotIrreducible(ModelError):
    def __init__(self, indices, reason="support digraph is not strongly connected"):
        self.indices = [int(i) for i in indices]
        super().__init__(f"{reason}; unreachable/isolated nodes {self.indices}")


class NotSymmetrizable(ModelError):
    def __init__(self, indices, reason):
        self.indices = [tuple(int(k) for k in ij) for ij in indices]
        self.reason = reason
        super().__init__(f"{reason} at {self.indices}")


class NotSimple(ModelError):
    """The second largest eigenvalue of H1 is repeated (or too close to a neighbour)."""


class UnknownKind(ModelError):
    pass


class NotIdenticalPsi(ModelError):
    pass


class NumericalError(MultieqError, RuntimeError):
    """A numerical routine failed on admissible input."""


class NoConvergence(NumericalError):
    def __init__(self, message, x=None, residual=None):
        self.x = x
        self.residual = residual
        super().__init__(message)


class SingularJacobian(NumericalError):
    pass


class StepFailure(NumericalError):
    pass


class InfeasibleAfterRetries(NumericalError):
    pass
