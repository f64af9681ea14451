"""Exception hierarchy shared by all modules."""


class StarDecompError(Exception):
    """Base class for library errors."""


class UnknownAlgebra(StarDecompError, KeyError):
    pass


class NotAUnit(StarDecompError, ArithmeticError):
    pass


class ShapeError(StarDecompError, ValueError):
    pass


class AlgebraError(StarDecompError, ValueError):
    pass


class NumericalFailure(StarDecompError, ArithmeticError):
    pass


class ClusterCollision(NumericalFailure):
    pass


class IllConditioned(NumericalFailure):
    pass


class NegativeSpectrum(NumericalFailure):
    pass


class DecompositionFailed(StarDecompError):
    """Residuals of a projector family exceeded the tolerance.

    ``diagnostics`` carries the residual dictionary of the failed family.
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class SearchFailure(StarDecompError):
    """No intertwining unitary was found; ``best_residuals`` records how close we got."""

    def __init__(self, message, best_residuals=None, attempts=0):
        super().__init__(message)
        self.best_residuals = best_residuals or {}
        self.attempts = attempts


class BridgeError(StarDecompError, ValueError):
    pass


class CatalogMismatch(StarDecompError):
    def __init__(self, message, summary=None, oracle=None):
        super().__init__(message)
        self.summary = summary
        self.oracle = oracle
