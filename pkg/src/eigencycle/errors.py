"""Exception types raised across the package."""


class EigencycleError(Exception):
    """Base class for all package errors."""


class DimensionError(EigencycleError, ValueError):
    pass


class InvalidState(EigencycleError, ValueError):
    """State is off the product of simplices by more than the clamp tolerance."""


class NoInteriorEquilibrium(EigencycleError):
    pass


class NumericalError(EigencycleError):
    pass


class ResidualTooLarge(NumericalError):
    def __init__(self, residual, tol):
        self.residual = float(residual)
        self.tol = float(tol)
        super().__init__(f"reconstruction residual {self.residual:.3e} exceeds {self.tol:.1e}")


class InsufficientData(EigencycleError, ValueError):
    pass


class StiffnessError(NumericalError):
    pass


class SymmetryError(EigencycleError, ValueError):
    pass


class SingularDesign(EigencycleError, ValueError):
    pass


class DegenerateInput(EigencycleError, ValueError):
    pass


class NotApplicable(EigencycleError):
    """A reproduction target does not apply to the given game."""


class FixtureError(EigencycleError):
    pass
