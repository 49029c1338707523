"""Exception types shared across the package."""


class DegenerateMatrixError(ValueError):
    """Matrix has (numerically) zero spectral radius or no nonzeros."""


class IllConditionedError(ValueError):
    """Ridge system is singular or too ill-conditioned to factorize."""


class DivergenceError(RuntimeError):
    """A state sequence left the finite range; carries the failing step."""

    def __init__(self, message, step):
        super().__init__(f"{message} (step {step})")
        self.step = step


class ConvergenceWarning(UserWarning):
    """An iterative routine hit its iteration cap before reaching tolerance."""
