"""Exception types raised by the solvers and the harness."""


class ExtPicardError(Exception):
    """Base class for all errors raised by this package."""


class InvalidArgumentError(ExtPicardError, ValueError):
    """Non-finite input, dimension mismatch or an out-of-range parameter."""


class DegenerateFitError(ExtPicardError, ValueError):
    """Least-squares design matrix is rank deficient (coincident abscissas)."""


class DivergenceError(ExtPicardError, ArithmeticError):
    """An iterate or a state blew up.

    ``iteration`` is the Picard iteration index (``None`` for one-step
    integrators) and ``segment`` the zero-based segment or step index.
    """

    def __init__(self, message, iteration=None, segment=None):
        super().__init__(message)
        self.iteration = iteration
        self.segment = segment

    def __str__(self):
        base = super().__str__()
        where = []
        if self.segment is not None:
            where.append(f"segment {self.segment}")
        if self.iteration is not None:
            where.append(f"iteration {self.iteration}")
        return f"{base} ({', '.join(where)})" if where else base


class UnsupportedOperationError(ExtPicardError, TypeError):
    """A right-hand side used a primitive the jet arithmetic cannot propagate."""


class RootNotFoundError(ExtPicardError, ArithmeticError):
    pass


class InsufficientRootsError(RootNotFoundError):
    pass


class ShootingFailureError(RootNotFoundError):
    pass


class ConfigError(ExtPicardError, ValueError):
    """Experiment configuration failed validation."""
