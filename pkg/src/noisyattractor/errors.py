"""Exception hierarchy shared by all modules."""


class AttractorError(Exception):
    """Base class for every error raised by this package."""


class InputError(AttractorError, ValueError):
    """An argument has the wrong shape, is non-finite or out of range."""


class SingularMatrixError(AttractorError):
    """The linear map is not invertible at the configured threshold."""


class SpectralGateError(AttractorError):
    """The spectral radius is not below one, so no bounded attractor exists."""

    def __init__(self, spectral_radius):
        self.spectral_radius = float(spectral_radius)
        super().__init__(
            f"spectral radius {self.spectral_radius:.12g} >= 1; "
            "no bounded attractor exists"
        )


class NonConvergenceError(AttractorError):
    """The series could not be certified within the iteration cap."""

    def __init__(self, msg, last_residual):
        super().__init__(msg)
        self.last_residual = float(last_residual)


class DegenerateFitError(AttractorError):
    """A conic fit was requested on a degenerate point set."""


class DivergenceError(AttractorError):
    """A simulated trajectory produced a non-finite state."""

    def __init__(self, step):
        self.step = int(step)
        super().__init__(f"non-finite state at step {self.step}")
