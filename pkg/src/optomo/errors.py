"""Exception and warning types shared across the package."""


class InputError(ValueError):
    """Invalid input: malformed state/grid/query, or data missing for a request."""


class ExtrapolationError(InputError):
    """A query point falls outside the stored grid."""


class NumericalError(RuntimeError):
    """A numerical procedure failed to reach its accuracy target."""


class QuadratureError(NumericalError):
    """Adaptive quadrature did not converge within its refinement cap."""


class ResolutionError(NumericalError):
    """A stored grid is too coarse for the requested evaluation."""


class TruncationWarning(UserWarning):
    """A grid window covers less than the nominal spread of a density row."""
