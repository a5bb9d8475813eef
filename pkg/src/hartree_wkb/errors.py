"""Exception types raised across the package."""


class GridError(ValueError):
    """Invalid grid parameters or mismatched grids."""


class RepresentationError(ValueError):
    """A field was handed to an operation in the wrong representation."""


class NonFiniteError(FloatingPointError):
    """A multiplier, potential or field sample is NaN or infinite."""


class LatticeError(ValueError):
    """A carrier wavevector k/eps does not lie on the grid's reciprocal lattice."""


class KernelHypothesisError(ValueError):
    """Kernel multiplier cannot be sampled on the lattice (e.g. Coulomb at xi = 0)."""


class InstabilityError(RuntimeError):
    """Time-step refinement did not converge or L2 mass drifted."""


class QuadratureError(RuntimeError):
    """Phase quadrature failed to converge."""


class InsufficientPointsError(ValueError):
    """Too few usable points to fit a convergence rate."""
