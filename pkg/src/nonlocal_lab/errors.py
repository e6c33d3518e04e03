"""Error types shared across the package."""


class NonlocalLabError(Exception):
    """Base class for all package errors."""


class DomainError(NonlocalLabError, ValueError):
    """Integration bounds or evaluation points outside the valid domain."""


class NonIntegrable(NonlocalLabError):
    """Quadrature estimates disagree too much, or the integrand is
    genuinely divergent at a singular endpoint."""


class MethodDomainMismatch(NonlocalLabError, ValueError):
    """Requested method is incompatible with the grid kind or the
    function's symmetry metadata."""


class GammaOutOfRange(NonlocalLabError, ValueError):
    pass


class AlphaOutOfRange(NonlocalLabError, ValueError):
    pass


class DeltaOutOfRange(NonlocalLabError, ValueError):
    pass


class CalibrationFailed(NonlocalLabError):
    """Least-squares calibration of a singular-integral constant did not
    reach the required residual."""


class DiagonalSingularity(NonlocalLabError, ValueError):
    """Kernel evaluated on its singular diagonal x == y."""


class HypothesisViolation(NonlocalLabError, ValueError):
    """Input function does not satisfy the hypotheses of the check
    (parity, monotonicity, vanishing at the origin, sign)."""


class NegativeInput(NonlocalLabError, ValueError):
    pass


class SearchFailed(NonlocalLabError):
    """A scan loop exhausted its budget without finding the required sign
    change; usually indicates a quadrature misconfiguration."""


class ParityError(NonlocalLabError, ValueError):
    pass


class InsufficientDecay(NonlocalLabError, ValueError):
    """Samples do not decay below the required threshold at the domain
    boundary."""


class CFLCollapse(NonlocalLabError):
    """Adaptive time step underflowed; treated as a numerical blow-up
    signal."""


class InsufficientSamples(NonlocalLabError, ValueError):
    pass
