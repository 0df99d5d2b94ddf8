"""Exception types shared across the package."""


class PgToeplitzError(Exception):
    """Base class for all package errors."""


class ConfigError(PgToeplitzError, ValueError):
    """Invalid model or run configuration."""


class GapClosedError(PgToeplitzError):
    """A symbol that must be invertible is singular (or not certifiably invertible)."""


class GaplessLoopError(GapClosedError):
    """``det`` vanishes on a winding loop."""


class UnwrapError(PgToeplitzError):
    """Phase unwrapping did not converge within the sample budget."""


class CutoffTooSmallError(PgToeplitzError, ValueError):
    """A truncation cutoff is too small relative to the symbol bandwidth."""


class AmbiguousKernelError(PgToeplitzError):
    """Singular values (or eigenvalues) near the threshold are not separated."""


class NotStabilizedError(PgToeplitzError):
    """Kernel dimensions changed between cutoffs ``N`` and ``N + 2``."""


class Mod2InconsistencyError(PgToeplitzError):
    """Kernel parity varies over the momentum grid or between the two sides."""


class EquivarianceError(PgToeplitzError):
    """An edge symbol violates the glide constraint on its off-diagonal entry."""


class NonIntegerError(PgToeplitzError):
    """A quantity that must be an integer is not, within tolerance."""


class NonUnitaryError(PgToeplitzError, ValueError):
    """A unitary-valued symbol was required."""


class CorrespondenceError(PgToeplitzError):
    """Analytic and real-space edge counts disagree."""
