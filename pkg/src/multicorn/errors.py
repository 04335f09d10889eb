"""Exception types shared across the package.

Numeric routines raise specific subclasses of :class:`MulticornError` so
callers (and the CLI) can distinguish usage errors from numerical failures.
"""


class MulticornError(Exception):
    """Base class for all package-specific errors."""


class WrongPeriodClass(MulticornError):
    """Angle does not have the period class required by the operation."""


class NotDisjoint(MulticornError):
    """Unlinkedness is only defined for disjoint angle sets."""


class FixedAngle(MulticornError):
    """Operation undefined at the fixed angles j/(d+1)."""


class NotEscaping(MulticornError):
    """Point has bounded orbit; exterior coordinates are undefined."""


class BranchLost(MulticornError):
    """Root-branch continuation from infinity failed."""


class NewtonDiverged(MulticornError):
    """Newton continuation step was rejected too many times."""


class JacobianSingular(MulticornError):
    """Finite-difference Jacobian is numerically singular."""


class NoConvergence(MulticornError):
    """Iterative solver did not reach its tolerance."""


class NotParabolic(MulticornError):
    """No parabolic point of the requested period was found nearby."""


class CuspDetected(MulticornError):
    """Parabolic point has a degenerate (double-petal) structure."""


class OutsidePetal(MulticornError):
    """Point cannot be iterated into the chart's petal."""


class InconsistentKappa(MulticornError):
    """Half-return offset varies across samples beyond tolerance."""


class HeightOutOfRange(MulticornError):
    """Requested critical orbit height is outside the configured bound."""


class RayMissesPetal(MulticornError):
    """Traced ray has no samples inside the repelling petal."""


class NoTransit(MulticornError):
    """Orbit never crossed the gate to the outgoing side."""


class QuadratureNotConverged(MulticornError):
    """Contour integral did not stabilise under refinement."""


class OtherFixedPointEnclosed(MulticornError):
    """Integration contour encloses extra fixed points."""


class TailTooShort(MulticornError):
    """Not enough trace samples below the cutoff potential."""
