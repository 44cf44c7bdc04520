# cutloci/errors.py
"""Exception types raised by the numerical kernels and geometry engines."""


class CutLociError(Exception):
    """Base class for all package errors."""


# ---- matrix-function kernels -------------------------------------------------

class NotHermitian(CutLociError):
    """Input matrix is not symmetric/Hermitian within tolerance."""


class NegativeSpectrum(CutLociError):
    """A nominally PSD matrix has an eigenvalue below the hard floor."""


class SpectrumViolation(CutLociError):
    """Principal logarithm requested for a matrix with spectrum outside the
    open right half-plane (or non-positive eigenvalue on the eigen path)."""


class NoConvergence(CutLociError):
    """Iterative series failed to reach tolerance within its term cap."""


class SingularSylvester(CutLociError):
    """Sylvester relation for the square-root derivative is singular."""


class NearSingular(CutLociError):
    """Matrix too close to singular for the requested operation."""


# ---- manifolds ---------------------------------------------------------------

class UnsupportedGeodesic(CutLociError):
    """Matrix-group geodesic requested outside the supported families."""


class UnsupportedDistance(CutLociError):
    """Point-to-point distance is not available on this manifold."""


class BaseMismatch(CutLociError):
    """Tangent vectors do not share a base point."""


# ---- submanifolds ------------------------------------------------------------

class UnsupportedAmbient(CutLociError):
    """Submanifold descriptor paired with the wrong ambient manifold."""


class QuarticSolveFailure(CutLociError):
    """Ellipse foot-point quartic root could not be bracketed."""


class NotOnSubmanifold(CutLociError):
    """Base point is not on the submanifold within tolerance."""


# ---- cut engine --------------------------------------------------------------

class OracleFailure(CutLociError):
    """Distance oracle failed at a probe point."""


class OnCutLocus(CutLociError):
    """Flow operation requested at a point with ambiguous nearest point."""


class OnSubmanifold(CutLociError):
    """Flow operation requested at a point of the submanifold itself."""


class NoCutInRange(CutLociError):
    """No cut point exists along the geodesic within the search horizon."""


# ---- group actions -----------------------------------------------------------

class MembershipViolation(CutLociError):
    """Matrix fails the defining relation of the indefinite unitary group."""


class LogSpectrumViolation(CutLociError):
    """Gram matrix has unusable spectrum for the principal logarithm."""


class ActionMismatch(CutLociError):
    """Quotient operation mixing points of different group actions."""


class NotInvariant(CutLociError):
    """Submanifold is not invariant under the given group action."""


class UnsupportedRegime(CutLociError):
    """Verification requested outside the proven parameter ranges."""
