"""Exception hierarchy shared by the geometry core and the CLI.

Library code raises these; the CLI maps them onto exit codes.
Validation defects are returned as data and never raised.
"""
from typing import Optional, Sequence


class PLConvexError(Exception):
    """Base class for every error raised by plconvex."""

    exit_code: int = 2


# ===== exact_geometry =====

class DimensionMismatch(PLConvexError):
    """Vectors of different lengths were combined."""


class Degenerate(PLConvexError):
    """Input points are affinely (or linearly) dependent where independence is required."""


class ZeroVector(PLConvexError):
    """A spherical point was built from the zero vector."""


# ===== surface_model =====

class NotPseudomanifold(PLConvexError):
    """Some ridge is shared by more than two facets."""


class FaceNotFound(PLConvexError):
    """The requested vertex set is not a face of any facet."""


class DegenerateStar(PLConvexError):
    """Projecting a star cell into a link collapsed its dimension."""


class NonGenericProbe(PLConvexError):
    """No generic probe ray was found within the resampling budget."""


# ===== local_convexity =====

class BoundaryRidge(PLConvexError):
    """A ridge with a single incident facet was classified as a closed ridge."""


class NonOrientableLocally(PLConvexError):
    """No co-orientation makes every ridge convex.

    Doubles as a local-convexity failure certificate.
    """

    exit_code = 1

    def __init__(self, message: str, ridge: Optional[Sequence[int]] = None,
                 facets: Optional[Sequence[int]] = None):
        super().__init__(message)
        self.ridge = tuple(ridge) if ridge is not None else None
        self.facets = tuple(facets) if facets is not None else None


class HullFailure(PLConvexError):
    """The star hull is degenerate."""


class InternalInconsistency(PLConvexError):
    """A verification failed that the convexity theorems rule out.

    Means a checker bug or an invalid input that slipped past validation.
    """

    exit_code = 4


# ===== global_verdict =====

class Unsupported(PLConvexError):
    """The input lies outside the range where a global theorem applies."""

    exit_code = 3


class DimensionTooLow(Unsupported):
    """Global theorems need ambient dimension n >= 3."""


class DegenerateSection(PLConvexError):
    """The lineality space is the whole space, so there is no generatrix."""


class InputInsideS(PLConvexError):
    """A probe endpoint lies in the open cone of the convex set."""


# ===== cli =====

class BadParams(PLConvexError):
    """Generator parameters are out of range."""


class SurfaceFileError(PLConvexError):
    """Base class for surface-file errors; carries a 1-based position."""

    def __init__(self, message: str, line: int = 0, col: int = 0):
        super().__init__(f"{message} (line {line}, col {col})")
        self.line = line
        self.col = col


class Syntax(SurfaceFileError):
    """Malformed surface file."""


class BadIndex(SurfaceFileError):
    """A facet refers to a vertex index out of range."""


class BadRational(SurfaceFileError):
    """A coordinate is not a valid rational literal."""
