"""Exception hierarchy shared by all modules."""


class AnisoRTError(Exception):
    """Base class for every error raised by this package."""


class DegenerateSimplex(AnisoRTError, ValueError):
    """Simplex volume is below the scale-invariant tolerance."""


class NoAdmissibleLabeling(AnisoRTError):
    """No vertex labelling satisfies the canonical-decomposition conditions."""


class UnsupportedDegree(AnisoRTError, ValueError):
    pass


class BadFaceIndex(AnisoRTError, IndexError):
    pass


class UnsupportedOrder(AnisoRTError, ValueError):
    """Requested derivative order exceeds what a field provides."""


class UnisolvenceFailure(AnisoRTError):
    """Moment matrix is numerically singular."""


class Assumption1Violated(AnisoRTError):
    """Tetrahedron fails |s22| <= M alpha2 t1 / alpha3 for the given M."""


class WrongElementType(AnisoRTError, ValueError):
    """Estimate requested for an element type it does not cover."""


class ParseError(AnisoRTError, ValueError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class IndexOutOfRange(AnisoRTError, IndexError):
    pass


class DegenerateElement(AnisoRTError, ValueError):
    pass


class BadSpec(AnisoRTError, ValueError):
    pass
