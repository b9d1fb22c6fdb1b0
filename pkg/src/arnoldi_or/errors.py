"""Exception hierarchy shared by all modules."""


class ArnoldiORError(Exception):
    """Base class for errors raised by this package."""


class NonFiniteInput(ArnoldiORError, ValueError):
    pass


class SingularMatrix(ArnoldiORError, ArithmeticError):
    pass


class RankDeficient(ArnoldiORError, ArithmeticError):
    pass


class DegeneratePair(ArnoldiORError, ValueError):
    """Both entries of a Givens pair are zero."""


class NotHermitian(ArnoldiORError, ValueError):
    pass


class NotPositiveDefinite(ArnoldiORError, ValueError):
    pass


class NoConvergence(ArnoldiORError, RuntimeError):
    pass


class ClusteredSpectrum(ArnoldiORError, ValueError):
    pass


class RepeatedPoles(ArnoldiORError, ValueError):
    pass


class PoleInsideDisk(ArnoldiORError, ValueError):
    pass


class PoleHit(ArnoldiORError, ValueError):
    pass


class PoleInRegion(ArnoldiORError, ValueError):
    pass


class PoleNotCovered(ArnoldiORError, ValueError):
    pass


class SingularShift(ArnoldiORError, ArithmeticError):
    pass


class ZeroVector(ArnoldiORError, ValueError):
    pass


class AlreadyBrokenDown(ArnoldiORError, RuntimeError):
    pass


class SingularProjectedDenominator(ArnoldiORError, ArithmeticError):
    """D(H_k) is singular, so the FA iterate does not exist at this step."""


class NotLinearSystem(ArnoldiORError, ValueError):
    pass


class NotNonincreasing(ArnoldiORError, ValueError):
    pass


class DependentVectors(ArnoldiORError, ValueError):
    pass


class ConfigError(ArnoldiORError, ValueError):
    """Invalid experiment configuration; ``line`` points into the JSON source."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
