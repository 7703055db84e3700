"""Exception types raised across the package."""


class RealizabilityError(Exception):
    """Base class for every error raised by qphysreal."""


class InputError(RealizabilityError, ValueError):
    """Malformed user input (bad shapes, odd dimensions, bad parameters)."""


class OddDimension(InputError):
    pass


class DimensionMismatch(InputError):
    pass


class NonSquareInputOutput(InputError):
    pass


class InvalidParameter(InputError):
    pass


class NotHermitian(InputError):
    pass


class NotSkewSymmetric(InputError):
    pass


class NumericalError(RealizabilityError, ArithmeticError):
    """A numerical precondition failed on otherwise well-formed input."""


class NotHurwitz(NumericalError):
    pass


class NotPSD(NumericalError):
    pass


class RankMismatch(NumericalError):
    pass


class NoStabilizingSolution(NumericalError):
    pass


class SingularV2(NumericalError):
    pass


class SingularR2(NumericalError):
    pass


class NumericalRankAmbiguity(NumericalError):
    pass


class ImaginaryAxisEigenvalue(NumericalError):
    pass


class SingularX1(NumericalError):
    pass


class SingularX(NumericalError):
    pass


class NonRealResidue(NumericalError):
    pass


class SingularResolvent(NumericalError):
    pass


class AllCandidatesRejected(NumericalError):
    pass


class NotRealizableWithoutExtraNoise(NumericalError):
    """The transfer-function route failed; ``cause`` holds the underlying error."""

    def __init__(self, cause):
        self.cause = cause
        super().__init__(f"{type(cause).__name__}: {cause}")

    @property
    def cause_name(self):
        return type(self.cause).__name__
