"""Exception hierarchy shared across the package."""


class LoschmidtError(ValueError):
    """Base class for all domain errors raised by this package."""


class NotHermitian(LoschmidtError):
    pass


class NotPositive(LoschmidtError):
    pass


class NotUnitary(LoschmidtError):
    pass


class DimMismatch(LoschmidtError):
    pass


class RankDeficient(LoschmidtError):
    """A density matrix has an eigenvalue at or below the full-rank threshold."""


class NotClosed(LoschmidtError):
    pass


class GaplessPath(LoschmidtError):
    pass


class GridTooCoarse(LoschmidtError):
    pass


class DomainError(LoschmidtError):
    pass


class NoSignChange(LoschmidtError):
    pass
