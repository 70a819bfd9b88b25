"""Exception hierarchy shared by every polyprof module."""


class PolyprofError(Exception):
    """Base class for all polyprof errors."""


class InvalidInput(PolyprofError):
    """Malformed user input (maps to CLI exit code 2)."""


class NumericalFailure(PolyprofError):
    """A geometric computation failed on valid input (maps to CLI exit code 3)."""


class DimMismatch(InvalidInput):
    pass


class ParseError(InvalidInput):
    pass


class BadArch(InvalidInput):
    pass


class TooLarge(InvalidInput):
    pass


class DegeneratePoints(InvalidInput):
    pass


class UnknownSetting(InvalidInput):
    pass


class NotInterior(InvalidInput):
    pass


class EmptyProfile(InvalidInput):
    pass


class Infeasible(NumericalFailure):
    pass


class Unbounded(NumericalFailure):
    pass


class Degenerate(NumericalFailure):
    """The polytope is empty or lower-dimensional."""


class DegenerateHull(Degenerate):
    """A point set whose affine hull is not full-dimensional."""
