"""Exception hierarchy."""


class HoroError(ValueError):
    """Base class for all errors raised by horopack."""


class ZeroVector(HoroError):
    pass


class NotProper(HoroError):
    pass


class NotIdeal(HoroError):
    pass


class DomainError(HoroError):
    pass


class DegeneratePlane(HoroError):
    pass


class NotIsometry(HoroError):
    pass


class FootAtInfinity(HoroError):
    pass


class NoIntersection(HoroError):
    pass


class DegenerateTriangle(HoroError):
    pass


class NoTangency(HoroError):
    pass


class InvalidConfiguration(HoroError):
    """A horoball configuration violates a packing constraint."""

    def __init__(self, message, constraint=None):
        super().__init__(message)
        self.constraint = constraint


class NonConvergence(HoroError):
    pass


class UnknownDecomposition(HoroError):
    pass


class ParseError(HoroError):
    def __init__(self, message, location=None):
        if location:
            message = f"{location}: {message}"
        super().__init__(message)
        self.location = location


class ValidationError(HoroError):
    def __init__(self, message, entry=None, check=None):
        super().__init__(message)
        self.entry = entry
        self.check = check


class UnknownSymbol(HoroError, KeyError):
    def __str__(self):
        return ValueError.__str__(self)
