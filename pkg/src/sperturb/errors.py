"""Exception hierarchy shared by all subpackages."""


class SperturbError(Exception):
    """Base class for all errors raised by sperturb."""


class UnknownRegistryId(SperturbError, KeyError):
    pass


class NonPositiveReaction(SperturbError, ValueError):
    pass


class EpsilonOutOfRange(SperturbError, ValueError):
    pass


class BadN(SperturbError, ValueError):
    pass


class DomainError(SperturbError, ValueError):
    pass


class SingularSystem(SperturbError, ArithmeticError):
    pass


class UnsupportedData(SperturbError, ValueError):
    pass


class NonFinite(SperturbError, ArithmeticError):
    pass


class InsufficientData(SperturbError, ValueError):
    pass


class DimensionMismatch(SperturbError, ValueError):
    pass


class BadPartition(SperturbError, ValueError):
    pass


class POutOfRange(SperturbError, ValueError):
    pass


class ParseError(SperturbError, ValueError):
    pass


class EmptyTable(SperturbError, ValueError):
    pass
