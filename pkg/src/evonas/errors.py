"""Exception types raised across the package."""


class EvonasError(Exception):
    """Base class for all package errors."""


class MalformedEncoding(EvonasError, ValueError):
    pass


class SpaceMismatch(EvonasError, ValueError):
    pass


class InvalidGenome(EvonasError, ValueError):
    pass


class NonMonotoneEpoch(EvonasError, ValueError):
    pass


class EmptyHistory(EvonasError, ValueError):
    pass


class InsufficientHistory(EvonasError, ValueError):
    pass


class ShapeMismatch(EvonasError, ValueError):
    pass


class BadK(EvonasError, ValueError):
    pass


class NonFiniteLoss(EvonasError, FloatingPointError):
    pass


class ConfigError(EvonasError, ValueError):
    pass


class SeedMismatch(EvonasError, ValueError):
    pass


class OutOfRange(EvonasError, IndexError):
    pass
