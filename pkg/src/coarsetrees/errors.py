"""Exception and warning types shared across the package."""


class CoarseError(Exception):
    """Base class for all package errors."""


class EmptySetError(CoarseError, ValueError):
    pass


class NotACoverError(CoarseError, ValueError):
    pass


class SizeLimitError(CoarseError):
    pass


class ScaleMismatchError(CoarseError, ValueError):
    pass


class SeedInvalidError(CoarseError, ValueError):
    pass


class ChainViolationError(CoarseError):
    """Two incomparable same-color supersets of one set were found."""

    def __init__(self, message, witnesses=()):
        super().__init__(message)
        self.witnesses = tuple(witnesses)


class NoCoveringSetError(CoarseError, LookupError):
    pass


class FormatError(CoarseError, ValueError):
    """A serialized artifact could not be parsed."""


class WindowExhausted(UserWarning):
    """A tower level needs a scale larger than the window diameter."""
