"""Exception hierarchy shared by every module."""


class CFFError(Exception):
    """Base class for all library errors."""


class NotHermitian(CFFError):
    pass


class NotPositive(CFFError):
    pass


class DecompositionFailure(CFFError):
    pass


class ZeroSubspace(CFFError):
    pass


class DimensionMismatch(CFFError):
    pass


class NotInvertible(CFFError):
    pass


class PositivityViolated(CFFError):
    """A control product ``C* pi_i C'`` is not Hermitian PSD for some indices."""

    def __init__(self, indices, message=None):
        self.indices = tuple(int(i) for i in indices)
        if message is None:
            message = f"C* pi_i C' is not positive for indices {list(self.indices)}"
        super().__init__(message)


class EmptyRemainder(CFFError):
    pass


class GenerationFailure(CFFError):
    pass


class ParseError(CFFError):
    """Malformed configuration input; ``location`` is ``line:col`` or a field path."""

    def __init__(self, message, location=None):
        self.location = location
        if location is not None:
            message = f"{location}: {message}"
        super().__init__(message)


class ValidationError(CFFError):
    def __init__(self, message, field=None):
        self.field = field
        if field is not None:
            message = f"{field}: {message}"
        super().__init__(message)
