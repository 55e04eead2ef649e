"""Exception hierarchy; the CLI maps each class to an exit code."""


class HitchinError(Exception):
    """Base class."""


class LatticeError(HitchinError, ValueError):
    def __init__(self, message, *, vector=None):
        super().__init__(message)
        self.vector = vector


class RootDatumError(HitchinError, ValueError):
    pass


class CoverError(HitchinError, ValueError):
    """Malformed cover description."""


class ValidationError(HitchinError):
    """A cover fails the relation, surjectivity or genericity checks."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class InfeasibleCover(HitchinError):
    pass


class GateError(HitchinError):
    """An internal consistency gate failed: the implementation disagrees with itself."""

    def __init__(self, message, details=None):
        super().__init__(message)
        self.details = details or {}


class CapExceeded(HitchinError):
    pass
