"""Exception types raised across the package."""


class ChlabError(Exception):
    """Base class for all package errors."""


class GridMismatch(ChlabError, ValueError):
    pass


class IntegerPointError(ChlabError, ValueError):
    """Derivative of the periodic Green's function requested at an integer."""


class SizeExceeded(ChlabError, ValueError):
    pass


class DomainError(ChlabError, ValueError):
    pass


class PositivityViolation(ChlabError, ValueError):
    def __init__(self, witness, value):
        self.witness = tuple(float(w) for w in witness)
        self.value = float(value)
        super().__init__(f"h{self.witness} = {self.value!r} is not positive")


class NonFiniteState(ChlabError, FloatingPointError):
    def __init__(self, message, trajectory=None):
        super().__init__(message)
        self.trajectory = trajectory


class CollisionError(ChlabError, RuntimeError):
    def __init__(self, message, state=None, t=None, history=None):
        super().__init__(message)
        self.state = state
        self.t = t
        self.history = history


class DegenerateWindow(ChlabError, ValueError):
    pass


class IntervalOutsideDomain(ChlabError, ValueError):
    pass


class ConfigError(ChlabError, ValueError):
    pass
