"""Exception hierarchy shared by every gradstl module."""


class GradStlError(Exception):
    """Base class for all errors raised by gradstl."""


class DomainError(GradStlError, ArithmeticError):
    """Division by zero, square root of a negative, or a non-differentiable point."""


class UnboundVariable(GradStlError, LookupError):
    """An expression refers to a variable the sample does not provide."""


class ParseError(GradStlError, ValueError):
    """A signal file contains a malformed row or number."""


class ValidationError(GradStlError, ValueError):
    """Data parsed correctly but violates a structural invariant."""


class FormulaSyntaxError(GradStlError, ValueError):
    """Formula or expression text does not follow the grammar."""

    def __init__(self, message, position=None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class UnknownVariable(FormulaSyntaxError):
    """An identifier in formula text is not one of the signal's variables."""


class InvalidInterval(FormulaSyntaxError):
    """A user-written temporal window violates 0 <= x <= y."""


class EmptyWindow(GradStlError, ValueError):
    """A min/max in the set-based robustness ranges over no samples."""


class NonPositiveGamma(GradStlError, ValueError):
    """Derivatives of the smooth robustness need gamma > 0."""


class NonFiniteGradient(GradStlError, FloatingPointError):
    """Optimization produced a NaN or infinite gradient."""

    def __init__(self, step):
        self.step = step
        super().__init__(f"non-finite gradient at step {step}")


class ConfigError(GradStlError, ValueError):
    """A scenario configuration entry is missing or malformed."""

    def __init__(self, key, message):
        self.key = key
        super().__init__(f"{key}: {message}")
