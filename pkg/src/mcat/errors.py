"""Exception types shared across the package."""


class McatError(Exception):
    """Base class for all package-specific errors."""


class DomainError(McatError):
    """Target point lies outside the inverse-retraction domain."""


class DegenerateError(McatError):
    """Input is degenerate (e.g. a Euclidean mean that is numerically zero)."""


class SingularError(McatError):
    """A linear system that should be solvable is singular."""


class NoDescentError(McatError):
    """Line search was handed a zero gradient."""


class AdaptationError(McatError):
    """Smoothing-parameter doubling exhausted its budget without acceptance."""


class PrecisionLimitStall(McatError):
    """The prox subproblem cannot move off its anchor at float resolution.

    Raised instead of doubling further: smaller subproblem decreases only
    get harder to resolve, so the iterate has converged as far as the
    arithmetic allows.
    """


class ConfigError(McatError, ValueError):
    """Invalid configuration or argument value."""


class ParseError(McatError, ValueError):
    """Malformed input file; carries the offending line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
