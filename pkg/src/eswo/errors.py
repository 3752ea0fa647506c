"""Exception types shared across the solvers, parsers and oracles."""


class EswoError(Exception):
    """Base class for every package-specific error."""


class InvalidConfig(EswoError):
    """Engine configuration failed validation."""


class ConstructionFailure(EswoError):
    """A construction step could not place a component.

    ``task`` carries the reconstruction task that failed (a piece of work
    for driver scheduling, a nurse for nurse scheduling), when known.
    """

    def __init__(self, message: str, task=None):
        super().__init__(message)
        self.task = task


class UncoverablePiece(ConstructionFailure):
    """No shift in the pool covers the requested piece of work."""


class NoFeasiblePattern(ConstructionFailure):
    """A nurse has no pattern available for assignment."""


class InvalidBounds(EswoError):
    """Membership bounds must satisfy max > min."""


class OutOfRange(EswoError):
    """Criterion value outside its legal domain."""


class NotInSchedule(EswoError):
    """Operation refers to a component that is not part of the schedule."""


class IncompleteSchedule(EswoError):
    """Objective requested for a schedule that is not complete."""


class ParseError(EswoError):
    """Instance file is malformed; carries the file path and line number."""

    def __init__(self, message: str, path=None, line=None):
        where = path if path is not None else "<input>"
        if line is not None:
            where = f"{where}:{line}"
        super().__init__(f"{where}: {message}")
        self.path = path
        self.line = line


class ValidationError(EswoError):
    """Instance data violates a model invariant."""


class InfeasibleSpec(EswoError):
    """Generator request cannot produce a valid instance."""


class TooLarge(EswoError):
    """Instance exceeds the exact solver's size limits."""


class Infeasible(EswoError):
    """No feasible solution exists."""
