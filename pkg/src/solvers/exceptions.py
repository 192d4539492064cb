from typing import Dict, Optional

from graphs.exceptions import BudgetExceededError


class SolverError(Exception):
    """Base class for solver failures."""
    pass

class FamilyTooLargeError(SolverError):
    """Raised when a set system has more members than the hitting-set limit."""
    pass

class UniverseTooLargeError(SolverError):
    """Raised when a set system's universe exceeds the enumeration limit."""
    pass

class InfeasibleError(SolverError):
    """Raised when a set system contains an empty member."""
    pass

class TooLargeError(SolverError):
    """Raised when an instance is too large for exhaustive search."""
    pass

class ParameterTooLargeError(SolverError):
    """Raised when a structural parameter exceeds the solver limit."""

    def __init__(self, message: str, parameters: Optional[Dict[str, int]] = None) -> None:
        super().__init__(message)
        self.parameters = dict(parameters or {})

class NoFeasibleGuessError(SolverError):
    """Raised when a parameterized search finishes without a certified candidate."""
    pass

class NotConsistentError(SolverError):
    """Raised when an operation requires a consistent subset and got another."""
    pass

class SolverTimeout(SolverError):
    """Raised when the deadline passes; carries the best verified solution so far."""

    def __init__(self, message: str, best=None) -> None:
        super().__init__(message)
        self.best = best
