from typing import Optional, Protocol, runtime_checkable

from schemas.instance import ColoredGraph, DistanceMatrix
from schemas.solution import Solution


@runtime_checkable
class MCSSolver(Protocol):
    """
    Protocol shared by the minimum consistent subset solvers.

    Solvers are constructed with their limits and reused across instances.
    """

    method_name: str

    def solve(
        self,
        g: ColoredGraph,
        dm: Optional[DistanceMatrix] = None,
        deadline: Optional[float] = None,
    ) -> Solution:
        """
        Compute a minimum consistent subset of ``g``.

        :param g: The instance.
        :param dm: Precomputed all-pairs distances; computed on demand when omitted.
        :param deadline: ``time.monotonic()`` value after which the search stops.
        :return: A verified solution.
        :raises ParameterTooLargeError: If the solver's structural parameter exceeds its limit.
        :raises SolverTimeout: If the deadline passes; carries the best verified solution so far.
        """
        pass
