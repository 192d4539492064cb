import logging
import os
import time
from itertools import combinations
from typing import Iterator, List, Optional, Tuple

import numpy as np

from graphs.core import all_pairs_distances, consistency_mask
from schemas.instance import ColoredGraph, DistanceMatrix
from schemas.solution import Solution
from .exceptions import SolverTimeout, TooLargeError

logger = logging.getLogger(__name__)

ORACLE_LIMIT = 20
ENUMERATE_LIMIT = 16

_DEADLINE_STRIDE = 4096


def single_color_solution(g: ColoredGraph, method: str) -> Optional[Solution]:
    """Any one vertex is consistent on a monochromatic graph; None when c > 1."""
    if g.c != 1:
        return None
    return Solution(vertices=(0,), size=1, method=method, verified=True)


def _consistent_subsets_of_size(g: ColoredGraph, dm: DistanceMatrix, size: int,
                                deadline: Optional[float]) -> Iterator[Tuple[int, ...]]:
    colors = g.colors_array()
    color_bits = [1 << (color - 1) for color in g.coloring]
    all_colors = (1 << g.c) - 1
    for count, candidate in enumerate(combinations(range(g.n), size)):
        if deadline is not None and count % _DEADLINE_STRIDE == 0 and time.monotonic() > deadline:
            raise SolverTimeout(f"oracle search stopped at subsets of size {size}")
        seen = 0
        for v in candidate:
            seen |= color_bits[v]
        if seen != all_colors:
            continue
        if consistency_mask(dm.dist, colors, np.fromiter(candidate, dtype=np.int64, count=size)).all():
            yield candidate


def brute_force_mcs(g: ColoredGraph, dm: Optional[DistanceMatrix] = None, limit: int = ORACLE_LIMIT,
                    deadline: Optional[float] = None) -> Solution:
    """
    Exhaustive minimum consistent subset.

    Sizes are scanned upward from c; within a size, subsets are tried in lexicographic
    order and the first consistent one is returned. Subsets missing a color are skipped.

    :raises TooLargeError: if ``g`` has more than ``limit`` vertices.
    :raises SolverTimeout: if the deadline passes.
    """
    if g.n > limit:
        raise TooLargeError(f"oracle accepts at most {limit} vertices, instance has {g.n}")
    trivial = single_color_solution(g, "oracle")
    if trivial is not None:
        return trivial

    dm = dm or all_pairs_distances(g)
    explored = 0
    for size in range(g.c, g.n + 1):
        for candidate in _consistent_subsets_of_size(g, dm, size, deadline):
            logger.info(f"Oracle found a consistent subset of size {size}")
            return Solution(vertices=candidate, size=size, method="oracle", verified=True, explored=explored)
        explored += 1
    # the full vertex set is always consistent
    raise AssertionError("no consistent subset found")


def enumerate_optimal_mcs(g: ColoredGraph, dm: Optional[DistanceMatrix] = None,
                          limit: int = ENUMERATE_LIMIT) -> List[Solution]:
    """Every consistent subset of minimum size, in lexicographic order."""
    if g.n > limit:
        raise TooLargeError(f"optimal enumeration accepts at most {limit} vertices, instance has {g.n}")
    dm = dm or all_pairs_distances(g)
    for size in range(g.c, g.n + 1):
        found = [
            Solution(vertices=candidate, size=size, method="oracle", verified=True)
            for candidate in _consistent_subsets_of_size(g, dm, size, None)
        ]
        if found:
            logger.debug(f"{len(found)} optimal subsets of size {size}")
            return found
    raise AssertionError("no consistent subset found")


class OracleSolver:
    """
    Brute-force solver used as ground truth.

    Usage:
        solver = OracleSolver(limit=16)
        solution = solver.solve(graph)
    """

    method_name = "oracle"

    def __init__(self, limit: Optional[int] = None) -> None:
        """
        :param limit: Largest vertex count accepted. Falls back to the MCS_ORACLE_LIMIT
                      environment variable, then to 20.
        """
        self.limit = limit if limit is not None else int(os.environ.get("MCS_ORACLE_LIMIT", ORACLE_LIMIT))

    def solve(self, g: ColoredGraph, dm: Optional[DistanceMatrix] = None,
              deadline: Optional[float] = None) -> Solution:
        return brute_force_mcs(g, dm, limit=self.limit, deadline=deadline)
