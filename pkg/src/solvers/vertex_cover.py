import logging
import os
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, FrozenSet, Iterator, List, Optional, Tuple

import numpy as np
from tqdm import tqdm

from graphs.core import all_pairs_distances, is_consistent
from graphs.exceptions import BudgetExceededError
from graphs.structural import minimum_vertex_cover
from schemas.guesses import DerivedSets, SetSystem, VcGuess
from schemas.instance import ColoredGraph, DistanceMatrix
from schemas.solution import Solution
from schemas.structure import VertexCoverResult
from .exceptions import InfeasibleError, NoFeasibleGuessError, ParameterTooLargeError, SolverTimeout
from .hitting_set import enumerate_min_hitting_sets, min_hitting_set, minimal_members
from .oracle import single_color_solution
from .parallel import batched, better, ordered_map

logger = logging.getLogger(__name__)

VC_LIMIT = 6


def enumerate_distance_guesses(dm: DistanceMatrix, cover: VertexCoverResult) -> Iterator[Tuple[int, ...]]:
    """
    Distance arrays D over the cover in lexicographic order.

    Each d_i lies in 0..min(2k - 1, eccentricity of u_i), every pair satisfies
    |d_i - d_j| <= d(u_i, u_j), and some d_i is at most 1 (the solution is nonempty
    and every independent vertex has a cover neighbor).
    """
    members = list(cover.cover)
    k = len(members)
    if k == 0:
        return
    between = dm.dist[np.ix_(members, members)]
    ceilings = [int(min(2 * k - 1, dm.dist[u].max())) for u in members]
    partial: List[int] = []

    def extend(i: int) -> Iterator[Tuple[int, ...]]:
        if i == k:
            if min(partial) <= 1:
                yield tuple(partial)
            return
        for value in range(ceilings[i] + 1):
            if all(abs(value - partial[j]) <= between[i, j] for j in range(i)):
                partial.append(value)
                yield from extend(i + 1)
                partial.pop()

    yield from extend(0)


def _guess_for(cover: VertexCoverResult, d: Tuple[int, ...], m1: Tuple[int, ...]) -> VcGuess:
    m0 = tuple(u for u, value in zip(cover.cover, d) if value == 0)
    mx = tuple(u for u, value in zip(cover.cover, d) if value != 0 and u not in m1)
    return VcGuess(cover=cover.cover, d=d, m0=m0, m1=m1, mx=mx)


def _boundary_candidates(cover: VertexCoverResult, d: Tuple[int, ...]) -> Tuple[int, ...]:
    """Cover vertices that may border S ∩ I: those guessed at distance exactly 1."""
    return tuple(u for u, value in zip(cover.cover, d) if value == 1)


def _subset_by_mask(candidates: Tuple[int, ...], mask: int) -> Tuple[int, ...]:
    return tuple(u for bit, u in enumerate(candidates) if mask >> bit & 1)


def enumerate_guesses(g: ColoredGraph, cover: VertexCoverResult,
                      dm: Optional[DistanceMatrix] = None) -> Iterator[VcGuess]:
    """
    Every (D, M1) pair surviving feasibility pruning.

    D runs in lexicographic order; for each D, M1 ranges over subsets of the cover vertices
    with d_i = 1 in increasing bit-mask order.
    """
    dm = dm or all_pairs_distances(g)
    for d in enumerate_distance_guesses(dm, cover):
        candidates = _boundary_candidates(cover, d)
        for mask in range(1 << len(candidates)):
            yield _guess_for(cover, d, _subset_by_mask(candidates, mask))


def derive_sets(g: ColoredGraph, dm: DistanceMatrix, cover: VertexCoverResult,
                guess: VcGuess) -> Optional[DerivedSets]:
    """
    Forbidden (I_out) and forced (I_in) independent vertices and the unsatisfied demand of a guess.

    :return: The derived sets, or None when the guess is discarded.
    """
    dist = dm.dist
    colors = g.colors_array()
    members = np.array(cover.cover, dtype=np.int64)
    independent = np.array(cover.independent, dtype=np.int64)
    d = np.array(guess.d, dtype=float)

    extended = np.zeros(g.n)
    extended[members] = d
    too_close = (dist[np.ix_(members, independent)] <= (d - 1)[:, None]).any(axis=0)
    i_out = independent[too_close]
    for v in independent:
        extended[v] = 1 + extended[list(g.adjacency[v])].min()

    allowed = np.zeros(g.n, dtype=bool)
    allowed[list(guess.m0)] = True
    allowed[independent] = True
    allowed[i_out] = False

    for u, value in zip(cover.cover, guess.d):
        if value > 0 and not (allowed & (dist[u] == value)).any():
            return None

    same = colors[:, None] == colors[None, :]
    at_guess = dist[independent] == extended[independent][:, None]
    served = (at_guess & allowed[None, :] & same[independent]).any(axis=1)
    i_in = independent[~served]
    if np.intersect1d(i_in, i_out).size:
        return None

    forced = np.zeros(g.n, dtype=bool)
    forced[list(guess.m0)] = True
    forced[i_in] = True
    satisfied = forced | ((dist <= extended[:, None]) & same & forced[None, :]).any(axis=1)

    unsatisfied: Dict[int, List[int]] = {}
    for v in np.flatnonzero(~satisfied).tolist():
        unsatisfied.setdefault(g.coloring[v], []).append(v)

    return DerivedSets(
        i_out=frozenset(i_out.tolist()),
        extended_d=tuple(int(value) for value in extended),
        i_in=frozenset(i_in.tolist()),
        unsatisfied={color: tuple(vertices) for color, vertices in sorted(unsatisfied.items())},
    )


def _witness_pool(g: ColoredGraph, dm: DistanceMatrix, cover: VertexCoverResult, derived: DerivedSets,
                  boundary: Tuple[int, ...], color: int) -> Dict[int, FrozenSet[int]]:
    """For each unsatisfied vertex of ``color``, the boundary vertices that can serve it."""
    open_vertices = {v for v in cover.independent if v not in derived.i_out and g.coloring[v] == color}
    useful = [u for u in boundary if open_vertices.intersection(g.adjacency[u])]
    return {
        x: frozenset(u for u in useful if dm.dist[x, u] == derived.extended_d[x] - 1)
        for x in derived.unsatisfied.get(color, ())
    }


def per_color_optimal(g: ColoredGraph, dm: DistanceMatrix, guess: VcGuess, derived: DerivedSets,
                      color: int, cover: Optional[VertexCoverResult] = None) -> Optional[Tuple[int, ...]]:
    """
    Fewest extra vertices of ``color`` that meet every unsatisfied demand of that color.

    Each minimal hitting set X of the boundary witness sets fixes which M1 vertices must
    gain a solution neighbor; the cheapest such neighbors come from a second hitting set.

    :return: Sorted vertex tuple (empty for no demand), or None when no choice of X works.
    """
    demand = derived.unsatisfied.get(color, ())
    if not demand:
        return ()
    if cover is None:
        independent = tuple(v for v in range(g.n) if v not in set(guess.cover))
        cover = VertexCoverResult(cover=guess.cover, k=len(guess.cover), independent=independent)

    witnesses = _witness_pool(g, dm, cover, derived, guess.m1, color)
    if any(not pool for pool in witnesses.values()):
        return None

    candidates = tuple(
        v for v in cover.independent
        if g.coloring[v] == color and v not in derived.i_out and v not in derived.i_in
    )
    candidate_set = set(candidates)
    family = minimal_members(tuple(witnesses[x] for x in demand))
    boundary = SetSystem(universe=tuple(sorted(set().union(*family))), family=family)

    best: Optional[Tuple[int, ...]] = None
    for chosen_boundary in enumerate_min_hitting_sets(boundary):
        neighborhoods = tuple(frozenset(candidate_set.intersection(g.adjacency[u])) for u in chosen_boundary)
        try:
            picked = tuple(sorted(min_hitting_set(SetSystem(universe=candidates, family=neighborhoods))))
        except InfeasibleError:
            continue
        if not picked:
            continue
        reach = dm.dist[np.ix_(list(demand), list(picked))].min(axis=1)
        if (reach > np.array([derived.extended_d[x] for x in demand])).any():
            continue
        if best is None or (len(picked), picked) < (len(best), best):
            best = picked
    return best


def assemble(g: ColoredGraph, dm: DistanceMatrix, guess: VcGuess, derived: DerivedSets,
             per_color: Dict[int, Tuple[int, ...]]) -> Optional[Solution]:
    """Union the forced part with the per-color sets; keep it only if consistent and faithful to D."""
    chosen = set(guess.m0) | set(derived.i_in)
    for vertices in per_color.values():
        chosen.update(vertices)
    vertices = tuple(sorted(chosen))
    assert not chosen & derived.i_out
    assert derived.i_in <= chosen

    if not is_consistent(g, dm, vertices).consistent:
        return None
    reach = dm.dist[np.ix_(list(guess.cover), list(vertices))].min(axis=1)
    if not np.array_equal(reach, np.array(guess.d, dtype=float)):
        return None
    return Solution(vertices=vertices, size=len(vertices), method="vc", verified=True)


class _DistanceGuessEvaluator:
    """Evaluates every M1 for one distance array, sharing per-color work across them."""

    def __init__(self, g: ColoredGraph, dm: DistanceMatrix, cover: VertexCoverResult) -> None:
        self.g = g
        self.dm = dm
        self.cover = cover

    def __call__(self, job: Tuple[Tuple[int, ...], int]) -> Tuple[Optional[Solution], int]:
        d, bound = job
        boundary = _boundary_candidates(self.cover, d)
        derived = derive_sets(self.g, self.dm, self.cover, _guess_for(self.cover, d, ()))
        if derived is None:
            return None, 1 << len(boundary)

        lower = len(set(_guess_for(self.cover, d, ()).m0) | derived.i_in) + len(derived.unsatisfied)
        if lower > bound:
            return None, 1 << len(boundary)

        pools = {
            color: set().union(*_witness_pool(self.g, self.dm, self.cover, derived, boundary, color).values())
            for color in derived.unsatisfied
        }
        per_color_cache: Dict[Tuple[int, FrozenSet[int]], Optional[Tuple[int, ...]]] = {}
        assembled: Dict[Tuple[int, ...], Optional[Solution]] = {}
        best: Optional[Solution] = None

        for mask in range(1 << len(boundary)):
            guess = _guess_for(self.cover, d, _subset_by_mask(boundary, mask))
            per_color: Dict[int, Tuple[int, ...]] = {}
            for color in derived.unsatisfied:
                key = (color, frozenset(pools[color].intersection(guess.m1)))
                if key not in per_color_cache:
                    per_color_cache[key] = per_color_optimal(self.g, self.dm, guess, derived, color, self.cover)
                if per_color_cache[key] is None:
                    break
                per_color[color] = per_color_cache[key]
            else:
                signature = tuple(sorted(set().union(*per_color.values()))) if per_color else ()
                if signature not in assembled:
                    assembled[signature] = assemble(self.g, self.dm, guess, derived, per_color)
                if better(assembled[signature], best):
                    best = assembled[signature]
        return best, 1 << len(boundary)


def solve_vc(
    g: ColoredGraph,
    cover: Optional[VertexCoverResult] = None,
    dm: Optional[DistanceMatrix] = None,
    limit: int = VC_LIMIT,
    threads: int = 1,
    deadline: Optional[float] = None,
    progress: bool = False,
) -> Solution:
    """
    Minimum consistent subset parameterized by the vertex cover number.

    Distance guesses are evaluated in fixed-size batches; the best size found so far
    prunes later batches only, so the result does not depend on ``threads``.

    :raises ParameterTooLargeError: if the minimum vertex cover is larger than ``limit``.
    :raises NoFeasibleGuessError: if no guess produced a certified candidate.
    :raises SolverTimeout: if the deadline passes.
    """
    trivial = single_color_solution(g, "vc")
    if trivial is not None:
        return trivial
    dm = dm or all_pairs_distances(g)
    if cover is None:
        try:
            cover = minimum_vertex_cover(g, budget=limit)
        except BudgetExceededError as e:
            raise ParameterTooLargeError(str(e), {"n": g.n, "k": limit + 1}) from e
    if cover.k > limit:
        raise ParameterTooLargeError(f"vertex cover number {cover.k} exceeds the limit of {limit}",
                                     {"n": g.n, "k": cover.k})
    logger.info(f"Solving with a vertex cover of size {cover.k}")

    evaluate = _DistanceGuessEvaluator(g, dm, cover)
    best: Optional[Solution] = None
    explored = 0
    executor = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None
    try:
        batches = batched(enumerate_distance_guesses(dm, cover))
        for batch in tqdm(batches, desc="Distance guesses", unit="batch", disable=not progress):
            if deadline is not None and time.monotonic() > deadline:
                partial = best.model_copy(update={"optimal": False, "explored": explored}) if best else None
                raise SolverTimeout(f"vertex cover search timed out after {explored} guesses", best=partial)
            bound = best.size if best is not None else g.n + 1
            for candidate, count in ordered_map(evaluate, [(d, bound) for d in batch], executor):
                explored += count
                if better(candidate, best):
                    best = candidate
    finally:
        if executor is not None:
            executor.shutdown()

    if best is None:
        raise NoFeasibleGuessError(f"no certified candidate among {explored} guesses")
    logger.info(f"Vertex cover solver explored {explored} guesses, best size {best.size}")
    return best.model_copy(update={"explored": explored})


class VertexCoverMCSSolver:
    """
    Solver parameterized by the vertex cover number k.

    Usage:
        solver = VertexCoverMCSSolver(limit=6, threads=4)
        solution = solver.solve(graph)
    """

    method_name = "vc"

    def __init__(self, limit: Optional[int] = None, threads: int = 1, progress: bool = False) -> None:
        """
        :param limit: Largest vertex cover number accepted. Falls back to the MCS_VC_LIMIT
                      environment variable, then to 6.
        :param threads: Worker threads used to evaluate distance guesses.
        :param progress: Show a progress bar on stderr.
        """
        self.limit = limit if limit is not None else int(os.environ.get("MCS_VC_LIMIT", VC_LIMIT))
        self.threads = threads
        self.progress = progress

    def solve(self, g: ColoredGraph, dm: Optional[DistanceMatrix] = None, deadline: Optional[float] = None,
              cover: Optional[VertexCoverResult] = None) -> Solution:
        return solve_vc(g, cover=cover, dm=dm, limit=self.limit, threads=self.threads,
                        deadline=deadline, progress=self.progress)
