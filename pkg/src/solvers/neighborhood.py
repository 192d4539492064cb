import logging
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from itertools import combinations, product
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Tuple

import numpy as np
from tqdm import tqdm

from graphs.core import all_pairs_distances, color_classes, is_consistent
from graphs.exceptions import BudgetExceededError
from graphs.structural import neighborhood_decomposition, type_distance_table
from schemas.guesses import (
    LabelCoding,
    NdScenario,
    OccAssignment,
    Part,
    Partition3,
    Placement,
    PlacementChoice,
)
from schemas.instance import INF, ColoredGraph, DistanceMatrix
from schemas.solution import Solution
from schemas.structure import TypeDecomposition
from .exceptions import NoFeasibleGuessError, NotConsistentError, ParameterTooLargeError, SolverTimeout
from .oracle import single_color_solution
from .parallel import batched, better, ordered_map

logger = logging.getLogger(__name__)

ND_LIMIT = 4
LABELING_BUDGET = 10 ** 6
FAILURE_RATE = 0.01

_COMPANION_MENU = (Placement.NONE, Placement.ONE, Placement.ALL)
_RESPONSIBLE_MENU = (Placement.ONE, Placement.ALL)

LabelGroups = Tuple[FrozenSet[int], ...]


def enumerate_partitions(decomp: TypeDecomposition) -> Iterator[Partition3]:
    """Assignments of every type to T0/T1/T2; T2 types need two colors and some type must be nonempty."""
    for assignment in product(Part, repeat=decomp.r):
        if all(part is Part.T0 for part in assignment):
            continue
        if any(part is Part.T2 and len(decomp.type_colors[t]) < 2 for t, part in enumerate(assignment)):
            continue
        yield Partition3(assignment=assignment)


def _label_options(part: Part, k: int) -> List[FrozenSet[int]]:
    if part is Part.T0:
        return [frozenset()]
    if part is Part.T1:
        return [frozenset({label}) for label in range(k)]
    return [frozenset(labels) for size in range(2, k + 1) for labels in combinations(range(k), size)]


def _occurrences(assignment: Tuple[Part, ...], k: int) -> Iterator[Tuple[FrozenSet[int], ...]]:
    """Per-type label sets in which every one of the k labels is used."""
    for per_type in product(*(_label_options(part, k) for part in assignment)):
        if len(frozenset().union(*per_type)) == k:
            yield per_type


def max_labels(decomp: TypeDecomposition) -> int:
    c = max((colors[-1] for colors in decomp.type_colors if colors), default=0)
    return min(2 * decomp.r, c)


def enumerate_scenarios(decomp: TypeDecomposition) -> Iterator[NdScenario]:
    """
    Every (partition, occurrence) pair, for k = 1..min(2r, c) labels.

    A T1 type carries exactly one label and a T2 type at least two; assignments leaving a
    label unused are skipped.
    """
    for partition in enumerate_partitions(decomp):
        for k in range(1, max_labels(decomp) + 1):
            for per_type in _occurrences(partition.assignment, k):
                yield NdScenario(partition=partition, occ=OccAssignment(k=k, per_type_labels=per_type))


def random_trials(k: int, failure_rate: float = FAILURE_RATE) -> int:
    """Trials needed so that a fixed set of k colors is split apart with probability 1 - failure_rate."""
    return math.ceil(k ** k * math.log(1 / failure_rate))


def labeling_matrix(
    c: int,
    k: int,
    mode: str = "exhaustive",
    budget: int = LABELING_BUDGET,
    seed: int = 0,
    failure_rate: float = FAILURE_RATE,
) -> np.ndarray:
    """
    Labelings as rows of a (rows, c) matrix; column ``color - 1`` holds that color's label.

    Exhaustive rows follow ``itertools.product`` order. Random rows are drawn from a
    generator seeded with ``(seed, k, c)``; the trial count is capped at ``budget``.

    :raises BudgetExceededError: if exhaustive mode would exceed ``budget`` rows.
    """
    if mode == "exhaustive":
        rows = k ** c
        if rows > budget:
            raise BudgetExceededError(f"{k}^{c} = {rows} labelings exceed the budget of {budget}")
        index = np.arange(rows, dtype=np.int64)
        weights = k ** np.arange(c - 1, -1, -1, dtype=np.int64)
        return ((index[:, None] // weights[None, :]) % k).astype(np.int8)

    trials = random_trials(k, failure_rate)
    if trials > budget:
        logger.warning(f"Capping {trials} random labelings at {budget}; the failure bound no longer holds")
        trials = budget
    rng = np.random.default_rng([seed, k, c])
    return rng.integers(0, k, size=(trials, c)).astype(np.int8)


def enumerate_labelings(
    c: int,
    k: int,
    mode: str = "exhaustive",
    budget: int = LABELING_BUDGET,
    seed: int = 0,
    failure_rate: float = FAILURE_RATE,
) -> Iterator[LabelCoding]:
    """Label codings of c colors with k labels; see ``labeling_matrix`` for the order."""
    matrix = labeling_matrix(c, k, mode, budget, seed, failure_rate)
    random_mode = mode != "exhaustive"
    for row in matrix:
        yield LabelCoding(
            label_of=tuple(int(label) for label in row),
            mode="random" if random_mode else "exhaustive",
            seed=seed if random_mode else None,
            trials=len(matrix) if random_mode else None,
        )


class _NdContext:
    """Distances from every vertex to every type, and per-color placement distances."""

    def __init__(self, g: ColoredGraph, dm: DistanceMatrix, decomp: TypeDecomposition) -> None:
        self.g = g
        self.decomp = decomp
        self.huge = g.n + 1

        inter, intra = type_distance_table(g, dm, decomp)
        table = inter.copy()
        table[np.diag_indices(decomp.r)] = intra
        type_of = np.array(decomp.type_of, dtype=np.int64)
        self.vt = table[type_of]

        self.cells: Dict[Tuple[int, int], Tuple[int, ...]] = {
            (t, color): decomp.cell(t, color, g.coloring)
            for t in range(decomp.r)
            for color in decomp.type_colors[t]
        }
        self.placed: Dict[int, Tuple[np.ndarray, np.ndarray, np.ndarray]] = {}
        for color, vertices in color_classes(g).items():
            members = np.array(vertices, dtype=np.int64)
            one = self.vt[members].copy()
            every = self.vt[members].copy()
            for t in range(decomp.r):
                cell = self.cells.get((t, color))
                if not cell:
                    continue
                one[members == cell[0], t] = 0
                every[type_of[members] == t, t] = 0
            self.placed[color] = (members, one, every)

    def threat(self, color: int, types: Iterable[int]) -> np.ndarray:
        """Distance from each vertex of ``color`` to the nearest of ``types``."""
        members = self.placed[color][0]
        columns = list(types)
        if not columns:
            return np.full(len(members), INF)
        return self.vt[np.ix_(members, columns)].min(axis=1)

    def best_placement(self, color: int, types: Tuple[int, ...], menu: Tuple[Placement, ...],
                       threat: np.ndarray) -> Optional[Tuple[int, Tuple[Placement, ...]]]:
        """Cheapest nonempty placement over ``types`` keeping every vertex of ``color`` no farther than its threat."""
        if not types or any((t, color) not in self.cells for t in types):
            return None
        members, one, every = self.placed[color]
        best: Optional[Tuple[int, Tuple[Placement, ...]]] = None
        for choice in product(menu, repeat=len(types)):
            cost = sum(1 if p is Placement.ONE else len(self.cells[(t, color)])
                       for t, p in zip(types, choice) if p is not Placement.NONE)
            if cost == 0 or (best is not None and cost >= best[0]):
                continue
            own = np.full(len(members), INF)
            for t, p in zip(types, choice):
                if p is Placement.ONE:
                    np.minimum(own, one[:, t], out=own)
                elif p is Placement.ALL:
                    np.minimum(own, every[:, t], out=own)
            if (own <= threat).all():
                best = (cost, choice)
        return best

    def vertices_of(self, color: int, types: Tuple[int, ...], choice: Tuple[Placement, ...]) -> List[int]:
        chosen: List[int] = []
        for t, p in zip(types, choice):
            if p is Placement.NONE:
                continue
            cell = self.cells[(t, color)]
            if p is Placement.ONE:
                chosen.append(cell[0])
            elif p is Placement.ALL:
                chosen.extend(cell)
        return chosen


class _PartitionTables:
    """Companion costs for every color and memoized responsible costs for one 3-partition."""

    def __init__(self, ctx: _NdContext, assignment: Tuple[Part, ...]) -> None:
        self.ctx = ctx
        self.t1 = tuple(t for t, part in enumerate(assignment) if part is Part.T1)
        self.t2 = tuple(t for t, part in enumerate(assignment) if part is Part.T2)
        c = ctx.g.c

        self.comp_cost = np.full(c, ctx.huge, dtype=np.int64)
        self.comp_choice: Dict[int, PlacementChoice] = {}
        occupied = self.t1 + self.t2
        for color in range(1, c + 1):
            types = tuple(t for t in self.t2 if (t, color) in ctx.cells)
            found = ctx.best_placement(color, types, _COMPANION_MENU, ctx.threat(color, occupied))
            if found is not None:
                self.comp_cost[color - 1] = found[0]
                self.comp_choice[color] = PlacementChoice(color=color, per_type=self._spread(types, found[1]))

        self._resp: Dict[FrozenSet[int], Tuple[np.ndarray, Dict[int, PlacementChoice]]] = {}

    def _spread(self, types: Tuple[int, ...], choice: Tuple[Placement, ...]) -> Tuple[Placement, ...]:
        per_type = [Placement.NONE] * self.ctx.decomp.r
        for t, p in zip(types, choice):
            per_type[t] = p
        return tuple(per_type)

    def responsible(self, group: FrozenSet[int]) -> Tuple[np.ndarray, Dict[int, PlacementChoice]]:
        """Cost of each color occupying exactly the types in ``group`` (sentinel when impossible)."""
        if group not in self._resp:
            ctx = self.ctx
            types = tuple(sorted(group))
            rivals = self.t2 + tuple(t for t in self.t1 if t not in group)
            costs = np.full(ctx.g.c, ctx.huge, dtype=np.int64)
            choices: Dict[int, PlacementChoice] = {}
            for color in range(1, ctx.g.c + 1):
                found = ctx.best_placement(color, types, _RESPONSIBLE_MENU, ctx.threat(color, rivals))
                if found is not None:
                    costs[color - 1] = found[0]
                    choices[color] = PlacementChoice(color=color, per_type=self._spread(types, found[1]))
            self._resp[group] = (costs, choices)
        return self._resp[group]

    def label_choice(self, group: FrozenSet[int], colors: Iterable[int]) -> Optional[Tuple[int, List[int]]]:
        """Best responsible color among ``colors`` for ``group``; returns (size, vertices) or None."""
        colors = list(colors)
        if not colors:
            return None
        resp_cost, resp_choice = self.responsible(group)
        index = np.array(colors, dtype=np.int64) - 1
        companions = self.comp_cost[index].sum()
        totals = resp_cost[index] - self.comp_cost[index] + companions
        pick = int(np.argmin(totals))
        if totals[pick] >= self.ctx.huge:
            return None

        responsible = colors[pick]
        chosen = self._placed(resp_choice[responsible])
        for color in colors:
            if color != responsible:
                chosen.extend(self._placed(self.comp_choice[color]))
        return int(totals[pick]), chosen

    def _placed(self, choice: PlacementChoice) -> List[int]:
        types = tuple(range(self.ctx.decomp.r))
        return self.ctx.vertices_of(choice.color, types, choice.per_type)


def best_for_label(
    g: ColoredGraph,
    dm: DistanceMatrix,
    decomp: TypeDecomposition,
    partition: Partition3,
    occ: OccAssignment,
    coding: LabelCoding,
    label: int,
) -> Optional[Tuple[int, ...]]:
    """
    Smallest vertex set for the colors carrying ``label``.

    One color of the label class (the responsible one) occupies exactly the types carrying
    the label, with one or all of its vertices per type. Every other color of the class
    goes only into T2 types, with none, one or all of its vertices per type. Each vertex
    must end up no farther from its own color than from any other color the partition
    places.

    :return: Sorted vertices, or None when the label is infeasible.
    """
    tables = _PartitionTables(_NdContext(g, dm, decomp), partition.assignment)
    found = tables.label_choice(occ.types_of_label(label), coding.colors_with(label))
    return None if found is None else tuple(sorted(found[1]))


def _canonical(groups: LabelGroups) -> LabelGroups:
    return tuple(sorted(groups, key=lambda group: tuple(sorted(group))))


class _PartitionEvaluator:
    """Best certified solution over all occurrence functions and labelings of one partition."""

    def __init__(self, ctx: _NdContext, dm: DistanceMatrix, labelings: Dict[int, Tuple[np.ndarray, bool]]) -> None:
        self.ctx = ctx
        self.dm = dm
        self.labelings = labelings

    def __call__(self, assignment: Tuple[Part, ...]) -> Tuple[Optional[Solution], int]:
        ctx = self.ctx
        tables = _PartitionTables(ctx, assignment)
        base = int(tables.comp_cost.sum())
        best: Optional[Solution] = None
        explored = 0
        seen = set()
        per_label: Dict[Tuple[int, int, FrozenSet[int]], np.ndarray] = {}

        for k, (matrix, exhaustive) in self.labelings.items():
            members = [matrix == label for label in range(k)]
            for per_type in _occurrences(assignment, k):
                groups = tuple(frozenset(t for t, labels in enumerate(per_type) if label in labels)
                               for label in range(k))
                if exhaustive:
                    groups = _canonical(groups)
                if (k, groups) in seen:
                    continue
                seen.add((k, groups))
                explored += len(matrix)

                total = np.full(len(matrix), base, dtype=np.int64)
                for label, group in enumerate(groups):
                    key = (k, label, group)
                    if key not in per_label:
                        shifted = tables.responsible(group)[0] - tables.comp_cost
                        per_label[key] = np.where(members[label], shifted[None, :], ctx.huge).min(axis=1)
                    total += per_label[key]
                row = int(np.argmin(total))
                if total[row] >= ctx.huge:
                    continue

                candidate = self._assemble(tables, groups, matrix[row])
                if better(candidate, best):
                    best = candidate
        return best, explored

    def _assemble(self, tables: _PartitionTables, groups: LabelGroups, row: np.ndarray) -> Optional[Solution]:
        chosen = set()
        for label, group in enumerate(groups):
            found = tables.label_choice(group, (np.flatnonzero(row == label) + 1).tolist())
            if found is None:
                return None
            chosen.update(found[1])
        vertices = tuple(sorted(chosen))
        verdict = is_consistent(self.ctx.g, self.dm, vertices)
        if not verdict.consistent:
            logger.warning(f"Discarding an uncertified candidate of size {len(vertices)} (witness {verdict.witness})")
            return None
        return Solution(vertices=vertices, size=len(vertices), method="nd", verified=True)


def solve_nd(
    g: ColoredGraph,
    decomp: Optional[TypeDecomposition] = None,
    dm: Optional[DistanceMatrix] = None,
    limit: int = ND_LIMIT,
    labeling_budget: int = LABELING_BUDGET,
    failure_rate: float = FAILURE_RATE,
    seed: int = 0,
    threads: int = 1,
    deadline: Optional[float] = None,
    progress: bool = False,
) -> Solution:
    """
    Minimum consistent subset parameterized by neighborhood diversity.

    Labelings are exhaustive for every k with k^c within ``labeling_budget`` and seeded
    random otherwise; any random k makes the result an upper bound (``optimal=False``).

    :raises ParameterTooLargeError: if the number of twin classes exceeds ``limit``.
    :raises NoFeasibleGuessError: if no scenario produced a certified candidate.
    :raises SolverTimeout: if the deadline passes.
    """
    trivial = single_color_solution(g, "nd")
    if trivial is not None:
        return trivial
    dm = dm or all_pairs_distances(g)
    decomp = decomp or neighborhood_decomposition(g)
    if decomp.r > limit:
        raise ParameterTooLargeError(f"neighborhood diversity {decomp.r} exceeds the limit of {limit}",
                                     {"n": g.n, "r": decomp.r})

    labelings: Dict[int, Tuple[np.ndarray, bool]] = {}
    for k in range(1, max_labels(decomp) + 1):
        if k ** g.c <= labeling_budget:
            labelings[k] = (labeling_matrix(g.c, k, "exhaustive", labeling_budget), True)
        else:
            logger.warning(f"{k}^{g.c} labelings exceed the budget; drawing random labelings for k={k}")
            labelings[k] = (labeling_matrix(g.c, k, "random", labeling_budget, seed, failure_rate), False)
    optimal = all(exhaustive for _, exhaustive in labelings.values())
    logger.info(f"Solving with {decomp.r} twin classes and up to {len(labelings)} labels")

    evaluate = _PartitionEvaluator(_NdContext(g, dm, decomp), dm, labelings)
    best: Optional[Solution] = None
    explored = 0
    partitions = [partition.assignment for partition in enumerate_partitions(decomp)]
    executor = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None
    try:
        for batch in tqdm(list(batched(partitions, max(1, threads))), desc="Partitions", unit="batch",
                          disable=not progress):
            if deadline is not None and time.monotonic() > deadline:
                partial = best.model_copy(update={"optimal": False, "explored": explored}) if best else None
                raise SolverTimeout(f"neighborhood search timed out after {explored} scenario labelings", best=partial)
            for candidate, count in ordered_map(evaluate, batch, executor):
                explored += count
                if better(candidate, best):
                    best = candidate
    finally:
        if executor is not None:
            executor.shutdown()

    if best is None:
        raise NoFeasibleGuessError(f"no certified candidate among {explored} scenario labelings")
    logger.info(f"Neighborhood solver explored {explored} scenario labelings, best size {best.size}")
    return best.model_copy(update={"explored": explored, "optimal": optimal})


def type_partition_of(g: ColoredGraph, members: Iterable[int], decomp: TypeDecomposition) -> Partition3:
    """The T0/T1/T2 role each type plays for a given vertex set."""
    per_type = occurrence_of(g, members, decomp)
    return Partition3(assignment=tuple(Part(min(len(colors), 2)) for colors in per_type))


def occurrence_of(g: ColoredGraph, members: Iterable[int], decomp: TypeDecomposition,
                  colors: Optional[Iterable[int]] = None) -> Tuple[FrozenSet[int], ...]:
    """Colors of the vertex set present in each type, optionally restricted to ``colors``."""
    chosen = set(members)
    keep = None if colors is None else set(colors)
    return tuple(
        frozenset(g.coloring[v] for v in vertices if v in chosen and (keep is None or g.coloring[v] in keep))
        for vertices in decomp.types
    )


def _covers_partition(per_type: Tuple[FrozenSet[int], ...], responsible: FrozenSet[int]) -> bool:
    for colors in per_type:
        if len(colors) == 1 and not colors <= responsible:
            return False
        if len(colors) >= 2 and len(colors & responsible) < 2:
            return False
    return True


def minimal_responsible_set(g: ColoredGraph, members: Iterable[int], decomp: TypeDecomposition,
                            dm: Optional[DistanceMatrix] = None) -> Tuple[int, ...]:
    """
    An inclusion-minimal color set fixing the type partition of a consistent set.

    Each T1 type contributes its single color; each T2 type must see two of its colors,
    preferring colors already chosen. A reverse pass then drops redundant colors.

    :raises NotConsistentError: if ``members`` is not a consistent subset.
    """
    members = sorted(set(members))
    dm = dm or all_pairs_distances(g)
    verdict = is_consistent(g, dm, members)
    if not verdict.consistent:
        raise NotConsistentError(f"vertex {verdict.witness} is not consistent")

    per_type = occurrence_of(g, members, decomp)
    responsible = set()
    for colors in per_type:
        if len(colors) == 1:
            responsible |= colors
    for colors in per_type:
        if len(colors) >= 2:
            have = len(colors & responsible)
            for color in sorted(colors - responsible):
                if have >= 2:
                    break
                responsible.add(color)
                have += 1

    for color in sorted(responsible, reverse=True):
        trial = frozenset(responsible - {color})
        if _covers_partition(per_type, trial):
            responsible = set(trial)
    return tuple(sorted(responsible))


class NeighborhoodMCSSolver:
    """
    Solver parameterized by neighborhood diversity r.

    Usage:
        solver = NeighborhoodMCSSolver(limit=4, seed=7)
        solution = solver.solve(graph)
    """

    method_name = "nd"

    def __init__(
        self,
        limit: Optional[int] = None,
        labeling_budget: int = LABELING_BUDGET,
        failure_rate: float = FAILURE_RATE,
        seed: int = 0,
        threads: int = 1,
        progress: bool = False,
    ) -> None:
        """
        :param limit: Largest number of twin classes accepted. Falls back to the MCS_ND_LIMIT
                      environment variable, then to 4.
        :param labeling_budget: Most labelings enumerated exhaustively per label count.
        :param failure_rate: Target failure probability of random labeling mode.
        :param seed: Seed of random labeling mode.
        """
        self.limit = limit if limit is not None else int(os.environ.get("MCS_ND_LIMIT", ND_LIMIT))
        self.labeling_budget = labeling_budget
        self.failure_rate = failure_rate
        self.seed = seed
        self.threads = threads
        self.progress = progress

    def solve(self, g: ColoredGraph, dm: Optional[DistanceMatrix] = None, deadline: Optional[float] = None,
              decomp: Optional[TypeDecomposition] = None) -> Solution:
        return solve_nd(g, decomp=decomp, dm=dm, limit=self.limit, labeling_budget=self.labeling_budget,
                        failure_rate=self.failure_rate, seed=self.seed, threads=self.threads,
                        deadline=deadline, progress=self.progress)
