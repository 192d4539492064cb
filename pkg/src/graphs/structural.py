import logging
from typing import Dict, List, Optional, Set, Tuple

import networkx as nx
import numpy as np

from schemas.instance import INF, ColoredGraph, DistanceMatrix
from schemas.structure import TypeDecomposition, TypeKind, VertexCoverResult
from .exceptions import BudgetExceededError

logger = logging.getLogger(__name__)


def _cover_within(edges: Dict[int, Set[int]], k: int) -> Optional[List[int]]:
    """Bounded search tree: a cover of the remaining edges using at most k vertices, or None."""
    live = {v: nbrs for v, nbrs in edges.items() if nbrs}
    if not live:
        return []
    if k == 0:
        return None

    degrees = {v: len(nbrs) for v, nbrs in live.items()}
    if sum(degrees.values()) // 2 > k * max(degrees.values()):
        return None

    pivot = min(live, key=lambda v: (-degrees[v], v))
    partner = min(live[pivot])

    for taken in (pivot, partner):
        rest = {v: set(nbrs) for v, nbrs in live.items() if v != taken}
        for v in live[taken]:
            rest[v].discard(taken)
        found = _cover_within(rest, k - 1)
        if found is not None:
            return [taken] + found
    return None


def minimum_vertex_cover(g: ColoredGraph, budget: Optional[int] = None) -> VertexCoverResult:
    """
    Exact minimum vertex cover by branching on the edge at a maximum-degree vertex.

    The cover size is searched upward from the size of a greedy maximal matching up
    to twice that size (the matching endpoints always form a cover).

    :param g: Input graph.
    :param budget: Largest acceptable cover size, if any.
    :return: The cover, its size and the complementary independent set.
    :raises BudgetExceededError: if the minimum cover is larger than ``budget``.
    """
    matching = nx.maximal_matching(g.to_networkx())
    lower = len(matching)
    upper = 2 * lower
    if budget is not None and budget < lower:
        raise BudgetExceededError(f"vertex cover needs at least {lower} vertices, budget is {budget}")
    ceiling = upper if budget is None else min(upper, budget)

    edges = {v: set(g.adjacency[v]) for v in range(g.n)}
    for k in range(lower, ceiling + 1):
        found = _cover_within(edges, k)
        if found is not None:
            cover = tuple(sorted(found))
            independent = tuple(v for v in range(g.n) if v not in set(cover))
            logger.info(f"Minimum vertex cover has size {len(cover)}")
            return VertexCoverResult(cover=cover, k=len(cover), independent=independent)
        logger.debug(f"No vertex cover of size {k}")

    raise BudgetExceededError(f"minimum vertex cover exceeds the budget of {budget}")


def neighborhood_decomposition(g: ColoredGraph) -> TypeDecomposition:
    """
    Twin classes of ``g``: false twins share N(v), true twins share N[v].

    A vertex with a false twin has no true twin, so grouping by open neighborhoods first
    and closed neighborhoods second yields the equivalence classes.
    """
    by_open: Dict[Tuple[int, ...], List[int]] = {}
    for v in range(g.n):
        by_open.setdefault(g.adjacency[v], []).append(v)

    classes: List[Tuple[Tuple[int, ...], TypeKind]] = []
    remaining = []
    for members in by_open.values():
        if len(members) > 1:
            classes.append((tuple(members), TypeKind.INDEPENDENT))
        else:
            remaining.extend(members)

    by_closed: Dict[Tuple[int, ...], List[int]] = {}
    for v in sorted(remaining):
        by_closed.setdefault(tuple(sorted(g.adjacency[v] + (v,))), []).append(v)
    classes.extend((tuple(members), TypeKind.CLIQUE) for members in by_closed.values())

    classes.sort(key=lambda item: item[0][0])
    types = tuple(members for members, _ in classes)
    kinds = tuple(kind for _, kind in classes)

    type_of = [0] * g.n
    for t, members in enumerate(types):
        for v in members:
            type_of[v] = t

    r = len(types)
    matrix = g.adjacency_matrix()
    type_adjacency = tuple(
        tuple(bool(matrix[types[s][0], types[t][-1]]) if s != t else (kinds[t] is TypeKind.CLIQUE and len(types[t]) > 1)
              for t in range(r))
        for s in range(r)
    )
    type_colors = tuple(tuple(sorted({g.coloring[v] for v in members})) for members in types)

    logger.info(f"Neighborhood diversity is {r}")
    return TypeDecomposition(
        types=types,
        r=r,
        type_of=tuple(type_of),
        class_kind=kinds,
        type_adjacency=type_adjacency,
        type_colors=type_colors,
    )


def type_distance_table(g: ColoredGraph, dm: DistanceMatrix, decomp: TypeDecomposition) -> Tuple[np.ndarray, np.ndarray]:
    """
    Distances between types and within them.

    :return: ``(inter, intra)`` where ``inter[s, t]`` is the distance between any member of
        T_s and any member of T_t (s != t; the diagonal is 0), and ``intra[t]`` is the
        distance between two distinct members of T_t, ``INF`` for singletons.
    """
    representatives = np.array([members[0] for members in decomp.types], dtype=np.int64)
    inter = dm.dist[np.ix_(representatives, representatives)].copy()
    np.fill_diagonal(inter, 0)
    intra = np.array(
        [dm.dist[members[0], members[1]] if len(members) > 1 else INF for members in decomp.types],
        dtype=float,
    )
    return inter, intra


def diameter_bound_holds(g: ColoredGraph, dm: DistanceMatrix, cover: VertexCoverResult) -> bool:
    """Pairwise distances are at most 2k, and at most 2k - 1 from a cover vertex."""
    k = cover.k
    if dm.dist.max() > 2 * k:
        return False
    if cover.cover and dm.dist[list(cover.cover)].max() > 2 * k - 1:
        return False
    return True
