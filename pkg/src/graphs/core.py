import logging
from typing import Dict, FrozenSet, Hashable, Iterable, List, Sequence, Tuple, Union

import networkx as nx
import numpy as np

from schemas.instance import INF, ColoredGraph, DistanceMatrix, Verdict, VertexExplanation
from .exceptions import (
    DisconnectedGraphError,
    DuplicateEdgeError,
    EmptyGraphError,
    EmptySetError,
    SelfLoopError,
    VertexOutOfRangeError,
)

logger = logging.getLogger(__name__)


def build_graph(edge_list: Iterable[Tuple[int, int]], colors: Sequence[Hashable]) -> ColoredGraph:
    """
    Validate an edge list and a per-vertex coloring and build a ColoredGraph.

    Colors may be any hashable ids; they are renumbered 1..c in order of first
    appearance along the vertex order.

    :param edge_list: Pairs of 0-based vertex ids.
    :param colors: One color id per vertex; its length fixes n.
    :return: The validated, color-normalized graph.
    :raises EmptyGraphError: if ``colors`` is empty.
    :raises VertexOutOfRangeError: if an edge names a vertex outside 0..n-1.
    :raises SelfLoopError: on the first edge (v, v).
    :raises DuplicateEdgeError: on the first edge listed twice (in either orientation).
    :raises DisconnectedGraphError: naming the smallest vertex unreachable from vertex 0.
    """
    n = len(colors)
    if n == 0:
        raise EmptyGraphError("instance has no vertices")

    neighbors: List[set] = [set() for _ in range(n)]
    for u, v in edge_list:
        for endpoint in (u, v):
            if not 0 <= endpoint < n:
                raise VertexOutOfRangeError(f"edge ({u}, {v}) names vertex {endpoint} outside 0..{n - 1}")
        if u == v:
            raise SelfLoopError(f"self-loop at vertex {u}")
        if v in neighbors[u]:
            raise DuplicateEdgeError(f"edge ({u}, {v}) is listed more than once")
        neighbors[u].add(v)
        neighbors[v].add(u)

    palette: Dict[Hashable, int] = {}
    for color in colors:
        palette.setdefault(color, len(palette) + 1)

    graph = ColoredGraph(
        n=n,
        adjacency=tuple(tuple(sorted(adj)) for adj in neighbors),
        coloring=tuple(palette[color] for color in colors),
        c=len(palette),
    )

    reachable = nx.node_connected_component(graph.to_networkx(), 0)
    if len(reachable) < n:
        first = min(set(range(n)) - reachable)
        raise DisconnectedGraphError(f"vertex {first} is not reachable from vertex 0")

    logger.debug(f"Built graph with n={graph.n}, m={graph.m}, c={graph.c}")
    return graph


def all_pairs_distances(g: ColoredGraph) -> DistanceMatrix:
    """BFS hop counts between every pair of vertices."""
    dist = np.full((g.n, g.n), INF)
    for source, lengths in nx.all_pairs_shortest_path_length(g.to_networkx()):
        targets = np.fromiter(lengths.keys(), dtype=np.int64, count=len(lengths))
        dist[source, targets] = np.fromiter(lengths.values(), dtype=float, count=len(lengths))
    dist.setflags(write=False)
    return DistanceMatrix(dist=dist)


def distance_to_set(dm: DistanceMatrix, v: int, members: Iterable[int]) -> Union[int, float]:
    """d(v, S); ``INF`` when S is empty."""
    index = np.fromiter(members, dtype=np.int64)
    if index.size == 0:
        return INF
    nearest = dm.dist[v, index].min()
    return int(nearest) if np.isfinite(nearest) else INF


def nearest_neighbors(g: ColoredGraph, dm: DistanceMatrix, v: int, members: Iterable[int]) -> FrozenSet[int]:
    """
    Members of S at exactly d(v, S) from v.

    :raises EmptySetError: if S is empty.
    """
    index = np.array(sorted(set(members)), dtype=np.int64)
    if index.size == 0:
        raise EmptySetError(f"nearest neighbors of vertex {v} requested against an empty set")
    row = dm.dist[v, index]
    return frozenset(index[row == row.min()].tolist())


def consistency_mask(dist: np.ndarray, colors: np.ndarray, members: np.ndarray) -> np.ndarray:
    """Per-vertex flag: some nearest member of ``members`` shares the vertex's color."""
    sub = dist[:, members]
    at_nearest = sub == sub.min(axis=1)[:, None]
    same_color = colors[members][None, :] == colors[:, None]
    return (at_nearest & same_color).any(axis=1)


def is_consistent(g: ColoredGraph, dm: DistanceMatrix, members: Iterable[int]) -> Verdict:
    """
    Certify a candidate subset.

    The witness of an inconsistent subset is the smallest violating vertex together with
    the colors of its nearest neighbors in S. The empty set is inconsistent with witness 0.
    """
    index = np.array(sorted(set(members)), dtype=np.int64)
    if index.size == 0:
        return Verdict(consistent=False, witness=0)

    colors = g.colors_array()
    ok = consistency_mask(dm.dist, colors, index)
    if ok.all():
        return Verdict(consistent=True)

    witness = int(np.flatnonzero(~ok)[0])
    row = dm.dist[witness, index]
    nearest_colors = sorted(set(colors[index[row == row.min()]].tolist()))
    return Verdict(consistent=False, witness=witness, nearest_colors=tuple(nearest_colors))


def color_classes(g: ColoredGraph) -> Dict[int, Tuple[int, ...]]:
    classes: Dict[int, List[int]] = {}
    for v, color in enumerate(g.coloring):
        classes.setdefault(color, []).append(v)
    return {color: tuple(vertices) for color, vertices in sorted(classes.items())}


def explain(g: ColoredGraph, dm: DistanceMatrix, members: Iterable[int]) -> List[VertexExplanation]:
    """Nearest-neighbor breakdown of every vertex against S."""
    chosen = sorted(set(members))
    rows = []
    for v in range(g.n):
        if not chosen:
            rows.append(VertexExplanation(
                vertex=v, color=g.coloring[v], distance=None, nearest=(), nearest_colors=(), consistent=False
            ))
            continue
        nearest = tuple(sorted(nearest_neighbors(g, dm, v, chosen)))
        nearest_colors = tuple(sorted({g.coloring[u] for u in nearest}))
        rows.append(VertexExplanation(
            vertex=v,
            color=g.coloring[v],
            distance=distance_to_set(dm, v, chosen),
            nearest=nearest,
            nearest_colors=nearest_colors,
            consistent=g.coloring[v] in nearest_colors,
        ))
    return rows
