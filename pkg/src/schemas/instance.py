import math
from typing import List, Optional, Tuple

import networkx as nx
import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

INF = math.inf


class ColoredGraph(BaseModel):
    """
    A simple, undirected, connected graph on vertices 0..n-1 with one color per vertex.

    Build instances through ``graphs.core.build_graph``, which validates the edge list
    and normalizes colors to 1..c in first-appearance order.
    """
    model_config = ConfigDict(frozen=True)

    n: int
    adjacency: Tuple[Tuple[int, ...], ...]
    coloring: Tuple[int, ...]
    c: int

    @property
    def m(self) -> int:
        return sum(len(neighbors) for neighbors in self.adjacency) // 2

    def edges(self) -> List[Tuple[int, int]]:
        """Edges as (u, v) with u < v, in ascending lexicographic order."""
        return [(u, v) for u in range(self.n) for v in self.adjacency[u] if u < v]

    def colors_array(self) -> np.ndarray:
        return np.asarray(self.coloring, dtype=np.int64)

    def adjacency_matrix(self) -> np.ndarray:
        matrix = np.zeros((self.n, self.n), dtype=bool)
        for u, v in self.edges():
            matrix[u, v] = True
            matrix[v, u] = True
        return matrix

    def to_networkx(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from((v, {"color": color}) for v, color in enumerate(self.coloring))
        graph.add_edges_from(self.edges())
        return graph


class DistanceMatrix(BaseModel):
    """All-pairs hop counts; ``INF`` marks unreachable pairs."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    dist: np.ndarray

    @property
    def n(self) -> int:
        return self.dist.shape[0]

    def __eq__(self, other: object) -> bool:
        return isinstance(other, DistanceMatrix) and np.array_equal(self.dist, other.dist)

    __hash__ = None


class Verdict(BaseModel):
    model_config = ConfigDict(frozen=True)

    consistent: bool
    witness: Optional[int] = None
    nearest_colors: Tuple[int, ...] = ()

    @model_validator(mode="after")
    def _witness_iff_inconsistent(self) -> "Verdict":
        if self.consistent == (self.witness is not None):
            raise ValueError("a witness is required exactly when the subset is inconsistent")
        return self


class VertexExplanation(BaseModel):
    """One row of the nearest-neighbor table printed by ``check --explain``."""
    vertex: int
    color: int
    distance: Optional[int]
    nearest: Tuple[int, ...]
    nearest_colors: Tuple[int, ...]
    consistent: bool
