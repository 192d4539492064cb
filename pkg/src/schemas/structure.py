from enum import Enum
from typing import List, Tuple

from pydantic import BaseModel, ConfigDict


class VertexCoverResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    cover: Tuple[int, ...]
    k: int
    independent: Tuple[int, ...]


class TypeKind(str, Enum):
    CLIQUE = "clique"
    INDEPENDENT = "independent"


class TypeDecomposition(BaseModel):
    """
    Twin classes of a graph.

    ``types[t]`` lists the members of class t in ascending order; classes are numbered
    by their smallest member. ``type_colors[t]`` is the sorted set of colors present in
    class t. Singleton classes are reported as cliques.
    """
    model_config = ConfigDict(frozen=True)

    types: Tuple[Tuple[int, ...], ...]
    r: int
    type_of: Tuple[int, ...]
    class_kind: Tuple[TypeKind, ...]
    type_adjacency: Tuple[Tuple[bool, ...], ...]
    type_colors: Tuple[Tuple[int, ...], ...]

    def cell(self, t: int, color: int, coloring: Tuple[int, ...]) -> Tuple[int, ...]:
        """Vertices of class ``t`` carrying ``color``."""
        return tuple(v for v in self.types[t] if coloring[v] == color)


class TypeSummary(BaseModel):
    index: int
    kind: TypeKind
    size: int
    vertices: List[int]
    colors: List[int]


class ParameterReport(BaseModel):
    """Output of ``params``; vertex ids are 1-based."""
    input: str
    n: int
    m: int
    c: int
    k: int
    cover: List[int]
    r: int
    types: List[TypeSummary]
