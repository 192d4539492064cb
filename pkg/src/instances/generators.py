import logging
from typing import Any, Dict, List, Literal, Optional, Tuple, Type, Union

import networkx as nx
import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from graphs.core import build_graph
from schemas.instance import ColoredGraph
from schemas.structure import TypeKind
from .exceptions import InvalidParamsError, RetriesExhaustedError

logger = logging.getLogger(__name__)

MAX_RETRIES = 1000


class GnpParams(BaseModel):
    model_config = ConfigDict(extra="forbid")

    n: int = Field(ge=1)
    p: float = Field(ge=0.0, le=1.0)
    c: int = Field(ge=1)


class PlantedVcParams(BaseModel):
    """Cover vertices are 0..k-1; every other vertex links only to cover vertices."""
    model_config = ConfigDict(extra="forbid")

    k: int = Field(ge=1)
    n: int = Field(ge=2)
    c: int = Field(ge=1)
    density: float = Field(default=0.5, ge=0.0, le=1.0)

    @model_validator(mode="after")
    def _cover_fits(self) -> "PlantedVcParams":
        if self.k >= self.n:
            raise ValueError(f"cover size k={self.k} must be smaller than n={self.n}")
        return self


class PlantedNdParams(BaseModel):
    """``sizes[t]`` vertices in twin class t; ``kinds`` fixes clique/independent per class, random when omitted."""
    model_config = ConfigDict(extra="forbid")

    r: int = Field(ge=1)
    sizes: List[int]
    c: int = Field(ge=1)
    density: float = Field(default=0.5, ge=0.0, le=1.0)
    kinds: Optional[List[TypeKind]] = None

    @model_validator(mode="after")
    def _one_size_per_class(self) -> "PlantedNdParams":
        if len(self.sizes) != self.r:
            raise ValueError(f"expected {self.r} class sizes, got {len(self.sizes)}")
        if any(size < 1 for size in self.sizes):
            raise ValueError("class sizes must be positive")
        if self.kinds is not None and len(self.kinds) != self.r:
            raise ValueError(f"expected {self.r} class kinds, got {len(self.kinds)}")
        return self


MODELS: Dict[str, Type[BaseModel]] = {
    "gnp_connected": GnpParams,
    "planted_vc": PlantedVcParams,
    "planted_nd": PlantedNdParams,
}


def _colors(rng: np.random.Generator, n: int, c: int) -> List[int]:
    return rng.integers(1, c + 1, size=n).tolist()


def _draw_gnp(params: GnpParams, rng: np.random.Generator) -> Tuple[List[Tuple[int, int]], List[int]]:
    upper = np.triu(rng.random((params.n, params.n)) < params.p, k=1)
    edges = [(int(u), int(v)) for u, v in zip(*np.nonzero(upper))]
    return edges, _colors(rng, params.n, params.c)


def _draw_planted_vc(params: PlantedVcParams, rng: np.random.Generator) -> Tuple[List[Tuple[int, int]], List[int]]:
    k, n = params.k, params.n
    cover_pairs = np.triu(rng.random((k, k)) < params.density, k=1)
    edges = [(int(u), int(v)) for u, v in zip(*np.nonzero(cover_pairs))]
    links = rng.random((n - k, k)) < params.density
    for offset, row in enumerate(links):
        targets = np.flatnonzero(row)
        if targets.size == 0:
            targets = rng.integers(0, k, size=1)
        edges.extend((int(u), k + offset) for u in targets)
    return edges, _colors(rng, n, params.c)


def _draw_planted_nd(params: PlantedNdParams, rng: np.random.Generator) -> Tuple[List[Tuple[int, int]], List[int]]:
    if params.kinds is not None:
        kinds = list(params.kinds)
    else:
        kinds = [TypeKind.CLIQUE if flip else TypeKind.INDEPENDENT for flip in rng.random(params.r) < 0.5]
    starts = np.concatenate([[0], np.cumsum(params.sizes)]).tolist()
    classes = [range(starts[t], starts[t + 1]) for t in range(params.r)]

    edges: List[Tuple[int, int]] = []
    for members, kind in zip(classes, kinds):
        if kind is TypeKind.CLIQUE:
            edges.extend((u, v) for u in members for v in members if u < v)
    joined = np.triu(rng.random((params.r, params.r)) < params.density, k=1)
    for s, t in zip(*np.nonzero(joined)):
        edges.extend((u, v) for u in classes[s] for v in classes[t])
    return edges, _colors(rng, starts[-1], params.c)


_DRAWERS = {
    "gnp_connected": _draw_gnp,
    "planted_vc": _draw_planted_vc,
    "planted_nd": _draw_planted_nd,
}


def generate(model: str, params: Union[BaseModel, Dict[str, Any]], seed: int,
             max_retries: int = MAX_RETRIES) -> ColoredGraph:
    """
    Draw a connected instance from a seeded model.

    The stream comes from ``numpy.random.Generator(PCG64(seed))``; draws are repeated
    on the same stream until the graph is connected.

    :param model: One of ``gnp_connected``, ``planted_vc``, ``planted_nd``.
    :param params: The model's parameter record or a dict validated into it.
    :param seed: Non-negative seed.
    :raises InvalidParamsError: on an unknown model or invalid parameters.
    :raises RetriesExhaustedError: if no connected graph appears within ``max_retries`` draws.
    """
    if model not in MODELS:
        raise InvalidParamsError(f"unknown model '{model}', expected one of {sorted(MODELS)}")
    try:
        record = MODELS[model].model_validate(params if isinstance(params, dict) else params.model_dump())
    except ValidationError as e:
        raise InvalidParamsError(f"invalid {model} parameters: {e}") from e
    if seed < 0:
        raise InvalidParamsError(f"seed must be non-negative, got {seed}")

    rng = np.random.Generator(np.random.PCG64(seed))
    for attempt in range(1, max_retries + 1):
        edges, colors = _DRAWERS[model](record, rng)
        graph = nx.Graph()
        graph.add_nodes_from(range(len(colors)))
        graph.add_edges_from(edges)
        if nx.is_connected(graph):
            logger.debug(f"{model} draw {attempt} is connected")
            return build_graph(edges, colors)

    raise RetriesExhaustedError(f"{model} produced no connected graph in {max_retries} draws (seed {seed})")
