import logging
from pathlib import Path
from typing import Dict, List, Tuple, Union

from graphs.core import build_graph
from schemas.instance import ColoredGraph
from .exceptions import CountMismatchError, InstanceSyntaxError

logger = logging.getLogger(__name__)


def _integers(tokens: List[Tuple[int, str]], line_no: int, expected: int) -> List[int]:
    if len(tokens) != expected + 1:
        raise InstanceSyntaxError(line_no, f"expected {expected} fields after '{tokens[0][1]}', found {len(tokens) - 1}")
    values = []
    for column, token in tokens[1:]:
        try:
            values.append(int(token))
        except ValueError:
            raise InstanceSyntaxError(line_no, f"'{token}' is not an integer", column) from None
    return values


def _tokenize(line: str) -> List[Tuple[int, str]]:
    """Whitespace-separated tokens with their 1-based starting column."""
    tokens = []
    position = 0
    for token in line.split():
        position = line.index(token, position)
        tokens.append((position + 1, token))
        position += len(token)
    return tokens


def parse_instance(text: str) -> ColoredGraph:
    """
    Parse the ``p mcs <n> <m> <c>`` instance format.

    Vertex lines are ``v <id> <color>`` and edge lines ``e <u> <v>``, with 1-based ids.
    Lines starting with ``#`` and blank lines are ignored.

    :raises InstanceSyntaxError: on malformed lines, carrying the line (and column) number.
    :raises CountMismatchError: if vertex or edge lines disagree with the header.
    :raises GraphValidationError: from ``build_graph`` on invalid graphs.
    """
    header = None
    colors: Dict[int, int] = {}
    edges: List[Tuple[int, int]] = []

    for line_no, line in enumerate(text.splitlines(), start=1):
        tokens = _tokenize(line)
        if not tokens or tokens[0][1].startswith("#"):
            continue
        kind = tokens[0][1]

        if kind == "p":
            if header is not None:
                raise InstanceSyntaxError(line_no, "duplicate header line")
            if len(tokens) < 2 or tokens[1][1] != "mcs":
                raise InstanceSyntaxError(line_no, "header must start with 'p mcs'")
            header = _integers([tokens[0]] + tokens[2:], line_no, 3)
            if any(value < 0 for value in header):
                raise InstanceSyntaxError(line_no, "header counts must be non-negative")
        elif header is None:
            raise InstanceSyntaxError(line_no, "expected the 'p mcs' header first", tokens[0][0])
        elif kind == "v":
            vertex, color = _integers(tokens, line_no, 2)
            if not 1 <= vertex <= header[0]:
                raise InstanceSyntaxError(line_no, f"vertex id {vertex} outside 1..{header[0]}", tokens[1][0])
            if vertex in colors:
                raise InstanceSyntaxError(line_no, f"vertex {vertex} declared twice", tokens[1][0])
            if not 1 <= color <= header[2]:
                raise InstanceSyntaxError(line_no, f"color {color} outside 1..{header[2]}", tokens[2][0])
            colors[vertex] = color
        elif kind == "e":
            u, v = _integers(tokens, line_no, 2)
            for column, endpoint in ((tokens[1][0], u), (tokens[2][0], v)):
                if not 1 <= endpoint <= header[0]:
                    raise InstanceSyntaxError(line_no, f"vertex id {endpoint} outside 1..{header[0]}", column)
            edges.append((u - 1, v - 1))
        else:
            raise InstanceSyntaxError(line_no, f"unknown line type '{kind}'", tokens[0][0])

    if header is None:
        raise InstanceSyntaxError(1, "missing 'p mcs' header")
    n, m, _ = header
    if len(colors) != n:
        raise CountMismatchError(f"header declares {n} vertices, found {len(colors)} vertex lines")
    if len(edges) != m:
        raise CountMismatchError(f"header declares {m} edges, found {len(edges)} edge lines")

    graph = build_graph(edges, [colors[v] for v in range(1, n + 1)])
    logger.debug(f"Parsed instance with n={graph.n}, m={graph.m}, c={graph.c}")
    return graph


def serialize_instance(g: ColoredGraph) -> str:
    """Canonical text: header, vertices ascending, edges ascending; 1-based ids and '\\n' endings."""
    lines = [f"p mcs {g.n} {g.m} {g.c}"]
    lines.extend(f"v {v + 1} {color}" for v, color in enumerate(g.coloring))
    lines.extend(f"e {u + 1} {v + 1}" for u, v in g.edges())
    return "\n".join(lines) + "\n"


def read_instance(path: Union[str, Path]) -> ColoredGraph:
    return parse_instance(Path(path).read_text(encoding="ascii"))


def write_instance(g: ColoredGraph, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="ascii", newline="\n") as handle:
        handle.write(serialize_instance(g))
    logger.info(f"Instance written to {path}")
    return path
