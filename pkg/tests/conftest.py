from pathlib import Path

import pytest
from hypothesis import strategies as st

from graphs.core import all_pairs_distances, build_graph
from instances.text_format import write_instance

R, B, G = "R", "B", "G"


def path_graph(colors):
    return build_graph([(v, v + 1) for v in range(len(colors) - 1)], colors)


def star_graph(center, leaves):
    return build_graph([(0, v) for v in range(1, len(leaves) + 1)], [center] + list(leaves))


def complete_graph(colors):
    n = len(colors)
    return build_graph([(u, v) for u in range(n) for v in range(u + 1, n)], colors)


@st.composite
def connected_graphs(draw, max_n=8, max_c=3):
    """A random spanning tree plus random extra edges, with random colors."""
    n = draw(st.integers(min_value=1, max_value=max_n))
    edges = {(draw(st.integers(min_value=0, max_value=v - 1)), v) for v in range(1, n)}
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    if pairs:
        edges |= set(draw(st.lists(st.sampled_from(pairs), max_size=2 * n)))
    colors = draw(st.lists(st.integers(min_value=1, max_value=max_c), min_size=n, max_size=n))
    return build_graph(sorted(edges), colors)


@pytest.fixture
def p3():
    return path_graph([R, B, R])


@pytest.fixture
def p3_dm(p3):
    return all_pairs_distances(p3)


@pytest.fixture
def star():
    """K1,3 with a red center and blue leaves."""
    return star_graph(R, [B, B, B])


@pytest.fixture
def instance_file(tmp_path):
    def _write(g, name="instance.mcs") -> Path:
        return write_instance(g, tmp_path / name)
    return _write
