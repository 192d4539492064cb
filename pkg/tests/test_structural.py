import itertools

import numpy as np
import pytest
from hypothesis import given, settings

from conftest import B, R, complete_graph, connected_graphs, path_graph, star_graph
from graphs.core import all_pairs_distances, build_graph
from graphs.exceptions import BudgetExceededError
from graphs.structural import (
    diameter_bound_holds,
    minimum_vertex_cover,
    neighborhood_decomposition,
    type_distance_table,
)
from instances.generators import generate
from schemas.structure import TypeKind


def _is_cover(g, cover):
    chosen = set(cover)
    return all(u in chosen or v in chosen for u, v in g.edges())


def _brute_cover_size(g):
    for size in range(g.n + 1):
        if any(_is_cover(g, subset) for subset in itertools.combinations(range(g.n), size)):
            return size


def test_cover_of_p3(p3):
    result = minimum_vertex_cover(p3)
    assert result.k == 1
    assert result.cover == (1,)
    assert result.independent == (0, 2)


def test_cover_of_c4():
    g = build_graph([(0, 1), (1, 2), (2, 3), (3, 0)], [R, B, R, B])
    assert minimum_vertex_cover(g).k == 2


def test_cover_of_k4():
    assert minimum_vertex_cover(complete_graph([R, R, R, R])).k == 3


def test_cover_of_single_vertex():
    result = minimum_vertex_cover(build_graph([], [R]))
    assert result.k == 0
    assert result.independent == (0,)


def test_cover_budget():
    with pytest.raises(BudgetExceededError):
        minimum_vertex_cover(complete_graph([R, R, R, R]), budget=2)


@given(connected_graphs(max_n=9))
@settings(max_examples=60, deadline=None)
def test_cover_is_minimum(g):
    result = minimum_vertex_cover(g)
    assert _is_cover(g, result.cover)
    assert result.k == _brute_cover_size(g)
    assert sorted(result.cover + result.independent) == list(range(g.n))


def test_decomposition_of_k3():
    decomp = neighborhood_decomposition(complete_graph([R, R, R]))
    assert decomp.r == 1
    assert decomp.class_kind == (TypeKind.CLIQUE,)
    assert decomp.type_adjacency == ((True,),)


def test_decomposition_of_p3(p3):
    decomp = neighborhood_decomposition(p3)
    assert decomp.r == 2
    assert decomp.types == ((0, 2), (1,))
    assert decomp.class_kind == (TypeKind.INDEPENDENT, TypeKind.CLIQUE)
    assert decomp.type_of == (0, 1, 0)
    assert decomp.type_colors == ((1,), (2,))
    assert decomp.type_adjacency == ((False, True), (True, False))


def test_decomposition_of_p4():
    assert neighborhood_decomposition(path_graph([R, B, R, B])).r == 4


def test_decomposition_of_star(star):
    decomp = neighborhood_decomposition(star)
    assert decomp.r == 2
    assert decomp.types == ((0,), (1, 2, 3))
    assert decomp.cell(1, 2, star.coloring) == (1, 2, 3)


def _twins(g, u, v):
    return set(g.adjacency[u]) - {v} == set(g.adjacency[v]) - {u}


@given(connected_graphs(max_n=9))
@settings(max_examples=60, deadline=None)
def test_classes_are_exactly_twin_classes(g):
    decomp = neighborhood_decomposition(g)
    for u, v in itertools.combinations(range(g.n), 2):
        assert (decomp.type_of[u] == decomp.type_of[v]) == _twins(g, u, v)


@given(connected_graphs(max_n=9))
@settings(max_examples=60, deadline=None)
def test_twin_distance_regularity(g):
    dm = all_pairs_distances(g)
    decomp = neighborhood_decomposition(g)
    for members in decomp.types:
        outside = [v for v in range(g.n) if v not in members]
        for v in outside:
            assert len({dm.dist[v, u] for u in members}) == 1


def test_type_distance_table(star):
    dm = all_pairs_distances(star)
    inter, intra = type_distance_table(star, dm, neighborhood_decomposition(star))
    assert np.array_equal(inter, np.array([[0, 1], [1, 0]]))
    assert intra[0] == np.inf
    assert intra[1] == 2


def test_diameter_bound_on_path():
    g = path_graph([R, B, R, B, R])
    dm = all_pairs_distances(g)
    assert diameter_bound_holds(g, dm, minimum_vertex_cover(g))


@pytest.mark.parametrize("seed", range(10))
def test_diameter_bound_on_planted_instances(seed):
    g = generate("planted_vc", {"k": 3, "n": 10, "c": 3}, seed)
    assert diameter_bound_holds(g, all_pairs_distances(g), minimum_vertex_cover(g))


@pytest.mark.slow
@pytest.mark.parametrize("seed", range(100))
def test_diameter_bound_many_planted_instances(seed):
    g = generate("planted_vc", {"k": 4, "n": 14, "c": 4, "density": 0.3}, seed)
    cover = minimum_vertex_cover(g)
    assert cover.k <= 4
    assert diameter_bound_holds(g, all_pairs_distances(g), cover)


def test_star_helper_cover():
    assert minimum_vertex_cover(star_graph(R, [B, B, B, B])).cover == (0,)
