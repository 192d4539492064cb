import pytest

from graphs.structural import minimum_vertex_cover, neighborhood_decomposition
from instances.exceptions import InvalidParamsError, RetriesExhaustedError
from instances.generators import GnpParams, PlantedNdParams, generate


def test_planted_nd_single_clique_class():
    g = generate("planted_nd", {"r": 1, "sizes": [5], "c": 1, "kinds": ["clique"]}, 0)
    assert g.n == 5
    assert g.m == 10
    assert g.c == 1
    assert neighborhood_decomposition(g).r == 1


def test_planted_vc_star():
    g = generate("planted_vc", {"k": 1, "n": 4, "c": 2}, 0)
    assert g.edges() == [(0, 1), (0, 2), (0, 3)]
    assert minimum_vertex_cover(g).k == 1


def test_gnp_is_deterministic():
    params = {"n": 10, "p": 0.3, "c": 3}
    assert generate("gnp_connected", params, 7) == generate("gnp_connected", params, 7)


def test_parameter_records_are_accepted():
    params = GnpParams(n=6, p=0.5, c=2)
    assert generate("gnp_connected", params, 1) == generate("gnp_connected", params.model_dump(), 1)


def test_different_seeds_differ():
    params = {"n": 12, "p": 0.4, "c": 3}
    draws = {tuple(generate("gnp_connected", params, seed).edges()) for seed in range(5)}
    assert len(draws) > 1


@pytest.mark.parametrize(
    "model, params",
    [
        ("lattice", {"n": 3}),
        ("gnp_connected", {"n": 0, "p": 0.5, "c": 1}),
        ("gnp_connected", {"n": 5, "p": 1.5, "c": 1}),
        ("gnp_connected", {"n": 5, "p": 0.5, "c": 1, "extra": 1}),
        ("planted_vc", {"k": 4, "n": 4, "c": 2}),
        ("planted_nd", {"r": 2, "sizes": [3], "c": 2}),
        ("planted_nd", {"r": 1, "sizes": [0], "c": 2}),
        ("planted_nd", {"r": 1, "sizes": [2], "c": 2, "kinds": ["clique", "clique"]}),
    ],
)
def test_invalid_parameters(model, params):
    with pytest.raises(InvalidParamsError):
        generate(model, params, 0)


def test_negative_seed():
    with pytest.raises(InvalidParamsError):
        generate("gnp_connected", {"n": 3, "p": 1.0, "c": 1}, -1)


def test_retries_exhausted():
    with pytest.raises(RetriesExhaustedError):
        generate("gnp_connected", {"n": 5, "p": 0.0, "c": 2}, 0, max_retries=3)


@pytest.mark.parametrize("seed", range(20))
def test_planted_parameters_are_upper_bounds(seed):
    vc = generate("planted_vc", {"k": 3, "n": 15, "c": 3}, seed)
    assert minimum_vertex_cover(vc).k <= 3
    nd = generate("planted_nd", PlantedNdParams(r=3, sizes=[4, 2, 5], c=3), seed)
    assert neighborhood_decomposition(nd).r <= 3


@pytest.mark.slow
@pytest.mark.parametrize("seed", range(100))
def test_planted_parameters_are_upper_bounds_many(seed):
    vc = generate("planted_vc", {"k": 5, "n": 30, "c": 4, "density": 0.3}, seed)
    assert minimum_vertex_cover(vc).k <= 5
    nd = generate("planted_nd", {"r": 4, "sizes": [3, 5, 2, 6], "c": 4}, seed)
    assert neighborhood_decomposition(nd).r <= 4
