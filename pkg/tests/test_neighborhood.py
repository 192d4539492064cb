import itertools
import math
import time

import pytest

from conftest import B, G, R, complete_graph, path_graph
from graphs.core import all_pairs_distances, build_graph, distance_to_set, is_consistent
from graphs.exceptions import BudgetExceededError
from graphs.structural import neighborhood_decomposition
from instances.generators import generate
from schemas.guesses import LabelCoding, OccAssignment, Part, Partition3
from solvers.exceptions import NotConsistentError, ParameterTooLargeError, SolverTimeout
from solvers.neighborhood import (
    NeighborhoodMCSSolver,
    best_for_label,
    enumerate_labelings,
    enumerate_partitions,
    enumerate_scenarios,
    minimal_responsible_set,
    occurrence_of,
    random_trials,
    solve_nd,
    type_partition_of,
)
from solvers.oracle import brute_force_mcs, enumerate_optimal_mcs

Y = "Y"


def test_p3(p3):
    solution = solve_nd(p3)
    assert solution.size == 3
    assert solution.vertices == (0, 1, 2)
    assert solution.optimal and solution.verified


def test_monochromatic_clique():
    assert solve_nd(complete_graph([R, R, R, R, R])).size == 1


def test_two_colored_edge():
    assert solve_nd(build_graph([(0, 1)], [R, B])).size == 2


def test_star(star):
    assert solve_nd(star).size == 4


def test_single_class_with_two_colors_has_one_full_scenario():
    decomp = neighborhood_decomposition(build_graph([(0, 1)], [R, B]))
    scenarios = list(enumerate_scenarios(decomp))
    t2 = [s for s in scenarios if s.partition.assignment == (Part.T2,) and s.occ.k == 2]
    assert len(t2) == 1
    assert t2[0].occ.per_type_labels == (frozenset({0, 1}),)


def test_single_colored_class_cannot_be_t2():
    decomp = neighborhood_decomposition(complete_graph([R, R, R]))
    assert [p.assignment for p in enumerate_partitions(decomp)] == [(Part.T1,)]


def _brute_scenario_count(decomp):
    count = 0
    c = max(colors[-1] for colors in decomp.type_colors)
    for assignment in itertools.product(Part, repeat=decomp.r):
        if all(part is Part.T0 for part in assignment):
            continue
        if any(part is Part.T2 and len(decomp.type_colors[t]) < 2 for t, part in enumerate(assignment)):
            continue
        for k in range(1, min(2 * decomp.r, c) + 1):
            subsets = [frozenset(s) for size in range(k + 1) for s in itertools.combinations(range(k), size)]
            for per_type in itertools.product(subsets, repeat=decomp.r):
                sizes_ok = all(
                    (part is Part.T0 and not labels)
                    or (part is Part.T1 and len(labels) == 1)
                    or (part is Part.T2 and len(labels) >= 2)
                    for part, labels in zip(assignment, per_type)
                )
                if sizes_ok and frozenset().union(*per_type) == frozenset(range(k)):
                    count += 1
    return count


def test_scenario_count_for_two_classes():
    g = build_graph([(0, 1), (1, 2), (2, 3), (3, 0)], [R, B, G, Y])
    decomp = neighborhood_decomposition(g)
    assert decomp.r == 2
    assert len(list(enumerate_scenarios(decomp))) == _brute_scenario_count(decomp)


def test_labeling_counts():
    assert len(list(enumerate_labelings(2, 2))) == 4
    assert len(list(enumerate_labelings(3, 2))) == 8


def test_exhaustive_labelings_are_distinct_total_maps():
    codings = list(enumerate_labelings(3, 2))
    assert len({coding.label_of for coding in codings}) == 8
    assert codings[0].label_of == (0, 0, 0)
    assert codings[1].label_of == (0, 0, 1)


def test_random_labelings_are_reproducible():
    first = list(enumerate_labelings(4, 3, mode="random", seed=11))
    second = list(enumerate_labelings(4, 3, mode="random", seed=11))
    assert first == second
    assert len(first) == random_trials(3)
    assert first[0].mode == "random" and first[0].seed == 11


def test_random_trial_count():
    assert random_trials(2) == math.ceil(4 * math.log(100))


def test_exhaustive_budget():
    with pytest.raises(BudgetExceededError):
        list(enumerate_labelings(5, 3, budget=100))


def test_best_for_label_forced_singleton(p3, p3_dm):
    decomp = neighborhood_decomposition(p3)
    partition = Partition3(assignment=(Part.T1, Part.T1))
    occ = OccAssignment(k=2, per_type_labels=(frozenset({0}), frozenset({1})))
    coding = LabelCoding(label_of=(0, 1))
    assert best_for_label(p3, p3_dm, decomp, partition, occ, coding, 1) == (1,)
    assert best_for_label(p3, p3_dm, decomp, partition, occ, coding, 0) == (0, 2)


def test_best_for_label_monochromatic():
    g = complete_graph([R, R, R])
    dm = all_pairs_distances(g)
    decomp = neighborhood_decomposition(g)
    partition = Partition3(assignment=(Part.T1,))
    occ = OccAssignment(k=1, per_type_labels=(frozenset({0}),))
    assert best_for_label(g, dm, decomp, partition, occ, LabelCoding(label_of=(0,)), 0) == (0,)


def test_best_for_label_infeasible_when_no_color_spans_the_label(p3, p3_dm):
    decomp = neighborhood_decomposition(p3)
    partition = Partition3(assignment=(Part.T1, Part.T1))
    occ = OccAssignment(k=1, per_type_labels=(frozenset({0}), frozenset({0})))
    coding = LabelCoding(label_of=(0, 0))
    assert best_for_label(p3, p3_dm, decomp, partition, occ, coding, 0) is None


def test_partition_and_occurrence_of_solution(p3):
    decomp = neighborhood_decomposition(p3)
    assert occurrence_of(p3, (0, 1, 2), decomp) == (frozenset({1}), frozenset({2}))
    assert type_partition_of(p3, (0, 1, 2), decomp).assignment == (Part.T1, Part.T1)
    assert type_partition_of(p3, (1,), decomp).assignment == (Part.T0, Part.T1)


def test_responsible_set_of_single_colored_class():
    g = complete_graph([R, R, R])
    assert minimal_responsible_set(g, (0,), neighborhood_decomposition(g)) == (1,)


def test_responsible_set_of_three_colored_class():
    g = complete_graph([R, B, G])
    assert minimal_responsible_set(g, (0, 1, 2), neighborhood_decomposition(g)) == (1, 2)


def test_responsible_set_requires_consistency(p3):
    with pytest.raises(NotConsistentError):
        minimal_responsible_set(p3, (1,), neighborhood_decomposition(p3))


def test_parameter_limit():
    g = path_graph([R, B, R, B, R])
    with pytest.raises(ParameterTooLargeError) as excinfo:
        solve_nd(g, limit=4)
    assert excinfo.value.parameters["r"] == 5


def test_deadline(p3):
    with pytest.raises(SolverTimeout):
        solve_nd(p3, deadline=time.monotonic() - 1)


def test_random_labeling_mode_reports_upper_bound():
    # c = n, so every consistent subset is the whole path
    g = path_graph([R, B, G, Y])
    solution = solve_nd(g, labeling_budget=250, seed=3)
    assert not solution.optimal
    assert solution.size == 4
    assert is_consistent(g, all_pairs_distances(g), solution.vertices).consistent


def test_thread_count_does_not_change_result():
    g = generate("planted_nd", {"r": 3, "sizes": [2, 3, 2], "c": 3}, 4)
    assert solve_nd(g, threads=1) == solve_nd(g, threads=3)


def test_solver_class_reads_limit_from_environment(monkeypatch, p3):
    monkeypatch.setenv("MCS_ND_LIMIT", "1")
    solver = NeighborhoodMCSSolver()
    assert solver.limit == 1
    with pytest.raises(ParameterTooLargeError):
        solver.solve(p3)


def _planted(seed, sizes=(2, 3, 2), c=3):
    return generate("planted_nd", {"r": len(sizes), "sizes": list(sizes), "c": c}, seed)


def _assert_matches_oracle(g):
    dm = all_pairs_distances(g)
    solution = solve_nd(g, dm=dm)
    assert solution.optimal
    assert is_consistent(g, dm, solution.vertices).consistent
    assert solution.size == brute_force_mcs(g, dm).size


@pytest.mark.parametrize("seed", range(15))
def test_matches_oracle_on_planted_instances(seed):
    _assert_matches_oracle(_planted(seed))


def _follows_cell_rule(g, decomp, vertices):
    chosen = set(vertices)
    for members in decomp.types:
        for color in {g.coloring[v] for v in members}:
            cell = [v for v in members if g.coloring[v] == color]
            taken = len(chosen.intersection(cell))
            if taken not in (0, 1, len(cell)):
                return False
    return True


@pytest.mark.parametrize("seed", range(10))
def test_some_optimum_takes_none_one_or_all_of_each_cell(seed):
    g = _planted(seed, sizes=(3, 4, 3), c=2)
    decomp = neighborhood_decomposition(g)
    optima = enumerate_optimal_mcs(g)
    assert any(_follows_cell_rule(g, decomp, s.vertices) for s in optima)


def _scenario_of(g, decomp, dm, members):
    """Partition, occurrence and labeling read off a consistent set; other colors take label 0."""
    responsible = minimal_responsible_set(g, members, decomp, dm)
    label = {color: i for i, color in enumerate(responsible)}
    per_type = occurrence_of(g, members, decomp, responsible)
    occ = OccAssignment(
        k=len(responsible),
        per_type_labels=tuple(frozenset(label[color] for color in colors) for colors in per_type),
    )
    coding = LabelCoding(label_of=tuple(label.get(color, 0) for color in range(1, g.c + 1)))
    return type_partition_of(g, members, decomp), occ, coding


@pytest.mark.parametrize("seed", range(8))
def test_label_solution_can_replace_its_colors_in_an_optimum(seed):
    g = _planted(seed, sizes=(3, 3, 2), c=3)
    dm = all_pairs_distances(g)
    decomp = neighborhood_decomposition(g)
    optimum = next(s.vertices for s in enumerate_optimal_mcs(g, dm) if _follows_cell_rule(g, decomp, s.vertices))
    partition, occ, coding = _scenario_of(g, decomp, dm, optimum)

    for label in range(occ.k):
        colors = set(coding.colors_with(label))
        found = best_for_label(g, dm, decomp, partition, occ, coding, label)
        assert found is not None
        exchanged = [v for v in optimum if g.coloring[v] not in colors] + list(found)
        assert len(exchanged) <= len(optimum)
        assert is_consistent(g, dm, exchanged).consistent


def test_best_for_label_with_colors_absent_from_some_types(star):
    dm = all_pairs_distances(star)
    decomp = neighborhood_decomposition(star)
    partition, occ, coding = _scenario_of(star, decomp, dm, (0, 1, 2, 3))
    center, leaf = star.coloring[0], star.coloring[1]
    assert best_for_label(star, dm, decomp, partition, occ, coding, coding.label_of[leaf - 1]) == (1, 2, 3)
    assert best_for_label(star, dm, decomp, partition, occ, coding, coding.label_of[center - 1]) == (0,)


@pytest.mark.parametrize("seed", range(10))
def test_responsible_colors_preserve_nearest_foreign_distance(seed):
    g = _planted(seed, sizes=(3, 3, 2), c=3)
    dm = all_pairs_distances(g)
    decomp = neighborhood_decomposition(g)
    members = brute_force_mcs(g, dm).vertices
    responsible = set(minimal_responsible_set(g, members, decomp, dm))
    assert len(responsible) <= 2 * decomp.r
    for v in range(g.n):
        own = g.coloring[v]
        foreign = [u for u in members if g.coloring[u] != own]
        kept = [u for u in foreign if g.coloring[u] in responsible]
        assert distance_to_set(dm, v, foreign) == distance_to_set(dm, v, kept)


@pytest.mark.slow
@pytest.mark.parametrize("seed", range(50))
def test_cell_rule_many(seed):
    g = _planted(seed, sizes=[(3, 4, 3), (4, 4, 4), (2, 5, 3)][seed % 3], c=2 + seed % 2)
    decomp = neighborhood_decomposition(g)
    assert any(_follows_cell_rule(g, decomp, s.vertices) for s in enumerate_optimal_mcs(g))


@pytest.mark.slow
@pytest.mark.parametrize("seed", range(50))
def test_responsible_colors_many(seed):
    g = _planted(seed, sizes=[(3, 3, 2), (4, 3, 4), (2, 4, 3)][seed % 3], c=3 + seed % 2)
    dm = all_pairs_distances(g)
    decomp = neighborhood_decomposition(g)
    members = brute_force_mcs(g, dm).vertices
    responsible = set(minimal_responsible_set(g, members, decomp, dm))
    for v in range(g.n):
        foreign = [u for u in members if g.coloring[u] != g.coloring[v]]
        kept = [u for u in foreign if g.coloring[u] in responsible]
        assert distance_to_set(dm, v, foreign) == distance_to_set(dm, v, kept)


@pytest.mark.slow
@pytest.mark.parametrize("seed", range(200))
def test_matches_oracle_many_planted(seed):
    sizes = [(4, 5, 5), (3, 3, 3), (2, 6, 4), (5, 4)][seed % 4]
    _assert_matches_oracle(_planted(seed, sizes=sizes, c=2 + seed % 3))


@pytest.mark.slow
def test_scales_with_classes_not_vertex_count():
    g = _planted(0, sizes=(100, 100, 100), c=6)
    solution = solve_nd(g)
    assert is_consistent(g, all_pairs_distances(g), solution.vertices).consistent
