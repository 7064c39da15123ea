"""2CSP values, 3CNF formulas and the 3SAT -> 2CSP reduction."""

from fractions import Fraction

import pytest

from csp import (Cnf3Formula, Csp2Instance, best_assignment, build_partition, csp_from_partition,
                 csp_value, lift_satisfying_assignment, partition_overlap_check, random_cnf, random_csp,
                 threesat_to_2csp)
from errors import NotSatisfying, TooLarge

SIX_CLAUSES = Cnf3Formula(6, ((1, 2, 3), (-1, 4), (2, -5, 6), (-3, -4), (5, 6), (-2, -6)))
SATISFYING = (False, True, False, False, True, False)


def test_instance_validation():
    with pytest.raises(ValueError):
        Csp2Instance.create(2, 2, {(0, 0): [(0, 0)]})
    with pytest.raises(ValueError):
        Csp2Instance.create(2, 2, {(0, 1): [(0, 2)]})


def test_values(contradictory_csp, satisfiable_twin):
    assert contradictory_csp.value_of((0, 0)) == Fraction(1, 2)
    assert contradictory_csp.first_violated_edge((0, 0)) == (1, 0)
    psi, value = best_assignment(contradictory_csp)
    assert value == Fraction(1, 2)
    assert best_assignment(satisfiable_twin) == ((0, 0), Fraction(1))


def test_value_without_edges():
    assert csp_value(Csp2Instance.create(3, 2, {})) == 1


def test_assignment_scan_budget():
    big = Csp2Instance.create(10, 4, {(0, 1): [(0, 0)]})
    with pytest.raises(TooLarge):
        best_assignment(big, budget=1000)


def test_random_csp_with_planted_assignment_is_satisfiable():
    gamma = random_csp(4, 3, 5, 0.2, seed=7, planted=(0, 1, 2, 0))
    assert gamma.num_edges == 5
    assert gamma.value_of((0, 1, 2, 0)) == 1
    assert random_csp(4, 3, 5, 0.2, seed=7, planted=(0, 1, 2, 0)) == gamma


def test_formula_fractions():
    assert SIX_CLAUSES.satisfied_fraction(SATISFYING) == 1
    assert SIX_CLAUSES.max_satisfied_fraction() == 1
    contradiction = Cnf3Formula(1, ((1,), (-1,)))
    assert contradiction.max_satisfied_fraction() == Fraction(1, 2)
    assert SIX_CLAUSES.max_occurrence == 3


def test_formula_rejects_wide_clauses():
    with pytest.raises(ValueError):
        Cnf3Formula(4, ((1, 2, 3, 4),))
    with pytest.raises(ValueError):
        Cnf3Formula(2, ((3,),))


def test_padding_adds_tautologies():
    padded = Cnf3Formula(1, ((1,), (-1,))).pad_to_multiple(3)
    assert padded.num_vars == 2
    assert padded.num_clauses == 3
    assert padded.clauses[-1] == (2, -2)
    assert SIX_CLAUSES.pad_to_multiple(3) is SIX_CLAUSES


def test_random_cnf_respects_planted_assignment():
    planted = (True, False, True, False, True)
    phi = random_cnf(5, 12, seed=3, planted=planted)
    assert phi.num_clauses == 12
    assert phi.satisfied_fraction(planted) == 1


def test_partition_and_complete_graph():
    partition = build_partition(SIX_CLAUSES, 3, seed=1)
    assert partition.k == 3
    assert sorted(c for part in partition.parts for c in part) == list(range(6))
    assert all(partition.alphabets)
    gamma = csp_from_partition(partition)
    assert gamma.num_vertices == 3
    assert gamma.edges == ((0, 1), (0, 2), (1, 2))


def test_satisfying_assignment_lifts_to_value_one():
    partition = build_partition(SIX_CLAUSES, 3, seed=1)
    gamma = csp_from_partition(partition)
    labels = lift_satisfying_assignment(partition, SATISFYING)
    assert gamma.value_of(labels) == 1


def test_lift_rejects_violating_assignment():
    partition = build_partition(SIX_CLAUSES, 2, seed=0)
    with pytest.raises(NotSatisfying):
        lift_satisfying_assignment(partition, (False,) * 6)


def test_threesat_reduction_is_deterministic():
    assert threesat_to_2csp(SIX_CLAUSES, 3, seed=5) == threesat_to_2csp(SIX_CLAUSES, 3, seed=5)


def test_overlap_check():
    parts = [(0, 1), (2, 3), (4, 5)]
    assert partition_overlap_check(SIX_CLAUSES, parts, 3)
    assert not partition_overlap_check(SIX_CLAUSES, parts, 3, bound=Fraction(0))
    with pytest.raises(ValueError):
        partition_overlap_check(SIX_CLAUSES, [(0, 1, 2), (3, 4)], 2)


def test_pairwise_overlaps_match_part_variables():
    partition = build_partition(SIX_CLAUSES, 3, seed=1)
    overlaps = partition.pairwise_overlaps()
    assert set(overlaps) == {(0, 1), (0, 2), (1, 2)}
    for (i, j), shared in overlaps.items():
        assert shared == len(set(partition.part_vars[i]) & set(partition.part_vars[j]))


def test_planted_formulas_reduce_to_value_one():
    for seed in range(50):
        planted = tuple(bool((seed >> i) & 1) for i in range(6))
        phi = random_cnf(6, 6, seed=seed, planted=planted)
        gamma = threesat_to_2csp(phi, 2, seed=seed)
        assert csp_value(gamma) == 1, seed
        partition = build_partition(phi, 2, seed=seed)
        assert gamma.value_of(lift_satisfying_assignment(partition, planted)) == 1


def test_overlap_check_holds_on_most_seeds():
    held = 0
    for seed in range(40):
        phi = random_cnf(30, 20, seed=seed, max_occurrence=3)
        partition = build_partition(phi, 10, seed=seed)
        held += partition_overlap_check(partition.formula, partition.parts, 10)
    assert held >= 36


def test_value_never_grows_when_a_constraint_shrinks():
    for seed in range(30):
        gamma = random_csp(3, 2, 3, 0.6, seed=seed)
        before = csp_value(gamma)
        for index, allowed in enumerate(gamma.constraints):
            if not allowed:
                continue
            constraints = dict(zip(gamma.edges, gamma.constraints))
            constraints[gamma.edges[index]] = sorted(allowed)[1:]
            smaller = Csp2Instance.create(gamma.num_vertices, gamma.alphabet_size, constraints)
            assert csp_value(smaller) <= before
