"""2CSP -> MLD, composition and amplification, MLD -> SNC."""

from fractions import Fraction

import numpy as np
import pytest

from csp import Csp2Instance, csp_value, random_csp
from errors import EmptyConstraint, InfeasibleParameters, NotASolution, NotSatisfying, ParameterTooSmall, ZeroTarget
from gf2codes import BitMatrix, BitVector, iter_solutions, mld_exact
from mldchain import (MldInstance, amplification_schedule, amplify, compose, compose_witness, csp_labels,
                      csp_to_mld, mld_to_snc, mld_to_snc_residual_identity, power_at_least, snc_copies,
                      witness_lift, witness_lower)


def test_equality_instance_matrix(equality_csp):
    mld, columns, rows = csp_to_mld(equality_csp, Fraction(1, 4))
    assert mld.a.shape == (7, 6)
    assert mld.k == 3
    assert str(mld.y) == "1110000"
    assert str(mld.a).splitlines() == ["110000", "001100", "000011",
                                       "100010", "010001", "001010", "000101"]
    assert columns[0] == ("vertex", 0, 0)
    assert rows[3] == ("consistency", 0, 0, 0)


def test_labels_match_counts(contradictory_csp):
    columns, rows = csp_labels(contradictory_csp)
    assert len(columns) == 6
    assert len(rows) == 2 + 2 + 2 * 2 * 2


def test_witness_lift_and_lower(equality_csp):
    mld, columns, _ = csp_to_mld(equality_csp, Fraction(1, 4))
    x = witness_lift(equality_csp, (1, 1), columns)
    assert mld.a @ x == mld.y
    assert x.weight == mld.k
    psi, value = witness_lower(x, columns, equality_csp)
    assert psi == (1, 1) and value == 1
    with pytest.raises(NotASolution):
        witness_lower(BitVector.zeros(6), columns, equality_csp)
    with pytest.raises(NotSatisfying):
        witness_lift(equality_csp, (0, 1), columns)


def test_oracle_agrees_with_csp_value(equality_csp, contradictory_csp):
    mld, _, _ = csp_to_mld(equality_csp, Fraction(1, 4))
    assert str(mld_exact(mld.a, mld.y, mld.k)) == "101010"
    no, _, _ = csp_to_mld(contradictory_csp, Fraction(1, 4))
    assert no.a.shape == (12, 6) and no.k == 4
    assert mld_exact(no.a, no.y, no.a.cols) is None


def test_empty_constraint():
    gamma = Csp2Instance.create(2, 2, {(0, 1): []})
    with pytest.raises(EmptyConstraint):
        csp_to_mld(gamma, Fraction(1, 4))
    canonical, _, _ = csp_to_mld(gamma, Fraction(1, 4), allow_empty=True)
    assert canonical.a.is_zero() and canonical.y.weight == 1
    assert canonical.k == 3


def test_compose_unit_instances(unit_mld_yes):
    composite = compose(unit_mld_yes, unit_mld_yes)
    assert str(composite.a).splitlines() == ["10", "11"]
    assert str(composite.y) == "10"
    assert composite.k == 2


def test_compose_shape_and_witness(equality_csp):
    inner, columns, _ = csp_to_mld(equality_csp, Fraction(1, 4))
    outer = MldInstance(BitMatrix.from_rows([[1, 1, 0], [0, 1, 1]]), BitVector.from_string("10"), 1)
    composite = compose(inner, outer)
    assert composite.a.shape == (2 + 7 * 3, 3 + 6 * 3)
    assert composite.k == 1 * (3 + 1)
    x1 = witness_lift(equality_csp, (0, 0), columns)
    x2 = BitVector.from_string("100")
    x = compose_witness(x1, x2, inner, outer)
    assert composite.a @ x == composite.y
    assert x.weight == x2.weight * (x1.weight + 1)


def test_compose_rejects_zero_target(unit_mld_yes):
    zero = MldInstance(BitMatrix.from_rows([[1]]), BitVector.zeros(1), 1)
    with pytest.raises(ZeroTarget):
        compose(zero, unit_mld_yes)


def test_power_at_least_is_exact():
    assert power_at_least(Fraction(2), Fraction(1, 2), Fraction(7, 5))
    assert not power_at_least(Fraction(2), Fraction(1, 2), Fraction(3, 2))


def test_schedule_steps():
    """k -> k^2 + k per step and the gap exponent grows by (2 - η)."""
    steps = amplification_schedule(Fraction(2), Fraction(4), Fraction(1, 2), 3)
    assert [s.k for s in steps] == [3, 12, 156]
    assert [s.gap_exponent for s in steps] == [1, Fraction(3, 2), Fraction(9, 4)]


def test_schedule_takes_at_least_one_step():
    steps = amplification_schedule(Fraction(2), Fraction(1), Fraction(1, 2), 3)
    assert len(steps) == 2


def test_schedule_preconditions():
    with pytest.raises(ParameterTooSmall):
        amplification_schedule(Fraction(11, 10), Fraction(2), Fraction(1, 2), 1)
    with pytest.raises(InfeasibleParameters):
        amplification_schedule(Fraction(2), Fraction(4), Fraction(1), 3)
    with pytest.raises(InfeasibleParameters):
        amplification_schedule(Fraction(1), Fraction(2), Fraction(1, 2), 3)
    with pytest.raises(InfeasibleParameters):
        amplification_schedule(Fraction(2), Fraction(1), Fraction(2), 3)


def test_amplify_keeps_yes_instances_yes(unit_mld_yes):
    amplified = amplify(unit_mld_yes, Fraction(2), Fraction(1), Fraction(1))
    assert amplified.k == 2
    found = mld_exact(amplified.a, amplified.y, amplified.k)
    assert found is not None and found.weight <= amplified.k


def test_snc_shape():
    mld = MldInstance(BitMatrix.from_rows([[1, 1]]), BitVector.ones(1), 1)
    snc = mld_to_snc(mld, Fraction(2))
    assert snc_copies(1, Fraction(2)) == 3
    assert snc.a.shape == (5, 2)
    assert str(snc.y) == "11100"
    assert snc.k == 1


def test_residual_identity_for_every_vector(equality_csp):
    mld, _, _ = csp_to_mld(equality_csp, Fraction(1, 4))
    gamma = Fraction(13, 12)
    snc = mld_to_snc(mld, gamma)
    assert snc.a.shape == (5 * 7 + 6, 6)
    for value in range(1 << mld.a.cols):
        assert mld_to_snc_residual_identity(mld, snc, gamma, BitVector(value, mld.a.cols))


def _sweep_csp(seed):
    """|V| in 2..4, |Σ| in 2..3, up to three edges; even seeds carry a planted assignment."""
    n = 2 + seed % 3
    sigma = 2 + (seed // 3) % 2
    edges = min(1 + (seed // 6) % 3, n * (n - 1))
    planted = [(seed + u) % sigma for u in range(n)] if seed % 2 == 0 else None
    return random_csp(n, sigma, edges, 0.4, seed=seed, planted=planted)


def test_random_csp_promise_sweep():
    eps = Fraction(1, 4)
    yes = no = 0
    for seed in range(200):
        gamma = _sweep_csp(seed)
        value = csp_value(gamma)
        mld, _, _ = csp_to_mld(gamma, eps, allow_empty=True)
        if value == 1:
            found = mld_exact(mld.a, mld.y, mld.k)
            assert found is not None and found.weight == mld.k, seed
            yes += 1
        elif value < 1 - eps:
            bound = int((1 + eps / 3) * mld.k)
            assert mld_exact(mld.a, mld.y, bound) is None, seed
            no += 1
    assert yes >= 100 and no > 0


def test_witness_lower_is_sound_on_short_solutions():
    """Every solution of weight <= (1 + ε/3)k lowers to an assignment of value >= 1 - ε."""
    eps = Fraction(1, 4)
    checked = 0
    for seed in range(80):
        sigma = 2 + seed % 2
        gamma = random_csp(3, sigma, 2 + seed % 2, 0.5, seed=seed,
                           planted=[seed % sigma, 0, 1] if seed % 3 else None)
        if any(not allowed for allowed in gamma.constraints):
            continue
        mld, columns, _ = csp_to_mld(gamma, eps)
        bound = (1 + eps / 3) * mld.k
        for x in iter_solutions(mld.a, mld.y):
            if x.weight > bound:
                continue
            _, value = witness_lower(x, columns, gamma)
            assert value >= 1 - eps, seed
            checked += 1
    assert checked > 0


def _random_mld(seed):
    """3x4 instance with a nonzero target, plus its minimum solution weight (None if unsolvable)."""
    rng = np.random.default_rng(seed)
    a = BitMatrix(rng.integers(0, 2, size=(3, 4)).astype(np.uint8))
    y = BitVector(int(rng.integers(1, 8)), 3)
    return a, y, mld_exact(a, y, a.cols)


def test_compose_yes_yes_pairs():
    instances = []
    seed = 0
    while len(instances) < 100:
        a, y, best = _random_mld(seed)
        seed += 1
        if best is not None:
            instances.append((MldInstance(a, y, best.weight), best))
    for (i1, x1), (i2, x2) in zip(instances[::2], instances[1::2]):
        composite = compose(i1, i2)
        assert composite.k == i2.k * (i1.k + 1)
        x = compose_witness(x1, x2, i1, i2)
        assert composite.a @ x == composite.y
        found = mld_exact(composite.a, composite.y, composite.k)
        assert found is not None and found.weight <= composite.k


def test_compose_no_no_pairs():
    """With both sides far at gap 2 the composite has no solution of weight <= 2k2 + 4k1k2."""
    gap = 2
    instances = []
    for seed in range(100):
        a, y, best = _random_mld(seed)
        # k below half the minimum weight; an unsolvable instance is far for any k
        k = a.cols if best is None else (best.weight - 1) // gap
        instances.append(MldInstance(a, y, k))
    for i1, i2 in zip(instances[::2], instances[1::2]):
        composite = compose(i1, i2)
        bound = gap * i2.k + gap * gap * i1.k * i2.k
        assert mld_exact(composite.a, composite.y, bound) is None
