"""Integer matrices, norms and the lattice oracles."""

from fractions import Fraction

import numpy as np
import pytest

from errors import DimensionMismatch, TooLarge
from latticecore import (IntMatrix, IntVector, LvsInstance, SnvpInstance, SvpInstance, coefficient_order,
                         cvp_enum, in_rational_span, integer_root, lp_norm_pp, lvs_no_check,
                         snvp_no_check, svp_enum, tensor_lattice)


def test_vector_arithmetic():
    u, v = IntVector.of([1, -2, 0]), IntVector.of([3, 2, 5])
    assert (u + v).entries == (4, 0, 5)
    assert (v - u).entries == (2, 4, 5)
    assert (-u).entries == (-1, 2, 0)
    assert u.hamming_weight == 2
    assert str(u) == "1 -2 0"
    with pytest.raises(DimensionMismatch):
        u + IntVector.zeros(2)


def test_big_integers_stay_exact():
    huge = 10 ** 40
    m = IntMatrix([[huge, 1], [0, huge]])
    assert (m @ IntVector.of([huge, 1])).entries == (huge * huge + 1, huge)


def test_kron_column_order():
    """Column i * cols(b) + j of A ⊗ B is a_i ⊗ b_j."""
    a = IntMatrix([[1, 2], [3, 4]])
    b = IntMatrix([[0, 1], [1, 0]])
    k = tensor_lattice(a, b)
    assert k.to_lists() == [[0, 1, 0, 2], [1, 0, 2, 0], [0, 3, 0, 4], [3, 0, 4, 0]]


def _random_basis(rng):
    while True:
        grid = rng.integers(-3, 4, size=(2, 2))
        if grid[0, 0] * grid[1, 1] != grid[0, 1] * grid[1, 0]:
            return IntMatrix(grid)


def test_tensor_lattice_short_vector_is_at_most_product():
    """The tensor of two short vectors lies in A ⊗ B with squared norm λ(A)² λ(B)²."""
    rng = np.random.default_rng(7)
    for _ in range(12):
        a, b = _random_basis(rng), _random_basis(rng)
        value_a, xa, _ = svp_enum(a, 2, 1)
        value_b, xb, _ = svp_enum(b, 2, 1)
        product = tensor_lattice(a, b)
        value, _, _ = svp_enum(product, 2, 1)
        assert value <= value_a * value_b
        lifted = IntVector.of(u * v for u in xa for v in xb)
        assert lp_norm_pp(product @ lifted, 2) == value_a * value_b


def test_lower_triangular_detection():
    assert IntMatrix.identity(3).is_lower_triangular()
    assert IntMatrix([[2, 0], [5, 1], [7, 7]]).is_lower_triangular()
    assert not IntMatrix([[1, 1], [0, 1]]).is_lower_triangular()


def test_norms_and_roots():
    v = IntVector.of([1, -2, 3])
    assert lp_norm_pp(v, 1) == 6
    assert lp_norm_pp(v, 2) == 14
    assert integer_root(26, 2) == 5
    assert integer_root(27, 3) == 3
    with pytest.raises(ValueError):
        lp_norm_pp(v, 0)


def test_coefficient_order():
    assert coefficient_order(2) == [1, -1, 2, -2, 0]


def test_rational_span():
    cols = IntMatrix([[1, 0], [1, 0], [0, 2]])
    assert in_rational_span(cols, IntVector.of([3, 3, 1]))
    assert not in_rational_span(cols, IntVector.of([1, 0, 0]))
    assert not in_rational_span(IntMatrix.zeros(2, 0), IntVector.of([1, 0]))


def test_svp_enum_identity():
    value, x, exact = svp_enum(IntMatrix.identity(3), 2, 2)
    assert value == 1
    assert x.entries == (1, 0, 0)
    assert exact


def test_svp_enum_budget():
    with pytest.raises(TooLarge):
        svp_enum(IntMatrix.identity(8), 2, 2, budget=100)


def test_cvp_enum():
    snvp = SnvpInstance(IntMatrix([[2, 0], [0, 2], [1, 1]]), IntVector.of([2, 2, 1]), 1, Fraction(2))
    value, x, exact = cvp_enum(snvp, 1)
    assert value == 1
    assert x.entries == (1, 1)
    assert exact


def test_instance_validation():
    with pytest.raises(ValueError):
        LvsInstance(IntMatrix.identity(2), IntVector.of([0, 0]), 1)
    with pytest.raises(ValueError):
        LvsInstance(IntMatrix.identity(2), IntVector.of([2, 0]), 1)
    with pytest.raises(ValueError):
        SnvpInstance(IntMatrix.identity(1), IntVector.of([1]), 1, Fraction(1))
    with pytest.raises(ValueError):
        SvpInstance(IntMatrix.zeros(2, 2), Fraction(1), 2)


def test_lvs_no_check():
    a = IntMatrix([[1, 0, 1], [0, 1, 1]])
    reachable = LvsInstance(a, IntVector.of([1, 1]), 1)
    assert not lvs_no_check(reachable, 1)
    unreachable = LvsInstance(IntMatrix([[1, 0], [0, 1]]), IntVector.of([1, 1]), 1)
    assert lvs_no_check(unreachable, 1)
    assert not lvs_no_check(unreachable, 2)


def test_snvp_no_check_row_deletions():
    """Deleting the single row that blocks x = 1 turns a NO instance into a possible YES."""
    b = IntMatrix([[1], [1], [1], [1]])
    snvp = SnvpInstance(b, IntVector.of([1, 1, 1, 0]), 1, Fraction(2))
    assert snvp_no_check(snvp, Fraction(1, 2))
    assert not snvp_no_check(snvp, Fraction(1))
