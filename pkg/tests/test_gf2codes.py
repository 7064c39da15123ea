"""GF(2) vectors and matrices, BCH codes and the code-side oracles."""

from itertools import combinations_with_replacement

import numpy as np
import pytest

from errors import DimensionMismatch, InfeasibleParameters, TooLarge
from gf2codes import (BitMatrix, BitVector, LinearCode, Unknown, bch_generator, bch_parity_check, check_budget,
                      code_distance_exact, hamming_ball_contains, hamming_distance, iter_solutions,
                      log2_exact, min_image_weight, minimum_weight_codeword, mld_exact, null_space, popcount, snc_exact,
                      snc_min_residual, SncVerdict, solve, support_precedes, tensor_code, vstack)


def test_bitvector_text_and_support():
    """Bit i of the packed value is coordinate i, printed left to right."""
    v = BitVector.from_string("1010")
    assert v.value == 0b0101
    assert v.weight == 2
    assert v.support == (0, 2)
    assert str(v) == "1010"
    assert v[0] == 1 and v[1] == 0 and v[-2] == 1
    assert BitVector.from_support(4, (0, 2)) == v


def test_bitvector_arithmetic():
    u, v = BitVector.from_string("1100"), BitVector.from_string("1010")
    assert str(u + v) == "0110"
    assert hamming_distance(u, v) == 2
    assert hamming_ball_contains(u, 2, v)
    assert not hamming_ball_contains(u, 1, v)
    assert str(u.concat(BitVector.ones(2))) == "110011"
    assert str(u.slice(1, 3)) == "10"
    with pytest.raises(DimensionMismatch):
        u + BitVector.zeros(3)


def test_bitvector_rejects_overflow():
    with pytest.raises(ValueError):
        BitVector(8, 3)


def test_popcount_vectorised():
    counts = popcount(np.array([0, 1, 3, 2 ** 63], dtype=np.uint64))
    assert counts.tolist() == [0, 1, 2, 1]


def test_support_precedes_is_lexicographic():
    assert support_precedes(0b101, 0b10)      # {0,2} < {1}
    assert support_precedes(0b1, 0b11)        # {0} < {0,1}
    assert not support_precedes(0b11, 0b1)
    assert not support_precedes(0b110, 0b110)


def test_matrix_product_rank_and_kernel():
    a = BitMatrix.from_rows([[1, 1, 0], [0, 1, 1]])
    assert a @ BitVector.from_string("111") == BitVector.from_string("00")
    assert a.rank == 2
    kernel = null_space(a)
    assert len(kernel) == 1
    assert str(kernel[0]) == "111"
    assert BitMatrix.from_rows([[1, 1], [1, 1]]).rank == 1


def test_solve_and_iter_solutions():
    a = BitMatrix.from_rows([[1, 1, 0], [0, 1, 1]])
    y = BitVector.from_string("10")
    x = solve(a, y)
    assert a @ x == y
    solutions = {str(s) for s in iter_solutions(a, y)}
    assert solutions == {"100", "011"}
    assert solve(BitMatrix.zeros(1, 2), BitVector.ones(1)) is None


def test_stacking_checks_shapes():
    with pytest.raises(DimensionMismatch):
        vstack(BitMatrix.zeros(1, 2), BitMatrix.zeros(1, 3))


def test_log2_exact():
    assert log2_exact(16) == 4
    assert log2_exact(15) is None
    assert log2_exact(0) is None


@pytest.mark.parametrize("h,d,m", [(7, 3, 4), (15, 5, 7)])
def test_bch_distance_meets_design(h, d, m):
    """Exact distance of narrow-sense BCH codes by full enumeration."""
    code = bch_generator(h, d)
    assert code.generator.shape == (h, m)
    assert code_distance_exact(code) == d
    weight, word = minimum_weight_codeword(code)
    assert weight == d and word.weight == d


def test_bch_parity_annihilates_generator():
    code = bch_generator(15, 5)
    parity = bch_parity_check(15, 5)
    assert parity.shape == (8, 15)
    assert parity.multiply(code.generator).is_zero()
    assert code.systematic_prefix == 7
    assert code.column_permutation is None


def test_bch_rejects_bad_lengths():
    with pytest.raises(InfeasibleParameters):
        bch_generator(14, 3)
    with pytest.raises(InfeasibleParameters):
        bch_generator(7, 7)


def test_capped_distance_search():
    """A cap below the distance yields Unknown; at the distance the scan finds a codeword."""
    code = bch_generator(15, 5)
    value, _ = min_image_weight(code.generator, weight_cap=4, mode="capped")
    assert value == Unknown(4)
    assert str(value) == "> 4"
    value, message = min_image_weight(code.generator, weight_cap=5, mode="capped")
    assert value == 5
    assert code.encode(message).weight == 5


def test_capped_search_on_rank_deficient_matrix():
    value, message = min_image_weight(BitMatrix.from_rows([[1, 1], [1, 1]]), weight_cap=2, mode="capped")
    assert value == 0
    assert str(message) == "11"


def test_tensor_code_distance_multiplies():
    hamming = bch_generator(7, 3)
    product = tensor_code(hamming, hamming)
    assert product.generator.shape == (49, 16)
    assert code_distance_exact(product, mode="full") == 9


SMALL_CODES = {
    "rep2": LinearCode(BitMatrix.from_rows([[1], [1]]), 2),
    "rep3": LinearCode(BitMatrix.from_rows([[1], [1], [1]]), 3),
    "parity3": LinearCode(BitMatrix.from_rows([[1, 0], [0, 1], [1, 1]]), 2),
    "short5": LinearCode(BitMatrix.from_rows([[1, 0], [1, 0], [1, 1], [0, 1], [0, 1]]), 3),
    "plain2": LinearCode(BitMatrix.identity(2), 1),
    "hamming7": bch_generator(7, 3),
}


@pytest.mark.parametrize("left, right", [pair for pair in combinations_with_replacement(SMALL_CODES, 2)
                                         if pair != ("hamming7", "hamming7")])
def test_tensor_distance_is_product_of_distances(left, right):
    c1, c2 = SMALL_CODES[left], SMALL_CODES[right]
    d1, d2 = code_distance_exact(c1), code_distance_exact(c2)
    assert (d1, d2) == (c1.designed_distance, c2.designed_distance)
    product = tensor_code(c1, c2)
    assert code_distance_exact(product) == d1 * d2


def test_full_enumeration_respects_budget():
    code = bch_generator(15, 5)
    with pytest.raises(TooLarge):
        min_image_weight(code.generator, budget=10, mode="full")
    with pytest.raises(TooLarge):
        check_budget("scan", 11, 10)


def test_mld_exact_prefers_light_solutions():
    a = BitMatrix.from_rows([[1, 1, 0], [0, 1, 1]])
    y = BitVector.from_string("10")
    assert str(mld_exact(a, y, 3)) == "100"
    assert mld_exact(a, y, 0) is None
    assert mld_exact(BitMatrix.zeros(1, 2), BitVector.ones(1), 2) is None


def test_mld_exact_budget():
    a = BitMatrix.zeros(1, 30)
    with pytest.raises(TooLarge):
        mld_exact(a, BitVector.zeros(1), 30, budget=1000)


def _snc(copies, row, identity, target):
    blocks = [BitMatrix.from_rows([row])] * copies
    if identity:
        blocks.append(BitMatrix.identity(len(row)))
    return vstack(*blocks), BitVector.from_string(target)


def test_snc_yes():
    a, y = _snc(3, [1, 1], True, "11100")
    result = snc_exact(a, y, 1, 2)
    assert result.verdict is SncVerdict.YES
    assert str(result.witness) == "10"
    assert result.min_residual == 1


def test_snc_no():
    a, y = _snc(3, [0, 0], True, "11100")
    result = snc_exact(a, y, 1, 2)
    assert result.verdict is SncVerdict.NO
    assert snc_min_residual(a, y)[0] == 3


def test_snc_neither():
    a, y = _snc(2, [0], True, "110")
    result = snc_exact(a, y, 1, 3)
    assert result.verdict is SncVerdict.NEITHER
    assert result.min_residual == 2
