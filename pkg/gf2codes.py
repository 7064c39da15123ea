"""
GF(2) linear algebra, BCH codes, code tensor products and exact code-side oracles.

Vectors are packed into Python ints (bit i is coordinate i) and matrices keep a
numpy uint8 grid next to their packed columns; galois does the row reduction.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from itertools import combinations
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple, Union

import galois
import numpy as np

from config import Config
from errors import DimensionMismatch, InfeasibleParameters, TooLarge

logger = logging.getLogger(__name__)

GF2 = galois.GF(2)

_BYTE_POPCOUNT = np.array([bin(i).count("1") for i in range(256)], dtype=np.uint8)


def popcount(values) -> np.ndarray:
    """Vectorised Hamming weight of an array of non-negative ints below 2**64."""
    arr = np.ascontiguousarray(values, dtype=np.uint64)
    counts = _BYTE_POPCOUNT[arr.view(np.uint8)].reshape(arr.shape + (8,))
    return counts.sum(axis=-1, dtype=np.int64)


def check_budget(what: str, attempted: int, budget: Optional[int] = None) -> int:
    """Raise TooLarge when `attempted` candidates exceed the budget."""
    limit = Config.budget(budget)
    if attempted > limit:
        raise TooLarge(what, attempted, limit)
    return limit


def check_materialization(what: str, rows: int, cols: int) -> None:
    """Raise TooLarge when a rows x cols matrix exceeds Config.MAX_MATRIX_ENTRIES."""
    if rows * cols > Config.MAX_MATRIX_ENTRIES:
        raise TooLarge(what, rows * cols, Config.MAX_MATRIX_ENTRIES)


def ball_size(n: int, radius: int) -> int:
    """Number of vectors of length n and weight at most radius."""
    return sum(math.comb(n, w) for w in range(0, min(radius, n) + 1))


def support_precedes(a: int, b: int) -> bool:
    """True when the sorted support of a is lexicographically smaller than that of b."""
    if a == b:
        return False
    while a and b:
        low_a, low_b = a & -a, b & -b
        if low_a != low_b:
            return low_a < low_b
        a ^= low_a
        b ^= low_b
    return not a


@dataclass(frozen=True)
class BitVector:
    """Fixed-length vector over GF(2)."""

    value: int
    length: int

    def __post_init__(self):
        if self.length < 0:
            raise ValueError("length must be non-negative")
        if self.value < 0 or self.value >> self.length:
            raise ValueError(f"value does not fit in {self.length} bits")

    @classmethod
    def zeros(cls, length: int) -> "BitVector":
        return cls(0, length)

    @classmethod
    def ones(cls, length: int) -> "BitVector":
        return cls((1 << length) - 1, length)

    @classmethod
    def unit(cls, length: int, index: int) -> "BitVector":
        if not 0 <= index < length:
            raise IndexError(index)
        return cls(1 << index, length)

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> "BitVector":
        value = 0
        length = 0
        for i, bit in enumerate(bits):
            if bit not in (0, 1):
                raise ValueError(f"not a bit: {bit!r}")
            value |= int(bit) << i
            length = i + 1
        return cls(value, length)

    @classmethod
    def from_support(cls, length: int, support: Iterable[int]) -> "BitVector":
        value = 0
        for i in support:
            if not 0 <= i < length:
                raise IndexError(i)
            value |= 1 << i
        return cls(value, length)

    @classmethod
    def from_string(cls, text: str) -> "BitVector":
        return cls.from_bits(int(ch) for ch in text.strip())

    @property
    def bits(self) -> Tuple[int, ...]:
        return tuple((self.value >> i) & 1 for i in range(self.length))

    @property
    def weight(self) -> int:
        return self.value.bit_count()

    @property
    def support(self) -> Tuple[int, ...]:
        return tuple(i for i in range(self.length) if (self.value >> i) & 1)

    def __len__(self) -> int:
        return self.length

    def __getitem__(self, index: int) -> int:
        if index < 0:
            index += self.length
        if not 0 <= index < self.length:
            raise IndexError(index)
        return (self.value >> index) & 1

    def __add__(self, other: "BitVector") -> "BitVector":
        if self.length != other.length:
            raise DimensionMismatch(f"lengths {self.length} and {other.length} differ")
        return BitVector(self.value ^ other.value, self.length)

    __xor__ = __add__
    __sub__ = __add__

    def concat(self, *others: "BitVector") -> "BitVector":
        value, length = self.value, self.length
        for other in others:
            value |= other.value << length
            length += other.length
        return BitVector(value, length)

    def slice(self, start: int, stop: int) -> "BitVector":
        width = stop - start
        return BitVector((self.value >> start) & ((1 << width) - 1), width)

    def to_numpy(self) -> np.ndarray:
        return np.array(self.bits, dtype=np.uint8)

    def __str__(self) -> str:
        return "".join(str(b) for b in self.bits)


def hamming_distance(u: BitVector, v: BitVector) -> int:
    return (u + v).weight


def hamming_ball_contains(center: BitVector, radius: int, v: BitVector) -> bool:
    """Membership test for the Hamming ball B(center, radius)."""
    return hamming_distance(center, v) <= radius


class BitMatrix:
    """Immutable dense matrix over GF(2) with value equality."""

    def __init__(self, data):
        arr = np.array(data, dtype=np.uint8, copy=True)
        if arr.ndim != 2:
            raise ValueError("BitMatrix needs a 2-dimensional grid")
        if arr.size and arr.max() > 1:
            raise ValueError("BitMatrix entries must be 0 or 1")
        arr.setflags(write=False)
        self._data = arr

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "BitMatrix":
        return cls(np.zeros((rows, cols), dtype=np.uint8))

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls(np.eye(n, dtype=np.uint8))

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: Optional[int] = None) -> "BitMatrix":
        if not rows:
            return cls.zeros(0, cols or 0)
        return cls(np.array(rows, dtype=np.uint8))

    @classmethod
    def from_columns(cls, columns: Sequence[BitVector], rows: int) -> "BitMatrix":
        grid = np.zeros((rows, len(columns)), dtype=np.uint8)
        for j, col in enumerate(columns):
            if col.length != rows:
                raise DimensionMismatch("column length does not match row count")
            grid[:, j] = col.to_numpy()
        return cls(grid)

    @property
    def data(self) -> np.ndarray:
        return self._data

    @property
    def rows(self) -> int:
        return self._data.shape[0]

    @property
    def cols(self) -> int:
        return self._data.shape[1]

    @property
    def shape(self) -> Tuple[int, int]:
        return self._data.shape

    @cached_property
    def column_masks(self) -> Tuple[int, ...]:
        weights = [1 << i for i in range(self.rows)]
        return tuple(sum(w for w, bit in zip(weights, self._data[:, j]) if bit)
                     for j in range(self.cols))

    @cached_property
    def row_masks(self) -> Tuple[int, ...]:
        return tuple(sum(1 << int(j) for j in np.flatnonzero(self._data[i]))
                     for i in range(self.rows))

    @cached_property
    def rank(self) -> int:
        if self.rows == 0 or self.cols == 0:
            return 0
        return int(np.linalg.matrix_rank(self.to_gf2()))

    def to_gf2(self):
        return GF2(self._data)

    def column(self, j: int) -> BitVector:
        return BitVector(self.column_masks[j], self.rows)

    def row(self, i: int) -> BitVector:
        return BitVector(self.row_masks[i], self.cols)

    def __matmul__(self, x: BitVector) -> BitVector:
        if x.length != self.cols:
            raise DimensionMismatch(f"vector of length {x.length} against {self.cols} columns")
        acc = 0
        masks = self.column_masks
        value = x.value
        j = 0
        while value:
            if value & 1:
                acc ^= masks[j]
            value >>= 1
            j += 1
        return BitVector(acc, self.rows)

    def multiply(self, other: "BitMatrix") -> "BitMatrix":
        if self.cols != other.rows:
            raise DimensionMismatch(f"{self.shape} @ {other.shape}")
        product = self._data.astype(np.int64) @ other.data.astype(np.int64)
        return BitMatrix(product % 2)

    def transpose(self) -> "BitMatrix":
        return BitMatrix(self._data.T)

    def select_columns(self, indices: Sequence[int]) -> "BitMatrix":
        return BitMatrix(self._data[:, list(indices)].reshape(self.rows, len(indices)))

    def select_rows(self, indices: Sequence[int]) -> "BitMatrix":
        return BitMatrix(self._data[list(indices), :].reshape(len(indices), self.cols))

    def kron(self, other: "BitMatrix") -> "BitMatrix":
        return BitMatrix(np.kron(self._data, other.data) % 2)

    def tile_rows(self, copies: int) -> "BitMatrix":
        """1_copies ⊗ self: the matrix stacked `copies` times."""
        return BitMatrix(np.tile(self._data, (copies, 1)))

    def is_zero(self) -> bool:
        return not self._data.any()

    def __eq__(self, other) -> bool:
        if not isinstance(other, BitMatrix):
            return NotImplemented
        return self.shape == other.shape and np.array_equal(self._data, other.data)

    def __hash__(self) -> int:
        return hash((self.shape, self._data.tobytes()))

    def __repr__(self) -> str:
        return f"BitMatrix({self.rows}x{self.cols})"

    def __str__(self) -> str:
        return "\n".join("".join(str(int(b)) for b in row) for row in self._data)


def vstack(*mats: BitMatrix) -> BitMatrix:
    cols = {m.cols for m in mats}
    if len(cols) != 1:
        raise DimensionMismatch(f"cannot stack column counts {sorted(cols)}")
    return BitMatrix(np.vstack([m.data for m in mats]))


def hstack(*mats: BitMatrix) -> BitMatrix:
    rows = {m.rows for m in mats}
    if len(rows) != 1:
        raise DimensionMismatch(f"cannot join row counts {sorted(rows)}")
    return BitMatrix(np.hstack([m.data for m in mats]))


# ---------------------------------------------------------------------------
# Row reduction helpers
# ---------------------------------------------------------------------------

def row_reduce(grid: np.ndarray) -> Tuple[np.ndarray, List[int]]:
    """Reduced row echelon form over GF(2) and its pivot columns."""
    rows, cols = grid.shape
    if rows == 0 or cols == 0:
        return np.zeros((rows, cols), dtype=np.uint8), []
    reduced = GF2(np.asarray(grid, dtype=np.uint8)).row_reduce().view(np.ndarray).astype(np.uint8)
    pivots = []
    for i in range(rows):
        nz = np.flatnonzero(reduced[i])
        if nz.size == 0:
            break
        pivots.append(int(nz[0]))
    return reduced, pivots


def null_space(a: BitMatrix) -> List[BitVector]:
    """Basis of {x : a x = 0}, one vector per free column, in column order."""
    reduced, pivots = row_reduce(a.data)
    pivot_set = set(pivots)
    basis = []
    for free in range(a.cols):
        if free in pivot_set:
            continue
        value = 1 << free
        for i, p in enumerate(pivots):
            if reduced[i, free]:
                value |= 1 << p
        basis.append(BitVector(value, a.cols))
    return basis


def solve(a: BitMatrix, y: BitVector) -> Optional[BitVector]:
    """One solution of a x = y (free variables zero), or None."""
    if y.length != a.rows:
        raise DimensionMismatch("target length does not match row count")
    augmented = np.hstack([a.data, y.to_numpy().reshape(-1, 1)])
    reduced, pivots = row_reduce(augmented)
    if a.cols in pivots:
        return None
    value = 0
    for i, p in enumerate(pivots):
        if reduced[i, a.cols]:
            value |= 1 << p
    return BitVector(value, a.cols)


def systematic_form(basis: Sequence[BitVector], length: int) -> Tuple[List[BitVector], Tuple[int, ...]]:
    """Put a row basis in the form [I | P], permuting columns when needed.

    Returns:
        The systematic rows and the column permutation applied
        (new coordinate i holds old coordinate perm[i]).
    """
    if not basis:
        return [], tuple(range(length))
    grid = np.array([v.bits for v in basis], dtype=np.uint8)
    reduced, pivots = row_reduce(grid)
    dim = len(pivots)
    if pivots == list(range(dim)):
        perm = tuple(range(length))
    else:
        others = [c for c in range(length) if c not in set(pivots)]
        perm = tuple(pivots + others)
        reduced = reduced[:, list(perm)]
        logger.debug("Systematic form needed column permutation %s", perm)
    rows = [BitVector.from_bits(reduced[i]) for i in range(dim)]
    return rows, perm


# ---------------------------------------------------------------------------
# Codes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LinearCode:
    """Binary [h, m, d] code given by an h x m generator (codeword = G x)."""

    generator: BitMatrix
    designed_distance: int
    systematic_prefix: Optional[int] = None
    column_permutation: Optional[Tuple[int, ...]] = None

    def __post_init__(self):
        if self.generator.rank != self.generator.cols:
            raise ValueError("generator must have full column rank")
        if self.systematic_prefix is not None and self.systematic_prefix > self.message_length:
            raise ValueError("systematic prefix exceeds the message length")

    @property
    def block_length(self) -> int:
        return self.generator.rows

    @property
    def message_length(self) -> int:
        return self.generator.cols

    def encode(self, message: BitVector) -> BitVector:
        return self.generator @ message

    def __str__(self) -> str:
        return f"[{self.block_length},{self.message_length},{self.designed_distance}]"


@dataclass(frozen=True)
class Unknown:
    """Result of a capped search that found nothing at or below `exceeds`."""

    exceeds: int

    def __str__(self) -> str:
        return f"> {self.exceeds}"


def log2_exact(value: int) -> Optional[int]:
    if value <= 0 or value & (value - 1):
        return None
    return value.bit_length() - 1


def bch_parity_check(h: int, d: int) -> BitMatrix:
    """Binary parity check of the narrow-sense primitive BCH code of length h.

    Rows are the GF(2) expansions of the syndromes alpha^{(2i-1)j}, i = 1..ceil((d-1)/2),
    so the matrix has ceil((d-1)/2) * log2(h+1) rows.
    """
    mu = log2_exact(h + 1)
    if mu is None or mu < 2:
        raise InfeasibleParameters(f"h+1 must be a power of two at least 4, got h={h}")
    if not 1 <= d <= h:
        raise InfeasibleParameters(f"designed distance {d} outside [1, {h}]")
    syndromes = math.ceil((d - 1) / 2)
    if syndromes == 0:
        return BitMatrix.zeros(0, h)
    field = galois.GF(2 ** mu)
    alpha = field.primitive_element
    positions = np.arange(h)
    blocks = []
    for i in range(1, syndromes + 1):
        elements = alpha ** ((2 * i - 1) * positions % h)
        bits = elements.vector().view(np.ndarray).astype(np.uint8)
        blocks.append(bits.T)
    return BitMatrix(np.vstack(blocks))


def bch_message_length(h: int, d: int) -> int:
    mu = log2_exact(h + 1)
    if mu is None:
        raise InfeasibleParameters(f"h+1 must be a power of two, got h={h}")
    return h - math.ceil((d - 1) / 2) * mu


def bch_generator(h: int, d: int, full_dimension: bool = False) -> LinearCode:
    """Systematic generator of a narrow-sense primitive BCH code.

    Args:
        h: Block length; h+1 must be a power of two.
        d: Designed distance.
        full_dimension: Keep the whole nullspace instead of truncating the
            message length to h - ceil((d-1)/2) * log2(h+1).

    Returns:
        LinearCode systematic on its first m coordinates.

    Raises:
        InfeasibleParameters: If h+1 is not a power of two or m < 1.
    """
    if log2_exact(h + 1) is None:
        raise InfeasibleParameters(f"h+1 must be a power of two, got h={h}")
    m = bch_message_length(h, d)
    if m < 1:
        raise InfeasibleParameters(f"BCH(h={h}, d={d}) leaves message length {m} < 1")
    parity = bch_parity_check(h, d)
    basis = null_space(parity)
    rows, perm = systematic_form(basis, h)
    if not full_dimension:
        rows = rows[:m]
    generator = BitMatrix.from_columns(rows, h)
    logger.debug("BCH code h=%d d=%d: nullspace dim %d, message length %d",
                 h, d, len(basis), generator.cols)
    return LinearCode(generator, d, systematic_prefix=generator.cols,
                      column_permutation=None if perm == tuple(range(h)) else perm)


def tensor_code(c1: LinearCode, c2: LinearCode) -> LinearCode:
    """Tensor product code; coordinate (i, j) is flattened to i*h2 + j."""
    generator = c1.generator.kron(c2.generator)
    return LinearCode(generator, c1.designed_distance * c2.designed_distance)


def parity_check_of(a: BitMatrix) -> BitMatrix:
    """Rows spanning {v : v^T a = 0}, so codewords c of a satisfy H c = 0."""
    basis = null_space(a.transpose())
    return BitMatrix.from_rows([v.bits for v in basis], cols=a.rows)


# ---------------------------------------------------------------------------
# Oracles
# ---------------------------------------------------------------------------

def _gray_walk(masks: Sequence[int]) -> Iterator[Tuple[int, int]]:
    """Yield (message, xor of selected masks) for every nonzero message."""
    acc = 0
    message = 0
    for i in range(1, 1 << len(masks)):
        j = (i & -i).bit_length() - 1
        acc ^= masks[j]
        message ^= 1 << j
        yield message, acc


def _full_image_search(a: BitMatrix) -> Tuple[int, BitVector]:
    best_weight = None
    best_word = best_message = 0
    for message, word in _gray_walk(a.column_masks):
        w = word.bit_count()
        if best_weight is None or w < best_weight:
            best_weight, best_word, best_message = w, word, message
        elif w == best_weight:
            if support_precedes(word, best_word) or (
                    word == best_word and support_precedes(message, best_message)):
                best_word, best_message = word, message
    return best_weight, BitVector(best_message, a.cols)


def _capped_image_search(a: BitMatrix, weight_cap: int) -> Tuple[Union[int, Unknown], Optional[BitVector]]:
    if a.rank < a.cols:
        kernel = null_space(a)
        return 0, kernel[0]
    parity = parity_check_of(a)
    masks = parity.column_masks
    for w in range(1, weight_cap + 1):
        for support in combinations(range(a.rows), w):
            acc = 0
            for i in support:
                acc ^= masks[i]
            if acc == 0:
                codeword = BitVector.from_support(a.rows, support)
                return w, solve(a, codeword)
    return Unknown(weight_cap), None


def min_image_weight(a: BitMatrix, weight_cap: Optional[int] = None,
                     budget: Optional[int] = None,
                     mode: str = "auto") -> Tuple[Union[int, Unknown], Optional[BitVector]]:
    """Minimum of ||a x||_0 over nonzero messages x.

    Full mode walks all 2^cols messages in Gray-code order. Capped mode scans
    supports of size <= weight_cap against the parity check; a rank-deficient
    matrix has value 0.

    Returns:
        The value (or Unknown) and a witness message.
    """
    if a.cols == 0:
        raise ValueError("matrix has no columns")
    limit = Config.budget(budget)
    full_ok = a.cols <= Config.FULL_ENUMERATION_MAX_DIM and (1 << a.cols) <= limit
    if mode == "full" or (mode == "auto" and full_ok):
        check_budget("full codeword enumeration", 1 << a.cols, budget)
        logger.debug("Full enumeration over 2^%d messages", a.cols)
        return _full_image_search(a)
    if weight_cap is None:
        raise TooLarge("full codeword enumeration", 1 << a.cols, limit)
    check_budget("capped support enumeration", ball_size(a.rows, weight_cap), budget)
    logger.debug("Capped support scan up to weight %d over %d coordinates", weight_cap, a.rows)
    return _capped_image_search(a, weight_cap)


def minimum_weight_codeword(code: LinearCode, budget: Optional[int] = None) -> Tuple[int, BitVector]:
    """Exact distance and the lexicographically first minimum-weight codeword."""
    weight, message = min_image_weight(code.generator, budget=budget, mode="full")
    return weight, code.encode(message)


def code_distance_exact(code: LinearCode, weight_cap: Optional[int] = None,
                        budget: Optional[int] = None, mode: str = "auto") -> Union[int, Unknown]:
    """Exact minimum distance, or Unknown(> weight_cap) from a capped scan."""
    value, _ = min_image_weight(code.generator, weight_cap, budget, mode)
    return value


def iter_solutions(a: BitMatrix, y: BitVector, budget: Optional[int] = None) -> Iterator[BitVector]:
    """Every x with a x = y, walking the kernel coset."""
    base = solve(a, y)
    if base is None:
        return
    kernel = null_space(a)
    check_budget("kernel coset enumeration", 1 << len(kernel), budget)
    yield base
    for _, shift in _gray_walk([v.value for v in kernel]):
        yield BitVector(base.value ^ shift, a.cols)


def mld_exact(a: BitMatrix, y: BitVector, kmax: int,
              budget: Optional[int] = None) -> Optional[BitVector]:
    """Minimum-weight x with a x = y and ||x||_0 <= kmax, or None.

    Uses whichever exact strategy is cheaper: the kernel coset of the
    solution space or the support enumeration of the weight-kmax ball.
    Ties go to the lexicographically smallest support.
    """
    if y.length != a.rows:
        raise DimensionMismatch("target length does not match row count")
    if kmax < 0:
        return None
    kmax = min(kmax, a.cols)
    kernel_dim = a.cols - a.rank
    coset_cost = 1 << kernel_dim
    ball_cost = ball_size(a.cols, kmax)
    limit = Config.budget(budget)
    if min(coset_cost, ball_cost) > limit:
        raise TooLarge("MLD enumeration", min(coset_cost, ball_cost), limit)

    if coset_cost <= ball_cost:
        logger.debug("MLD via kernel coset of dimension %d", kernel_dim)
        best = None
        for x in iter_solutions(a, y, budget):
            if x.weight > kmax:
                continue
            if best is None or x.weight < best.weight or (
                    x.weight == best.weight and support_precedes(x.value, best.value)):
                best = x
        return best

    logger.debug("MLD via support scan, %d candidates", ball_cost)
    masks = a.column_masks
    target = y.value
    for w in range(0, kmax + 1):
        for support in combinations(range(a.cols), w):
            acc = 0
            for j in support:
                acc ^= masks[j]
            if acc == target:
                return BitVector.from_support(a.cols, support)
    return None


class SncVerdict(Enum):
    YES = "YES"
    NO = "NO"
    NEITHER = "NEITHER"


@dataclass(frozen=True)
class SncResult:
    verdict: SncVerdict
    witness: Optional[BitVector] = None
    min_residual: Optional[int] = None


def _unit_row_dominated(a: BitMatrix, y: BitVector) -> bool:
    """Every column owns a unit row with target 0, so ||a x - y||_0 >= ||x||_0."""
    owned = 0
    for i, mask in enumerate(a.row_masks):
        if mask and not mask & (mask - 1) and not (y.value >> i) & 1:
            owned |= mask
    return owned == (1 << a.cols) - 1


def _ball_residuals(masks: Sequence[int], target: int, cols: int, radius: int) -> Iterator[Tuple[int, int]]:
    for w in range(0, radius + 1):
        for support in combinations(range(cols), w):
            acc = target
            value = 0
            for j in support:
                acc ^= masks[j]
                value |= 1 << j
            yield value, acc.bit_count()


def snc_min_residual(a: BitMatrix, y: BitVector, radius: Optional[int] = None,
                     budget: Optional[int] = None) -> Tuple[int, BitVector]:
    """min ||a x - y||_0 over all x (radius None) or over the ball B(0, radius)."""
    masks = a.column_masks
    if radius is None:
        check_budget("SNC full enumeration", 1 << a.cols, budget)
        best, best_x = y.weight, 0
        for message, word in _gray_walk(masks):
            w = (word ^ y.value).bit_count()
            if w < best or (w == best and support_precedes(message, best_x)):
                best, best_x = w, message
        return best, BitVector(best_x, a.cols)
    check_budget("SNC ball enumeration", ball_size(a.cols, radius), budget)
    best = best_x = None
    for value, residual in _ball_residuals(masks, y.value, a.cols, radius):
        if best is None or residual < best:
            best, best_x = residual, value
    return best, BitVector(best_x, a.cols)


def snc_exact(a: BitMatrix, y: BitVector, k: int, gamma, budget: Optional[int] = None) -> SncResult:
    """Exact SNC decision.

    YES when some x in B(0, k) has ||a x - y||_0 <= k; NO when every x has
    ||a x - y||_0 > gamma k; NEITHER otherwise.
    """
    if y.length != a.rows:
        raise DimensionMismatch("target length does not match row count")
    radius = min(k, a.cols)
    residual, witness = snc_min_residual(a, y, radius, budget)
    if residual <= k:
        return SncResult(SncVerdict.YES, witness, residual)

    threshold = gamma * k
    if _unit_row_dominated(a, y):
        cap = min(a.cols, math.floor(threshold))
        cap_cost = ball_size(a.cols, cap)
        if cap_cost < (1 << a.cols):
            logger.debug("SNC weight cap %d from unit rows", cap)
            residual, witness = snc_min_residual(a, y, cap, budget)
            if residual > threshold:
                return SncResult(SncVerdict.NO, None, None)
            return SncResult(SncVerdict.NEITHER, witness, residual)
    residual, witness = snc_min_residual(a, y, None, budget)
    if residual > threshold:
        return SncResult(SncVerdict.NO, None, residual)
    return SncResult(SncVerdict.NEITHER, witness, residual)
