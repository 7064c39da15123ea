"""
Unbounded-integer matrices, lp^p norms, lattice tensor products and the
integer-side oracles.

All arithmetic is exact: numpy object arrays hold Python ints and sympy does
rank computations over the rationals.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple

import numpy as np
import sympy

from errors import DimensionMismatch
from gf2codes import check_budget

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class IntVector:
    entries: Tuple[int, ...]

    @classmethod
    def of(cls, values: Iterable[int]) -> "IntVector":
        return cls(tuple(int(v) for v in values))

    @classmethod
    def zeros(cls, length: int) -> "IntVector":
        return cls((0,) * length)

    def __len__(self) -> int:
        return len(self.entries)

    def __getitem__(self, index):
        return self.entries[index]

    def __iter__(self):
        return iter(self.entries)

    def __add__(self, other: "IntVector") -> "IntVector":
        if len(self) != len(other):
            raise DimensionMismatch("vector lengths differ")
        return IntVector(tuple(a + b for a, b in zip(self, other)))

    def __sub__(self, other: "IntVector") -> "IntVector":
        if len(self) != len(other):
            raise DimensionMismatch("vector lengths differ")
        return IntVector(tuple(a - b for a, b in zip(self, other)))

    def __neg__(self) -> "IntVector":
        return IntVector(tuple(-a for a in self))

    def scale(self, factor: int) -> "IntVector":
        return IntVector(tuple(factor * a for a in self))

    def concat(self, *others: "IntVector") -> "IntVector":
        entries = self.entries
        for other in others:
            entries += other.entries
        return IntVector(entries)

    def is_zero(self) -> bool:
        return not any(self.entries)

    @property
    def hamming_weight(self) -> int:
        return sum(1 for a in self.entries if a)

    def __str__(self) -> str:
        return " ".join(str(a) for a in self.entries)


def _object_grid(rows: int, cols: int) -> np.ndarray:
    grid = np.empty((rows, cols), dtype=object)
    grid.fill(0)
    return grid


class IntMatrix:
    """Immutable matrix of unbounded integers; bases are column bases."""

    def __init__(self, data):
        if isinstance(data, np.ndarray):
            if data.ndim != 2:
                raise DimensionMismatch("IntMatrix needs a 2-dimensional grid")
            grid = _object_grid(*data.shape)
            for (i, j), v in np.ndenumerate(data):
                grid[i, j] = int(v)
        else:
            rows = [list(r) for r in data]
            width = len(rows[0]) if rows else 0
            if any(len(r) != width for r in rows):
                raise DimensionMismatch("ragged rows")
            grid = _object_grid(len(rows), width)
            for i, row in enumerate(rows):
                for j, v in enumerate(row):
                    grid[i, j] = int(v)
        grid.setflags(write=False)
        self._data = grid

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls(_object_grid(rows, cols))

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        grid = _object_grid(n, n)
        for i in range(n):
            grid[i, i] = 1
        return cls(grid)

    @classmethod
    def diagonal(cls, values: Sequence[int]) -> "IntMatrix":
        grid = _object_grid(len(values), len(values))
        for i, v in enumerate(values):
            grid[i, i] = int(v)
        return cls(grid)

    @classmethod
    def from_columns(cls, columns: Sequence[IntVector], rows: int) -> "IntMatrix":
        grid = _object_grid(rows, len(columns))
        for j, col in enumerate(columns):
            if len(col) != rows:
                raise DimensionMismatch("column length does not match row count")
            for i, v in enumerate(col):
                grid[i, j] = v
        return cls(grid)

    @classmethod
    def block(cls, blocks: Sequence[Sequence["IntMatrix"]]) -> "IntMatrix":
        """Assemble a block matrix; every block row must agree on heights."""
        return cls(np.block([[b.data for b in row] for row in blocks]))

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

    def entry(self, i: int, j: int) -> int:
        return self._data[i, j]

    def row(self, i: int) -> IntVector:
        return IntVector(tuple(self._data[i].tolist()))

    def column(self, j: int) -> IntVector:
        return IntVector(tuple(self._data[:, j].tolist()))

    def to_lists(self) -> List[List[int]]:
        return self._data.tolist()

    def __matmul__(self, x: IntVector) -> IntVector:
        if len(x) != self.cols:
            raise DimensionMismatch(f"vector of length {len(x)} against {self.cols} columns")
        if self.cols == 0:
            return IntVector.zeros(self.rows)
        product_ = self._data.dot(np.array(x.entries, dtype=object))
        return IntVector(tuple(int(v) for v in product_))

    def scale(self, factor: int) -> "IntMatrix":
        return IntMatrix(self._data * factor)

    def transpose(self) -> "IntMatrix":
        return IntMatrix(self._data.T)

    def kron(self, other: "IntMatrix") -> "IntMatrix":
        """Kronecker product: column i*other.cols + j is a_i ⊗ b_j."""
        outer = np.multiply.outer(self._data, other.data)
        r1, c1 = self.shape
        r2, c2 = other.shape
        return IntMatrix(outer.transpose(0, 2, 1, 3).reshape(r1 * r2, c1 * c2))

    def tile_rows(self, copies: int) -> "IntMatrix":
        return IntMatrix(np.tile(self._data, (copies, 1)))

    def select_columns(self, indices: Sequence[int]) -> "IntMatrix":
        return IntMatrix(self._data[:, list(indices)].reshape(self.rows, len(indices)))

    def select_rows(self, indices: Sequence[int]) -> "IntMatrix":
        return IntMatrix(self._data[list(indices), :].reshape(len(indices), self.cols))

    def is_zero(self) -> bool:
        return not any(v for v in self._data.flat)

    def is_lower_triangular(self) -> bool:
        """b_ij = 0 for j > i and a positive diagonal on the first cols rows."""
        if self.rows < self.cols:
            return False
        for i in range(self.cols):
            if self._data[i, i] <= 0:
                return False
            if any(self._data[i, j] for j in range(i + 1, self.cols)):
                return False
        return True

    def __eq__(self, other) -> bool:
        if not isinstance(other, IntMatrix):
            return NotImplemented
        return self.shape == other.shape and self.to_lists() == other.to_lists()

    def __hash__(self) -> int:
        return hash((self.shape, tuple(map(tuple, self.to_lists()))))

    def __repr__(self) -> str:
        return f"IntMatrix({self.rows}x{self.cols})"


def int_vstack(*mats: IntMatrix) -> IntMatrix:
    if len({m.cols for m in mats}) != 1:
        raise DimensionMismatch("cannot stack different column counts")
    return IntMatrix(np.vstack([m.data for m in mats]))


def column_of(v: IntVector) -> IntMatrix:
    return IntMatrix([[a] for a in v])


@dataclass(frozen=True)
class LvsInstance:
    """Lattice vector sum (A, y, k): NO means A x != r y for every sparse x and r != 0."""

    a: IntMatrix
    y: IntVector
    k: int

    def __post_init__(self):
        if len(self.y) != self.a.rows:
            raise DimensionMismatch("target length does not match row count")
        if self.y.is_zero():
            raise ValueError("target must be nonzero")
        if any(v not in (0, 1) for v in self.y):
            raise ValueError("target entries must be 0 or 1")


@dataclass(frozen=True)
class SnvpInstance:
    """Sparse nearest vector instance (B, y, t) in lp^p."""

    b: IntMatrix
    y: IntVector
    t: int
    p: Fraction

    def __post_init__(self):
        if len(self.y) != self.b.rows:
            raise DimensionMismatch("target length does not match row count")
        if self.y.is_zero():
            raise ValueError("target must be nonzero")
        if Fraction(self.p) <= 1:
            raise ValueError("p must exceed 1")


@dataclass(frozen=True)
class SvpInstance:
    """Shortest vector instance: is there x != 0 with ||B x||_p^p <= k_pp?

    Attributes:
        structured: Set by constructions whose NO side excludes short
            annoying vectors; required for l2 tensor amplification.
        no_bound_pp: lp^p lower bound claimed for NO instances, if any.
    """

    b: IntMatrix
    k_pp: Fraction
    p: int
    structured: bool = False
    no_bound_pp: Optional[Fraction] = None

    def __post_init__(self):
        if self.b.is_zero():
            raise ValueError("basis must be nonzero")


def lp_norm_pp(v: IntVector, p: int) -> int:
    """Exact sum of |v_i|^p."""
    if p < 1 or int(p) != p:
        raise ValueError("p must be an integer >= 1")
    return sum(abs(a) ** int(p) for a in v)


def integer_root(value: int, p: int) -> int:
    """Largest integer R with R^p <= value."""
    root, _ = sympy.integer_nthroot(value, p)
    return int(root)


def tensor_lattice(a: IntMatrix, b: IntMatrix) -> IntMatrix:
    return a.kron(b)


def rational_rank(rows: Sequence[Sequence[int]]) -> int:
    if not rows or not rows[0]:
        return 0
    return sympy.Matrix(rows).rank()


def in_rational_span(columns: IntMatrix, target: IntVector) -> bool:
    """True iff target lies in the rational span of the columns."""
    if columns.cols == 0:
        return target.is_zero()
    base = columns.to_lists()
    # a target entry in an all-zero row can never be reached
    for row, value in zip(base, target):
        if value and not any(row):
            return False
    augmented = [row + [value] for row, value in zip(base, target)]
    return rational_rank(base) == rational_rank(augmented)


def coefficient_order(bound: int) -> List[int]:
    """1, -1, 2, -2, ..., bound, -bound, 0: the witness tie-break order per coordinate."""
    order = []
    for c in range(1, bound + 1):
        order.extend((c, -c))
    order.append(0)
    return order


def _triangular_bounds(b: IntMatrix, value_pp: int, p: int, offsets: Optional[Sequence[int]] = None) -> Optional[List[int]]:
    """Per-coordinate |x_i| bounds for every x with ||B x - y||_p^p <= value_pp."""
    if not b.is_lower_triangular():
        return None
    radius = integer_root(value_pp, p)
    bounds = []
    for i in range(b.cols):
        reach = radius + (abs(offsets[i]) if offsets is not None else 0)
        reach += sum(abs(b.entry(i, j)) * bounds[j] for j in range(i))
        bounds.append(reach // b.entry(i, i))
    return bounds


def svp_enum(b: IntMatrix, p: int, coeff_bound: int,
             budget: Optional[int] = None) -> Tuple[Optional[int], Optional[IntVector], bool]:
    """Minimum ||B x||_p^p over nonzero x in [-coeff_bound, coeff_bound]^cols.

    The exact flag is set when the basis is lower-triangular with positive
    diagonal and the coefficient bounds derived from the found value by
    back-substitution fit inside the searched box.
    """
    if coeff_bound < 1:
        raise ValueError("coeff_bound must be at least 1")
    check_budget("SVP enumeration", (2 * coeff_bound + 1) ** b.cols, budget)
    columns = [b.column(j).entries for j in range(b.cols)]
    best_value = best_x = None
    for x in product(coefficient_order(coeff_bound), repeat=b.cols):
        lead = next((c for c in x if c), 0)
        if lead <= 0:
            # zero vector, or the negation was already seen
            continue
        v = [0] * b.rows
        for j, c in enumerate(x):
            if c:
                col = columns[j]
                for i in range(b.rows):
                    v[i] += c * col[i]
        value = sum(abs(a) ** p for a in v)
        if best_value is None or value < best_value:
            best_value, best_x = value, x
    if best_value is None:
        return None, None, False
    bounds = _triangular_bounds(b, best_value, p)
    exact = bounds is not None and all(x <= coeff_bound for x in bounds)
    logger.debug("SVP enumeration: value %d, exact=%s", best_value, exact)
    return best_value, IntVector(best_x), exact


def cvp_enum(i: SnvpInstance, coeff_bound: int,
             budget: Optional[int] = None) -> Tuple[int, IntVector, bool]:
    """Minimum ||B x - y||_p^p over x in [-coeff_bound, coeff_bound]^cols (x = 0 allowed)."""
    if coeff_bound < 0:
        raise ValueError("coeff_bound must be non-negative")
    p = Fraction(i.p)
    if p.denominator != 1:
        raise ValueError("enumeration needs an integer p")
    p = int(p)
    b, y = i.b, i.y
    check_budget("CVP enumeration", (2 * coeff_bound + 1) ** b.cols, budget)
    columns = [b.column(j).entries for j in range(b.cols)]
    best_value = best_x = None
    for x in product(coefficient_order(coeff_bound), repeat=b.cols):
        v = [-a for a in y]
        for j, c in enumerate(x):
            if c:
                col = columns[j]
                for r in range(b.rows):
                    v[r] += c * col[r]
        value = sum(abs(a) ** p for a in v)
        if best_value is None or value < best_value:
            best_value, best_x = value, x
    bounds = _triangular_bounds(b, best_value, p, offsets=y.entries)
    exact = bounds is not None and all(x <= coeff_bound for x in bounds)
    return best_value, IntVector(best_x), exact


def lvs_no_check(i: LvsInstance, support_cap: int, budget: Optional[int] = None) -> bool:
    """True iff no support of size <= support_cap puts y in the rational column span.

    Spans grow with the support, so only supports of size min(cap, cols) are scanned.
    """
    size = min(max(support_cap, 0), i.a.cols)
    check_budget("LVS support scan", math.comb(i.a.cols, size), budget)
    for support in combinations(range(i.a.cols), size):
        if in_rational_span(i.a.select_columns(support), i.y):
            logger.debug("LVS support %s reaches a multiple of y", support)
            return False
    return True


def _row_classes(b: IntMatrix, y: IntVector) -> List[Tuple[Tuple[int, ...], int, int]]:
    """Distinct augmented rows [b_i | y_i] as (row, target, multiplicity)."""
    counts = {}
    for i in range(b.rows):
        key = (tuple(b.row(i).entries), y[i])
        counts[key] = counts.get(key, 0) + 1
    return [(row, target, mult) for (row, target), mult in counts.items()]


def _maximal_deletions(multiplicities: Sequence[int], cap: int) -> Iterator[Tuple[int, ...]]:
    """Index sets of whole classes with total multiplicity <= cap that admit no further class."""
    order = [j for j, mult in enumerate(multiplicities) if mult <= cap]

    def extend(pos: int, chosen: List[int], room: int):
        if pos == len(order):
            if all(multiplicities[j] > room for j in order if j not in chosen):
                yield tuple(chosen)
            return
        j = order[pos]
        if multiplicities[j] <= room:
            chosen.append(j)
            yield from extend(pos + 1, chosen, room - multiplicities[j])
            chosen.pop()
        yield from extend(pos + 1, chosen, room)

    yield from extend(0, [], cap)


def snvp_no_check(i: SnvpInstance, eta: Fraction, budget: Optional[int] = None) -> bool:
    """True iff discarding at most floor(η t) rows never lets B x = w y hold with w != 0.

    Identical augmented rows form one class; deleting part of a class leaves
    the system unchanged, so only maximal sets of whole classes are checked.
    """
    cap = math.floor(Fraction(eta) * i.t)
    classes = _row_classes(i.b, i.y)
    multiplicities = [mult for _, _, mult in classes]
    deletable = [j for j, mult in enumerate(multiplicities) if mult <= cap]
    check_budget("SNVP row-class scan", 2 ** len(deletable), budget)
    checked = 0
    for deleted in _maximal_deletions(multiplicities, cap):
        checked += 1
        removed = set(deleted)
        kept = [classes[j] for j in range(len(classes)) if j not in removed]
        target = IntVector(tuple(t for _, t, _ in kept))
        if target.is_zero():
            return False
        rows = IntMatrix([list(row) for row, _, _ in kept]) if kept else IntMatrix.zeros(0, i.b.cols)
        if in_rational_span(rows, target):
            logger.debug("SNVP: deleting classes %s admits a solution", deleted)
            return False
    logger.debug("SNVP NO check: %d maximal deletions, %d classes", checked, len(classes))
    return True
