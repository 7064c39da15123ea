"""
GF(2) reduction chain: 2CSP -> MLD, the composition operator with gap
amplification, and MLD -> SNC.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np

from csp import Csp2Instance
from errors import (DimensionMismatch, EmptyConstraint, InfeasibleParameters,
                    NotASolution, NotSatisfying, ParameterTooSmall, ZeroTarget)
from gf2codes import BitMatrix, BitVector, check_materialization, vstack

logger = logging.getLogger(__name__)

ColumnLabel = Tuple
RowLabel = Tuple


@dataclass(frozen=True)
class MldInstance:
    """GapMLD instance (A, y, k): is there x with Ax = y and ||x||_0 <= k?"""

    a: BitMatrix
    y: BitVector
    k: int

    def __post_init__(self):
        if self.y.length != self.a.rows:
            raise DimensionMismatch(f"target of length {self.y.length} for {self.a.rows} rows")
        if not 0 <= self.k <= self.a.cols:
            raise ValueError(f"parameter k={self.k} outside [0, {self.a.cols}]")


@dataclass(frozen=True)
class SncInstance:
    """Sparse nearest codeword instance (A, y, k)."""

    a: BitMatrix
    y: BitVector
    k: int

    def __post_init__(self):
        if self.y.length != self.a.rows:
            raise DimensionMismatch(f"target of length {self.y.length} for {self.a.rows} rows")
        if self.k < 0:
            raise ValueError("k must be non-negative")


# ---------------------------------------------------------------------------
# 2CSP -> MLD
# ---------------------------------------------------------------------------

def csp_labels(gamma: Csp2Instance) -> Tuple[Tuple[ColumnLabel, ...], Tuple[RowLabel, ...]]:
    """Column and row labels in the fixed matrix order.

    Columns: ("vertex", u, σ) vertex-major, then ("edge", e, σ0, σ1) edge-major.
    Rows: ("vertex", u), ("edge", e), then ("consistency", e, σ, b) per edge with b=0 first.
    """
    sigma = range(gamma.alphabet_size)
    columns = [("vertex", u, s) for u in range(gamma.num_vertices) for s in sigma]
    for e, allowed in enumerate(gamma.constraints):
        columns.extend(("edge", e, s0, s1) for s0, s1 in sorted(allowed))
    rows = [("vertex", u) for u in range(gamma.num_vertices)]
    rows.extend(("edge", e) for e in range(gamma.num_edges))
    for e in range(gamma.num_edges):
        rows.extend(("consistency", e, s, b) for b in (0, 1) for s in sigma)
    return tuple(columns), tuple(rows)


def csp_matrix(gamma: Csp2Instance, signed: bool = False) -> Tuple[np.ndarray, Tuple, Tuple]:
    """Integer grid of the 2CSP matrix.

    With signed=True the edge-column entries of consistency rows are -1
    (the lattice variant); over GF(2) they are 1.
    """
    columns, rows = csp_labels(gamma)
    col_index = {label: j for j, label in enumerate(columns)}
    grid = np.zeros((len(rows), len(columns)), dtype=np.int64)
    consistency_entry = -1 if signed else 1
    for i, label in enumerate(rows):
        kind = label[0]
        if kind == "vertex":
            u = label[1]
            for s in range(gamma.alphabet_size):
                grid[i, col_index[("vertex", u, s)]] = 1
        elif kind == "edge":
            e = label[1]
            for s0, s1 in gamma.constraints[e]:
                grid[i, col_index[("edge", e, s0, s1)]] = 1
        else:
            _, e, s, b = label
            endpoint = gamma.edges[e][b]
            grid[i, col_index[("vertex", endpoint, s)]] = 1
            for pair in gamma.constraints[e]:
                if pair[b] == s:
                    grid[i, col_index[("edge", e) + pair]] = consistency_entry
    return grid, columns, rows


def csp_target(gamma: Csp2Instance) -> Tuple[int, ...]:
    """y = 1^{|V|+|E|} followed by 0^{2|E||Σ|}."""
    ones = gamma.num_vertices + gamma.num_edges
    return (1,) * ones + (0,) * (2 * gamma.num_edges * gamma.alphabet_size)


def find_empty_constraint(gamma: Csp2Instance) -> Optional[Tuple[int, int]]:
    for edge, allowed in zip(gamma.edges, gamma.constraints):
        if not allowed:
            return edge
    return None


def csp_to_mld(gamma: Csp2Instance, eps: Fraction,
               allow_empty: bool = False) -> Tuple[MldInstance, Tuple[ColumnLabel, ...], Tuple[RowLabel, ...]]:
    """2CSP_ε -> MLD_{1+ε/3}.

    Args:
        gamma: The 2CSP instance.
        eps: Soundness gap of the source; the output gap is 1 + eps/3.
        allow_empty: Replace an instance with an empty constraint by a
            canonical NO instance instead of raising.

    Returns:
        The MLD instance with k = |V| + |E| and its column and row labels.

    Raises:
        EmptyConstraint: If an edge allows no pair and allow_empty is False.
    """
    eps = Fraction(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    k = gamma.num_vertices + gamma.num_edges
    empty = find_empty_constraint(gamma)
    if empty is not None:
        if not allow_empty:
            raise EmptyConstraint(empty)
        logger.warning("Edge %s allows no pair; emitting the canonical NO instance", empty)
        return MldInstance(BitMatrix.zeros(1, k), BitVector.ones(1), k), (), ()

    grid, columns, rows = csp_matrix(gamma)
    check_materialization("2CSP matrix", len(rows), len(columns))
    instance = MldInstance(BitMatrix(grid % 2), BitVector.from_bits(csp_target(gamma)), k)
    logger.info("2CSP -> MLD: %dx%d, k=%d, gap %s", instance.a.rows, instance.a.cols, k, 1 + eps / 3)
    return instance, columns, rows


def witness_lift(gamma: Csp2Instance, psi: Sequence[int], labels: Sequence[ColumnLabel]) -> BitVector:
    """Indicator vector of the columns chosen by a satisfying assignment."""
    violated = gamma.first_violated_edge(psi)
    if violated is not None:
        raise NotSatisfying(violated)
    chosen = []
    for j, label in enumerate(labels):
        if label[0] == "vertex":
            _, u, s = label
            if psi[u] == s:
                chosen.append(j)
        else:
            _, e, s0, s1 = label
            u, v = gamma.edges[e]
            if psi[u] == s0 and psi[v] == s1:
                chosen.append(j)
    return BitVector.from_support(len(labels), chosen)


def witness_lower(x: BitVector, labels: Sequence[ColumnLabel],
                  gamma: Csp2Instance) -> Tuple[Tuple[int, ...], Fraction]:
    """Read an assignment off a solution of Ax = y.

    Each vertex takes the least label σ with x_(u,σ) = 1.

    Raises:
        NotASolution: If x does not solve the instance built from gamma.
    """
    grid, columns, _ = csp_matrix(gamma)
    if tuple(labels) != columns or x.length != len(columns):
        raise DimensionMismatch("labels do not match the instance built from gamma")
    a = BitMatrix(grid % 2)
    if a @ x != BitVector.from_bits(csp_target(gamma)):
        raise NotASolution("x does not satisfy Ax = y")
    chosen = {}
    for j in x.support:
        label = labels[j]
        if label[0] == "vertex":
            _, u, s = label
            chosen.setdefault(u, s)
    psi = tuple(chosen[u] for u in range(gamma.num_vertices))
    return psi, gamma.value_of(psi)


# ---------------------------------------------------------------------------
# Composition and amplification
# ---------------------------------------------------------------------------

def compose(i1: MldInstance, i2: MldInstance) -> MldInstance:
    """(A, z, k1) ⊕ (B, z', k2) with parameter k2 (k1 + 1).

    Row block S0 is [B | 0]; row block S_i holds z in column i and A in the
    column block T_i.
    """
    if i1.y.weight == 0 or i2.y.weight == 0:
        raise ZeroTarget("composition needs nonzero targets")
    a, z = i1.a, i1.y
    b, z_out = i2.a, i2.y
    u, v = a.shape
    u_out, v_out = b.shape
    rows, cols = u_out + u * v_out, v_out + v * v_out
    check_materialization("composed MLD matrix", rows, cols)
    grid = np.zeros((rows, cols), dtype=np.uint8)
    grid[:u_out, :v_out] = b.data
    z_col = z.to_numpy()
    for i in range(v_out):
        top = u_out + i * u
        grid[top:top + u, i] = z_col
        grid[top:top + u, v_out + i * v:v_out + (i + 1) * v] = a.data
    target = z_out.concat(BitVector.zeros(u * v_out))
    return MldInstance(BitMatrix(grid), target, i2.k * (i1.k + 1))


def compose_witness(x1: BitVector, x2: BitVector, i1: MldInstance, i2: MldInstance) -> BitVector:
    """Witness of the composite: x2 followed by x2_i * x1 for every outer column i."""
    if x1.length != i1.a.cols or x2.length != i2.a.cols:
        raise DimensionMismatch("witness lengths do not match the instances")
    blocks = [x1 if x2[i] else BitVector.zeros(x1.length) for i in range(x2.length)]
    return x2.concat(*blocks)


@dataclass(frozen=True)
class AmplificationStep:
    """Parameter and gap after `step` self-compositions; the gap is gamma ** gap_exponent."""

    step: int
    k: int
    gap_exponent: Fraction


def power_at_least(base: Fraction, exponent: Fraction, bound: Fraction) -> bool:
    """Exact test of base ** exponent >= bound for base, bound > 0 and exponent >= 0."""
    exponent = Fraction(exponent)
    if exponent < 0:
        raise ValueError("negative exponent")
    return Fraction(base) ** exponent.numerator >= Fraction(bound) ** exponent.denominator


def amplification_schedule(gamma: Fraction, target_gamma: Fraction, amplification_slack: Fraction,
                           k: int, max_steps: int = 64) -> List[AmplificationStep]:
    """Steps of repeated self-composition until gamma ** ((2 - η)^s) >= target_gamma.

    At least one step is taken.

    Raises:
        ParameterTooSmall: If k < 1 / (gamma^η - 1).
        InfeasibleParameters: If the gap cannot grow to the target.
    """
    gamma, target_gamma = Fraction(gamma), Fraction(target_gamma)
    eta = Fraction(amplification_slack)
    if gamma <= 1:
        raise InfeasibleParameters("gap must exceed 1")
    if not 0 < eta < 2:
        raise InfeasibleParameters(f"amplification slack {eta} must lie in (0, 2)")
    if k < 1 or not power_at_least(gamma, eta, Fraction(k + 1, k)):
        raise ParameterTooSmall(f"k={k} is below 1/(gamma^eta - 1) for gamma={gamma}, eta={eta}")
    growth = 2 - eta
    if growth <= 1 and target_gamma > gamma:
        raise InfeasibleParameters(f"slack {eta} gives no gap growth per step")

    steps = [AmplificationStep(0, k, Fraction(1))]
    while len(steps) == 1 or not power_at_least(gamma, steps[-1].gap_exponent, target_gamma):
        if len(steps) > max_steps:
            raise InfeasibleParameters(f"target gap {target_gamma} needs more than {max_steps} steps")
        last = steps[-1]
        steps.append(AmplificationStep(last.step + 1, last.k * last.k + last.k,
                                       last.gap_exponent * growth))
    return steps


def amplify(i: MldInstance, gamma: Fraction, target_gamma: Fraction,
            amplification_slack: Fraction) -> MldInstance:
    """Self-compose until the gap reaches target_gamma; each step maps k to k^2 + k."""
    schedule = amplification_schedule(gamma, target_gamma, amplification_slack, i.k)
    current = i
    for step in schedule[1:]:
        current = compose(current, current)
        logger.info("Amplification step %d: %dx%d, k=%d, gap %s^%s", step.step, current.a.rows,
                    current.a.cols, current.k, gamma, step.gap_exponent)
    return current


# ---------------------------------------------------------------------------
# MLD -> SNC
# ---------------------------------------------------------------------------

def snc_copies(k: int, gamma: Fraction) -> int:
    """ceil(γk + 1), the number of stacked copies of A."""
    return math.ceil(Fraction(gamma) * k + 1)


def mld_to_snc(i: MldInstance, gamma: Fraction) -> SncInstance:
    """Stack ceil(γk+1) copies of A over Id_m, so ||A'x - y'||_0 = c ||Ax - y||_0 + ||x||_0."""
    copies = snc_copies(i.k, gamma)
    m = i.a.cols
    check_materialization("SNC matrix", copies * i.a.rows + m, m)
    a_prime = vstack(i.a.tile_rows(copies), BitMatrix.identity(m))
    y_prime = BitVector.zeros(0).concat(*([i.y] * copies), BitVector.zeros(m))
    logger.info("MLD -> SNC: %d copies, %dx%d", copies, a_prime.rows, a_prime.cols)
    return SncInstance(a_prime, y_prime, i.k)


def mld_to_snc_residual_identity(i: MldInstance, snc: SncInstance, gamma: Fraction, x: BitVector) -> bool:
    """Check ||A'x - y'||_0 == ceil(γk+1) ||Ax - y||_0 + ||x||_0 for one x."""
    copies = snc_copies(i.k, gamma)
    lhs = (snc.a @ x + snc.y).weight
    return lhs == copies * (i.a @ x + i.y).weight + x.weight
