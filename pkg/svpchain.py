"""
Integer-side reduction chain: 2CSP -> LVS, LVS composition, LVS -> SNVP,
the BCH lattice gadget, the intermediate and final lattices, and l2 tensor
amplification of SVP instances.
"""

import logging
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import List, Optional, Sequence, Tuple

import numpy as np
import sympy

from config import Config, make_rng
from csp import Csp2Instance
from errors import (DimensionMismatch, EmptyConstraint, InfeasibleParameters,
                    SizeOverflow, WrongNorm, ZeroTarget)
from gf2codes import (BitMatrix, BitVector, log2_exact, bch_parity_check, check_budget,
                      check_materialization, null_space, popcount)
from latticecore import (IntMatrix, IntVector, LvsInstance, SnvpInstance, SvpInstance,
                         column_of, int_vstack)
from mldchain import csp_labels, csp_matrix, csp_target, find_empty_constraint, witness_lift

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Parameters
# ---------------------------------------------------------------------------

def gamma_star(p: int) -> Fraction:
    """2^p / (2^{p-1} + 1), the gap the BCH-lattice route approaches."""
    return Fraction(2 ** p, 2 ** (p - 1) + 1)


@dataclass(frozen=True)
class SvpChainParams:
    """Parameters of the SNVP -> SVP reduction.

    l = η t and r = (1/2 + 1/2^p + 1/η) η t must both be integers. The
    overrides replace the astronomically large h, Q, D and the prime ρ so
    the lattices can be materialized.
    """

    p: int
    eta: Fraction
    t: int
    l: int
    r: int
    gamma_p: Fraction
    h_override: Optional[int] = None
    q_override: Optional[int] = None
    d_override: Optional[int] = None
    rho_override: Optional[int] = None

    @classmethod
    def create(cls, p: int, eta, t: int, h: Optional[int] = None, q: Optional[int] = None,
               d: Optional[int] = None, rho: Optional[int] = None,
               require_gap: bool = True) -> "SvpChainParams":
        """Validate (p, η, t) and derive l, r and γ_p.

        Raises:
            InfeasibleParameters: If l or r is not integral, or γ_p <= 1 while require_gap is set.
        """
        eta = Fraction(eta)
        if p < 1 or int(p) != p:
            raise InfeasibleParameters("p must be a positive integer")
        if eta < 1 or t < 1:
            raise InfeasibleParameters("need η >= 1 and t >= 1")
        l = eta * t
        if l.denominator != 1:
            raise InfeasibleParameters(f"l = η t = {l} is not an integer")
        r = (Fraction(1, 2) + Fraction(1, 2 ** p) + 1 / eta) * eta * t
        if r.denominator != 1:
            raise InfeasibleParameters(f"r = {r} is not an integer; choose (p, η, t) accordingly")
        inverse = Fraction(1, 2) + Fraction(2 ** p + 1) / eta + Fraction(1, 2 ** p)
        if require_gap and inverse >= 1:
            raise InfeasibleParameters(f"1/γ_p = {inverse} is not below 1; η must be larger")
        return cls(int(p), eta, t, int(l), int(r), 1 / inverse, h, q, d, rho)

    @property
    def budget(self) -> Fraction:
        """γ_p^{-1} l, which equals 2^p t + r."""
        return self.l / self.gamma_p

    @property
    def q_scale(self) -> int:
        return self.q_override if self.q_override is not None else self.l ** (10 * self.l)

    @property
    def d_scale(self) -> int:
        return self.d_override if self.d_override is not None else self.l ** (10 * self.l)

    @property
    def has_overrides(self) -> bool:
        return any(v is not None for v in (self.h_override, self.q_override,
                                           self.d_override, self.rho_override))


def is_annoying_vector(v: IntVector, l: int, p: int) -> bool:
    """True when v is short in none of the three senses.

    Large means: Hamming weight >= l; or all entries even and weight >= l / 2^p;
    or all entries even with some |entry| >= l^{10l}.
    """
    weight = v.hamming_weight
    if weight >= l:
        return False
    if all(a % 2 == 0 for a in v):
        if weight * 2 ** p >= l:
            return False
        threshold = l ** (10 * l)
        if any(abs(a) >= threshold for a in v):
            return False
    return True


# ---------------------------------------------------------------------------
# 2CSP -> LVS -> SNVP
# ---------------------------------------------------------------------------

def csp_to_lvs(gamma: Csp2Instance, eps) -> LvsInstance:
    """2CSP_ε -> LVS_{1+ε/3}: the 2CSP matrix with -1 edge entries in consistency rows."""
    if Fraction(eps) <= 0:
        raise ValueError("eps must be positive")
    empty = find_empty_constraint(gamma)
    if empty is not None:
        raise EmptyConstraint(empty)
    grid, columns, rows = csp_matrix(gamma, signed=True)
    check_materialization("2CSP lattice matrix", len(rows), len(columns))
    k = gamma.num_vertices + gamma.num_edges
    instance = LvsInstance(IntMatrix(grid), IntVector(csp_target(gamma)), k)
    logger.info("2CSP -> LVS: %dx%d, k=%d", instance.a.rows, instance.a.cols, k)
    return instance


def lvs_witness(gamma: Csp2Instance, psi: Sequence[int]) -> IntVector:
    """0/1 solution of A x = y of weight |V| + |E| for a satisfying assignment."""
    columns, _ = csp_labels(gamma)
    return IntVector(witness_lift(gamma, psi, columns).bits)


def lvs_compose(i1: LvsInstance, i2: LvsInstance) -> LvsInstance:
    """Integer composition with parameter k' = k2 + k1 k2."""
    if i1.y.is_zero() or i2.y.is_zero():
        raise ZeroTarget("composition needs nonzero targets")
    a, z = i1.a, i1.y
    b, z_out = i2.a, i2.y
    u, v = a.shape
    u_out, v_out = b.shape
    rows, cols = u_out + u * v_out, v_out + v * v_out
    check_materialization("composed LVS matrix", rows, cols)
    grid = np.empty((rows, cols), dtype=object)
    grid.fill(0)
    grid[:u_out, :v_out] = b.data
    z_col = np.array(z.entries, dtype=object)
    for i in range(v_out):
        top = u_out + i * u
        grid[top:top + u, i] = z_col
        grid[top:top + u, v_out + i * v:v_out + (i + 1) * v] = a.data
    target = z_out.concat(IntVector.zeros(u * v_out))
    return LvsInstance(IntMatrix(grid), target, i2.k + i1.k * i2.k)


def lvs_composition_count(c) -> int:
    """ceil(3c/2), the number of copies of the base instance in the amplified one."""
    return math.ceil(Fraction(3, 2) * Fraction(c))


def lvs_amplify(i: LvsInstance, c) -> LvsInstance:
    """LVS_η -> LVS_{η^c}: the ceil(3c/2)-fold composite, built by composing the base into the running one.

    A power of 1 returns the instance unchanged.
    """
    if Fraction(c) <= 0:
        raise InfeasibleParameters("c must be positive")
    current = i
    for step in range(1, lvs_composition_count(c)):
        current = lvs_compose(i, current)
        logger.info("LVS amplification step %d: %dx%d, k=%d", step, current.a.rows,
                    current.a.cols, current.k)
    return current


def lvs_to_snvp(i: LvsInstance, eta, p) -> SnvpInstance:
    """Stack ceil(ηk + 1) copies of A over Id_m; y' is the copies of y over 0."""
    copies = math.ceil(Fraction(eta) * i.k + 1)
    m = i.a.cols
    check_materialization("SNVP matrix", copies * i.a.rows + m, m)
    b = int_vstack(i.a.tile_rows(copies), IntMatrix.identity(m))
    y = IntVector(i.y.entries * copies + (0,) * m)
    logger.info("LVS -> SNVP: %d copies, %dx%d", copies, b.rows, b.cols)
    return SnvpInstance(b, y, i.k, Fraction(p))


def snvp_residual(i: SnvpInstance, x: IntVector) -> IntVector:
    return i.b @ x - i.y


# ---------------------------------------------------------------------------
# BCH lattice
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BchLatticeGadget:
    """Basis [[Id_h, 0], [Q P, 2Q Id_g]] built on a BCH parity check P (g x h)."""

    basis: IntMatrix
    h: int
    g: int
    l: int
    q_scale: int
    parity: BitMatrix = field(compare=False)

    @cached_property
    def code_basis(self) -> List[BitVector]:
        return null_space(self.parity)

    @property
    def code_dimension(self) -> int:
        return len(self.code_basis)

    def codewords(self, budget: Optional[int] = None) -> np.ndarray:
        """Every codeword of ker P as a packed uint64 array."""
        check_budget("BCH codeword enumeration", 1 << self.code_dimension, budget)
        words = np.zeros(1, dtype=np.uint64)
        for v in self.code_basis:
            words = np.concatenate([words, words ^ np.uint64(v.value)])
        return words


def bch_lattice(l: int, h: int, q_override: Optional[int] = None) -> BchLatticeGadget:
    """BCH lattice gadget with Q = l^{10l} unless overridden.

    Raises:
        InfeasibleParameters: If h+1 is not a power of two or the code leaves no message bits.
    """
    if l < 2:
        raise InfeasibleParameters("l must be at least 2")
    if log2_exact(h + 1) is None:
        raise InfeasibleParameters(f"h+1 must be a power of two, got h={h}")
    parity = bch_parity_check(h, min(l, h))
    g = parity.rows
    if g > h - 1:
        raise InfeasibleParameters(f"BCH[{h}, {h - g}, {l}] leaves no message bits")
    q = q_override if q_override is not None else l ** (10 * l)
    check_materialization("BCH lattice", h + g, h + g)
    top = IntMatrix.block([[IntMatrix.identity(h), IntMatrix.zeros(h, g)]])
    bottom = IntMatrix.block([[IntMatrix(parity.data).scale(q), IntMatrix.identity(g).scale(2 * q)]])
    basis = int_vstack(top, bottom)
    logger.info("BCH lattice l=%d h=%d g=%d Q=%d", l, h, g, q)
    return BchLatticeGadget(basis, h, g, l, q, parity)


def bch_good_count_table(g: BchLatticeGadget, r: int, budget: Optional[int] = None) -> np.ndarray:
    """good_count for every s1 in {0,1}^h, indexed by the packed value of s1."""
    words = g.codewords(budget)
    check_budget("center table", (1 << g.h) * len(words), budget)
    centers = np.arange(1 << g.h, dtype=np.uint64)
    counts = np.zeros(centers.shape, dtype=np.int64)
    for c in words:
        counts += popcount(centers ^ c) == r
    return counts


def good_count_threshold(g: BchLatticeGadget, r: int) -> Fraction:
    """(1/100) 2^{-g} C(h, r)."""
    return Fraction(math.comb(g.h, r), 100 * 2 ** g.g)


def bch_center_sample(g: BchLatticeGadget, r: int, seed=None) -> Tuple[IntVector, Optional[int]]:
    """s = s1 followed by 0^g with s1 uniform; good_count is exact when h - g <= 20.

    good_count is the number of codewords at Hamming distance exactly r from s1.
    """
    if not 0 <= r <= g.h:
        raise ValueError(f"r={r} outside [0, {g.h}]")
    rng = make_rng(seed)
    s1 = rng.integers(0, 2, size=g.h, dtype=np.uint8).tolist()
    s = IntVector(tuple(int(b) for b in s1) + (0,) * g.g)
    good_count = None
    if g.h - g.g <= 20:
        packed = BitVector.from_bits(s1).value
        words = g.codewords()
        good_count = int((popcount(words ^ np.uint64(packed)) == r).sum())
    return s, good_count


def bch_coefficients(g: BchLatticeGadget, s: IntVector, codeword: BitVector) -> IntVector:
    """z with B_BCH z - s = (codeword xor s1) followed by 0^g.

    z1 = s1 + (c xor s1) entrywise and z2 = -P z1 / 2.
    """
    if len(s) != g.h + g.g or codeword.length != g.h:
        raise DimensionMismatch("center or codeword has the wrong length")
    s1 = s.entries[:g.h]
    z1 = [b + (codeword[i] ^ b) for i, b in enumerate(s1)]
    pz1 = IntMatrix(g.parity.data) @ IntVector(tuple(z1))
    if any(v % 2 for v in pz1):
        raise ValueError("codeword is not in the kernel of the parity check")
    z2 = [-(v // 2) for v in pz1]
    return IntVector(tuple(z1) + tuple(z2))


# ---------------------------------------------------------------------------
# Feasibility report
# ---------------------------------------------------------------------------

def default_intermediate_length(n: int, params: SvpChainParams) -> int:
    """Smallest h with h+1 a power of two and h >= max(2^{10p+10} n, (100 l)^{100 η l})."""
    exponent = 100 * params.eta * params.l
    base_power = (100 * params.l) ** exponent.numerator
    den = exponent.denominator

    def big_enough(h: int) -> bool:
        return h >= (2 ** (10 * params.p + 10)) * n and h ** den >= base_power

    mu = max(1, base_power.bit_length() // den - 1)
    while not big_enough((1 << mu) - 1):
        mu += 1
    return (1 << mu) - 1


@dataclass(frozen=True)
class FeasibilityReport:
    """Sizes of the intermediate and final lattices and the counting bounds.

    Big integers over Config.REPORT_MAX_BITS are left as None and described
    by their bit-length estimates.
    """

    n: int
    q: int
    h: int
    g: int
    l: int
    r: int
    q_scale: int
    d_scale: int
    intermediate_shape: Tuple[int, int]
    final_shape: Tuple[int, int]
    budget: Fraction
    ng_expression: str
    ng_bits: int
    ng: Optional[int]
    na: Optional[int]
    rho_low: Optional[int]
    rho_high: Optional[int]
    materializable: bool

    def lines(self) -> List[str]:
        def show(value: Optional[int], bits: Optional[int] = None) -> str:
            if value is not None and value.bit_length() <= Config.REPORT_MAX_BITS:
                return str(value)
            return f"~2^{value.bit_length() if bits is None else bits}"

        rows, cols = self.intermediate_shape
        return [
            f"n = {self.n}, q = {self.q}, l = {self.l}, r = {self.r}",
            f"h = {show(self.h)}",
            f"g = {show(self.g)}",
            f"Q = {show(self.q_scale)}",
            f"D = {show(self.d_scale)}",
            f"B_int shape = {show(rows)} x {show(cols)}",
            f"B_svp shape = {show(rows + 1)} x {show(cols + 1)}",
            f"budget = {self.budget}",
            f"N_g = {self.ng_expression} = {show(self.ng, self.ng_bits)}",
            f"N_a = 10^-5 N_g = {show(self.na, max(0, self.ng_bits - 17))}",
            f"rho range = [{show(self.rho_low, max(0, self.ng_bits - 14))}, {show(self.rho_high, max(0, self.ng_bits - 7))}]",
            f"materializable = {self.materializable}",
        ]


def good_vector_bound(h: int, params: SvpChainParams) -> Tuple[Optional[int], int]:
    """floor(h^r / (100 h^{l/2} l^l)) and its bit-length estimate.

    Computed as isqrt(h^{2r-l} // (10^4 l^{2l})); None when too large for the report.
    """
    power = 2 * params.r - params.l
    bits = max(0, power * h.bit_length() - (10 ** 4 * params.l ** (2 * params.l)).bit_length()) // 2
    if power * h.bit_length() > Config.REPORT_MAX_BITS:
        return None, bits
    value = math.isqrt(h ** power // (10 ** 4 * params.l ** (2 * params.l)))
    return value, value.bit_length()


def feasibility_report(i: SnvpInstance, params: SvpChainParams) -> FeasibilityReport:
    """Dimensions and counting bounds of the SNVP -> SVP lattices without building them."""
    n, q = i.b.shape
    h = params.h_override if params.h_override is not None else default_intermediate_length(n, params)
    mu = log2_exact(h + 1)
    if mu is None:
        raise InfeasibleParameters(f"h+1 must be a power of two, got h={h}")
    g = math.ceil((params.l - 1) / 2) * mu
    rows, cols = n + h + g, q + h + g + 1
    ng, ng_bits = good_vector_bound(h, params)
    na = ng // 10 ** 5 if ng is not None else None
    rho_low = -(-ng // 10 ** 4) if ng is not None else None
    rho_high = ng // 100 if ng is not None else None
    if params.rho_override is not None:
        rho_low = rho_high = params.rho_override
    materializable = (rows + 1) * (cols + 1) <= Config.MAX_MATRIX_ENTRIES
    expression = f"h^{params.r} / (100 * h^({params.l}/2) * {params.l}^{params.l})"
    return FeasibilityReport(n, q, h, g, params.l, params.r, params.q_scale, params.d_scale,
                             (rows, cols), (rows + 1, cols + 1), params.budget, expression,
                             ng_bits, ng, na, rho_low, rho_high, materializable)


# ---------------------------------------------------------------------------
# Intermediate and final lattices
# ---------------------------------------------------------------------------

def intermediate_lattice(i: SnvpInstance, params: SvpChainParams, center: IntVector,
                         gadget: Optional[BchLatticeGadget] = None) -> IntMatrix:
    """B_int = [[2B, 0, 2y], [0, B_BCH, s]] of shape (n+h+g) x (q+h+g+1).

    Raises:
        SizeOverflow: If the lattice exceeds the materialization cap; the
            feasibility report is attached.
    """
    n, q = i.b.shape
    report = feasibility_report(i, params)
    if not report.materializable:
        raise SizeOverflow(f"intermediate lattice {report.intermediate_shape} exceeds the cap", report)
    if params.h_override is None and n > report.h // 2 ** (params.p + 1):
        raise InfeasibleParameters(f"n={n} exceeds h/2^(p+1)")
    if gadget is None:
        gadget = bch_lattice(params.l, report.h, params.q_override)
    h, g = gadget.h, gadget.g
    if len(center) != h + g:
        raise DimensionMismatch(f"center of length {len(center)}, expected {h + g}")
    top = IntMatrix.block([[i.b.scale(2), IntMatrix.zeros(n, h + g), column_of(i.y.scale(2))]])
    bottom = IntMatrix.block([[IntMatrix.zeros(h + g, q), gadget.basis, column_of(center)]])
    b_int = int_vstack(top, bottom)
    logger.info("Intermediate lattice %dx%d", b_int.rows, b_int.cols)
    return b_int


def intermediate_yes_vector(x: IntVector, z: IntVector) -> IntVector:
    """x ∘ z ∘ (-1): B_int maps it to (2(Bx - y), B_BCH z - s)."""
    return x.concat(z, IntVector((-1,)))


def sample_prime(low: int, high: int, seed=None, max_attempts: Optional[int] = None) -> int:
    """Uniform rejection sampling of a prime in [low, high]."""
    if low < 2:
        low = 2
    if low > high:
        raise InfeasibleParameters(f"empty prime range [{low}, {high}]")
    rng = random.Random(int(make_rng(seed).integers(0, 2 ** 63)))
    attempts = max_attempts or 100 * max(8, high.bit_length()) ** 2
    for _ in range(attempts):
        candidate = rng.randint(low, high)
        if sympy.isprime(candidate):
            return candidate
    raise InfeasibleParameters(f"no prime found in [{low}, {high}] after {attempts} draws")


@dataclass(frozen=True)
class FinalLattice:
    instance: SvpInstance
    rho: int
    row: IntVector


def final_lattice_with_randomness(b_int: IntMatrix, params: SvpChainParams, seed=None) -> FinalLattice:
    """B_svp = [[B_int, 0], [D r B_int, D ρ]] plus the sampled ρ and r.

    ρ is params.rho_override or a random prime in [N_g / 10^4, N_g / 100],
    which needs params.h_override to evaluate N_g.
    """
    rng = make_rng(seed)
    rows, cols = b_int.shape
    if (rows + 1) * (cols + 1) > Config.MAX_MATRIX_ENTRIES:
        raise SizeOverflow(f"final lattice {(rows + 1, cols + 1)} exceeds the cap")
    if params.rho_override is not None:
        rho = params.rho_override
    else:
        if params.h_override is None:
            raise InfeasibleParameters("sampling ρ needs h (override) to evaluate N_g")
        ng, bits = good_vector_bound(params.h_override, params)
        if ng is None:
            raise SizeOverflow(f"N_g ~ 2^{bits} exceeds the report cap")
        rho = sample_prime(-(-ng // 10 ** 4), ng // 100, rng)
    picker = random.Random(int(rng.integers(0, 2 ** 63)))
    row = IntVector(tuple(picker.randrange(rho) for _ in range(rows)))
    d = params.d_scale
    combined = [sum(row[i] * b_int.entry(i, j) for i in range(rows)) for j in range(cols)]
    bottom = IntMatrix([[d * v for v in combined] + [d * rho]])
    top = IntMatrix.block([[b_int, IntMatrix.zeros(rows, 1)]])
    b_svp = int_vstack(top, bottom)
    instance = SvpInstance(b_svp, params.budget, params.p, structured=not params.has_overrides,
                           no_bound_pp=Fraction(params.l))
    logger.info("Final lattice %dx%d, rho=%d, budget %s", b_svp.rows, b_svp.cols, rho, params.budget)
    return FinalLattice(instance, rho, row)


def final_lattice(b_int: IntMatrix, params: SvpChainParams, seed=None) -> SvpInstance:
    return final_lattice_with_randomness(b_int, params, seed).instance


def final_yes_vector(final: FinalLattice, b_int: IntMatrix, x: IntVector) -> Optional[IntVector]:
    """x ∘ u with u = -(r B_int x) / ρ when ρ divides r B_int x, else None."""
    image = b_int @ x
    total = sum(a * b for a, b in zip(final.row, image))
    if total % final.rho:
        return None
    return x.concat(IntVector((-(total // final.rho),)))


def svp_amplify_l2(i: SvpInstance, l: int) -> SvpInstance:
    """Tensor-square an l2 instance; the budget squares and the NO bound grows by a factor l.

    Raises:
        WrongNorm: If p != 2.
    """
    if i.p != 2:
        raise WrongNorm(f"tensor amplification needs p = 2, got p = {i.p}")
    if not i.structured:
        logger.warning("Tensoring an instance without certified NO-side structure")
    check_materialization("tensored SVP basis", i.b.rows ** 2, i.b.cols ** 2)
    b = i.b.kron(i.b)
    no_bound = i.no_bound_pp * l if i.no_bound_pp is not None else None
    return SvpInstance(b, i.k_pp * i.k_pp, 2, i.structured, no_bound)
