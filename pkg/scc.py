"""
Sparse covering codes: BCH-based construction, center sampling, exact
coverage probabilities and cover witnesses.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterator, List, Optional, Tuple

import numpy as np

from config import make_rng
from errors import DimensionMismatch, InfeasibleParameters
from gf2codes import (BitMatrix, BitVector, LinearCode, bch_generator, bch_message_length,
                      check_budget, code_distance_exact, popcount)

logger = logging.getLogger(__name__)

_TAIL_CHUNK = 1 << 20


@dataclass(frozen=True)
class SccGadget:
    """Sparse covering code (L, T, D).

    T projects onto the first q coordinates; D fixes those coordinates to 0
    and draws the other h - q uniformly. Every x in B_q(0, t) must lie in
    T(B_h(s, r) ∩ L F_2^m) with probability at least delta over s ~ D.

    Attributes:
        code: The code L (h x m generator).
        q: Projection width.
        t: Sparsity radius.
        d: Distance of L.
        r: Covering radius.
        delta_squared: delta ** 2, always rational.
        delta: delta itself when rational, else None.
        eps: Construction slack, None for hand-built gadgets.
        kind: "bch" or "micro".
    """

    code: LinearCode
    q: int
    t: int
    d: int
    r: int
    delta_squared: Fraction
    delta: Optional[Fraction] = None
    eps: Optional[Fraction] = None
    kind: str = "bch"

    def __post_init__(self):
        if self.r >= self.d:
            raise InfeasibleParameters(f"covering radius {self.r} must be below the distance {self.d}")
        if self.m < self.q:
            raise InfeasibleParameters(f"message length {self.m} is below the projection width {self.q}")

    @property
    def h(self) -> int:
        return self.code.block_length

    @property
    def m(self) -> int:
        return self.code.message_length

    @property
    def projected_generator(self) -> BitMatrix:
        """T L: the first q rows of the generator."""
        return self.code.generator.select_rows(range(self.q))

    def meets_delta(self, probability: Fraction) -> bool:
        """Exact test of probability >= delta, done as probability^2 >= delta^2."""
        probability = Fraction(probability)
        return probability >= 0 and probability * probability >= self.delta_squared

    def delta_float(self) -> float:
        return math.sqrt(self.delta_squared)


def bch_delta(d: int) -> Tuple[Fraction, Optional[Fraction]]:
    """(delta^2, delta) for delta = d^{-d/2}; delta is rational only when d is a square."""
    delta_squared = Fraction(1, d ** d)
    root = math.isqrt(d)
    delta = Fraction(1, root ** d) if root * root == d else None
    return delta_squared, delta


def scc_parameters(t: int, eps: Fraction) -> Tuple[int, int]:
    """d = 2 ceil(t/eps) + 1 and r = (d-1)/2 + t."""
    d = 2 * math.ceil(Fraction(t) / eps) + 1
    return d, (d - 1) // 2 + t


def scc_construct(q: int, t: int, eps: Fraction, full_dimension: bool = False,
                  max_log_length: int = 30) -> SccGadget:
    """BCH-based sparse covering code.

    h is the smallest length with h+1 a power of two, h >= max(2q, d) and
    message length at least q.

    Raises:
        InfeasibleParameters: If eps <= 0 or no length up to 2^max_log_length - 1 works.
    """
    eps = Fraction(eps)
    if eps <= 0:
        raise InfeasibleParameters("eps must be positive")
    if q < 1 or t < 0:
        raise InfeasibleParameters("q must be positive and t non-negative")
    d, r = scc_parameters(t, eps)
    for mu in range(2, max_log_length + 1):
        h = (1 << mu) - 1
        if h >= max(2 * q, d) and bch_message_length(h, d) >= q:
            break
    else:
        raise InfeasibleParameters(f"no BCH length up to 2^{max_log_length}-1 fits q={q}, d={d}")
    code = bch_generator(h, d, full_dimension=full_dimension)
    delta_squared, delta = bch_delta(d)
    logger.info("SCC(q=%d, t=%d, eps=%s): [%d,%d] code, d=%d, r=%d", q, t, eps, h, code.message_length, d, r)
    return SccGadget(code, q, t, d, r, delta_squared, delta, eps, "bch")


def sparse_targets(q: int, t: int) -> Iterator[BitVector]:
    """All x in B_q(0, t), by weight then support order."""
    for w in range(0, min(t, q) + 1):
        for support in combinations(range(q), w):
            yield BitVector.from_support(q, support)


def prefix_compatible(g: SccGadget, x: BitVector, budget: Optional[int] = None) -> List[Tuple[BitVector, BitVector]]:
    """(message, codeword) pairs whose codeword starts with x."""
    if x.length != g.q:
        raise DimensionMismatch(f"target of length {x.length} for projection width {g.q}")
    code = g.code
    if code.systematic_prefix is not None and code.systematic_prefix >= g.q:
        free = g.m - g.q
        check_budget("prefix-compatible messages", 1 << free, budget)
        messages = (BitVector(x.value | (w << g.q), g.m) for w in range(1 << free))
    else:
        check_budget("message enumeration", 1 << g.m, budget)
        messages = (BitVector(z, g.m) for z in range(1 << g.m))
    found = []
    for z in messages:
        word = code.encode(z)
        if word.slice(0, g.q) == x:
            found.append((z, word))
    return found


def prefix_compatible_tails(g: SccGadget, x: BitVector, budget: Optional[int] = None) -> List[BitVector]:
    return [word.slice(g.q, g.h) for _, word in prefix_compatible(g, x, budget)]


def scc_sample_center(g: SccGadget, seed=None) -> BitVector:
    """s = 0^q followed by h - q uniform bits."""
    rng = make_rng(seed)
    tail = rng.integers(0, 2, size=g.h - g.q, dtype=np.uint8)
    return BitVector.zeros(g.q).concat(BitVector.from_bits(tail.tolist()))


def scc_cover_witness(g: SccGadget, x: BitVector, s: BitVector,
                      budget: Optional[int] = None) -> Optional[BitVector]:
    """Message z with T L z = x and ||L z - s||_0 <= r, closest codeword first."""
    if s.length != g.h:
        raise DimensionMismatch(f"center of length {s.length} for block length {g.h}")
    if x.weight > g.t:
        raise ValueError(f"target weight {x.weight} exceeds t={g.t}")
    best = None
    for z, word in prefix_compatible(g, x, budget):
        dist = (word + s).weight
        if dist <= g.r and (best is None or dist < best[0]):
            best = (dist, z)
    return None if best is None else best[1]


def scc_coverage_probability(g: SccGadget, x: BitVector, budget: Optional[int] = None) -> Fraction:
    """Exact Pr_{s~D}[x in T(B_h(s, r) ∩ L F_2^m)] over all 2^{h-q} tails."""
    tail_bits = g.h - g.q
    if tail_bits > 63:
        check_budget("center tail enumeration", 1 << tail_bits, budget)
    tails = [t.value for t in prefix_compatible_tails(g, x, budget)]
    check_budget("coverage enumeration", (1 << tail_bits) * max(1, len(tails)), budget)
    slack = g.r - x.weight
    if slack < 0 or not tails:
        return Fraction(0)
    codeword_tails = np.array(tails, dtype=np.uint64)
    covered = 0
    total = 1 << tail_bits
    for start in range(0, total, _TAIL_CHUNK):
        centers = np.arange(start, min(total, start + _TAIL_CHUNK), dtype=np.uint64)
        hit = np.zeros(centers.shape, dtype=bool)
        for c in codeword_tails:
            hit |= popcount(centers ^ c) <= slack
        covered += int(hit.sum())
    return Fraction(covered, total)


def micro_gadget(generator: BitMatrix, q: int, t: int, r: int, budget: Optional[int] = None) -> SccGadget:
    """Hand-built gadget; d and delta are computed exactly by enumeration.

    delta is the least coverage probability over B_q(0, t).
    """
    code = LinearCode(generator, 1)
    d = code_distance_exact(code, budget=budget, mode="full")
    code = LinearCode(generator, d)
    provisional = SccGadget(code, q, t, d, r, Fraction(0), Fraction(0), None, "micro")
    delta = min(scc_coverage_probability(provisional, x, budget) for x in sparse_targets(q, t))
    logger.info("Micro gadget [%d,%d,%d], q=%d, t=%d, r=%d, delta=%s",
                code.block_length, code.message_length, d, q, t, r, delta)
    return SccGadget(code, q, t, d, r, delta * delta, delta, None, "micro")


def repetition_micro_gadget(h: int, r: int) -> SccGadget:
    """The length-h repetition code as a q = t = 1 gadget."""
    return micro_gadget(BitMatrix.from_rows([[1]] * h), 1, 1, r)


def coordinate_repetition_gadget(q: int, t: int, copies: int, r: int) -> SccGadget:
    """L = Id_q stacked `copies` times, so d = copies.

    The only codeword over x is x repeated, and its tail distance to a uniform
    center is Binomial((copies-1) q, 1/2) whatever x is, so
    delta = Pr[Bin((copies-1) q, 1/2) <= r - t] in closed form.
    """
    if copies < 1 or not t <= r < copies:
        raise InfeasibleParameters(f"need t <= r < copies, got t={t}, r={r}, copies={copies}")
    generator = BitMatrix(np.tile(np.eye(q, dtype=np.uint8), (copies, 1)))
    code = LinearCode(generator, copies, systematic_prefix=q)
    tail = (copies - 1) * q
    delta = Fraction(sum(math.comb(tail, j) for j in range(r - t + 1)), 2 ** tail)
    logger.info("Coordinate repetition gadget q=%d, t=%d, copies=%d, r=%d, delta=%s", q, t, copies, r, delta)
    return SccGadget(code, q, t, copies, r, delta * delta, delta, None, "micro")
