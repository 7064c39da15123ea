"""
SNC -> MDP gadget reduction, its parameter window, and MDP gap amplification
by tensoring.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple, Union

import numpy as np

from config import Config, make_rng
from errors import DimensionMismatch, EmptyWindow, TooLarge
from gf2codes import BitMatrix, BitVector, Unknown, check_materialization, min_image_weight
from mldchain import SncInstance
from scc import SccGadget, scc_sample_center

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MdpInstance:
    """Minimum distance instance: is there x != 0 with ||A x||_0 <= k?"""

    a: BitMatrix
    k: int

    def __post_init__(self):
        if self.a.is_zero():
            raise ValueError("generator must be nonzero")
        if self.k < 1:
            raise ValueError("k must be at least 1")


@dataclass(frozen=True)
class GadgetParams:
    """Block multiplicities of the SNC -> MDP gadget.

    a = a' r copies of the SNC block, b = b' t copies of the code block,
    k_out = a t + b r.
    """

    a_prime: int
    b_prime: int
    a: int
    b: int
    k_out: int
    gamma: Fraction
    gamma_prime: Fraction
    eps: Optional[Fraction] = None


def gadget_window(gamma_prime: Fraction, gamma: Fraction, g: SccGadget) -> Tuple[Fraction, Fraction]:
    """Open interval γ/(γ'-γ) < a'/b' < ((d/r) - γ)/γ."""
    lower = gamma / (gamma_prime - gamma)
    upper = (Fraction(g.d, g.r) - gamma) / gamma
    return lower, upper


def window_holds(params: GadgetParams, g: SccGadget) -> bool:
    """γ(at + br) < min(γ' a t, b d), exactly."""
    total = params.gamma * params.k_out
    return total < params.gamma_prime * params.a * g.t and total < params.b * g.d


def pick_gadget_params(gamma_prime: Fraction, gamma: Fraction, g: SccGadget) -> GadgetParams:
    """Smallest-denominator a'/b' strictly inside the window (then smallest a').

    Raises:
        EmptyWindow: When the preconditions fail or the window is empty.
    """
    gamma_prime, gamma = Fraction(gamma_prime), Fraction(gamma)
    if gamma_prime <= 2:
        raise EmptyWindow(f"gamma' = {gamma_prime} must exceed 2")
    if not 1 <= gamma < 2 * gamma_prime / (2 + gamma_prime):
        raise EmptyWindow(f"gamma = {gamma} outside [1, 2γ'/(2+γ'))")
    if g.eps is not None and not gamma < 2 * gamma_prime / (2 + (1 + 2 * g.eps) * gamma_prime):
        raise EmptyWindow(f"gadget slack eps = {g.eps} is too large for gamma = {gamma}")
    lower, upper = gadget_window(gamma_prime, gamma, g)
    if lower >= upper:
        raise EmptyWindow(f"window ({lower}, {upper}) is empty")
    width = upper - lower
    limit = math.ceil(2 / width)
    for b_prime in range(1, limit + 1):
        a_prime = math.floor(lower * b_prime) + 1
        if Fraction(a_prime, b_prime) < upper:
            break
    else:
        raise EmptyWindow(f"no ratio with denominator at most {limit} inside ({lower}, {upper})")
    a, b = a_prime * g.r, b_prime * g.t
    params = GadgetParams(a_prime, b_prime, a, b, a * g.t + b * g.r, gamma, gamma_prime, g.eps)
    if not window_holds(params, g):
        raise EmptyWindow(f"ratio {a_prime}/{b_prime} fails the exact window check")
    logger.info("Gadget params: a'/b' = %d/%d, a=%d, b=%d, k_out=%d", a_prime, b_prime, a, b, params.k_out)
    return params


def snc_to_mdp_with_center(i: SncInstance, params: GadgetParams, g: SccGadget,
                           seed=None) -> Tuple[MdpInstance, BitVector]:
    """One randomized SNC -> MDP step; also returns the sampled center s.

    A = [1_a ⊗ (B T L) | 1_a ⊗ y ; 1_b ⊗ L | 1_b ⊗ s]; over GF(2) -y = y and -s = s.
    """
    if i.a.cols != g.q:
        raise DimensionMismatch(f"SNC instance has {i.a.cols} columns, gadget projects onto {g.q}")
    if i.k != g.t:
        raise DimensionMismatch(f"SNC parameter {i.k} differs from the gadget sparsity {g.t}")
    rows = params.a * i.a.rows + params.b * g.h
    check_materialization("SNC -> MDP matrix", rows, g.m + 1)
    s = scc_sample_center(g, make_rng(seed))
    btl = i.a.multiply(g.projected_generator)
    top = np.hstack([btl.data, i.y.to_numpy().reshape(-1, 1)])
    bottom = np.hstack([g.code.generator.data, s.to_numpy().reshape(-1, 1)])
    grid = np.vstack([np.tile(top, (params.a, 1)), np.tile(bottom, (params.b, 1))])
    logger.debug("SNC -> MDP: %dx%d, k=%d", grid.shape[0], grid.shape[1], params.k_out)
    return MdpInstance(BitMatrix(grid), params.k_out), s


def snc_to_mdp(i: SncInstance, params: GadgetParams, g: SccGadget, seed=None) -> MdpInstance:
    """SNC_γ' -> MDP_γ with a single center sample."""
    return snc_to_mdp_with_center(i, params, g, seed)[0]


def assemble_yes_witness(z_prime: BitVector) -> BitVector:
    """z = z' followed by a final 1."""
    return z_prime.concat(BitVector.ones(1))


def mdp_weight(i: MdpInstance, z: BitVector) -> int:
    return (i.a @ z).weight


def mdp_exact(i: MdpInstance, weight_cap: Optional[int] = None, budget: Optional[int] = None,
              mode: str = "auto") -> Tuple[Union[int, Unknown], Optional[BitVector]]:
    """Minimum ||A z||_0 over z != 0, exhaustive or capped at weight_cap."""
    return min_image_weight(i.a, weight_cap, budget, mode)


def gap_after_tensoring(gamma: Fraction, steps: int) -> Fraction:
    return Fraction(gamma) ** (2 ** steps)


def mdp_amplify(i: MdpInstance, steps: int) -> MdpInstance:
    """Tensor-square the generator `steps` times; k becomes k^(2^steps)."""
    if steps < 1:
        raise ValueError("steps must be at least 1")
    power = 2 ** steps
    rows, cols = i.a.rows ** power, i.a.cols ** power
    if rows * cols > Config.MAX_MATRIX_ENTRIES:
        raise TooLarge("tensor amplification", rows * cols, Config.MAX_MATRIX_ENTRIES)
    a, k = i.a, i.k
    for _ in range(steps):
        a, k = a.kron(a), k * k
    logger.info("MDP tensoring x%d: %dx%d, k=%d", steps, a.rows, a.cols, k)
    return MdpInstance(a, k)
