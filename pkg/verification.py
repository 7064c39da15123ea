"""
Named verification pipelines over the reduction graph.

Every pipeline builds its stages, checks each YES claim with a constructed
witness and each NO claim with an exact oracle, and collects the outcome in
a VerificationReport with exact-rational gap accounting. Claims are only made
when the source side of a stage is certified; otherwise the stage is noted
as outside its promise.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

from config import Config, make_rng
from csp import Csp2Instance, best_assignment
from errors import BudgetExceeded, InfeasibleParameters, TooLarge
from gf2codes import BitVector, SncVerdict, Unknown, mld_exact, snc_exact
from instance_files import digest
from latticecore import LvsInstance, SnvpInstance, cvp_enum, lp_norm_pp, lvs_no_check, snvp_no_check
from mdpchain import assemble_yes_witness, mdp_exact, mdp_weight, pick_gadget_params, snc_to_mdp_with_center
from mldchain import MldInstance, SncInstance, csp_to_mld, mld_to_snc, mld_to_snc_residual_identity, witness_lift
from scc import SccGadget, coordinate_repetition_gadget, scc_construct, scc_cover_witness
from svpchain import (SvpChainParams, bch_center_sample, bch_coefficients, bch_lattice,
                      csp_to_lvs, feasibility_report, final_lattice_with_randomness, final_yes_vector,
                      intermediate_lattice, intermediate_yes_vector, lvs_to_snvp, lvs_witness)
logger = logging.getLogger(__name__)

PIPELINES = ("mld", "snc", "mdp", "lvs", "svp")


class Verdict(str, Enum):
    PASS = "PASS"
    FAIL = "FAIL"
    BUDGET = "BUDGET"


@dataclass
class StageRecord:
    reduction: str
    input_digest: str
    output_digest: str
    shape: Tuple[int, int]
    parameters: Dict[str, str] = field(default_factory=dict)


@dataclass
class Check:
    stage: str
    claim: str
    method: str
    passed: bool
    detail: str = ""


@dataclass
class VerificationReport:
    """Outcome of one pipeline run.

    The verdict is PASS only if every check passed, BUDGET if the run was cut
    short by an enumeration limit, FAIL otherwise.
    """

    pipeline: str
    stages: List[StageRecord] = field(default_factory=list)
    checks: List[Check] = field(default_factory=list)
    gaps: List[Tuple[str, Fraction, Optional[Fraction]]] = field(default_factory=list)
    seeds: int = 0
    successes: int = 0
    notes: List[str] = field(default_factory=list)
    partial: bool = False

    @property
    def verdict(self) -> Verdict:
        if self.partial:
            return Verdict.BUDGET
        if all(c.passed for c in self.checks):
            return Verdict.PASS
        return Verdict.FAIL

    @property
    def success_fraction(self) -> Optional[Fraction]:
        return Fraction(self.successes, self.seeds) if self.seeds else None

    def add_stage(self, reduction: str, before, after, shape: Tuple[int, int], **parameters):
        self.stages.append(StageRecord(reduction, digest(before), digest(after), shape,
                                       {k: str(v) for k, v in parameters.items()}))
        logger.info("Stage %s -> %dx%d", reduction, shape[0], shape[1])

    def check(self, stage: str, claim: str, method: str, passed: bool, detail: str = ""):
        self.checks.append(Check(stage, claim, method, bool(passed), detail))
        if not passed:
            logger.warning("Check failed: %s %s (%s) %s", stage, claim, method, detail)

    def gap(self, label: str, claimed: Fraction, observed: Optional[Fraction] = None):
        self.gaps.append((label, Fraction(claimed), observed))

    def to_text(self) -> str:
        lines = [f"pipeline: {self.pipeline}", f"verdict: {self.verdict.value}"]
        for s in self.stages:
            params = ", ".join(f"{k}={v}" for k, v in s.parameters.items())
            lines.append(f"stage {s.reduction}: {s.shape[0]}x{s.shape[1]} "
                         f"in={s.input_digest[:16]} out={s.output_digest[:16]}" + (f" [{params}]" if params else ""))
        for c in self.checks:
            status = "ok" if c.passed else "FAILED"
            lines.append(f"check {c.stage} {c.claim} via {c.method}: {status}" + (f" ({c.detail})" if c.detail else ""))
        for label, claimed, observed in self.gaps:
            lines.append(f"gap {label}: claimed {claimed}, observed {'n/a' if observed is None else observed}")
        if self.seeds:
            lines.append(f"success fraction: {self.successes}/{self.seeds}")
        lines += [f"note: {n}" for n in self.notes]
        return "\n".join(lines) + "\n"


def seed_sweep(seed, count: int) -> List[int]:
    """Deterministic child seeds for a sweep."""
    rng = make_rng(seed)
    return [int(s) for s in rng.integers(0, 2 ** 62, size=count)]


def within_margin(observed: Fraction, delta: Fraction, samples: int) -> bool:
    """observed >= delta, or short of it by at most three standard deviations: (δ - obs)^2 <= 9δ/n."""
    if observed >= delta:
        return True
    return (delta - observed) ** 2 <= 9 * delta / samples


# ---------------------------------------------------------------------------
# GF(2) chain
# ---------------------------------------------------------------------------

@dataclass
class _Certified:
    """A stage output together with what the oracles proved about it."""

    instance: object
    yes_witness: Optional[object] = None
    is_no: bool = False


def _csp_claim(gamma: Csp2Instance, eps: Fraction, budget) -> Tuple[str, Tuple[int, ...]]:
    psi, value = best_assignment(gamma, budget)
    if value == 1:
        return "YES", psi
    if value < 1 - eps:
        return "NO", psi
    return "none", psi


def _mld_stage(report: VerificationReport, gamma: Csp2Instance, eps: Fraction, budget) -> _Certified:
    mld, columns, _ = csp_to_mld(gamma, eps, allow_empty=True)
    report.add_stage("csp2->mld", gamma, mld, mld.a.shape, eps=eps, k=mld.k)
    gap = 1 + eps / 3
    claim, psi = _csp_claim(gamma, eps, budget)
    cert = _Certified(mld)
    if claim == "YES":
        x = witness_lift(gamma, psi, columns)
        report.check("mld", "YES", "constructed", mld.a @ x == mld.y and x.weight == mld.k,
                     f"weight {x.weight}")
        found = mld_exact(mld.a, mld.y, mld.k, budget)
        report.check("mld", "YES", "oracle", found is not None and found.weight == mld.k,
                     "no solution" if found is None else f"weight {found.weight}")
        cert.yes_witness = x
    elif claim == "NO":
        limit = math.floor(gap * mld.k)
        found = mld_exact(mld.a, mld.y, limit, budget)
        report.check("mld", "NO", "oracle", found is None, f"no solution of weight <= {limit}")
        best = mld_exact(mld.a, mld.y, mld.a.cols, budget)
        report.gap("csp2->mld", gap, None if best is None else Fraction(best.weight, mld.k))
        cert.is_no = found is None
    else:
        report.notes.append("2CSP value lies inside the gap; no claim for the MLD stage")
    if claim != "NO":
        report.gap("csp2->mld", gap)
    return cert


def _certify_mld(mld: MldInstance, gamma_snc: Fraction, budget) -> _Certified:
    found = mld_exact(mld.a, mld.y, mld.k, budget)
    no = mld_exact(mld.a, mld.y, math.floor(gamma_snc * mld.k), budget) is None
    return _Certified(mld, found, no)


def _snc_stage(report: VerificationReport, source: _Certified, gamma_snc: Fraction, budget) -> _Certified:
    mld = source.instance
    snc = mld_to_snc(mld, gamma_snc)
    report.add_stage("mld->snc", mld, snc, snc.a.shape, gamma=gamma_snc, k=snc.k)
    zero = BitVector.zeros(mld.a.cols)
    report.check("snc", "identity", "constructed", mld_to_snc_residual_identity(mld, snc, gamma_snc, zero), "x = 0")
    if source.yes_witness is not None:
        report.check("snc", "identity", "constructed",
                     mld_to_snc_residual_identity(mld, snc, gamma_snc, source.yes_witness), "x = witness")
    result = snc_exact(snc.a, snc.y, snc.k, gamma_snc, budget)
    cert = _Certified(snc)
    if source.yes_witness is not None:
        report.check("snc", "YES", "oracle", result.verdict is SncVerdict.YES, result.verdict.value)
        cert.yes_witness = result.witness
    elif source.is_no:
        report.check("snc", "NO", "oracle", result.verdict is SncVerdict.NO, result.verdict.value)
        cert.is_no = result.verdict is SncVerdict.NO
    else:
        report.notes.append(f"MLD source is not certified at gap {gamma_snc}; SNC verdict {result.verdict.value}")
    report.gap("mld->snc", gamma_snc)
    return cert


def _certify_snc(snc: SncInstance, gamma_snc: Fraction, budget) -> _Certified:
    result = snc_exact(snc.a, snc.y, snc.k, gamma_snc, budget)
    witness = result.witness if result.verdict is SncVerdict.YES else None
    return _Certified(snc, witness, result.verdict is SncVerdict.NO)


def _gadget_for(snc: SncInstance, options: Dict) -> SccGadget:
    kind = options.get("gadget", "micro")
    q, t = snc.a.cols, snc.k
    if kind == "micro":
        copies = int(options.get("copies", 2 * t + 2))
        r = int(options.get("r", t + 1))
        return coordinate_repetition_gadget(q, t, copies, r)
    if kind == "bch":
        return scc_construct(q, t, Fraction(options.get("gadget_eps", Fraction(1, 2))))
    raise ValueError(f"unknown gadget '{kind}'")


def _mdp_stage(report: VerificationReport, source: _Certified, gamma_snc: Fraction, gamma_mdp: Fraction,
               options: Dict, seeds: int, seed, budget):
    snc = source.instance
    g = _gadget_for(snc, options)
    params = pick_gadget_params(gamma_snc, gamma_mdp, g)
    claim = "YES" if source.yes_witness is not None else "NO" if source.is_no else "none"
    if claim == "none":
        report.notes.append("SNC source outside its promise; MDP outputs are not checked")
    for index, child in enumerate(seed_sweep(seed, seeds)):
        mdp, s = snc_to_mdp_with_center(snc, params, g, child)
        if index == 0:
            report.add_stage("snc->mdp", snc, mdp, mdp.a.shape, gamma=gamma_mdp, gadget=g.kind,
                             a=params.a, b=params.b, k=params.k_out, seeds=seeds)
        if claim == "YES":
            z_prime = scc_cover_witness(g, source.yes_witness, s, budget)
            if z_prime is not None:
                weight = mdp_weight(mdp, assemble_yes_witness(z_prime))
                ok = weight <= params.k_out
                if not ok:
                    report.check("mdp", "YES", "constructed", False, f"seed {child}: weight {weight}")
                report.successes += ok
        elif claim == "NO":
            cap = math.floor(gamma_mdp * params.k_out)
            value, _ = mdp_exact(mdp, cap, budget)
            ok = isinstance(value, Unknown) or value > cap
            if not ok:
                report.check("mdp", "NO", "oracle", False, f"seed {child}: codeword of weight {value}")
            report.successes += ok
    report.seeds = seeds
    delta = g.delta if g.delta is not None else Fraction(g.delta_float())
    observed = report.success_fraction
    if claim == "YES":
        detail = f"success {observed} against delta {delta}"
        if delta * seeds < 1:
            # fewer than one expected success: the margin admits zero
            logger.warning("MDP YES check is vacuous: delta %s over %d seeds", delta, seeds)
            report.notes.append(f"MDP YES statistical check is vacuous: delta * seeds = "
                                f"{float(delta * seeds):.3g} < 1")
            detail += ", vacuous"
        report.check("mdp", "YES", "statistical", within_margin(observed, delta, seeds), detail)
    elif claim == "NO":
        report.check("mdp", "NO", "oracle", report.successes == seeds, f"{report.successes}/{seeds} seeds")
    report.gap("snc->mdp", gamma_mdp)


# ---------------------------------------------------------------------------
# Integer chain
# ---------------------------------------------------------------------------

def _lvs_stages(report: VerificationReport, gamma: Csp2Instance, eps: Fraction, p, eta: Optional[Fraction],
                budget) -> _Certified:
    lvs = csp_to_lvs(gamma, eps)
    gap = 1 + eps / 3
    report.add_stage("csp2->lvs", gamma, lvs, lvs.a.shape, eps=eps, k=lvs.k)
    claim, psi = _csp_claim(gamma, eps, budget)
    eta = gap if eta is None else Fraction(eta)
    snvp = lvs_to_snvp(lvs, eta, p)
    report.add_stage("lvs->snvp", lvs, snvp, snvp.b.shape, eta=eta, p=p, t=snvp.t)
    cert = _Certified(snvp)
    if claim == "YES":
        x = lvs_witness(gamma, psi)
        report.check("lvs", "YES", "constructed", lvs.a @ x == lvs.y and x.hamming_weight == lvs.k,
                     f"weight {x.hamming_weight}")
        residual = snvp.b @ x - snvp.y
        exponent = Fraction(p)
        ok = residual.hamming_weight <= snvp.t and all(v in (0, 1, -1) for v in residual)
        report.check("snvp", "YES", "constructed", ok, f"residual support {residual.hamming_weight}")
        if exponent.denominator == 1:
            report.check("snvp", "YES", "constructed",
                         lp_norm_pp(residual, int(exponent)) <= snvp.t, "lp^p norm within t")
        cert.yes_witness = x
    elif claim == "NO":
        limit = math.floor(gap * lvs.k)
        report.check("lvs", "NO", "oracle", lvs_no_check(lvs, limit, budget), f"support cap {limit}")
        no = snvp_no_check(snvp, eta, budget)
        report.check("snvp", "NO", "oracle", no, f"row-deletion cap {math.floor(eta * snvp.t)}")
        cert.is_no = no
    else:
        report.notes.append("2CSP value lies inside the gap; no claim for the lattice stages")
    report.gap("csp2->lvs", gap)
    report.gap("lvs->snvp", eta)
    return cert


def _svp_stages(report: VerificationReport, source: _Certified, options: Dict, seeds: int, seed, budget):
    snvp: SnvpInstance = source.instance
    overrides = {key: int(options[key]) for key in ("h", "Q", "D", "rho") if options.get(key) is not None}
    p = int(Fraction(options.get("p", snvp.p)))
    eta = Fraction(options.get("svp_eta", 24))
    params = SvpChainParams.create(p, eta, snvp.t, h=overrides.get("h"), q=overrides.get("Q"),
                                   d=overrides.get("D"), rho=overrides.get("rho"),
                                   require_gap=not overrides)
    feasibility = feasibility_report(snvp, params)
    report.gap("snvp->svp", params.gamma_p)
    report.notes += feasibility.lines()
    if options.get("report_only") or not feasibility.materializable or params.h_override is None:
        if not options.get("report_only"):
            logger.warning("SVP stage falls back to report-only mode")
        report.notes.append("report-only: lattices were not materialized")
        return
    yes = source.yes_witness
    gadget = bch_lattice(params.l, params.h_override, params.q_override)
    words = gadget.codewords(budget) if yes is not None else ()
    for index, child in enumerate(seed_sweep(seed, seeds)):
        s, _ = bch_center_sample(gadget, params.r, child)
        b_int = intermediate_lattice(snvp, params, s, gadget)
        final = final_lattice_with_randomness(b_int, params, child)
        if index == 0:
            report.add_stage("snvp->svp", snvp, final.instance, final.instance.b.shape,
                             p=p, eta=eta, l=params.l, r=params.r, budget=params.budget, seeds=seeds)
        if yes is None:
            continue
        s1 = BitVector.from_bits(s.entries[:gadget.h]).value
        hit = False
        for word in words:
            if (int(word) ^ s1).bit_count() != params.r:
                continue
            z = bch_coefficients(gadget, s, BitVector(int(word), gadget.h))
            v = intermediate_yes_vector(yes, z)
            value = lp_norm_pp(b_int @ v, p)
            if value > params.budget:
                report.check("svp", "YES", "constructed", False, f"seed {child}: intermediate norm {value}")
            full = final_yes_vector(final, b_int, v)
            if full is not None and lp_norm_pp(final.instance.b @ full, p) <= params.budget:
                hit = True
        report.successes += hit
    report.seeds = seeds if yes is not None else 0
    if yes is not None:
        report.notes.append(f"{report.successes}/{seeds} seeds keep a short vector modulo rho")
    report.notes.append("NO side of the SVP stage is not enumerated at this size")


def _snvp_yes(snvp: SnvpInstance, budget) -> _Certified:
    exponent = Fraction(snvp.p)
    if exponent.denominator != 1:
        return _Certified(snvp)
    value, x, _ = cvp_enum(snvp, 1, budget)
    return _Certified(snvp, x if value <= snvp.t else None)


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

Source = Union[Csp2Instance, MldInstance, SncInstance, LvsInstance, SnvpInstance]


def run_pipeline(pipeline: str, source: Source, options: Optional[Dict] = None, seeds: int = 1,
                 seed=None, budget: Optional[int] = None) -> VerificationReport:
    """Run a named pipeline and return its report.

    Options: eps (2CSP soundness), gamma (SNC gap), mdp_gamma (MDP gap),
    gadget ("micro" or "bch"), copies and r (micro gadget), gadget_eps,
    eta and p (LVS -> SNVP), svp_eta, h, Q, D, rho and report_only (SVP).

    Raises:
        BudgetExceeded: An oracle hit the enumeration budget; the partial report is attached.
    """
    if pipeline not in PIPELINES:
        raise ValueError(f"unknown pipeline '{pipeline}', expected one of {', '.join(PIPELINES)}")
    options = dict(options or {})
    budget = Config.budget(budget)
    seed = Config.DEFAULT_SEED if seed is None else seed
    eps = Fraction(options.get("eps", Fraction(1, 4)))
    report = VerificationReport(pipeline)
    try:
        _dispatch(report, pipeline, source, options, eps, seeds, seed, budget)
    except TooLarge as e:
        report.partial = True
        report.notes.append(str(e))
        raise BudgetExceeded(e.what, e.attempted, e.limit, report) from e
    logger.info("Pipeline %s: %s", pipeline, report.verdict.value)
    return report


def _require(source, kinds: Sequence[type], pipeline: str):
    if not isinstance(source, tuple(kinds)):
        names = ", ".join(k.__name__ for k in kinds)
        raise InfeasibleParameters(f"pipeline '{pipeline}' accepts {names}, got {type(source).__name__}")


def _dispatch(report, pipeline, source, options, eps, seeds, seed, budget):
    if pipeline == "mld":
        _require(source, (Csp2Instance,), pipeline)
        _mld_stage(report, source, eps, budget)
        return
    if pipeline in ("snc", "mdp"):
        default_gap = Fraction(3) if pipeline == "mdp" else 1 + eps / 3
        gamma_snc = Fraction(options.get("gamma", default_gap))
        if isinstance(source, SncInstance) and pipeline == "mdp":
            snc = _certify_snc(source, gamma_snc, budget)
        else:
            _require(source, (Csp2Instance, MldInstance), pipeline)
            if isinstance(source, Csp2Instance):
                mld = _mld_stage(report, source, eps, budget)
                if gamma_snc != 1 + eps / 3:
                    mld = _certify_mld(mld.instance, gamma_snc, budget)
            else:
                mld = _certify_mld(source, gamma_snc, budget)
            snc = _snc_stage(report, mld, gamma_snc, budget)
        if pipeline == "mdp":
            gamma_mdp = Fraction(options.get("mdp_gamma", 1))
            _mdp_stage(report, snc, gamma_snc, gamma_mdp, options, seeds, seed, budget)
        return
    p = options.get("p", 2)
    if isinstance(source, SnvpInstance) and pipeline == "svp":
        snvp = _snvp_yes(source, budget)
    else:
        _require(source, (Csp2Instance,), pipeline)
        snvp = _lvs_stages(report, source, eps, p, options.get("eta"), budget)
    if pipeline == "svp":
        _svp_stages(report, snvp, options, seeds, seed, budget)
