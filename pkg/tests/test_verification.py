"""End-to-end verification pipelines on tiny instances."""

from fractions import Fraction

import pytest

from config import Config
from errors import BudgetExceeded, InfeasibleParameters
from latticecore import IntMatrix, IntVector, SnvpInstance
from verification import Verdict, VerificationReport, run_pipeline, seed_sweep, within_margin

SMALL_SVP = {"svp_eta": 4, "h": 15, "Q": 4, "D": 10, "rho": 3}


def _unit_snvp():
    return SnvpInstance(IntMatrix([[1]]), IntVector.of([1]), 1, Fraction(2))


def _stage(report, reduction):
    return next(s for s in report.stages if s.reduction == reduction)


@pytest.mark.parametrize("fixture", ["equality_csp", "contradictory_csp"])
def test_mld_pipeline(fixture, request):
    report = run_pipeline("mld", request.getfixturevalue(fixture))
    assert report.verdict is Verdict.PASS
    assert [s.reduction for s in report.stages] == ["csp2->mld"]
    assert report.gaps[0][1] == Fraction(13, 12)


def test_mld_pipeline_records_observed_gap(contradictory_csp):
    report = run_pipeline("mld", contradictory_csp)
    assert _stage(report, "csp2->mld").shape == (12, 6)
    assert report.gaps == [("csp2->mld", Fraction(13, 12), None)]
    assert any(c.claim == "NO" and c.passed for c in report.checks)


def test_snc_pipeline(equality_csp, contradictory_csp):
    yes = run_pipeline("snc", equality_csp)
    assert yes.verdict is Verdict.PASS
    assert _stage(yes, "mld->snc").shape == (41, 6)
    assert any(c.stage == "snc" and c.claim == "YES" for c in yes.checks)

    no = run_pipeline("snc", contradictory_csp)
    assert no.verdict is Verdict.PASS
    assert _stage(no, "mld->snc").shape == (78, 6)
    assert any(c.stage == "snc" and c.claim == "NO" for c in no.checks)


def test_mdp_pipeline_from_mld(unit_mld_yes, unit_mld_no):
    yes = run_pipeline("mdp", unit_mld_yes, {"gamma": 4}, seeds=20)
    assert yes.verdict is Verdict.PASS
    stage = _stage(yes, "snc->mdp")
    assert stage.shape == (20, 2)
    assert (stage.parameters["a"], stage.parameters["b"], stage.parameters["k"]) == ("2", "2", "6")
    assert yes.seeds == 20
    assert 0 < yes.successes <= 20
    assert not any("vacuous" in note for note in yes.notes)

    no = run_pipeline("mdp", unit_mld_no, {"gamma": 4}, seeds=20)
    assert no.verdict is Verdict.PASS
    assert no.successes == 20
    assert no.success_fraction == 1


def test_mdp_pipeline_from_csp(equality_csp, contradictory_csp, caplog):
    with caplog.at_level("WARNING", logger="verification"):
        yes = run_pipeline("mdp", equality_csp, seeds=3)
    assert yes.verdict is Verdict.PASS
    # delta = 43 / 2^42 for the 42-bit repetition tail, so three seeds expect no success
    assert any("vacuous" in note for note in yes.notes)
    assert "YES check is vacuous" in caplog.text
    statistical = next(c for c in yes.checks if c.method == "statistical")
    assert statistical.detail.endswith(", vacuous")
    stage = _stage(yes, "snc->mdp")
    assert (stage.parameters["a"], stage.parameters["b"], stage.parameters["k"]) == ("8", "9", "60")
    assert stage.parameters["gadget"] == "micro"

    no = run_pipeline("mdp", contradictory_csp, seeds=3)
    assert no.verdict is Verdict.PASS
    assert _stage(no, "snc->mdp").parameters["k"] == "100"
    assert no.successes == 3


def test_lvs_pipeline(satisfiable_twin, contradictory_csp):
    yes = run_pipeline("lvs", satisfiable_twin)
    assert yes.verdict is Verdict.PASS
    assert [s.reduction for s in yes.stages] == ["csp2->lvs", "lvs->snvp"]
    assert any(c.stage == "snvp" and c.claim == "YES" for c in yes.checks)

    no = run_pipeline("lvs", contradictory_csp)
    assert no.verdict is Verdict.PASS
    assert {c.stage for c in no.checks if c.claim == "NO"} == {"lvs", "snvp"}


def test_svp_pipeline_small_gadget():
    report = run_pipeline("svp", _unit_snvp(), SMALL_SVP, seeds=5)
    assert report.verdict is Verdict.PASS
    assert _stage(report, "snvp->svp").shape == (25, 26)
    assert report.seeds == 5
    assert any("materializable = True" in note for note in report.notes)


def test_svp_pipeline_report_only(monkeypatch):
    monkeypatch.setattr(Config, "REPORT_MAX_BITS", 1000)
    report = run_pipeline("svp", _unit_snvp(), {"svp_eta": 24})
    assert report.verdict is Verdict.PASS
    assert report.stages == []
    assert "report-only: lattices were not materialized" in report.notes
    assert report.gaps[0][0] == "snvp->svp"


def test_budget_exhaustion_keeps_partial_report(equality_csp):
    with pytest.raises(BudgetExceeded) as info:
        run_pipeline("mld", equality_csp, budget=2)
    partial = info.value.report
    assert isinstance(partial, VerificationReport)
    assert partial.verdict is Verdict.BUDGET
    assert [s.reduction for s in partial.stages] == ["csp2->mld"]
    assert "verdict: BUDGET" in partial.to_text()


def test_pipeline_input_errors(unit_mld_yes):
    with pytest.raises(ValueError, match="unknown pipeline"):
        run_pipeline("cvp", unit_mld_yes)
    with pytest.raises(InfeasibleParameters):
        run_pipeline("lvs", unit_mld_yes)


def test_report_text(equality_csp):
    text = run_pipeline("mld", equality_csp).to_text()
    lines = text.splitlines()
    assert lines[:2] == ["pipeline: mld", "verdict: PASS"]
    assert lines[2].startswith("stage csp2->mld: 7x6 in=")
    assert "gap csp2->mld: claimed 13/12, observed n/a" in lines


def test_within_margin():
    assert within_margin(Fraction(1, 2), Fraction(1, 2), 10)
    assert within_margin(Fraction(0), Fraction(1, 100), 100)
    assert not within_margin(Fraction(0), Fraction(1, 2), 100)


def test_seed_sweep_is_deterministic():
    assert seed_sweep(7, 4) == seed_sweep(7, 4)
    assert len(set(seed_sweep(7, 50))) == 50
    assert seed_sweep(7, 3) != seed_sweep(8, 3)
