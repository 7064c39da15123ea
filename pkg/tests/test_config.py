"""Configuration limits, seeding and the exception hierarchy."""

import logging
import os

import numpy as np
import pytest

from config import Config, env_search_paths, load_first_env, make_rng
from errors import (BudgetExceeded, EmptyConstraint, IllegalEdge, InstanceFormatError, SizeOverflow,
                    TooLarge, ToolkitError)


def test_defaults_validate():
    assert Config.validate() is True
    assert Config.ENUMERATION_BUDGET > 0
    assert Config.FULL_ENUMERATION_MAX_DIM > 0


def test_budget_override():
    """An explicit budget wins; non-positive budgets are rejected."""
    assert Config.budget() == Config.ENUMERATION_BUDGET
    assert Config.budget(10) == 10
    with pytest.raises(ValueError):
        Config.budget(0)


def test_validate_rejects_bad_limits(monkeypatch):
    monkeypatch.setattr(Config, "MAX_MATRIX_ENTRIES", 0)
    with pytest.raises(ValueError, match="MAX_MATRIX_ENTRIES"):
        Config.validate()


def test_make_rng_is_deterministic():
    a = make_rng(42).integers(0, 1000, size=5)
    b = make_rng(42).integers(0, 1000, size=5)
    assert np.array_equal(a, b)
    rng = np.random.default_rng(1)
    assert make_rng(rng) is rng


def test_configure_logging_sets_level():
    Config.configure_logging(logging.INFO)
    assert logging.getLogger().level == logging.INFO
    Config.configure_logging(logging.WARNING)
    assert logging.getLogger().level == logging.WARNING


def test_error_hierarchy():
    """Input errors are ValueErrors; budget errors carry the attempted count."""
    assert issubclass(EmptyConstraint, ValueError)
    assert issubclass(InstanceFormatError, ToolkitError)
    assert issubclass(BudgetExceeded, TooLarge)
    assert not issubclass(SizeOverflow, ValueError)

    e = TooLarge("scan", 100, 10)
    assert e.attempted == 100 and e.limit == 10
    assert "100" in str(e)
    assert BudgetExceeded("scan", 100, 10, report="partial").report == "partial"


def test_error_messages():
    assert str(InstanceFormatError("bad", 7)) == "line 7: bad"
    assert str(InstanceFormatError("bad")) == "bad"
    assert "mld" in str(IllegalEdge("mld", "lvs"))
    assert EmptyConstraint((0, 1)).edge == (0, 1)


def test_external_env_is_searched_before_the_embedded_one(monkeypatch, tmp_path):
    bundle, app = tmp_path / "bundle", tmp_path / "app"
    monkeypatch.setattr("sys.frozen", True, raising=False)
    monkeypatch.setattr("sys._MEIPASS", str(bundle), raising=False)
    monkeypatch.setattr("sys.executable", str(app / "ReductionToolkit"))
    assert env_search_paths() == [str(app / ".env"), str(bundle / ".env")]


def test_first_existing_env_wins(monkeypatch, tmp_path):
    external, embedded = tmp_path / "external.env", tmp_path / "embedded.env"
    external.write_text("TOOLKIT_ENV_ORIGIN=external\n")
    embedded.write_text("TOOLKIT_ENV_ORIGIN=embedded\n")
    monkeypatch.delenv("TOOLKIT_ENV_ORIGIN", raising=False)
    assert load_first_env([str(external), str(embedded)]) == str(external)
    assert os.environ["TOOLKIT_ENV_ORIGIN"] == "external"
    monkeypatch.delenv("TOOLKIT_ENV_ORIGIN")
    assert load_first_env([str(tmp_path / "missing.env"), str(embedded)]) == str(embedded)
    assert os.environ["TOOLKIT_ENV_ORIGIN"] == "embedded"
    monkeypatch.delenv("TOOLKIT_ENV_ORIGIN")
    assert load_first_env([str(tmp_path / "missing.env")]) is None
