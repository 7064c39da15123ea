"""Shared fixtures; the project modules live at the repository root."""

import os
import sys

import pytest

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))

from csp import Csp2Instance  # noqa: E402
from gf2codes import BitMatrix, BitVector  # noqa: E402
from mldchain import MldInstance  # noqa: E402


@pytest.fixture
def equality_csp():
    """Two vertices, one edge that forces equal labels: 7x6 MLD matrix, k=3."""
    return Csp2Instance.create(2, 2, {(0, 1): [(0, 0), (1, 1)]})


@pytest.fixture
def contradictory_csp():
    """Two edges that disagree about vertex 1; best value 1/2."""
    return Csp2Instance.create(2, 2, {(0, 1): [(0, 0)], (1, 0): [(1, 1)]})


@pytest.fixture
def satisfiable_twin():
    """Same shape as contradictory_csp, satisfied by labelling both vertices 0."""
    return Csp2Instance.create(2, 2, {(0, 1): [(0, 0)], (1, 0): [(0, 0)]})


@pytest.fixture
def unit_mld_yes():
    return MldInstance(BitMatrix.from_rows([[1]]), BitVector.ones(1), 1)


@pytest.fixture
def unit_mld_no():
    return MldInstance(BitMatrix.zeros(1, 1), BitVector.ones(1), 1)
