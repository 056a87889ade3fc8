import sys
from pathlib import Path

import numpy as np
import pytest

from multifault.core import BeliefNetwork, Cpt, Variable, binary
from multifault.documents import load_document

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "fixtures"

sys.path.insert(0, str(ROOT / "scripts"))


def fixture_path(name: str) -> Path:
    return FIXTURES / name


def load(name: str):
    return load_document(FIXTURES / name).body


def net(variables, cpts) -> BeliefNetwork:
    """Network whose arcs are read off the Cpt parent lists."""
    arcs = [(p, c.owner) for c in cpts for p in c.parents]
    return BeliefNetwork.build(variables, arcs, cpts)


def cond(owner, parent, table):
    """Cpt over one parent: ``table`` maps parent instance -> row."""
    return Cpt.from_configs(owner, [({parent: k}, v) for k, v in table.items()], [parent])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def sorethroat():
    return load("sorethroat.simnet.json")


@pytest.fixture
def appi_star():
    return load("appi-star.simnet.json")


@pytest.fixture
def appi_chain():
    return load("appi-chain.simnet.json")


@pytest.fixture
def priors():
    return {"APPI": 0.05, "RUPTURED ECTOPIC": 0.02}


__all__ = ["Variable", "binary", "Cpt", "net", "cond", "load", "fixture_path"]
