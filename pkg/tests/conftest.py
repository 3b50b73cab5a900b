import json
from pathlib import Path

import numpy as np
import pytest

from twistlab.standard_subspace import diagonal_subspace, generic_subspace
from twistlab.twist import gallery

FIXTURES = Path(__file__).parent / "fixtures"


def load_fixture(name):
    return json.loads((FIXTURES / name).read_text())


def decode(vec):
    return np.array([complex(re, im) for re, im in vec])


def haar_unitary(rng, d):
    Z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    Q, R = np.linalg.qr(Z)
    return Q * (np.diag(R) / np.abs(np.diag(R)))


def cvec(rng, d):
    return rng.standard_normal(d) + 1j * rng.standard_normal(d)


@pytest.fixture(scope="session")
def oracles():
    return load_fixture("oracles.json")


@pytest.fixture(scope="session")
def witnesses():
    return load_fixture("witnesses.json")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def H_generic():
    return generic_subspace(4.0, haar_unitary(np.random.default_rng(3), 2))


@pytest.fixture(scope="session")
def H_diag():
    return diagonal_subspace([4.0, 0.25])


@pytest.fixture(scope="session")
def qflip():
    return gallery("q_flip", q=0.5)


@pytest.fixture(scope="session")
def proj_pair():
    return gallery("proj_pair", q=0.5, E=np.diag([1.0, 0.0]))


@pytest.fixture(scope="session")
def elem_tensor():
    return gallery("elem_tensor", A=np.diag([1.0, 0.3]), B=np.diag([0.5, 0.2]))
