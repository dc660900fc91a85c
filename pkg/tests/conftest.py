import os

import numpy as np
import pytest

from fermion_hamiltonian import FermionHamiltonian
from gf2_linalg import BitMatrix
from subspace_code import SubspaceCode

DATA_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "data")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def code_431():
    """G = [I_3 | 111], M=4, N=1."""
    return SubspaceCode.from_generator(BitMatrix.from_strings(["1001", "0101", "0011"]), electrons=1)


@pytest.fixture
def hopping():
    """Two-mode hopping with t = 1, one electron."""
    return FermionHamiltonian(2, 1, 0.0, {(1, 2): 1.0, (2, 1): 1.0})


@pytest.fixture
def dimer_path():
    return os.path.join(DATA_DIR, "hamiltonians", "hubbard_dimer.ham")


@pytest.fixture
def trimer_path():
    return os.path.join(DATA_DIR, "hamiltonians", "hubbard_trimer.ham")


@pytest.fixture
def h2_path():
    return os.path.join(DATA_DIR, "fcidump", "h2_sto3g.fcidump")


def full_two_body(modes, electrons, seed=0):
    """Every a+_i a+_j a_k a_l (i<j, k<l) with random real coefficients, Hermitian-completed."""
    rng = np.random.default_rng(seed)
    one_body, two_body = {}, {}
    for i in range(1, modes + 1):
        for j in range(i, modes + 1):
            one_body[(i, j)] = one_body[(j, i)] = float(rng.normal())
    for i in range(1, modes + 1):
        for j in range(i + 1, modes + 1):
            for k in range(1, modes + 1):
                for l in range(k + 1, modes + 1):
                    if (l, k, j, i) in two_body:
                        continue
                    v = float(rng.normal())
                    two_body[(i, j, k, l)] = two_body[(l, k, j, i)] = v
    return FermionHamiltonian(modes, electrons, 0.0, one_body, two_body)
