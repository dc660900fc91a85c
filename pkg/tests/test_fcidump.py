import pytest

from fcidump import read_fcidump, read_integrals
from fermion_hamiltonian import (HamiltonianFormatError, exact_ground_energy, hamiltonian_terms,
                                 hartree_fock_occupation, load_hamiltonian)
from utils import bits_to_string

HF_ENERGY = -1.1166843871
FCI_ENERGY = -1.1372699


def test_integrals_are_symmetric(h2_path):
    ecore, h1, eri, norb, nelec = read_integrals(h2_path)
    assert (norb, nelec) == (2, 2)
    assert ecore == pytest.approx(0.7137539936)
    assert h1[0, 1] == h1[1, 0] == 0.0
    assert eri[0, 1, 0, 1] == eri[1, 0, 1, 0] == eri[0, 1, 1, 0] == pytest.approx(0.1812875358)
    assert eri[0, 0, 1, 1] == eri[1, 1, 0, 0] == pytest.approx(0.6636340479)


def test_spin_expansion(h2_path):
    h = read_fcidump(h2_path)
    assert (h.modes, h.electrons) == (4, 2)
    assert h.one_body[(1, 1)] == h.one_body[(2, 2)] == pytest.approx(-1.2524635735)
    assert (1, 3) not in h.one_body


def test_load_hamiltonian_dispatches(h2_path):
    assert load_hamiltonian(h2_path).modes == 4


def test_h2_hartree_fock_energy(h2_path):
    h = read_fcidump(h2_path)
    occupation = hartree_fock_occupation(h)
    assert bits_to_string(occupation) == "1100"
    key = int(bits_to_string(occupation), 2)
    diagonal = sum(t.coefficient * t.sign(key) for t in hamiltonian_terms(h) if t.is_diagonal and key in t.support)
    assert diagonal + h.core_energy == pytest.approx(HF_ENERGY, abs=1e-8)


def test_h2_fci_energy(h2_path):
    assert exact_ground_energy(read_fcidump(h2_path)) == pytest.approx(FCI_ENERGY, abs=1e-5)


def test_missing_header_terminator(tmp_path):
    path = tmp_path / "bad.fcidump"
    path.write_text("&FCI NORB=2,NELEC=2,\n 0.5 1 1 0 0\n")
    with pytest.raises(HamiltonianFormatError):
        read_integrals(str(path))
