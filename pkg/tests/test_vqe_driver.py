import csv

import numpy as np
import pytest

from fermion_hamiltonian import FermionHamiltonian, exact_ground_energy, load_hamiltonian
from subspace_code import RleSettings, SubspaceCode
from vqe_driver import (FixedCodePolicy, IdentityCodePolicy, RleMinimalPolicy, VqeConfig, VqeProblem,
                        create_code_policy, hartree_to_kcal, potential_energy_scan, result_table, run_vqe,
                        save_trace_csv, scan_table)


@pytest.fixture
def diagonal():
    return FermionHamiltonian(4, 2, 0.1, {(1, 1): -1.0, (2, 2): -0.5, (3, 3): 0.3, (4, 4): 0.8})


def test_config_validation():
    with pytest.raises(ValueError):
        VqeConfig(layers=-1)
    with pytest.raises(ValueError):
        VqeConfig(restarts=0)
    with pytest.raises(ValueError):
        VqeConfig(shots=0)


def test_hartree_to_kcal():
    assert hartree_to_kcal(1.0) == pytest.approx(627.509474)


def test_diagonal_hamiltonian_stays_at_reference(diagonal):
    cfg = VqeConfig(layers=0, restarts=1, init_scale=0.0)
    result = run_vqe(diagonal, SubspaceCode.identity(4, 2), cfg)
    assert result.best_energy == pytest.approx(-1.4, abs=1e-12)
    assert result.exact_energy == pytest.approx(-1.4, abs=1e-12)
    assert result.delta_e_kcal == pytest.approx(0.0, abs=1e-9)
    assert result.parameter_count == 4 and result.cnot_count == 0
    assert result.chemically_accurate


def test_hopping_reaches_ground_state(hopping):
    cfg = VqeConfig(layers=1, restarts=3, init_scale=0.5, seed=2)
    result = run_vqe(hopping, SubspaceCode.identity(2, 1), cfg)
    assert result.best_energy == pytest.approx(-1.0, abs=1e-6)
    assert result.best_energy >= -1.0 - 1e-9
    assert len(result.restart_energies) == 3
    assert not result.failed_restarts


def test_trace_is_monotone(hopping):
    result = run_vqe(hopping, SubspaceCode.identity(2, 1), VqeConfig(layers=1, restarts=2, init_scale=0.5))
    trace = result.energy_trace
    assert trace
    assert all(b <= a + 1e-15 for a, b in zip(trace, trace[1:]))
    assert trace[-1] == pytest.approx(result.best_energy)


def test_positive_spectrum_is_not_undercut_by_leakage():
    h = FermionHamiltonian(2, 1, 0.0, {(1, 1): 1.0, (2, 2): 1.0})
    result = run_vqe(h, SubspaceCode.identity(2, 1), VqeConfig(layers=0, restarts=1))
    assert result.exact_energy == pytest.approx(1.0)
    assert result.best_energy == pytest.approx(1.0, abs=1e-9)
    assert result.best_energy >= result.exact_energy - 1e-8
    assert result.delta_e_kcal == pytest.approx(0.0, abs=1e-6)


def test_code_mismatch_rejected(hopping, code_431):
    with pytest.raises(ValueError):
        run_vqe(hopping, code_431)


def test_energies_respect_variational_bound(trimer_path):
    h = load_hamiltonian(trimer_path)
    code = RleMinimalPolicy(RleSettings(seed=0, max_attempts=2000)).code_for(h.modes, h.electrons)
    assert code.qubits < h.modes
    problem = VqeProblem(h, code, VqeConfig(layers=1))
    exact = exact_ground_energy(h)
    rng = np.random.default_rng(0)
    for _ in range(10):
        theta = rng.uniform(-np.pi, np.pi, problem.parameter_count)
        assert problem.energy(theta) >= exact - 1e-9


def test_run_is_deterministic_across_threads(hopping):
    code = SubspaceCode.identity(2, 1)
    serial = run_vqe(hopping, code, VqeConfig(layers=1, restarts=3, init_scale=0.5, seed=4))
    again = run_vqe(hopping, code, VqeConfig(layers=1, restarts=3, init_scale=0.5, seed=4))
    threaded = run_vqe(hopping, code, VqeConfig(layers=1, restarts=3, init_scale=0.5, seed=4, threads=3))
    assert again.best_energy == serial.best_energy
    assert again.energy_trace == serial.energy_trace
    assert threaded.best_energy == serial.best_energy
    assert threaded.best_restart == serial.best_restart


def test_policy_factory(code_431):
    assert isinstance(create_code_policy("jw"), IdentityCodePolicy)
    assert isinstance(create_code_policy("Minimal"), RleMinimalPolicy)
    fixed = create_code_policy("file", code=code_431)
    assert isinstance(fixed, FixedCodePolicy)
    assert fixed.code_for(4, 1) is code_431
    with pytest.raises(ValueError):
        fixed.code_for(4, 2)
    with pytest.raises(ValueError):
        create_code_policy("bravyi-kitaev")
    with pytest.raises(ValueError):
        FixedCodePolicy()


def test_rle_policy_finds_minimal_code():
    assert RleMinimalPolicy(RleSettings(seed=0, max_attempts=200)).code_for(4, 1).qubits == 3


def test_scan_over_identical_points(dimer_path):
    cfg = VqeConfig(layers=0, restarts=1, init_scale=0.0)
    points = potential_energy_scan([dimer_path, dimer_path], IdentityCodePolicy(), cfg, labels=["a", "b"])
    assert [p.label for p in points] == ["a", "b"]
    assert points[0].vqe_energy == points[1].vqe_energy
    assert all(p.vqe_energy - p.exact_energy >= -1e-8 for p in points)
    assert points[0].exact_energy == pytest.approx(exact_ground_energy(load_hamiltonian(dimer_path)))
    assert "vqe_energy" in scan_table(points)


def test_scan_rejects_mixed_sizes(dimer_path, trimer_path):
    with pytest.raises(ValueError):
        potential_energy_scan([dimer_path, trimer_path], IdentityCodePolicy())


def test_outputs(tmp_path, hopping):
    result = run_vqe(hopping, SubspaceCode.identity(2, 1), VqeConfig(layers=1, restarts=1, init_scale=0.5))
    payload = result.to_dict()
    assert payload["config"]["layers"] == 1
    assert len(payload["best_parameters"]) == 4
    assert "delta_e_kcal" in result_table(result)
    path = tmp_path / "trace.csv"
    save_trace_csv(result, str(path))
    with open(path, newline="") as f:
        rows = list(csv.reader(f))
    assert rows[0] == ["iteration", "best_energy"]
    assert len(rows) == len(result.energy_trace) + 1


@pytest.mark.slow
def test_dimer_chemical_accuracy(dimer_path):
    h = load_hamiltonian(dimer_path)
    cfg = VqeConfig(layers=3, restarts=30, init_scale=0.01, seed=0, threads=4)
    result = run_vqe(h, SubspaceCode.identity(h.modes, h.electrons), cfg)
    assert result.chemically_accurate
    assert result.best_energy >= result.exact_energy - 1e-9


@pytest.mark.slow
def test_trimer_chemical_accuracy_on_compressed_code(trimer_path):
    h = load_hamiltonian(trimer_path)
    code = RleMinimalPolicy(RleSettings(seed=0, max_attempts=2000)).code_for(h.modes, h.electrons)
    result = run_vqe(h, code, VqeConfig(layers=5, restarts=30, init_scale=0.01, seed=1, threads=4))
    assert result.chemically_accurate
    assert result.cnot_count == 5 * (code.qubits - 1)
