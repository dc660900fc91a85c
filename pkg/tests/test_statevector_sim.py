import math

import numpy as np
import pytest

from fermion_hamiltonian import HermitianPart
from operator_encoding import build_basis
from statevector_sim import (HeaCircuit, ParameterCountError, QubitIndexError, SimulatorCapError, StateVector,
                             apply_gate, cnot_gate, h_gate, hea_cnot_count, hea_parameter_count,
                             histogram_to_json, measure_distribution, prepare_encoded_reference, run_hea, ry_gate,
                             sdg_gate, x_gate)
from subspace_code import SubspaceCode


def test_x_on_first_qubit():
    state = apply_gate(StateVector(2), x_gate(0))
    assert state.amplitudes.tolist() == [0, 0, 1, 0]


def test_ry_pi_flips():
    state = apply_gate(StateVector(1), ry_gate(0, math.pi))
    assert np.allclose(state.amplitudes, [0, 1], atol=1e-12)


def test_cnot():
    state = apply_gate(StateVector.basis_state(2, 0b10), cnot_gate(0, 1))
    assert state.amplitudes.tolist() == [0, 0, 0, 1]
    state = apply_gate(StateVector.basis_state(3, 0b001), cnot_gate(2, 0))
    assert np.flatnonzero(state.amplitudes).tolist() == [0b101]


def test_norm_preserved_over_random_gates(rng):
    state = StateVector(4)
    for _ in range(1000):
        kind = rng.integers(5)
        q = int(rng.integers(4))
        if kind == 0:
            gate = x_gate(q)
        elif kind == 1:
            gate = ry_gate(q, rng.uniform(-math.pi, math.pi))
        elif kind == 2:
            gate = h_gate(q)
        elif kind == 3:
            gate = sdg_gate(q)
        else:
            gate = cnot_gate(q, (q + 1 + int(rng.integers(3))) % 4)
        apply_gate(state, gate)
    assert state.norm() == pytest.approx(1.0, abs=1e-10)
    state.check_norm()


def test_index_and_cap_errors():
    with pytest.raises(QubitIndexError):
        apply_gate(StateVector(2), x_gate(2))
    with pytest.raises(QubitIndexError):
        apply_gate(StateVector(2), cnot_gate(1, 1))
    with pytest.raises(SimulatorCapError):
        StateVector(21)


def test_reference_identity_code():
    state = prepare_encoded_reference(SubspaceCode.identity(4, 2), [1, 1, 0, 0])
    assert np.flatnonzero(state.amplitudes).tolist() == [0b1100]
    assert state.norm() == pytest.approx(1.0)


def test_reference_parity_code(code_431):
    state = prepare_encoded_reference(code_431, [0, 0, 0, 1])
    assert np.flatnonzero(state.amplitudes).tolist() == [0b111]
    with pytest.raises(ValueError):
        prepare_encoded_reference(code_431, [1, 1, 0, 0])


@pytest.mark.parametrize("qubits,layers,cnots,params", [(6, 5, 25, 36), (7, 11, 66, 84), (4, 0, 0, 4)])
def test_hea_counts(qubits, layers, cnots, params):
    circuit = HeaCircuit(qubits, layers, np.zeros(hea_parameter_count(qubits, layers)))
    assert circuit.cnot_count == hea_cnot_count(qubits, layers) == cnots
    assert circuit.parameter_count == params
    assert sum(g.kind.value == "cnot" for g in circuit.gates()) == cnots


def test_hea_zero_parameters_keep_basis_state():
    state = run_hea(StateVector.basis_state(3, 0b100), HeaCircuit(3, 2, np.zeros(9)))
    nonzero = np.flatnonzero(np.abs(state.amplitudes) > 1e-12)
    assert len(nonzero) == 1
    assert abs(state.amplitudes[nonzero[0]]) == pytest.approx(1.0)
    assert run_hea(StateVector(3), HeaCircuit(3, 2, np.zeros(9))).amplitudes[0] == pytest.approx(1.0)


def test_hea_parameter_mismatch():
    with pytest.raises(ParameterCountError):
        HeaCircuit(3, 1, np.zeros(5))


def test_measure_vacuum_diagonal_basis():
    assert measure_distribution(StateVector(2), build_basis([0, 0])) == {0: 1.0}


def test_measure_pair_in_x_basis():
    state = StateVector(2, np.array([0, 0.6, 0.8, 0], dtype=complex))
    hist = measure_distribution(state, build_basis([1, 1]))
    assert hist[0b01] == pytest.approx(1.4 ** 2 / 2)
    assert hist[0b11] == pytest.approx(0.2 ** 2 / 2)
    assert sum(hist.values()) == pytest.approx(1.0, abs=1e-10)


def test_measure_y_basis():
    state = StateVector(1, np.array([1, 1j]) / math.sqrt(2))
    hist = measure_distribution(state, build_basis([1], HermitianPart.IM))
    assert hist[0] == pytest.approx(1.0)
    assert hist.get(1, 0.0) == pytest.approx(0.0, abs=1e-12)


def test_shot_sampling_is_seeded_and_close(rng):
    amps = rng.normal(size=8) + 1j * rng.normal(size=8)
    state = StateVector(3, amps / np.linalg.norm(amps))
    basis = build_basis([1, 0, 1])
    exact = measure_distribution(state, basis)
    shots = 100_000
    first = measure_distribution(state, basis, shots=shots, seed=9)
    assert first == measure_distribution(state, basis, shots=shots, seed=9)
    assert sum(first.values()) == pytest.approx(1.0, abs=1e-12)
    for outcome, p in exact.items():
        sigma = math.sqrt(p * (1 - p) / shots)
        assert abs(first.get(outcome, 0.0) - p) <= 5 * sigma + 1e-9


def test_histogram_json():
    assert histogram_to_json({0b01: 0.5, 0b10: 0.5}, 2) == {"01": 0.5, "10": 0.5}
