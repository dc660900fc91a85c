import dataclasses

import numpy as np
import pytest

from conftest import full_two_body
from fed_decoder import (EnergyEvaluator, GroupDecoder, OutcomeStatus, PhysicalMassError, decode_report,
                         decoded_amplitudes, evaluate_energy, fed_decode_group, physical_state)
from fermion_hamiltonian import (FermionHamiltonian, HermitianPart, dense_hamiltonian, hamiltonian_terms,
                                 load_hamiltonian)
from operator_encoding import LabelEncoder, encode_hamiltonian, encode_term, encoded_term_matrix, group_terms
from selftest import flip_largest_term, random_physical_amplitudes
from statevector_sim import StateVector, measure_distribution
from subspace_code import SubspaceCode, build_lookup, rle_search


def _evaluator(h, code, terms=None):
    terms = hamiltonian_terms(h) if terms is None else terms
    return EnergyEvaluator(encode_hamiltonian(terms, code), code, build_lookup(code), h.core_energy)


def _oracle(h, code, state):
    basis, matrix = dense_hamiltonian(h)
    amps = decoded_amplitudes(state, build_lookup(code))
    psi = np.array([amps.get(key, 0.0) for key in basis], dtype=complex)
    return float(np.real(np.vdot(psi, matrix @ psi))) + h.core_energy


def test_number_operator_on_occupied_mode():
    code = SubspaceCode.identity(2, 1)
    h = FermionHamiltonian(2, 1, 0.0, {(1, 1): 1.0})
    state = physical_state(code, {0b10: 1.0})
    assert _evaluator(h, code).evaluate(state) == pytest.approx(1.0, abs=1e-12)


def test_hop_on_symmetric_state(hopping):
    code = SubspaceCode.identity(2, 1)
    groups = encode_hamiltonian(hamiltonian_terms(hopping), code)
    state = physical_state(code, {0b01: 1.0, 0b10: 1.0})
    assert evaluate_energy(groups, state, code, build_lookup(code)) == pytest.approx(1.0, abs=1e-12)
    antisymmetric = physical_state(code, {0b01: 1.0, 0b10: -1.0})
    assert evaluate_energy(groups, antisymmetric, code, build_lookup(code)) == pytest.approx(-1.0, abs=1e-12)


def test_hop_through_parity_code(code_431):
    h = FermionHamiltonian(4, 1, 0.0, {(1, 4): 1.0, (4, 1): 1.0})
    state = physical_state(code_431, {0b1000: 1.0, 0b0001: 1.0})
    assert _evaluator(h, code_431).evaluate(state) == pytest.approx(1.0, abs=1e-12)


def test_off_subspace_mass_is_discarded(code_431):
    h = FermionHamiltonian(4, 1, 0.0, {(4, 4): 1.0})
    state = StateVector(3, np.array([1, 0, 0, 0, 0, 0, 0, 1]) / np.sqrt(2))
    evaluator = _evaluator(h, code_431)
    (result,) = evaluator.group_expectations(state)
    assert result.post_selected_mass == pytest.approx(0.5)
    assert result.discarded_mass == pytest.approx(0.5)
    assert result.total_mass == pytest.approx(1.0)
    assert result.value == pytest.approx(0.5)
    assert evaluator.post_selected_mass(state) < 1.0
    assert evaluator.physical_mass(state) == pytest.approx(0.5)
    assert evaluator.evaluate(state) == pytest.approx(1.0)


def test_energy_is_renormalised_to_physical_subspace():
    code = SubspaceCode.identity(2, 1)
    h = FermionHamiltonian(2, 1, 0.25, {(1, 1): 1.0, (2, 2): 1.0})
    evaluator = _evaluator(h, code)
    leaky = StateVector(2, np.array([0.8, 0.36, 0.48, 0.0]))
    assert evaluator.physical_mass(leaky) == pytest.approx(0.36)
    assert evaluator.evaluate(leaky) == pytest.approx(1.25)
    assert evaluator.evaluate(leaky, shots=50_000, seed=1) == pytest.approx(1.25, abs=0.05)
    with pytest.raises(PhysicalMassError):
        evaluator.evaluate(StateVector(2))


def test_current_expectation(hopping):
    code = SubspaceCode.identity(2, 1)
    (group,) = encode_hamiltonian(hamiltonian_terms(hopping, part=HermitianPart.IM), code)
    assert group.part is HermitianPart.IM
    state = physical_state(code, {0b01: 1.0, 0b10: 1j})
    histogram = measure_distribution(state, group.basis)
    assert fed_decode_group(histogram, group, code, build_lookup(code)).value == pytest.approx(-0.5)


def test_outcome_status(code_431):
    h = FermionHamiltonian(4, 1, 0.0, {(4, 4): 1.0})
    (group,) = encode_hamiltonian(hamiltonian_terms(h), code_431)
    cache = GroupDecoder(group, code_431, build_lookup(code_431))
    assert cache.outcome_weight(0b111) == (1.0, OutcomeStatus.MATCHED)
    assert cache.outcome_weight(0b100) == (0.0, OutcomeStatus.UNMATCHED)
    assert cache.outcome_weight(0b000) == (0.0, OutcomeStatus.DISCARDED)


def test_outcome_out_of_range(code_431):
    h = FermionHamiltonian(4, 1, 0.0, {(1, 1): 1.0})
    (group,) = encode_hamiltonian(hamiltonian_terms(h), code_431)
    with pytest.raises(ValueError):
        fed_decode_group({8: 1.0}, group, code_431, build_lookup(code_431))


def test_sign_flip_negates(hopping):
    code = SubspaceCode.identity(2, 1)
    state = physical_state(code, {0b01: 1.0, 0b10: 1.0})
    flipped = flip_largest_term(hamiltonian_terms(hopping))
    assert _evaluator(hopping, code, flipped).evaluate(state) == pytest.approx(-1.0, abs=1e-12)


@pytest.mark.parametrize("seed", range(4))
def test_matches_dense_oracle_on_rle_code(seed):
    code = rle_search(6, 2, 5, seed=seed)
    h = full_two_body(6, 2, seed=seed)
    basis, _ = dense_hamiltonian(h)
    state = physical_state(code, random_physical_amplitudes(np.random.default_rng(seed), basis))
    evaluator = _evaluator(h, code)
    assert evaluator.evaluate(state) == pytest.approx(_oracle(h, code, state), abs=1e-9)
    assert evaluator.post_selected_mass(state) == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize("part", [HermitianPart.RE, HermitianPart.IM])
def test_group_decoding_matches_encoded_matrices(part):
    code = rle_search(6, 2, 5, seed=4)
    terms = [dataclasses.replace(t, part=part) for t in hamiltonian_terms(full_two_body(6, 2, seed=8))
             if part is HermitianPart.RE or not t.is_diagonal]
    encoder = LabelEncoder(code)
    encoded = [encode_term(t, code, encoder) for t in terms]
    basis, _ = dense_hamiltonian(full_two_body(6, 2))
    state = physical_state(code, random_physical_amplitudes(np.random.default_rng(2), basis))
    expected = sum(float(np.real(np.vdot(state.amplitudes, encoded_term_matrix(t) @ state.amplitudes)))
                   for t in encoded)
    decoder = build_lookup(code)
    total = 0.0
    for group in group_terms(encoded):
        total += fed_decode_group(measure_distribution(state, group.basis), group, code, decoder).value
    assert total == pytest.approx(expected, abs=1e-9)


def test_dense_and_histogram_paths_agree(dimer_path):
    h = load_hamiltonian(dimer_path)
    code = SubspaceCode.identity(h.modes, h.electrons)
    basis, _ = dense_hamiltonian(h)
    state = physical_state(code, random_physical_amplitudes(np.random.default_rng(5), basis))
    evaluator = _evaluator(h, code)
    report = decode_report(evaluator, state)
    assert evaluator.evaluate(state) == pytest.approx(report["energy"], abs=1e-12)
    assert len(report["groups"]) == len(evaluator.groups)


def test_shots_converge_to_exact(dimer_path):
    h = load_hamiltonian(dimer_path)
    code = SubspaceCode.identity(h.modes, h.electrons)
    basis, _ = dense_hamiltonian(h)
    state = physical_state(code, random_physical_amplitudes(np.random.default_rng(6), basis))
    evaluator = _evaluator(h, code)
    sampled = evaluator.evaluate(state, shots=200_000, seed=3)
    assert sampled == evaluator.evaluate(state, shots=200_000, seed=3)
    assert sampled == pytest.approx(evaluator.evaluate(state), abs=0.1)


def test_decoded_amplitudes_round_trip(code_431):
    state = physical_state(code_431, {0b1000: 3.0, 0b0001: 4.0})
    amps = decoded_amplitudes(state, build_lookup(code_431))
    assert amps[0b1000] == pytest.approx(0.6)
    assert amps[0b0001] == pytest.approx(0.8)
    with pytest.raises(ValueError):
        physical_state(code_431, {})
