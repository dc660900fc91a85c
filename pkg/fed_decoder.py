"""
Fermionic expectation decoding.

Each measured outcome d of a group is mapped back to a fermionic basis state:
the pivot bit gives the eigen-sign of the X-string, the remaining bits are
pushed through the inverse CNOT network to recover an encoded label, and the
lookup decoder turns the label into a weight-N occupation. Outcomes whose label
has no weight-N preimage are post-selected away.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

import config
from fermion_hamiltonian import HermitianPart
from operator_encoding import LabelEncoder, MeasurementGroup, build_basis
from statevector_sim import StateVector, basis_probabilities, measure_distribution
from subspace_code import LookupDecoder, SubspaceCode

logger = logging.getLogger(__name__)


class PhysicalMassError(ArithmeticError):
    """No probability left on labels that decode to weight-N states."""


class OutcomeStatus(Enum):
    MATCHED = "matched"
    UNMATCHED = "unmatched"      # decodable, but no term of the group has it in its support
    DISCARDED = "discarded"      # no weight-N preimage


@dataclass
class DecodedExpectation:
    value: float
    post_selected_mass: float
    discarded_mass: float
    unmatched_mass: float = 0.0
    outcome_count: int = 0
    x_key: str = ""
    part: str = HermitianPart.RE.value

    @property
    def total_mass(self) -> float:
        return self.post_selected_mass + self.discarded_mass

    def to_dict(self) -> dict:
        return {
            "x_key": self.x_key,
            "part": self.part,
            "value": self.value,
            "post_selected_mass": self.post_selected_mass,
            "discarded_mass": self.discarded_mass,
            "unmatched_mass": self.unmatched_mass,
            "outcome_count": self.outcome_count,
        }


@dataclass
class _TermView:
    coefficient: float
    a_key: int
    signs: dict[int, int]          # b in S_O -> s0 (-1)^(c.b)
    pivot_bits: dict[int, int]     # b in S_O -> (A G b)[pivot]


class GroupDecoder:
    """Per-group outcome decoding with a cache keyed by outcome integer."""

    def __init__(self, group: MeasurementGroup, code: SubspaceCode, decoder: LookupDecoder):
        if group.qubits != code.qubits:
            raise ValueError(f"Group acts on {group.qubits} qubits, code has Q={code.qubits}")
        self.group = group
        self.code = code
        self.decoder = decoder
        self.qubits = code.qubits
        basis = group.basis
        self.pivot_shift = None if basis.pivot is None else self.qubits - 1 - basis.pivot
        self.terms = []
        for term in group.terms:
            signs, pivot_bits = {}, {}
            for b, (label, _, sign) in zip(sorted(term.term.support, reverse=True), term.pairs):
                signs[b] = sign
                if self.pivot_shift is not None:
                    pivot_bits[b] = (basis.apply_key(label) >> self.pivot_shift) & 1
            self.terms.append(_TermView(term.coefficient, term.term.x_key, signs, pivot_bits))
        self._cache: dict[int, tuple[float, OutcomeStatus]] = {}

    def _decode_label(self, outcome: int) -> tuple[int | None, int]:
        """(decoded state or None, eigen-sign) for one outcome."""
        if self.pivot_shift is None:
            return self.decoder.decode_key(outcome), 1
        eigen = -1 if (outcome >> self.pivot_shift) & 1 else 1
        cleared = outcome & ~(1 << self.pivot_shift)
        label = self.group.basis.undo_key(cleared)
        state = self.decoder.decode_key(label)
        if state is None:
            state = self.decoder.decode_key(label ^ self.group.x_key)
        return state, eigen

    def outcome_weight(self, outcome: int) -> tuple[float, OutcomeStatus]:
        """Weight w(d) such that the group value is sum_d P(d) w(d)."""
        cached = self._cache.get(outcome)
        if cached is not None:
            return cached
        state, eigen = self._decode_label(outcome)
        if state is None or state.bit_count() != self.code.electrons:
            result = (0.0, OutcomeStatus.DISCARDED)
        else:
            weight, matched = 0.0, False
            for view in self.terms:
                if state in view.signs:
                    b = state
                elif state ^ view.a_key in view.signs:
                    b = state ^ view.a_key
                else:
                    continue
                matched = True
                contribution = view.coefficient * view.signs[b] * eigen
                if self.pivot_shift is not None:
                    contribution *= 0.5
                    if self.group.part is HermitianPart.IM and not view.pivot_bits[b]:
                        contribution = -contribution
                weight += contribution
            result = (weight, OutcomeStatus.MATCHED if matched else OutcomeStatus.UNMATCHED)
        self._cache[outcome] = result
        return result

    def decode(self, histogram: dict[int, float]) -> DecodedExpectation:
        value = kept = discarded = unmatched = 0.0
        for outcome in sorted(histogram):
            p = histogram[outcome]
            if p <= 0.0:
                continue
            weight, status = self.outcome_weight(outcome)
            if status is OutcomeStatus.DISCARDED:
                discarded += p
                continue
            kept += p
            if status is OutcomeStatus.UNMATCHED:
                unmatched += p
            value += p * weight
        return DecodedExpectation(value, kept, discarded, unmatched, len(histogram),
                                  format(self.group.x_key, f"0{self.qubits}b"), self.group.part.value)

    def dense_weights(self) -> tuple[np.ndarray, np.ndarray]:
        """(weights, post-selected mask) over all 2^Q outcomes, for exact-probability evaluation."""
        dim = 1 << self.qubits
        weights = np.zeros(dim)
        kept = np.zeros(dim, dtype=bool)
        for d in range(dim):
            w, status = self.outcome_weight(d)
            weights[d] = w
            kept[d] = status is not OutcomeStatus.DISCARDED
        return weights, kept


def fed_decode_group(histogram: dict[int, float], group: MeasurementGroup, code: SubspaceCode,
                     decoder: LookupDecoder, cache: GroupDecoder | None = None) -> DecodedExpectation:
    """Decode one group's outcome histogram into coef-weighted Re/Im expectations."""
    for outcome in histogram:
        if not 0 <= outcome < (1 << code.qubits):
            raise ValueError(f"Outcome {outcome} does not fit in Q={code.qubits} bits")
    return (cache or GroupDecoder(group, code, decoder)).decode(histogram)


# --- Energies ---

@dataclass
class EnergyEvaluator:
    """Core energy plus the FED-decoded Re groups of an encoded Hamiltonian.

    Group values are sums of P(d) w(d) over the raw outcome distribution, i.e. <Pi H Pi>
    for the projector Pi onto the encoded subspace. Energies divide the electronic part
    by the physical mass <Pi>, read off the computational-basis distribution.
    """
    groups: list[MeasurementGroup]
    code: SubspaceCode
    decoder: LookupDecoder
    core_energy: float = 0.0
    _decoders: list[GroupDecoder] = field(default_factory=list, init=False, repr=False)
    _dense: list[tuple[np.ndarray, np.ndarray]] | None = field(default=None, init=False, repr=False)
    _physical: np.ndarray | None = field(default=None, init=False, repr=False)

    def __post_init__(self):
        self.groups = [g for g in self.groups if g.part is HermitianPart.RE]
        self._decoders = [GroupDecoder(g, self.code, self.decoder) for g in self.groups]
        self._physical = np.zeros(1 << self.code.qubits, dtype=bool)
        self._physical[list(self.decoder.table)] = True

    def group_expectations(self, state: StateVector, shots: int | None = None,
                           seed: int = 0) -> list[DecodedExpectation]:
        results = []
        for n, (group, cache) in enumerate(zip(self.groups, self._decoders)):
            histogram = measure_distribution(state, group.basis, shots=shots, seed=seed + n)
            results.append(cache.decode(histogram))
        return results

    def physical_mass(self, state: StateVector, shots: int | None = None, seed: int = 0) -> float:
        """<Pi>: probability that a computational-basis readout decodes to a weight-N state."""
        if shots is None:
            return float(state.probabilities()[self._physical].sum())
        histogram = measure_distribution(state, build_basis([0] * self.code.qubits), shots=shots,
                                         seed=seed + len(self.groups))
        return sum(p for d, p in histogram.items() if self._physical[d])

    def normalise(self, electronic: float, mass: float) -> float:
        if mass <= config.PROBABILITY_TOLERANCE:
            raise PhysicalMassError(f"Physical-subspace mass {mass:.3e} is too small to post-select on")
        return self.core_energy + electronic / mass

    def evaluate(self, state: StateVector, shots: int | None = None, seed: int = 0) -> float:
        if state.qubits != self.code.qubits:
            raise ValueError(f"State has {state.qubits} qubits, code has Q={self.code.qubits}")
        mass = self.physical_mass(state, shots, seed)
        if shots is not None:
            electronic = sum(r.value for r in self.group_expectations(state, shots, seed))
            return self.normalise(electronic, mass)
        if self._dense is None:
            self._dense = [d.dense_weights() for d in self._decoders]
        electronic = 0.0
        for group, (weights, _) in zip(self.groups, self._dense):
            electronic += float(basis_probabilities(state, group.basis) @ weights)
        return self.normalise(electronic, mass)

    def post_selected_mass(self, state: StateVector) -> float:
        """Smallest post-selected probability over the groups (exact probabilities)."""
        if not self.groups:
            return 1.0
        return min(r.post_selected_mass for r in self.group_expectations(state))


def evaluate_energy(groups: list[MeasurementGroup], state: StateVector, code: SubspaceCode,
                    decoder: LookupDecoder, shots: int | None = None, seed: int = 0,
                    core_energy: float = 0.0) -> float:
    return EnergyEvaluator(groups, code, decoder, core_energy).evaluate(state, shots=shots, seed=seed)


def decode_report(evaluator: EnergyEvaluator, state: StateVector, shots: int | None = None, seed: int = 0) -> dict:
    results = evaluator.group_expectations(state, shots, seed)
    mass = evaluator.physical_mass(state, shots, seed)
    return {
        "core_energy": evaluator.core_energy,
        "physical_mass": mass,
        "energy": evaluator.normalise(sum(r.value for r in results), mass),
        "shots": shots,
        "groups": [r.to_dict() for r in results],
    }


# --- Oracle helpers ---

def physical_state(code: SubspaceCode, amplitudes: dict[int, complex]) -> StateVector:
    """Encoded state sum_b psi_b |G b> from fermionic amplitudes keyed by state integer."""
    encoder = LabelEncoder(code)
    vector = np.zeros(1 << code.qubits, dtype=np.complex128)
    for key, amp in amplitudes.items():
        vector[encoder.encode_key(key)] += amp
    norm = np.linalg.norm(vector)
    if norm < config.NORM_TOLERANCE:
        raise ValueError("Fermionic amplitudes have zero norm")
    return StateVector(code.qubits, vector / norm)


def decoded_amplitudes(state: StateVector, decoder: LookupDecoder) -> dict[int, complex]:
    """Fermionic amplitudes psi'_b read back from the encoded labels."""
    out = {}
    for label in np.flatnonzero(np.abs(state.amplitudes) > 0):
        key = decoder.decode_key(int(label))
        if key is not None:
            out[key] = complex(state.amplitudes[label])
    return out


if __name__ == '__main__':
    from fermion_hamiltonian import FermionHamiltonian, hamiltonian_terms
    from operator_encoding import encode_hamiltonian
    from subspace_code import build_lookup

    hop = FermionHamiltonian(2, 1, 0.0, {(1, 2): 1.0, (2, 1): 1.0})
    code = SubspaceCode.identity(2, 1)
    groups = encode_hamiltonian(hamiltonian_terms(hop), code)
    state = physical_state(code, {0b01: 1.0, 0b10: 1.0})
    print(f"<hop> on (|01>+|10>)/sqrt2 = {evaluate_energy(groups, state, code, build_lookup(code)):.6f}")
