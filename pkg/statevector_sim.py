"""
Dense state-vector simulator for the encoded register.

Amplitude index bits are big-endian: qubit 0 is the most significant bit and
the leftmost character of a rendered label. Qubit indices are 0-based.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple

import numpy as np

import config
from gf2_linalg import as_bits
from operator_encoding import MeasurementBasis, PivotRotation
from subspace_code import SubspaceCode

logger = logging.getLogger(__name__)


class QubitIndexError(ValueError):
    pass


class SimulatorCapError(RuntimeError):
    pass


class ParameterCountError(ValueError):
    pass


class GateKind(Enum):
    X = "x"
    RY = "ry"
    H = "h"
    SDG = "sdg"
    CNOT = "cnot"


class Gate(NamedTuple):
    kind: GateKind
    qubits: tuple[int, ...]
    theta: float = 0.0

    def __str__(self):
        args = ",".join(map(str, self.qubits))
        return f"{self.kind.value}({args}{f', {self.theta:.6g}' if self.kind is GateKind.RY else ''})"


def x_gate(q: int) -> Gate:
    return Gate(GateKind.X, (q,))


def ry_gate(q: int, theta: float) -> Gate:
    return Gate(GateKind.RY, (q,), float(theta))


def h_gate(q: int) -> Gate:
    return Gate(GateKind.H, (q,))


def sdg_gate(q: int) -> Gate:
    return Gate(GateKind.SDG, (q,))


def cnot_gate(control: int, target: int) -> Gate:
    return Gate(GateKind.CNOT, (control, target))


_H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
_SDG = np.array([[1, 0], [0, -1j]], dtype=complex)


def _ry(theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


class StateVector:
    def __init__(self, qubits: int, amplitudes: np.ndarray | None = None):
        if qubits > config.MAX_SIMULATOR_QUBITS:
            raise SimulatorCapError(f"{qubits} qubits exceed the simulator cap of {config.MAX_SIMULATOR_QUBITS}")
        self.qubits = qubits
        if amplitudes is None:
            amplitudes = np.zeros(1 << qubits, dtype=np.complex128)
            amplitudes[0] = 1.0
        amplitudes = np.asarray(amplitudes, dtype=np.complex128)
        if amplitudes.shape != (1 << qubits,):
            raise ValueError(f"Expected {1 << qubits} amplitudes, got {amplitudes.shape}")
        self.amplitudes = amplitudes

    @classmethod
    def basis_state(cls, qubits: int, index: int) -> StateVector:
        state = cls(qubits)
        state.amplitudes[0] = 0.0
        state.amplitudes[index] = 1.0
        return state

    def copy(self) -> StateVector:
        return StateVector(self.qubits, self.amplitudes.copy())

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def check_norm(self):
        if abs(self.norm() - 1.0) > config.NORM_TOLERANCE:
            raise ArithmeticError(f"State norm drifted to {self.norm():.15f}")

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def _tensor(self) -> np.ndarray:
        return self.amplitudes.reshape((2,) * self.qubits) if self.qubits else self.amplitudes

    def _check(self, q: int):
        if not 0 <= q < self.qubits:
            raise QubitIndexError(f"Qubit {q} outside 0..{self.qubits - 1}")

    def _apply_single(self, matrix: np.ndarray, q: int):
        psi = np.tensordot(matrix, self._tensor(), axes=([1], [q]))
        self.amplitudes = np.moveaxis(psi, 0, q).reshape(-1)

    def apply(self, gate: Gate) -> StateVector:
        for q in gate.qubits:
            self._check(q)
        kind = gate.kind
        if kind is GateKind.X:
            self.amplitudes = np.flip(self._tensor(), axis=gate.qubits[0]).reshape(-1)
        elif kind is GateKind.RY:
            self._apply_single(_ry(gate.theta), gate.qubits[0])
        elif kind is GateKind.H:
            self._apply_single(_H, gate.qubits[0])
        elif kind is GateKind.SDG:
            self._apply_single(_SDG, gate.qubits[0])
        elif kind is GateKind.CNOT:
            control, target = gate.qubits
            if control == target:
                raise QubitIndexError("CNOT control and target coincide")
            psi = self._tensor().copy()
            index = [slice(None)] * self.qubits
            index[control] = 1
            axis = target if target < control else target - 1
            psi[tuple(index)] = np.flip(psi[tuple(index)], axis=axis).copy()
            self.amplitudes = psi.reshape(-1)
        return self

    def label(self, index: int) -> str:
        return format(index, f"0{self.qubits}b")


def apply_gate(state: StateVector, gate: Gate) -> StateVector:
    return state.apply(gate)


def apply_gates(state: StateVector, gates) -> StateVector:
    for gate in gates:
        state.apply(gate)
    return state


# --- Circuits ---

@dataclass
class HeaCircuit:
    """Leading Ry column, then `layers` x (CNOT chain q -> q+1, Ry column)."""
    qubits: int
    layers: int
    parameters: np.ndarray

    def __post_init__(self):
        self.parameters = np.asarray(self.parameters, dtype=float)
        expected = hea_parameter_count(self.qubits, self.layers)
        if self.parameters.shape != (expected,):
            raise ParameterCountError(f"HEA with Q={self.qubits}, {self.layers} layers needs {expected} "
                                      f"parameters, got {self.parameters.size}")

    @property
    def parameter_count(self) -> int:
        return hea_parameter_count(self.qubits, self.layers)

    @property
    def cnot_count(self) -> int:
        return hea_cnot_count(self.qubits, self.layers)

    def gates(self) -> list[Gate]:
        q = self.qubits
        theta = self.parameters
        out = [ry_gate(i, theta[i]) for i in range(q)]
        for layer in range(1, self.layers + 1):
            out.extend(cnot_gate(i, i + 1) for i in range(q - 1))
            out.extend(ry_gate(i, theta[layer * q + i]) for i in range(q))
        return out


def hea_parameter_count(qubits: int, layers: int) -> int:
    return qubits * (layers + 1)


def hea_cnot_count(qubits: int, layers: int) -> int:
    return layers * max(0, qubits - 1)


def run_hea(state: StateVector, circuit: HeaCircuit) -> StateVector:
    if circuit.qubits != state.qubits:
        raise ParameterCountError(f"Circuit is for {circuit.qubits} qubits, state has {state.qubits}")
    return apply_gates(state, circuit.gates())


def prepare_encoded_reference(code: SubspaceCode, occupation) -> StateVector:
    """|G . occupation> prepared with X gates from |0...0>."""
    occupation = as_bits(occupation)
    if occupation.shape[0] != code.modes:
        raise ValueError(f"Occupation has {occupation.shape[0]} modes, code encodes {code.modes}")
    if int(occupation.sum()) != code.electrons:
        raise ValueError(f"Occupation weight {int(occupation.sum())} differs from N={code.electrons}")
    label = code.encode(occupation)
    state = StateVector(code.qubits)
    for q in np.flatnonzero(label):
        state.apply(x_gate(int(q)))
    return state


# --- Measurement ---

def basis_gates(basis: MeasurementBasis) -> list[Gate]:
    gates = [cnot_gate(c, t) for c, t in basis.cnot_network]
    if basis.pivot_rotation is PivotRotation.HADAMARD:
        gates.append(h_gate(basis.pivot))
    elif basis.pivot_rotation is PivotRotation.Y_BASIS:
        gates.extend([sdg_gate(basis.pivot), h_gate(basis.pivot)])
    return gates


def basis_probabilities(state: StateVector, basis: MeasurementBasis) -> np.ndarray:
    """Dense outcome probabilities after the basis change (state is left untouched)."""
    if basis.qubits != state.qubits:
        raise ValueError(f"Basis acts on {basis.qubits} qubits, state has {state.qubits}")
    rotated = apply_gates(state.copy(), basis_gates(basis))
    return rotated.probabilities()


def measure_distribution(state: StateVector, basis: MeasurementBasis, shots: int | None = None,
                         seed: int = 0) -> dict[int, float]:
    """Outcome histogram {outcome int: probability}; exact when shots is None."""
    probs = basis_probabilities(state, basis)
    total = probs.sum()
    if abs(total - 1.0) > config.NORM_TOLERANCE:
        raise ArithmeticError(f"Outcome probabilities sum to {total}")
    if shots is None:
        outcomes = np.flatnonzero(probs > 0.0)
        return {int(d): float(probs[d]) for d in outcomes}
    if shots <= 0:
        raise ValueError(f"shots must be positive, got {shots}")
    rng = np.random.default_rng(seed)
    counts = rng.multinomial(shots, probs / total)
    return {int(d): int(counts[d]) / shots for d in np.flatnonzero(counts)}


def histogram_to_json(histogram: dict[int, float], qubits: int) -> dict[str, float]:
    return {format(d, f"0{qubits}b"): p for d, p in sorted(histogram.items())}


if __name__ == '__main__':
    from operator_encoding import build_basis

    psi = StateVector(2, np.array([0, 0.6, 0.8, 0], dtype=complex))
    print(histogram_to_json(measure_distribution(psi, build_basis([1, 1])), 2))
    circuit = HeaCircuit(6, 5, np.zeros(hea_parameter_count(6, 5)))
    print(f"HEA Q=6 layers=5: {circuit.parameter_count} parameters, {circuit.cnot_count} CNOTs")
