"""
Encoded XP terms, measurement groups and their Clifford bases.

Qubit indices are 0-based here; qubit 0 is the leftmost bit of a label and the
most significant bit of an amplitude index. An encoded term of X-string x = G a
is measured after a star of CNOTs from the pivot (lowest set bit of x) to every
other set bit, which turns X^x into X on the pivot alone, followed by a
Hadamard (Re part) or S^dag then Hadamard (Im part) on the pivot.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum

import numpy as np

import config
from fermion_hamiltonian import HermitianPart, XPTerm
from gf2_linalg import BitMatrix, BitVector, as_bits, invert, matvec
from subspace_code import SubspaceCode
from utils import binomial, bits_to_int, bits_to_string, int_to_bits

logger = logging.getLogger(__name__)


class ScaleGuardError(RuntimeError):
    pass


class PivotRotation(Enum):
    HADAMARD = "H"      # Re part
    Y_BASIS = "SdgH"    # Im part
    NONE = "none"       # diagonal group

    @staticmethod
    def from_string(s: str) -> PivotRotation:
        for rotation in PivotRotation:
            if rotation.value.lower() == s.lower() or rotation.name.lower() == s.lower():
                return rotation
        raise ValueError(f"Unknown pivot rotation '{s}'")


# --- Encoding ---

class LabelEncoder:
    """G b on integer-encoded states, using cached column keys."""

    def __init__(self, code: SubspaceCode):
        self.code = code
        self.column_keys = [int(k) for k in code.column_keys()]

    def encode_key(self, state_key: int) -> int:
        label = 0
        modes = self.code.modes
        for j in range(modes):
            if (state_key >> (modes - 1 - j)) & 1:
                label ^= self.column_keys[j]
        return label


@dataclass(frozen=True)
class EncodedXPTerm:
    term: XPTerm
    qubits: int
    x_key: int                                   # G a
    pairs: tuple[tuple[int, int, int], ...]      # (G b, G (a xor b), s0 (-1)^(c.b)) per b in S_O

    @property
    def coefficient(self) -> float:
        return self.term.coefficient

    @property
    def part(self) -> HermitianPart:
        return self.term.part

    @property
    def x_vector(self) -> BitVector:
        return int_to_bits(self.x_key, self.qubits)


def encode_term(term: XPTerm, code: SubspaceCode, encoder: LabelEncoder | None = None) -> EncodedXPTerm:
    if term.modes != code.modes:
        raise ValueError(f"Term acts on {term.modes} modes, code encodes {code.modes}")
    encoder = encoder or LabelEncoder(code)
    x_key = encoder.encode_key(term.x_key)
    pairs = tuple(
        (encoder.encode_key(b), encoder.encode_key(b ^ term.x_key), term.sign(b))
        for b in sorted(term.support, reverse=True)
    )
    return EncodedXPTerm(term, code.qubits, x_key, pairs)


# --- Measurement bases ---

@dataclass(frozen=True)
class MeasurementBasis:
    qubits: int
    cnot_network: tuple[tuple[int, int], ...]    # (control, target), applied in order
    network_matrix: BitMatrix
    pivot: int | None
    pivot_rotation: PivotRotation

    def inverse_matrix(self) -> BitMatrix:
        return invert(self.network_matrix)

    def apply_key(self, label_key: int) -> int:
        """network_matrix . v on an integer label."""
        for control, target in self.cnot_network:
            if (label_key >> (self.qubits - 1 - control)) & 1:
                label_key ^= 1 << (self.qubits - 1 - target)
        return label_key

    def undo_key(self, label_key: int) -> int:
        """Inverse of apply_key (the star network is its own inverse up to order)."""
        for control, target in reversed(self.cnot_network):
            if (label_key >> (self.qubits - 1 - control)) & 1:
                label_key ^= 1 << (self.qubits - 1 - target)
        return label_key

    def to_dict(self) -> dict:
        return {
            "cnots": [list(c) for c in self.cnot_network],
            "pivot": self.pivot,
            "rotation": self.pivot_rotation.value,
        }


def cnot_matrix(qubits: int, control: int, target: int) -> BitMatrix:
    """x_target <- x_target xor x_control."""
    data = np.eye(qubits, dtype=np.uint8)
    data[target, control] = 1
    return BitMatrix(data)


def build_basis(x_key, part: HermitianPart = HermitianPart.RE) -> MeasurementBasis:
    x = as_bits(x_key)
    qubits = x.shape[0]
    set_bits = [int(i) for i in np.flatnonzero(x)]
    if not set_bits:
        return MeasurementBasis(qubits, (), BitMatrix.identity(qubits), None, PivotRotation.NONE)
    pivot = set_bits[0]
    network = tuple((pivot, t) for t in set_bits[1:])
    matrix = np.eye(qubits, dtype=np.int64)
    for control, target in network:
        matrix = (cnot_matrix(qubits, control, target).data.astype(np.int64) @ matrix) % 2
    rotation = PivotRotation.HADAMARD if part is HermitianPart.RE else PivotRotation.Y_BASIS
    return MeasurementBasis(qubits, network, BitMatrix(matrix), pivot, rotation)


@dataclass(frozen=True)
class MeasurementGroup:
    x_key: int
    part: HermitianPart
    terms: tuple[EncodedXPTerm, ...]
    basis: MeasurementBasis

    @property
    def qubits(self) -> int:
        return self.basis.qubits

    @property
    def x_vector(self) -> BitVector:
        return int_to_bits(self.x_key, self.qubits)

    def coefficient_norm(self) -> float:
        return sum(abs(t.coefficient) for t in self.terms)

    def to_dict(self) -> dict:
        return {
            "x_key": bits_to_string(self.x_vector),
            "part": self.part.value,
            "term_count": len(self.terms),
            **self.basis.to_dict(),
        }


def group_terms(terms: list[EncodedXPTerm]) -> list[MeasurementGroup]:
    """One group per distinct encoded X-string (and Hermitian part), ordered by X-string."""
    buckets: dict[tuple[int, str], list[EncodedXPTerm]] = {}
    for term in terms:
        buckets.setdefault((term.x_key, term.part.value), []).append(term)
    groups = []
    for (x_key, part_value), members in sorted(buckets.items()):
        qubits = members[0].qubits
        part = HermitianPart(part_value)
        groups.append(MeasurementGroup(x_key, part, tuple(members), build_basis(int_to_bits(x_key, qubits), part)))
    logger.info("%d terms grouped into %d measurement bases", len(terms), len(groups))
    return groups


def encode_hamiltonian(terms: list[XPTerm], code: SubspaceCode) -> list[MeasurementGroup]:
    encoder = LabelEncoder(code)
    return group_terms([encode_term(t, code, encoder) for t in terms])


def measurement_bound(modes: int) -> int:
    """Distinct X-strings of a number-conserving two-body Hamiltonian: C(M,0) + C(M,2) + C(M,4)."""
    return 1 + binomial(modes, 2) + binomial(modes, 4)


def distinct_x_count(terms: list[XPTerm]) -> int:
    return len({t.x_key for t in terms})


def group_report(groups: list[MeasurementGroup], modes: int) -> dict:
    return {
        "group_count": len(groups),
        "bound": measurement_bound(modes),
        "groups": [g.to_dict() for g in groups],
    }


# --- Pauli expansion (test oracle) ---

_PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def _guard(qubits: int):
    if qubits > config.MAX_PAULI_EXPAND_QUBITS:
        raise ScaleGuardError(f"Pauli expansion is limited to {config.MAX_PAULI_EXPAND_QUBITS} qubits, got {qubits}")


def pauli_label(x_key: int, z_key: int, qubits: int) -> str:
    out = []
    for q in range(qubits):
        shift = qubits - 1 - q
        xb, zb = (x_key >> shift) & 1, (z_key >> shift) & 1
        out.append("Y" if xb and zb else "X" if xb else "Z" if zb else "I")
    return "".join(out)


def pauli_expand(term: EncodedXPTerm, part: HermitianPart | None = None) -> list[tuple[str, float]]:
    """Exact Pauli decomposition of the encoded term (coefficient included)."""
    part = term.part if part is None else part
    q = term.qubits
    _guard(q)
    dim = 1 << q
    z = np.arange(dim, dtype=np.int64)
    x = term.x_key
    overlap = np.bitwise_count(z & x).astype(np.int64)
    phase = (-1j) ** (overlap % 4)            # X^x Z^z = (-i)^{|x & z|} sigma(x, z)
    total = np.zeros(dim, dtype=complex)
    for label, conjugate, sign in term.pairs:
        parity_v = 1 - 2 * (np.bitwise_count(z & label).astype(np.int64) % 2)
        if x == 0:
            total += sign * parity_v
            continue
        parity_x = 1 - 2 * (overlap % 2)
        if part is HermitianPart.RE:
            total += sign * parity_v * (1 + parity_x) / 2
        else:
            total += sign * parity_v * (1 - parity_x) / (2j)
    coefficients = term.coefficient * total * phase / dim
    if np.max(np.abs(coefficients.imag), initial=0.0) > 1e-10:
        raise ArithmeticError("Pauli expansion produced non-real coefficients")
    return [(pauli_label(x, int(zk), q), float(c.real)) for zk, c in enumerate(coefficients) if abs(c) > 1e-14]


def pauli_matrix(label: str) -> np.ndarray:
    out = np.array([[1.0 + 0j]])
    for ch in label:
        out = np.kron(out, _PAULI[ch])
    return out


def pauli_sum_matrix(expansion: list[tuple[str, float]], qubits: int) -> np.ndarray:
    _guard(qubits)
    total = np.zeros((1 << qubits, 1 << qubits), dtype=complex)
    for label, coefficient in expansion:
        total += coefficient * pauli_matrix(label)
    return total


def paulis_commute(p: str, r: str) -> bool:
    anti = sum(1 for a, b in zip(p, r) if a != "I" and b != "I" and a != b)
    return anti % 2 == 0


def encoded_term_matrix(term: EncodedXPTerm, part: HermitianPart | None = None) -> np.ndarray:
    """Dense 2^Q matrix of coefficient * Re/Im(E(O)) built from projector pairs."""
    part = term.part if part is None else part
    _guard(term.qubits)
    dim = 1 << term.qubits
    matrix = np.zeros((dim, dim), dtype=complex)
    for label, conjugate, sign in term.pairs:
        if term.x_key == 0:
            matrix[label, label] += sign
        elif part is HermitianPart.RE:
            matrix[conjugate, label] += sign / 2
            matrix[label, conjugate] += sign / 2
        else:
            matrix[conjugate, label] += sign / 2j
            matrix[label, conjugate] -= sign / 2j
    return term.coefficient * matrix


def network_permutation(basis: MeasurementBasis) -> np.ndarray:
    """Permutation matrix U with U|v> = |A v> for the basis network."""
    dim = 1 << basis.qubits
    perm = np.zeros((dim, dim))
    for v in range(dim):
        perm[basis.apply_key(v), v] = 1
    return perm


if __name__ == '__main__':
    basis = build_basis([1, 1, 0])
    print(basis.to_dict(), basis.network_matrix.to_strings())
    print(f"A . x = {bits_to_string(matvec(basis.network_matrix, [1, 1, 0]))}")
    print(f"label 011 -> {bits_to_int([0, 1, 1])} -> {basis.apply_key(bits_to_int([0, 1, 1])):03b}")
