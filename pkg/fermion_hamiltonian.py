"""
Second-quantized Hamiltonians on M spin-orbitals.

Fock states are bit vectors with mode 1 at index 0; internally they are also
handled as integers with mode 1 as the most significant bit. Ladder operators
carry the Jordan-Wigner sign (-1)^(number of occupied modes with a smaller
index). Every particle-conserving ladder product O acts on a weight-N state b
as O|b> = s0 (-1)^(c.b) |a xor b> on its support S_O and annihilates the rest;
decompose_term finds (a, c, s0, S_O).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations
from typing import NamedTuple

import numpy as np
import scipy.linalg

import config
from gf2_linalg import BitMatrix, BitVector, as_bits, solve_affine
from utils import binomial, bits_to_string, int_to_bits

logger = logging.getLogger(__name__)

FockState = BitVector


class ModeIndexError(ValueError):
    pass


class HamiltonianFormatError(ValueError):
    pass


class NonAffineSignError(ValueError):
    pass


class BasisTooLargeError(RuntimeError):
    pass


class LadderOp(NamedTuple):
    mode: int       # 1-based
    create: bool

    def __str__(self):
        return f"a{'+' if self.create else ''}{self.mode}"


def creation(mode: int) -> LadderOp:
    return LadderOp(mode, True)


def annihilation(mode: int) -> LadderOp:
    return LadderOp(mode, False)


class HermitianPart(Enum):
    RE = "Re"
    IM = "Im"

    @staticmethod
    def from_string(s: str) -> HermitianPart:
        try:
            return HermitianPart(s.capitalize())
        except ValueError:
            raise ValueError(f"Unknown Hermitian part '{s}', expected Re or Im") from None


# --- Ladder algebra ---

def popcount(value: int) -> int:
    return int(value).bit_count()


def apply_ladder_key(ops, key: int, modes: int) -> tuple[int, int] | None:
    """Apply ops right-to-left to the integer-encoded state; None when the result vanishes."""
    sign = 1
    for op in reversed(ops):
        mode = op.mode
        if not 1 <= mode <= modes:
            raise ModeIndexError(f"Mode {mode} outside 1..{modes}")
        shift = modes - mode
        occupied = (key >> shift) & 1
        if occupied == op.create:
            return None
        if popcount(key >> (shift + 1)) % 2:
            sign = -sign
        key ^= 1 << shift
    return sign, key


def state_to_key(state) -> int:
    value = 0
    for bit in as_bits(state):
        value = (value << 1) | int(bit)
    return value


def apply_ladder(ops, state) -> tuple[int, FockState] | None:
    """Apply an ordered ladder product to a Fock state: (sign, new state), or None for zero."""
    state = as_bits(state)
    result = apply_ladder_key(ops, state_to_key(state), state.shape[0])
    if result is None:
        return None
    sign, key = result
    return sign, int_to_bits(key, state.shape[0])


def normal_order(creators, annihilators) -> tuple[int, tuple[int, ...], tuple[int, ...]] | None:
    """Sort creators and annihilators ascending, tracking the permutation sign; None if a mode repeats."""
    sign = 1
    out = []
    for modes in (list(creators), list(annihilators)):
        if len(set(modes)) != len(modes):
            return None
        # Bubble sort parity: one sign flip per transposition.
        for i in range(len(modes)):
            for j in range(len(modes) - 1 - i):
                if modes[j] > modes[j + 1]:
                    modes[j], modes[j + 1] = modes[j + 1], modes[j]
                    sign = -sign
        out.append(tuple(modes))
    return sign, out[0], out[1]


def ladder_product(creators, annihilators) -> tuple[LadderOp, ...]:
    return tuple(creation(i) for i in creators) + tuple(annihilation(j) for j in annihilators)


# --- XP terms ---

@dataclass(frozen=True)
class XPTerm:
    """coefficient * Re(O) (or Im(O)) for a ladder product O in XP form.

    Re(O) = (O + O^dag)/2 when a != 0 and O itself when a = 0, so a Hermitian
    pair h O + h O^dag is one term of coefficient 2h.
    """
    modes: int
    coefficient: float
    x_key: int                 # a, mode 1 most significant
    c_key: int                 # c
    global_sign: int           # s0
    support: frozenset[int]    # S_O as state integers
    part: HermitianPart = HermitianPart.RE
    ops: tuple[LadderOp, ...] = field(default=(), compare=False)

    @property
    def x_vector(self) -> BitVector:
        return int_to_bits(self.x_key, self.modes)

    @property
    def sign_vector(self) -> BitVector:
        return int_to_bits(self.c_key, self.modes)

    @property
    def is_diagonal(self) -> bool:
        return self.x_key == 0

    def sign(self, state_key: int) -> int:
        """s0 (-1)^(c.b)."""
        return -self.global_sign if popcount(self.c_key & state_key) % 2 else self.global_sign

    def support_states(self) -> list[BitVector]:
        return [int_to_bits(k, self.modes) for k in sorted(self.support, reverse=True)]

    def with_coefficient(self, coefficient: float) -> XPTerm:
        return XPTerm(self.modes, coefficient, self.x_key, self.c_key, self.global_sign, self.support, self.part, self.ops)

    def with_global_sign(self, global_sign: int) -> XPTerm:
        return XPTerm(self.modes, self.coefficient, self.x_key, self.c_key, global_sign, self.support, self.part, self.ops)

    def describe(self) -> str:
        ops = " ".join(str(op) for op in self.ops) or "?"
        return (f"{self.part.value}[{ops}] coef={self.coefficient:+.10g} a={bits_to_string(self.x_vector)} "
                f"c={bits_to_string(self.sign_vector)} s0={self.global_sign:+d} |S|={len(self.support)}")


def fixed_weight_keys(modes: int, electrons: int) -> list[int]:
    """State integers of all weight-N occupations, in itertools.combinations order."""
    return [sum(1 << (modes - 1 - j) for j in occ) for occ in combinations(range(modes), electrons)]


def decompose_term(ops, modes: int, electrons: int, coefficient: float = 1.0,
                   part: HermitianPart = HermitianPart.RE) -> XPTerm:
    """XP form of a particle-conserving ladder product on the weight-N sector."""
    ops = tuple(ops)
    creators = sum(op.create for op in ops)
    if 2 * creators != len(ops):
        raise ValueError(f"Ladder product {' '.join(map(str, ops))} does not conserve particle number")
    for op in ops:
        if not 1 <= op.mode <= modes:
            raise ModeIndexError(f"Mode {op.mode} outside 1..{modes}")

    x_key = 0
    for op in ops:
        x_key ^= 1 << (modes - op.mode)

    support, signs = [], []
    for key in fixed_weight_keys(modes, electrons):
        result = apply_ladder_key(ops, key, modes)
        if result is None:
            continue
        sign, image = result
        if image != key ^ x_key:
            raise NonAffineSignError(f"{' '.join(map(str, ops))} maps {key:0{modes}b} outside its X-string")
        support.append(key)
        signs.append(0 if sign > 0 else 1)

    c_key, global_sign = 0, 1
    if support:
        # Fit c.b + s = signbit(b) over GF(2), unknowns (c, s).
        rows = np.array([np.append(int_to_bits(k, modes), 1) for k in support], dtype=np.uint8)
        solution = solve_affine(BitMatrix(rows), signs)
        if solution is None:
            raise NonAffineSignError(f"Sign map of {' '.join(map(str, ops))} is not affine-linear in b")
        c_key = state_to_key(solution[:modes])
        global_sign = -1 if solution[modes] else 1

    term = XPTerm(modes, coefficient, x_key, c_key, global_sign, frozenset(support), part, ops)
    for key, bit in zip(support, signs):
        if term.sign(key) != (1 - 2 * bit):
            raise NonAffineSignError(f"Fitted sign disagrees on {key:0{modes}b} for {' '.join(map(str, ops))}")
    return term


# --- Hamiltonians ---

@dataclass
class FermionHamiltonian:
    modes: int
    electrons: int
    core_energy: float = 0.0
    one_body: dict[tuple[int, int], float] = field(default_factory=dict)
    two_body: dict[tuple[int, int, int, int], float] = field(default_factory=dict)

    @property
    def M(self) -> int:
        return self.modes

    def validate(self):
        for key in list(self.one_body) + list(self.two_body):
            for idx in key:
                if not 1 <= idx <= self.modes:
                    raise ModeIndexError(f"Index {idx} in {key} outside 1..{self.modes}")
        for (i, j), v in self.one_body.items():
            partner = self.one_body.get((j, i))
            if partner is None or abs(partner - v) > config.HERMITIAN_TOLERANCE:
                raise HamiltonianFormatError(f"h[{i},{j}] = {v} but h[{j},{i}] = {partner}")
        for (i, j, k, l), v in self.two_body.items():
            partner = self.two_body.get((l, k, j, i))
            if partner is None or abs(partner - v) > config.HERMITIAN_TOLERANCE:
                raise HamiltonianFormatError(f"g[{i},{j},{k},{l}] = {v} but g[{l},{k},{j},{i}] = {partner}")

    def raw_terms(self):
        """(coefficient, ladder product) for every stored entry."""
        for (i, j), v in sorted(self.one_body.items()):
            yield v, (creation(i), annihilation(j))
        for (i, j, k, l), v in sorted(self.two_body.items()):
            yield v, (creation(i), creation(j), annihilation(k), annihilation(l))

    def permuted(self, permutation) -> FermionHamiltonian:
        """Relabel mode i as permutation[i-1] (1-based) in every coefficient."""
        p = {i + 1: int(permutation[i]) for i in range(self.modes)}
        return FermionHamiltonian(
            self.modes, self.electrons, self.core_energy,
            {(p[i], p[j]): v for (i, j), v in self.one_body.items()},
            {(p[i], p[j], p[k], p[l]): v for (i, j, k, l), v in self.two_body.items()},
        )


def _complete(raw: dict, partner_of, label: str, path: str):
    completed = dict(raw)
    for key, value in raw.items():
        partner = partner_of(key)
        if partner in raw:
            if abs(raw[partner] - value) > config.HERMITIAN_TOLERANCE:
                raise HamiltonianFormatError(f"{path}: non-Hermitian {label}{key} = {value} vs {label}{partner} = {raw[partner]}")
        else:
            completed[partner] = value
    return completed


def parse_hamiltonian_file(path: str) -> FermionHamiltonian:
    """Read the native format: MODES / ELECTRONS / ECORE header, then 1B and 2B lines."""
    header: dict[str, str] = {}
    one_raw: dict[tuple[int, int], float] = {}
    two_raw: dict[tuple[int, int, int, int], float] = {}
    expected = ["MODES", "ELECTRONS", "ECORE"]
    with open(path, 'r', encoding='utf-8') as f:
        for lineno, line in enumerate(f, start=1):
            content = line.split("#", 1)[0].strip()
            if not content:
                continue
            fields = content.split()
            try:
                if len(header) < 3:
                    if fields[0] != expected[len(header)] or len(fields) != 2:
                        raise HamiltonianFormatError(f"expected '{expected[len(header)]} <value>'")
                    header[fields[0]] = fields[1]
                    continue
                modes = int(header["MODES"])
                if fields[0] == "1B" and len(fields) == 4:
                    key, value = (int(fields[1]), int(fields[2])), float(fields[3])
                    target = one_raw
                elif fields[0] == "2B" and len(fields) == 6:
                    key, value = tuple(int(x) for x in fields[1:5]), float(fields[5])
                    target = two_raw
                else:
                    raise HamiltonianFormatError(f"unrecognised line '{content}'")
                if any(not 1 <= idx <= modes for idx in key):
                    raise HamiltonianFormatError(f"index outside 1..{modes} in '{content}'")
                target[key] = target.get(key, 0.0) + value
            except (ValueError, IndexError) as e:
                raise HamiltonianFormatError(f"{path}:{lineno}: {e}") from None
    if len(header) < 3:
        raise HamiltonianFormatError(f"{path}: missing header, need MODES, ELECTRONS and ECORE")
    h = FermionHamiltonian(
        modes=int(header["MODES"]),
        electrons=int(header["ELECTRONS"]),
        core_energy=float(header["ECORE"]),
        one_body=_complete(one_raw, lambda k: (k[1], k[0]), "h", path),
        two_body=_complete(two_raw, lambda k: (k[3], k[2], k[1], k[0]), "g", path),
    )
    logger.info("Parsed %s: M=%d N=%d, %d one-body and %d two-body entries",
                path, h.modes, h.electrons, len(h.one_body), len(h.two_body))
    return h


def write_hamiltonian_file(h: FermionHamiltonian, path: str, comment: str | None = None):
    """Write one entry of each Hermitian pair; parse_hamiltonian_file restores the rest."""
    with open(path, 'w', encoding='utf-8') as f:
        if comment:
            for line in comment.splitlines():
                f.write(f"# {line}\n")
        f.write(f"MODES {h.modes}\nELECTRONS {h.electrons}\nECORE {h.core_energy!r}\n")
        for (i, j), v in sorted(h.one_body.items()):
            if (i, j) <= (j, i):
                f.write(f"1B {i} {j} {v!r}\n")
        for (i, j, k, l), v in sorted(h.two_body.items()):
            if (i, j, k, l) <= (l, k, j, i):
                f.write(f"2B {i} {j} {k} {l} {v!r}\n")


def load_hamiltonian(path: str) -> FermionHamiltonian:
    """Native file or chemist-notation FCIDUMP, chosen by sniffing the first content line."""
    with open(path, 'r', encoding='utf-8') as f:
        for line in f:
            content = line.split("#", 1)[0].strip()
            if content:
                break
        else:
            content = ""
    if content.upper().startswith("&FCI"):
        from fcidump import read_fcidump
        return read_fcidump(path)
    return parse_hamiltonian_file(path)


def canonical_terms(h: FermionHamiltonian) -> dict[tuple[tuple[int, ...], tuple[int, ...]], list[float]]:
    """Normal-ordered products keyed by min((C, A), (A, C)), with [coef of key, coef of adjoint]."""
    merged: dict = {}
    for value, ops in h.raw_terms():
        creators = [op.mode for op in ops if op.create]
        annihilators = [op.mode for op in ops if not op.create]
        ordered = normal_order(creators, annihilators)
        if ordered is None:
            continue
        sign, c, a = ordered
        key = min((c, a), (a, c))
        slot = 0 if key == (c, a) else 1
        merged.setdefault(key, [0.0, 0.0])[slot] += sign * value
    return merged


def hamiltonian_terms(h: FermionHamiltonian, electrons: int | None = None,
                      part: HermitianPart = HermitianPart.RE) -> list[XPTerm]:
    """XP terms of H on the weight-N sector.

    RE merges each Hermitian pair h O + h* O^dag into (h + h*) Re(O). IM gives h Im(O) for every
    off-diagonal product O in its canonical orientation (the current-like partner of a hopping);
    diagonal products have no Im part.
    """
    electrons = h.electrons if electrons is None else electrons
    terms = []
    for (c, a), (forward, adjoint) in sorted(canonical_terms(h).items()):
        if part is HermitianPart.IM:
            if c == a:
                continue
            coefficient = forward
        else:
            coefficient = forward if c == a else forward + adjoint
        if abs(coefficient) < config.TERM_DROP_TOLERANCE:
            continue
        term = decompose_term(ladder_product(c, a), h.modes, electrons, coefficient=coefficient, part=part)
        if term.support:
            terms.append(term)
    logger.info("Hamiltonian M=%d N=%d: %d %s XP terms", h.modes, electrons, len(terms), part.value)
    return terms


# --- Dense oracle ---

def _check_basis(modes: int, electrons: int):
    size = binomial(modes, electrons)
    if size > config.MAX_DENSE_BASIS:
        raise BasisTooLargeError(f"C({modes},{electrons}) = {size} exceeds the dense basis cap {config.MAX_DENSE_BASIS}")


def dense_hamiltonian(h: FermionHamiltonian, electrons: int | None = None) -> tuple[list[int], np.ndarray]:
    """Matrix of H on the weight-N Fock basis built directly with apply_ladder (no core energy)."""
    electrons = h.electrons if electrons is None else electrons
    _check_basis(h.modes, electrons)
    basis = fixed_weight_keys(h.modes, electrons)
    index = {k: n for n, k in enumerate(basis)}
    matrix = np.zeros((len(basis), len(basis)))
    for value, ops in h.raw_terms():
        for col, key in enumerate(basis):
            result = apply_ladder_key(ops, key, h.modes)
            if result is not None:
                sign, image = result
                matrix[index[image], col] += sign * value
    return basis, matrix


def terms_matrix(terms: list[XPTerm], basis: list[int]) -> np.ndarray:
    """Matrix of sum_t coef_t Re(O_t) rebuilt from XP data alone."""
    index = {k: n for n, k in enumerate(basis)}
    matrix = np.zeros((len(basis), len(basis)))
    for term in terms:
        for b in term.support:
            s = term.sign(b) * term.coefficient
            if term.is_diagonal:
                matrix[index[b], index[b]] += s
            else:
                partner = b ^ term.x_key
                matrix[index[partner], index[b]] += s / 2
                matrix[index[b], index[partner]] += s / 2
    return matrix


def exact_ground_energy(h: FermionHamiltonian, electrons: int | None = None) -> float:
    _, matrix = dense_hamiltonian(h, electrons)
    if matrix.size == 0:
        return h.core_energy
    eigenvalues = scipy.linalg.eigh(matrix, eigvals_only=True)
    return float(eigenvalues[0]) + h.core_energy


def hartree_fock_occupation(h: FermionHamiltonian, electrons: int | None = None) -> FockState:
    """Weight-N determinant of lowest diagonal energy; ties go to the lexicographically first."""
    electrons = h.electrons if electrons is None else electrons
    diagonal = [t for t in hamiltonian_terms(h, electrons) if t.is_diagonal]
    best_key, best_energy = None, math.inf
    for key in fixed_weight_keys(h.modes, electrons):
        energy = sum(t.coefficient * t.sign(key) for t in diagonal if key in t.support)
        if energy < best_energy - 1e-12:
            best_key, best_energy = key, energy
    return int_to_bits(best_key, h.modes)


if __name__ == '__main__':
    print(apply_ladder([creation(2)], [1, 0]))
    term = decompose_term([creation(1), creation(2), annihilation(3), annihilation(4)], 4, 2)
    print(term.describe())
    hop = FermionHamiltonian(2, 1, 0.0, {(1, 2): 1.0, (2, 1): 1.0})
    print([t.describe() for t in hamiltonian_terms(hop)])
    print(f"Ground energy: {exact_ground_energy(hop)}")
