"""
Random-instance check of the decoding pipeline against a dense Fock-space oracle.

Each trial draws a code, a Hermitian particle-conserving Hamiltonian and a
state on the encoded physical subspace, then compares the FED energy with
psi^dag H psi evaluated directly on the weight-N basis.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

import config
from fed_decoder import EnergyEvaluator, decoded_amplitudes, physical_state
from fermion_hamiltonian import FermionHamiltonian, dense_hamiltonian, hamiltonian_terms
from operator_encoding import encode_hamiltonian
from subspace_code import SubspaceCode, build_lookup, minimal_search_start, rle_search

logger = logging.getLogger(__name__)

ORACLE_TOLERANCE = 1e-9


@dataclass
class TrialResult:
    trial: int
    qubits: int
    fed_energy: float
    oracle_energy: float
    post_selected_mass: float
    passed: bool

    def to_dict(self) -> dict:
        return {
            "trial": self.trial,
            "qubits": self.qubits,
            "fed_energy": self.fed_energy,
            "oracle_energy": self.oracle_energy,
            "post_selected_mass": self.post_selected_mass,
            "passed": self.passed,
        }


@dataclass
class SelftestReport:
    modes: int
    electrons: int
    seed: int
    results: list[TrialResult] = field(default_factory=list)

    @property
    def trials(self) -> int:
        return len(self.results)

    @property
    def passed(self) -> int:
        return sum(r.passed for r in self.results)

    @property
    def ok(self) -> bool:
        return self.passed == self.trials

    def to_dict(self) -> dict:
        return {
            "modes": self.modes,
            "electrons": self.electrons,
            "seed": self.seed,
            "trials": self.trials,
            "passed": self.passed,
            "ok": self.ok,
            "results": [r.to_dict() for r in self.results],
        }


def random_code(rng: np.random.Generator, modes: int, electrons: int) -> SubspaceCode:
    """An RLE code at a random admissible Q, or the identity code when none is found."""
    start = minimal_search_start(modes, electrons)
    if start < modes and rng.random() < 0.8:
        qubits = int(rng.integers(start, modes))
        code = rle_search(modes, electrons, qubits, seed=int(rng.integers(1 << 31)), max_attempts=200)
        if code is not None:
            return code
    return SubspaceCode.identity(modes, electrons)


def random_hamiltonian(rng: np.random.Generator, modes: int, electrons: int,
                       density: float = 0.6) -> FermionHamiltonian:
    """Real Hermitian one- and two-body coefficients on a random sparsity pattern."""
    one_body, two_body = {}, {}
    for i in range(1, modes + 1):
        for j in range(i, modes + 1):
            if i == j or rng.random() < density:
                v = float(rng.normal())
                one_body[(i, j)] = one_body[(j, i)] = v
    for i in range(1, modes + 1):
        for j in range(1, modes + 1):
            for k in range(1, modes + 1):
                for l in range(1, modes + 1):
                    if i == j or k == l or (l, k, j, i) in two_body or rng.random() >= density / 4:
                        continue
                    v = float(rng.normal()) / 2
                    two_body[(i, j, k, l)] = two_body[(l, k, j, i)] = v
    h = FermionHamiltonian(modes, electrons, float(rng.normal()), one_body, two_body)
    h.validate()
    return h


def random_physical_amplitudes(rng: np.random.Generator, basis: list[int]) -> dict[int, complex]:
    amps = rng.normal(size=len(basis)) + 1j * rng.normal(size=len(basis))
    amps /= np.linalg.norm(amps)
    return {key: complex(a) for key, a in zip(basis, amps)}


def flip_largest_term(terms):
    """Negate s0 of the term with the largest |coefficient|."""
    idx = max(range(len(terms)), key=lambda n: abs(terms[n].coefficient))
    flipped = list(terms)
    flipped[idx] = terms[idx].with_global_sign(-terms[idx].global_sign)
    return flipped


def run_trial(rng: np.random.Generator, trial: int, modes: int, electrons: int,
              inject_sign_flip: bool = False) -> TrialResult:
    code = random_code(rng, modes, electrons)
    h = random_hamiltonian(rng, modes, electrons)
    terms = hamiltonian_terms(h)
    if inject_sign_flip and terms:
        terms = flip_largest_term(terms)
    decoder = build_lookup(code)
    evaluator = EnergyEvaluator(encode_hamiltonian(terms, code), code, decoder, h.core_energy)

    basis, matrix = dense_hamiltonian(h)
    state = physical_state(code, random_physical_amplitudes(rng, basis))
    fermionic = decoded_amplitudes(state, decoder)
    psi = np.array([fermionic.get(key, 0.0) for key in basis], dtype=complex)
    oracle = float(np.real(np.vdot(psi, matrix @ psi))) + h.core_energy

    fed = evaluator.evaluate(state)
    mass = evaluator.post_selected_mass(state)
    passed = abs(fed - oracle) <= ORACLE_TOLERANCE and abs(mass - 1.0) <= config.NORM_TOLERANCE
    log = logger.debug if passed else logger.warning
    log("trial %d (Q=%d): FED %.12f oracle %.12f mass %.12f", trial, code.qubits, fed, oracle, mass)
    return TrialResult(trial, code.qubits, fed, oracle, mass, passed)


def run_selftest(modes: int, electrons: int, trials: int, seed: int = 0,
                 inject_sign_flip: bool = False) -> SelftestReport:
    if not 1 <= electrons < modes:
        raise ValueError(f"selftest needs 1 <= N < M, got M={modes}, N={electrons}")
    if modes > config.MAX_SIMULATOR_QUBITS:
        raise ValueError(f"selftest is limited to M <= {config.MAX_SIMULATOR_QUBITS}")
    rng = np.random.default_rng(seed)
    report = SelftestReport(modes, electrons, seed)
    for trial in range(trials):
        report.results.append(run_trial(rng, trial, modes, electrons, inject_sign_flip))
    logger.info("selftest M=%d N=%d: %d/%d passed", modes, electrons, report.passed, report.trials)
    return report


if __name__ == '__main__':
    logging.basicConfig(level=logging.INFO)
    print(run_selftest(4, 2, 5).to_dict()["passed"])
