"""
Variational ground-state search on the encoded register.

The ansatz is a hardware-efficient circuit applied to the encoded Hartree-Fock
reference; every energy is obtained by FED decoding of the measurement groups.
Restarts draw their initial parameters from independent seeded streams and are
merged by (energy, restart index), so results do not depend on thread count.
"""

from __future__ import annotations

import logging
import math
from abc import ABC, abstractmethod
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.optimize import minimize

import config
from data_manager import save_csv
from fed_decoder import EnergyEvaluator, PhysicalMassError
from fermion_hamiltonian import (FermionHamiltonian, exact_ground_energy, hamiltonian_terms,
                                 hartree_fock_occupation, load_hamiltonian)
from operator_encoding import encode_hamiltonian
from statevector_sim import HeaCircuit, hea_cnot_count, hea_parameter_count, prepare_encoded_reference, run_hea
from subspace_code import RleSettings, SubspaceCode, build_lookup
from utils import bits_to_string

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class VqeConfig:
    layers: int = config.VQE_DEFAULT_LAYERS
    restarts: int = config.VQE_DEFAULT_RESTARTS
    seed: int = config.VQE_DEFAULT_SEED
    shots: int | None = None                   # None = exact probabilities
    init_scale: float = config.VQE_DEFAULT_INIT_SCALE
    max_iterations: int = config.VQE_DEFAULT_MAX_ITERATIONS
    gradient_step: float = config.VQE_DEFAULT_GRADIENT_STEP
    convergence_tol: float = config.VQE_DEFAULT_CONVERGENCE_TOL
    threads: int = 1

    def __post_init__(self):
        if self.layers < 0:
            raise ValueError(f"layers must be >= 0, got {self.layers}")
        if self.restarts < 1:
            raise ValueError(f"restarts must be >= 1, got {self.restarts}")
        if self.init_scale < 0:
            raise ValueError(f"init_scale must be >= 0, got {self.init_scale}")
        if self.convergence_tol <= 0:
            raise ValueError(f"convergence_tol must be > 0, got {self.convergence_tol}")
        if self.gradient_step <= 0:
            raise ValueError(f"gradient_step must be > 0, got {self.gradient_step}")
        if self.shots is not None and self.shots <= 0:
            raise ValueError(f"shots must be positive, got {self.shots}")


@dataclass
class RestartOutcome:
    index: int
    energy: float
    parameters: np.ndarray
    trace: list[float]
    iterations: int
    error: str | None = None

    @property
    def failed(self) -> bool:
        return self.error is not None


@dataclass
class VqeResult:
    best_energy: float
    exact_energy: float
    delta_e_kcal: float
    best_parameters: np.ndarray
    energy_trace: list[float]
    cnot_count: int
    parameter_count: int
    qubits: int
    best_restart: int
    restart_energies: list[float | None] = field(default_factory=list)
    failed_restarts: dict[int, str] = field(default_factory=dict)
    settings: VqeConfig = field(default_factory=VqeConfig)

    @property
    def chemically_accurate(self) -> bool:
        return abs(self.delta_e_kcal) < config.CHEMICAL_ACCURACY_KCAL

    def to_dict(self) -> dict:
        return {
            "best_energy": self.best_energy,
            "exact_energy": self.exact_energy,
            "delta_e_kcal": self.delta_e_kcal,
            "best_parameters": [float(x) for x in self.best_parameters],
            "energy_trace": self.energy_trace,
            "cnot_count": self.cnot_count,
            "parameter_count": self.parameter_count,
            "qubits": self.qubits,
            "best_restart": self.best_restart,
            "restart_energies": self.restart_energies,
            "failed_restarts": {str(k): v for k, v in self.failed_restarts.items()},
            "config": asdict(self.settings),
        }


class _NonFiniteEnergy(ArithmeticError):
    pass


def hartree_to_kcal(delta: float) -> float:
    return delta * config.HARTREE_TO_KCAL_PER_MOL


def _check_code(h: FermionHamiltonian, code: SubspaceCode):
    if code.modes != h.modes or code.electrons != h.electrons:
        raise ValueError(f"Code encodes M={code.modes}, N={code.electrons}; Hamiltonian has "
                         f"M={h.modes}, N={h.electrons}")


class VqeProblem:
    """Everything a restart needs, built once per (Hamiltonian, code)."""

    def __init__(self, h: FermionHamiltonian, code: SubspaceCode, cfg: VqeConfig):
        _check_code(h, code)
        self.h = h
        self.code = code
        self.cfg = cfg
        groups = encode_hamiltonian(hamiltonian_terms(h), code)
        self.evaluator = EnergyEvaluator(groups, code, build_lookup(code), h.core_energy)
        occupation = hartree_fock_occupation(h)
        logger.info("Hartree-Fock reference %s", bits_to_string(occupation))
        self.reference = prepare_encoded_reference(code, occupation)
        self.parameter_count = hea_parameter_count(code.qubits, cfg.layers)
        # Build the dense decode tables before any threads share the evaluator.
        self.reference_energy = self.evaluator.evaluate(self.reference)

    def energy(self, theta: np.ndarray, shot_seed: int = 0) -> float:
        state = run_hea(self.reference.copy(), HeaCircuit(self.code.qubits, self.cfg.layers, theta))
        value = self.evaluator.evaluate(state, shots=self.cfg.shots, seed=shot_seed)
        if not math.isfinite(value):
            raise _NonFiniteEnergy(f"Energy evaluated to {value}")
        return value

    def gradient(self, theta: np.ndarray, shot_seed: int = 0) -> np.ndarray:
        step = self.cfg.gradient_step
        grad = np.zeros_like(theta)
        for i in range(theta.size):
            shifted = theta.copy()
            shifted[i] += step
            forward = self.energy(shifted, shot_seed)
            shifted[i] -= 2 * step
            backward = self.energy(shifted, shot_seed)
            grad[i] = (forward - backward) / (2 * step)
        return grad

    def initial_parameters(self, restart: int) -> np.ndarray:
        rng = np.random.default_rng([self.cfg.seed, restart])
        return rng.uniform(-self.cfg.init_scale, self.cfg.init_scale, self.parameter_count)

    def run_restart(self, restart: int) -> RestartOutcome:
        cfg = self.cfg
        theta0 = self.initial_parameters(restart)
        evaluations = [0]

        def shot_seed() -> int:
            evaluations[0] += 1
            return cfg.seed * 1_000_003 + restart * 10_007 + evaluations[0]

        def objective(theta):
            return self.energy(theta, shot_seed())

        def jac(theta):
            return self.gradient(theta, shot_seed())

        try:
            initial = objective(theta0)
            trace = [initial]
            last = [initial]

            def callback(intermediate_result):
                value = float(intermediate_result.fun)
                trace.append(min(trace[-1], value))
                logger.debug("restart %d iteration %d: E = %.12f", restart, len(trace) - 1, value)
                if abs(last[0] - value) < cfg.convergence_tol:
                    raise StopIteration
                last[0] = value

            result = minimize(objective, theta0, jac=jac, method="L-BFGS-B", callback=callback,
                              options={"maxiter": cfg.max_iterations})
        except (_NonFiniteEnergy, PhysicalMassError) as e:
            logger.warning("Restart %d aborted: %s", restart, e)
            return RestartOutcome(restart, math.inf, theta0, [], 0, error=str(e))
        energy, parameters = float(result.fun), np.asarray(result.x, dtype=float)
        if initial < energy:
            energy, parameters = initial, theta0
        trace.append(min(trace[-1], energy))
        logger.info("Restart %d: E = %.10f after %d iterations", restart, energy, result.nit)
        return RestartOutcome(restart, energy, parameters, trace, int(result.nit))


def run_vqe(h: FermionHamiltonian, code: SubspaceCode, cfg: VqeConfig | None = None,
            exact_energy: float | None = None) -> VqeResult:
    cfg = cfg or VqeConfig()
    problem = VqeProblem(h, code, cfg)
    if exact_energy is None:
        exact_energy = exact_ground_energy(h)

    if cfg.threads > 1 and cfg.restarts > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as executor:
            outcomes = list(executor.map(problem.run_restart, range(cfg.restarts)))
    else:
        outcomes = [problem.run_restart(k) for k in range(cfg.restarts)]

    successful = [o for o in outcomes if not o.failed]
    if not successful:
        raise RuntimeError(f"All {cfg.restarts} VQE restarts failed")
    best = min(successful, key=lambda o: (o.energy, o.index))
    result = VqeResult(
        best_energy=best.energy,
        exact_energy=exact_energy,
        delta_e_kcal=hartree_to_kcal(best.energy - exact_energy),
        best_parameters=best.parameters,
        energy_trace=best.trace,
        cnot_count=hea_cnot_count(code.qubits, cfg.layers),
        parameter_count=problem.parameter_count,
        qubits=code.qubits,
        best_restart=best.index,
        restart_energies=[None if o.failed else o.energy for o in outcomes],
        failed_restarts={o.index: o.error for o in outcomes if o.failed},
        settings=cfg,
    )
    logger.info("VQE Q=%d layers=%d: E = %.10f, exact %.10f, dE = %.4f kcal/mol",
                code.qubits, cfg.layers, result.best_energy, exact_energy, result.delta_e_kcal)
    return result


# --- Code policies ---

class CodePolicy(ABC):
    """Chooses the encoder used for a Hamiltonian."""
    name = "policy"

    @abstractmethod
    def code_for(self, modes: int, electrons: int) -> SubspaceCode:
        pass


class FixedCodePolicy(CodePolicy):
    name = "fixed"

    def __init__(self, path: str | None = None, code: SubspaceCode | None = None):
        if code is None:
            if path is None:
                raise ValueError("FixedCodePolicy needs a code or an artifact path")
            code = SubspaceCode.load(path)
        self.code = code

    def code_for(self, modes: int, electrons: int) -> SubspaceCode:
        if (self.code.modes, self.code.electrons) != (modes, electrons):
            raise ValueError(f"Fixed code encodes M={self.code.modes}, N={self.code.electrons}, "
                             f"asked for M={modes}, N={electrons}")
        return self.code


class RleMinimalPolicy(CodePolicy):
    name = "rle"

    def __init__(self, settings: RleSettings | None = None, qubits: int | None = None):
        self.settings = settings or RleSettings()
        self.qubits = qubits

    def code_for(self, modes: int, electrons: int) -> SubspaceCode:
        code = self.settings.search(modes, electrons, self.qubits)
        if code is None:
            raise RuntimeError(f"RLE found no code for M={modes}, N={electrons}"
                               f"{'' if self.qubits is None else f', Q={self.qubits}'}")
        return code


class IdentityCodePolicy(CodePolicy):
    name = "identity"

    def code_for(self, modes: int, electrons: int) -> SubspaceCode:
        return SubspaceCode.identity(modes, electrons)


def create_code_policy(policy_name: str, **kwargs) -> CodePolicy:
    """Factory for code policies from their command-line names."""
    policy_map = {
        "fixed": FixedCodePolicy,
        "file": FixedCodePolicy,  # Alias
        "rle": RleMinimalPolicy,
        "minimal": RleMinimalPolicy,  # Alias
        "identity": IdentityCodePolicy,
        "jw": IdentityCodePolicy,  # Alias
    }
    policy_class = policy_map.get(policy_name.lower())
    if policy_class is None:
        raise ValueError(f"Unknown code policy '{policy_name}', expected one of {sorted(policy_map)}")
    return policy_class(**kwargs)


# --- Scans ---

@dataclass
class ScanPoint:
    label: str
    vqe_energy: float | None
    exact_energy: float | None
    delta_e_kcal: float | None
    result: VqeResult | None = None
    error: str | None = None

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "vqe_energy": self.vqe_energy,
            "exact_energy": self.exact_energy,
            "delta_e_kcal": self.delta_e_kcal,
            "error": self.error,
        }


def potential_energy_scan(h_files: list[str], policy: CodePolicy, cfg: VqeConfig | None = None,
                          labels: list[str] | None = None) -> list[ScanPoint]:
    """One VQE run per file, all sharing a single code chosen from the first file."""
    cfg = cfg or VqeConfig()
    if not h_files:
        return []
    labels = labels or list(h_files)
    hamiltonians = [load_hamiltonian(path) for path in h_files]
    first = hamiltonians[0]
    for path, h in zip(h_files, hamiltonians):
        if (h.modes, h.electrons) != (first.modes, first.electrons):
            raise ValueError(f"{path} has M={h.modes}, N={h.electrons}; scan started with "
                             f"M={first.modes}, N={first.electrons}")
    code = policy.code_for(first.modes, first.electrons)
    points = []
    for label, h in zip(labels, hamiltonians):
        try:
            result = run_vqe(h, code, cfg)
        except (ValueError, RuntimeError, ArithmeticError) as e:
            logger.warning("Scan point %s failed: %s", label, e)
            points.append(ScanPoint(label, None, None, None, error=str(e)))
            continue
        points.append(ScanPoint(label, result.best_energy, result.exact_energy, result.delta_e_kcal, result))
    return points


# --- Output ---

def format_table(rows: list[dict], columns: list[str]) -> str:
    """Aligned text table; floats rendered with 10 decimals."""
    def cell(value):
        if value is None:
            return "-"
        if isinstance(value, float):
            return f"{value:.10f}"
        return str(value)

    rendered = [[cell(row.get(c)) for c in columns] for row in rows]
    widths = [max([len(c)] + [len(r[i]) for r in rendered]) for i, c in enumerate(columns)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(columns, widths))]
    lines.extend("  ".join(v.rjust(w) for v, w in zip(r, widths)) for r in rendered)
    return "\n".join(lines)


def result_table(result: VqeResult) -> str:
    row = result.to_dict()
    return format_table([row], ["best_energy", "exact_energy", "delta_e_kcal", "cnot_count", "parameter_count"])


def scan_table(points: list[ScanPoint]) -> str:
    return format_table([p.to_dict() for p in points], ["label", "vqe_energy", "exact_energy", "delta_e_kcal"])


def save_trace_csv(result: VqeResult, filepath: str):
    save_csv([(i, e) for i, e in enumerate(result.energy_trace)], ["iteration", "best_energy"], filepath)


if __name__ == '__main__':
    logging.basicConfig(level=logging.INFO)
    hop = FermionHamiltonian(2, 1, 0.0, {(1, 2): 1.0, (2, 1): 1.0})
    res = run_vqe(hop, SubspaceCode.identity(2, 1), VqeConfig(layers=1, restarts=2))
    print(result_table(res))
