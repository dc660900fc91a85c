"""
Particle-conserving linear encoders.

A SubspaceCode maps an M-mode occupation vector b of weight N to the Q-bit
register G b. G is built in standard form [I_Q | D] by the Randomized Linear
Encoder (RLE): columns of D are random even-weight vectors, a cheap pre-check
rejects generators with short even-weight kernel elements, and an exhaustive
pass over all C(M, N) states certifies that no two states share a label.
"""

from __future__ import annotations

import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum
from itertools import combinations, islice

import numpy as np

import config
from data_manager import load_code_artifact, save_code_artifact
from gf2_linalg import BitMatrix, BitVector, as_bits, kernel_matrix, matmul, matvec, rank
from utils import binomial, bits_to_string, ceil_log2, compression_bound

logger = logging.getLogger(__name__)

_KEY_CHUNK = 1_000_000


class CodePreconditionError(ValueError):
    pass


class CodeCollisionError(ValueError):
    pass


# --- Bounds ---

@dataclass(frozen=True)
class QubitBounds:
    modes: int
    electrons: int
    gv_qubits: int              # a code with this many qubits is guaranteed to exist
    impossibility_qubits: int   # no linear code exists below this
    compression_bound: int      # ceil(2N log2 M)


def qubit_bounds(modes: int, electrons: int) -> QubitBounds:
    """Gilbert-Varshamov and Hamming-type bounds restricted to the even-weight subspace."""
    if not (modes > 2 * electrons >= 2):
        raise CodePreconditionError(f"qubit_bounds needs M > 2N >= 2, got M={modes}, N={electrons}")
    gv_sum = sum(binomial(modes, 2 * j) for j in range(electrons + 1))
    hamming_sum = sum(binomial(modes, 2 * j) for j in range(electrons // 2 + 1))
    return QubitBounds(
        modes=modes,
        electrons=electrons,
        gv_qubits=ceil_log2(gv_sum),
        impossibility_qubits=ceil_log2(hamming_sum),
        compression_bound=compression_bound(modes, electrons),
    )


# --- Codes ---

def _row_keys(bits2d: np.ndarray) -> np.ndarray:
    """Integer key per row, index 0 most significant (int64 when it fits, object otherwise)."""
    width = bits2d.shape[1]
    if width <= 62:
        weights = (1 << np.arange(width - 1, -1, -1, dtype=np.int64)).astype(np.int64)
        return bits2d.astype(np.int64) @ weights
    return np.array([int("".join(map(str, row)) or "0", 2) for row in bits2d.astype(np.uint8)], dtype=object)


def _combination_chunks(modes: int, electrons: int):
    iterator = combinations(range(modes), electrons)
    while True:
        chunk = list(islice(iterator, _KEY_CHUNK))
        if not chunk:
            return
        yield np.array(chunk, dtype=np.int64).reshape(len(chunk), electrons)


def _labels_for(column_keys: np.ndarray, combos: np.ndarray) -> np.ndarray:
    if combos.shape[1] == 0:
        return np.zeros(combos.shape[0], dtype=column_keys.dtype)
    return np.bitwise_xor.reduce(column_keys[combos], axis=1)


def _state_key(modes: int, occupied) -> int:
    return sum(1 << (modes - 1 - int(j)) for j in occupied)


@dataclass(frozen=True)
class SubspaceCode:
    modes: int
    electrons: int
    generator: BitMatrix                 # Q x M
    dual: BitMatrix | None               # (M - Q) x M, rows span ker G
    seed: int = 0
    aux_qubits: int = 0
    attempts: int = 0
    metadata: dict = field(default_factory=dict, compare=False)

    @property
    def qubits(self) -> int:
        return self.generator.rows

    @property
    def M(self) -> int:
        return self.modes

    @property
    def N(self) -> int:
        return self.electrons

    @property
    def Q(self) -> int:
        return self.qubits

    @classmethod
    def identity(cls, modes: int, electrons: int) -> SubspaceCode:
        """The uncompressed (Jordan-Wigner) register, Q = M."""
        return cls(modes, electrons, BitMatrix.identity(modes), None)

    @classmethod
    def from_generator(cls, generator: BitMatrix, electrons: int, seed: int = 0, aux_qubits: int = 0) -> SubspaceCode:
        return cls(generator.cols, electrons, generator, _dual_of(generator), seed=seed, aux_qubits=aux_qubits)

    def encode(self, occupation) -> BitVector:
        return matvec(self.generator, occupation)

    def column_keys(self) -> np.ndarray:
        return _row_keys(self.generator.data.T)

    def to_artifact(self) -> dict:
        return {
            "format_version": config.CODE_FORMAT_VERSION,
            "modes": self.modes,
            "electrons": self.electrons,
            "qubits": self.qubits,
            "aux_qubits": self.aux_qubits,
            "seed": self.seed,
            "generator_rows": self.generator.to_strings(),
            "metadata": {"attempts": self.attempts, **self.metadata},
        }

    @classmethod
    def from_artifact(cls, data: dict) -> SubspaceCode:
        required = ("modes", "electrons", "qubits", "generator_rows", "format_version")
        missing = [k for k in required if k not in data]
        if missing:
            raise ValueError(f"Code artifact is missing keys {missing}")
        if data["format_version"] != config.CODE_FORMAT_VERSION:
            raise ValueError(f"Unsupported code artifact format_version {data['format_version']}")
        generator = BitMatrix.from_strings(data["generator_rows"])
        if generator.shape != (data["qubits"], data["modes"]):
            raise ValueError(f"generator_rows has shape {generator.shape}, header says "
                             f"{data['qubits']}x{data['modes']}")
        metadata = dict(data.get("metadata", {}))
        attempts = int(metadata.pop("attempts", 0))
        return cls(data["modes"], data["electrons"], generator, _dual_of(generator),
                   seed=int(data.get("seed", 0)), aux_qubits=int(data.get("aux_qubits", 0)),
                   attempts=attempts, metadata=metadata)

    def save(self, filepath: str):
        save_code_artifact(self.to_artifact(), filepath)
        logger.info("Code M=%d N=%d Q=%d written to %s", self.modes, self.electrons, self.qubits, filepath)

    @classmethod
    def load(cls, filepath: str) -> SubspaceCode:
        return cls.from_artifact(load_code_artifact(filepath))


def _dual_of(generator: BitMatrix) -> BitMatrix | None:
    q, m = generator.shape
    if m > q and np.array_equal(generator.data[:, :q], np.eye(q, dtype=np.uint8)):
        d = generator.data[:, q:]
        return BitMatrix(np.hstack([d.T, np.eye(m - q, dtype=np.uint8)]))
    return kernel_matrix(generator)


def standard_form_code(d: np.ndarray, electrons: int, seed: int = 0, aux_qubits: int = 0,
                       attempts: int = 0) -> SubspaceCode:
    """Build G = [I_Q | D] and C = [D^T | I_{M-Q}] from a Q x (M - Q) block D."""
    d = np.asarray(d, dtype=np.uint8)
    q, k = d.shape
    generator = BitMatrix(np.hstack([np.eye(q, dtype=np.uint8), d]))
    dual = BitMatrix(np.hstack([d.T, np.eye(k, dtype=np.uint8)])) if k else None
    return SubspaceCode(q + k, electrons, generator, dual, seed=seed, aux_qubits=aux_qubits, attempts=attempts)


# --- Lookup decoder ---

class LookupDecoder:
    """Table from encoded word G b to the weight-N state b."""

    def __init__(self, code: SubspaceCode, table: dict[int, int]):
        self.code = code
        self.table = table

    def __len__(self) -> int:
        return len(self.table)

    def decode_key(self, label_key: int) -> int | None:
        """Label integer (qubit 0 most significant) -> state integer (mode 1 most significant)."""
        return self.table.get(int(label_key))

    def decode(self, word) -> BitVector | None:
        word = as_bits(word)
        if word.shape[0] != self.code.qubits:
            raise ValueError(f"decode: word has length {word.shape[0]}, code has Q={self.code.qubits}")
        key = self.decode_key(int("".join(map(str, word)) or "0", 2))
        if key is None:
            return None
        return np.array([(key >> (self.code.modes - 1 - i)) & 1 for i in range(self.code.modes)], dtype=np.uint8)


def build_lookup(code: SubspaceCode) -> LookupDecoder:
    count = binomial(code.modes, code.electrons)
    if count > config.MAX_EXHAUSTIVE_STATES:
        raise CodePreconditionError(f"C({code.modes},{code.electrons}) = {count} states exceed the lookup budget")
    column_keys = code.column_keys()
    table: dict[int, int] = {}
    for combos in _combination_chunks(code.modes, code.electrons):
        labels = _labels_for(column_keys, combos)
        for occupied, label in zip(combos, labels):
            state = _state_key(code.modes, occupied)
            label = int(label)
            previous = table.get(label)
            if previous is not None:
                raise CodeCollisionError(
                    f"States {format(previous, f'0{code.modes}b')} and {format(state, f'0{code.modes}b')} "
                    f"share the encoded word {format(label, f'0{code.qubits}b')}")
            table[label] = state
    logger.debug("Lookup table built with %d entries", len(table))
    return LookupDecoder(code, table)


# --- Verification ---

class CheckStatus(Enum):
    PASSED = "passed"
    FAILED = "failed"
    SKIPPED = "skipped"


@dataclass
class VerificationReport:
    duality: CheckStatus
    even_kernel: CheckStatus
    injectivity: CheckStatus
    min_even_kernel_weight: int | None = None
    kernel_counterexample: str | None = None
    collision: tuple[str, str] | None = None
    within_bound: bool | None = None

    @property
    def valid(self) -> bool:
        checks = (self.duality, self.even_kernel, self.injectivity)
        if CheckStatus.FAILED in checks:
            return False
        return CheckStatus.PASSED in (self.even_kernel, self.injectivity)

    def to_dict(self) -> dict:
        return {
            "valid": self.valid,
            "duality": self.duality.value,
            "even_kernel": self.even_kernel.value,
            "injectivity": self.injectivity.value,
            "min_even_kernel_weight": self.min_even_kernel_weight,
            "kernel_counterexample": self.kernel_counterexample,
            "collision": list(self.collision) if self.collision else None,
            "within_bound": self.within_bound,
        }


def kernel_weight_threshold(modes: int, electrons: int) -> int:
    """Smallest even kernel weight a valid code may have.

    Two weight-N states differ in at most 2 min(N, M - N) modes.
    """
    return 2 * min(electrons, modes - electrons) + 2


def _packed_span(rows: np.ndarray) -> np.ndarray:
    """All 2^r XOR combinations of packed rows (r x B uint8), index bit i selects row i."""
    span = np.zeros((1, rows.shape[1]), dtype=np.uint8)
    for row in rows:
        span = np.vstack([span, span ^ row])
    return span


def min_even_kernel_weight(code: SubspaceCode) -> tuple[int | None, BitVector | None]:
    """Exhaustive minimum weight over nonzero even-weight elements of ker G, and a witness."""
    if code.dual is None:
        return None, None
    basis = code.dual.data
    k, m = basis.shape
    packed = np.packbits(basis, axis=1)
    low = min(k, 16)
    low_span = _packed_span(packed[:low])
    low_weights = np.bitwise_count(low_span).sum(axis=1).astype(np.int64)
    best_weight, best_vector = None, None
    for high_index in range(1 << (k - low)):
        high = np.zeros(packed.shape[1], dtype=np.uint8)
        for bit in range(k - low):
            if (high_index >> bit) & 1:
                high ^= packed[low + bit]
        if high_index == 0:
            weights = low_weights
            candidates = np.arange(1, low_span.shape[0])
        else:
            weights = np.bitwise_count(low_span ^ high).sum(axis=1).astype(np.int64)
            candidates = np.arange(low_span.shape[0])
        w = weights[candidates]
        even = candidates[(w % 2) == 0]
        if even.size == 0:
            continue
        pos = int(np.argmin(weights[even]))
        if best_weight is None or int(weights[even][pos]) < best_weight:
            best_weight = int(weights[even][pos])
            best_vector = np.unpackbits(low_span[even[pos]] ^ high)[:m]
    return best_weight, best_vector


def _collision_from_kernel(vector: BitVector, electrons: int) -> tuple[str, str] | None:
    """Split an even kernel element k of weight <= 2N into weight-N states b, b xor k."""
    ones = np.flatnonzero(vector)
    zeros = np.flatnonzero(vector == 0)
    half = len(ones) // 2
    extra = electrons - half
    if extra < 0 or extra > len(zeros):
        return None
    b = np.zeros_like(vector)
    b[ones[:half]] = 1
    b[zeros[:extra]] = 1
    return bits_to_string(b), bits_to_string(b ^ vector)


def find_collision(code: SubspaceCode) -> tuple[str, str] | None:
    column_keys = code.column_keys()
    seen: dict[int, int] = {}
    for combos in _combination_chunks(code.modes, code.electrons):
        labels = _labels_for(column_keys, combos)
        for occupied, label in zip(combos, labels):
            state = _state_key(code.modes, occupied)
            previous = seen.setdefault(int(label), state)
            if previous != state:
                return format(previous, f"0{code.modes}b"), format(state, f"0{code.modes}b")
    return None


def verify_code(code: SubspaceCode) -> VerificationReport:
    # Duality: G C^T = 0 and C has full rank M - rank(G).
    if code.dual is None:
        duality = CheckStatus.PASSED if rank(code.generator) == code.modes else CheckStatus.FAILED
    else:
        product = matmul(code.generator, code.dual.T)
        full = rank(code.dual) == code.modes - rank(code.generator)
        duality = CheckStatus.PASSED if not product.data.any() and full else CheckStatus.FAILED

    report = VerificationReport(duality, CheckStatus.SKIPPED, CheckStatus.SKIPPED)
    kernel_dim = 0 if code.dual is None else code.dual.rows
    threshold = kernel_weight_threshold(code.modes, code.electrons)
    if kernel_dim <= config.MAX_EXHAUSTIVE_KERNEL_DIM:
        weight, witness = min_even_kernel_weight(code)
        report.min_even_kernel_weight = weight
        if weight is None or weight >= threshold:
            report.even_kernel = CheckStatus.PASSED
        else:
            report.even_kernel = CheckStatus.FAILED
            report.kernel_counterexample = bits_to_string(witness)
            report.collision = _collision_from_kernel(witness, code.electrons)

    if binomial(code.modes, code.electrons) <= config.MAX_EXHAUSTIVE_STATES:
        collision = find_collision(code)
        if collision is None:
            report.injectivity = CheckStatus.PASSED
        else:
            report.injectivity = CheckStatus.FAILED
            report.collision = collision

    if code.aux_qubits == 0 and code.modes > 1:
        report.within_bound = code.qubits <= compression_bound(code.modes, code.electrons) or code.qubits == code.modes
    return report


# --- Randomized Linear Encoder ---

def column_weight_choices(qubits: int) -> list[int]:
    """Even column weights in [max(2, Q/2 - 1), min(Q, Q/2 + 1)], nearest to Q/2."""
    lo = max(2.0, qubits / 2 - 1)
    hi = min(float(qubits), qubits / 2 + 1)
    choices = [w for w in range(2, qubits + 1, 2) if lo <= w <= hi]
    if not choices:
        choices = [qubits - (qubits % 2)]
    return choices


def attempt_rng(seed: int, attempt: int) -> np.random.Generator:
    """Counter-based stream for one attempt: Philox keyed by the seed, jumped by the attempt index.

    Setting the third counter word is what `jumped(attempt)` does, without looping attempt times.
    """
    return np.random.Generator(np.random.Philox(key=seed % (1 << 64), counter=[0, 0, attempt, 0]))


def _random_d(rng: np.random.Generator, qubits: int, columns: int) -> np.ndarray:
    """Q x (M - Q) block with independent random even-weight columns (returned as columns x Q)."""
    weights = rng.choice(column_weight_choices(qubits), size=columns)
    order = np.argsort(rng.random((columns, qubits)), axis=1)
    positions = np.argsort(order, axis=1)
    return (positions < weights[:, None]).astype(np.uint8)


def _precheck(rng: np.random.Generator, d_cols: np.ndarray, electrons: int) -> bool:
    """Reject D when a probed even-weight kernel element (D y, y) is below the kernel weight threshold."""
    k, q = d_cols.shape
    threshold = kernel_weight_threshold(k + q, electrons)
    if k >= 2:
        distances = np.count_nonzero(d_cols[:, None, :] != d_cols[None, :, :], axis=2)
        iu = np.triu_indices(k, 1)
        if np.any(distances[iu] + 2 < threshold):
            return False
    heavy = [w for w in range(4, threshold - 1, 2) if w <= k]
    if heavy:
        probes = config.RLE_PRECHECK_RANDOM_FACTOR * k
        sizes = rng.choice(heavy, size=probes)
        ranks = np.argsort(np.argsort(rng.random((probes, k)), axis=1), axis=1)
        selection = (ranks < sizes[:, None]).astype(np.int64)
        products = (selection @ d_cols.astype(np.int64)) % 2
        if np.any(products.sum(axis=1) + sizes < threshold):
            return False
    return True


def _labels_distinct_standard(d_cols: np.ndarray, modes: int, electrons: int) -> bool:
    q = d_cols.shape[1]
    generator_cols = np.vstack([np.eye(q, dtype=np.uint8), d_cols])
    column_keys = _row_keys(generator_cols)
    parts = [_labels_for(column_keys, combos) for combos in _combination_chunks(modes, electrons)]
    labels = np.concatenate(parts)
    return len(np.unique(labels)) == labels.shape[0]


def _try_attempt(modes: int, electrons: int, qubits: int, seed: int, attempt: int, precheck: bool) -> np.ndarray | None:
    rng = attempt_rng(seed, attempt)
    d_cols = _random_d(rng, qubits, modes - qubits)
    if precheck and not _precheck(rng, d_cols, electrons):
        return None
    if not _labels_distinct_standard(d_cols, modes, electrons):
        return None
    return d_cols


def _check_rle_preconditions(modes: int, electrons: int, qubits: int):
    if electrons < 1 or electrons >= modes:
        raise CodePreconditionError(f"RLE needs 1 <= N < M, got M={modes}, N={electrons}")
    if not (1 <= qubits < modes):
        raise CodePreconditionError(f"RLE needs 1 <= Q < M, got Q={qubits}, M={modes}")
    if binomial(modes, electrons) > config.MAX_EXHAUSTIVE_STATES:
        raise CodePreconditionError(f"C({modes},{electrons}) states exceed the exhaustive check budget")
    low, high = electrons * math.log2(modes), 2 * electrons * math.log2(modes)
    if not (low < qubits < high):
        logger.warning("Q=%d lies outside the heuristic window (%.2f, %.2f) for M=%d, N=%d",
                       qubits, low, high, modes, electrons)


def rle_search(modes: int, electrons: int, qubits: int, seed: int = config.RLE_DEFAULT_SEED,
               max_attempts: int = config.RLE_DEFAULT_MAX_ATTEMPTS, precheck: bool = True,
               threads: int = 1, deadline: float | None = None, aux_qubits: int = 0) -> SubspaceCode | None:
    """Randomized search for G = [I_Q | D] that encodes every weight-N state injectively.

    Attempt i draws from its own counter-based stream, so the returned code is the
    lowest-index success regardless of thread count. Returns None after
    max_attempts failures or once `deadline` (time.monotonic) has passed.
    """
    _check_rle_preconditions(modes, electrons, qubits)
    batch = max(1, threads)
    executor = ThreadPoolExecutor(max_workers=batch) if batch > 1 else None
    try:
        for start in range(0, max_attempts, batch):
            if deadline is not None and time.monotonic() > deadline:
                logger.info("RLE M=%d N=%d Q=%d: deadline reached after %d attempts", modes, electrons, qubits, start)
                return None
            indices = range(start, min(start + batch, max_attempts))
            if executor is None:
                results = [_try_attempt(modes, electrons, qubits, seed, i, precheck) for i in indices]
            else:
                results = list(executor.map(lambda i: _try_attempt(modes, electrons, qubits, seed, i, precheck), indices))
            for attempt, d_cols in zip(indices, results):
                if d_cols is not None:
                    logger.info("RLE M=%d N=%d Q=%d: success at attempt %d", modes, electrons, qubits, attempt)
                    return standard_form_code(d_cols.T, electrons, seed=seed, aux_qubits=aux_qubits,
                                              attempts=attempt + 1)
    finally:
        if executor is not None:
            executor.shutdown()
    logger.info("RLE M=%d N=%d Q=%d: exhausted %d attempts", modes, electrons, qubits, max_attempts)
    return None


def rle_with_aux(modes: int, electrons: int, base_qubits: int, extra: int, seed: int = config.RLE_DEFAULT_SEED,
                 attempts_per_level: int = config.RLE_DEFAULT_MAX_ATTEMPTS, precheck: bool = True) -> SubspaceCode | None:
    """RLE at Q = base_Q + extra, recording the extra qubits as auxiliary."""
    if extra < 0:
        raise CodePreconditionError(f"extra qubits must be >= 0, got {extra}")
    if base_qubits + extra >= modes:
        raise CodePreconditionError(f"Q + extra = {base_qubits + extra} >= M = {modes}: compression is degenerate")
    return rle_search(modes, electrons, base_qubits + extra, seed=seed, max_attempts=attempts_per_level,
                      precheck=precheck, aux_qubits=extra)


def minimal_search_start(modes: int, electrons: int) -> int:
    """First Q tried by the minimal-Q schedule."""
    start = ceil_log2(binomial(modes, electrons))
    if modes > 2 * electrons:
        bounds = qubit_bounds(modes, electrons)
        start = max(start, bounds.impossibility_qubits, bounds.gv_qubits - config.RLE_SCHEDULE_BELOW_GV)
    return max(1, start)


def encode_minimal(modes: int, electrons: int, seed: int = config.RLE_DEFAULT_SEED,
                   max_attempts: int = config.RLE_DEFAULT_MAX_ATTEMPTS, precheck: bool = True,
                   threads: int = 1) -> SubspaceCode | None:
    """Ascend Q from just below the GV bound, giving each level the full attempt budget.

    Dense fillings (2N > M) are searched at M - N electrons: G separates two
    weight-N states exactly when it separates their complements.
    """
    if 2 * electrons > modes:
        code = encode_minimal(modes, modes - electrons, seed=seed, max_attempts=max_attempts,
                              precheck=precheck, threads=threads)
        return None if code is None else replace(code, electrons=electrons)
    for qubits in range(minimal_search_start(modes, electrons), modes):
        code = rle_search(modes, electrons, qubits, seed=seed, max_attempts=max_attempts,
                          precheck=precheck, threads=threads)
        if code is not None:
            return code
    return None


@dataclass(frozen=True)
class RleSettings:
    seed: int = config.RLE_DEFAULT_SEED
    max_attempts: int = config.RLE_DEFAULT_MAX_ATTEMPTS
    precheck: bool = True
    threads: int = 1

    def search(self, modes: int, electrons: int, qubits: int | None = None) -> SubspaceCode | None:
        """Fixed-Q search when qubits is given, minimal-Q schedule otherwise."""
        if qubits is None:
            return encode_minimal(modes, electrons, seed=self.seed, max_attempts=self.max_attempts,
                                  precheck=self.precheck, threads=self.threads)
        return rle_search(modes, electrons, qubits, seed=self.seed, max_attempts=self.max_attempts,
                          precheck=self.precheck, threads=self.threads)


# --- Experiments ---

def aux_success_rates(modes: int, electrons: int, base_qubits: int | None = None, extras=range(5),
                      seeds=range(100), attempts_per_level: int = 1, precheck: bool = True) -> dict[int, float]:
    """Fraction of seeds for which RLE succeeds within attempts_per_level, per number of extra qubits."""
    if base_qubits is None:
        base_qubits = qubit_bounds(modes, electrons).impossibility_qubits
    seeds = list(seeds)
    rates = {}
    for extra in extras:
        wins = sum(rle_with_aux(modes, electrons, base_qubits, extra, seed=s, attempts_per_level=attempts_per_level,
                                precheck=precheck) is not None for s in seeds)
        rates[extra] = wins / len(seeds)
        logger.info("aux=%d: success rate %.3f over %d seeds", extra, rates[extra], len(seeds))
    return rates


@dataclass
class TableSearchResult:
    electrons: int
    qubits: int
    max_modes: int | None
    attempts: dict[int, int]
    elapsed_seconds: float
    budget_seconds: float | None
    budget_exhausted: bool

    def to_dict(self) -> dict:
        return {
            "electrons": self.electrons,
            "qubits": self.qubits,
            "max_modes": self.max_modes,
            "attempts": {str(m): a for m, a in self.attempts.items()},
            "elapsed_seconds": self.elapsed_seconds,
            "budget_seconds": self.budget_seconds,
            "budget_exhausted": self.budget_exhausted,
        }


def max_modes_search(electrons: int, qubits: int, max_modes: int, budget_seconds: float | None = None,
                     seed: int = config.RLE_DEFAULT_SEED, attempts_per_mode: int = config.RLE_DEFAULT_MAX_ATTEMPTS,
                     threads: int = 1) -> TableSearchResult:
    """Largest M encodable at fixed (N, Q): ascend M until RLE fails or the budget runs out."""
    started = time.monotonic()
    deadline = None if budget_seconds is None else started + budget_seconds
    best, attempts, exhausted = None, {}, False
    for modes in range(max(qubits + 1, electrons + 1), max_modes + 1):
        if deadline is not None and time.monotonic() > deadline:
            exhausted = True
            break
        code = rle_search(modes, electrons, qubits, seed=seed, max_attempts=attempts_per_mode,
                          threads=threads, deadline=deadline)
        if code is None:
            exhausted = deadline is not None and time.monotonic() > deadline
            break
        best = modes
        attempts[modes] = code.attempts
    elapsed = time.monotonic() - started
    logger.info("Table search N=%d Q=%d: max M = %s in %.1fs", electrons, qubits, best, elapsed)
    return TableSearchResult(electrons, qubits, best, attempts, elapsed, budget_seconds, exhausted)


if __name__ == '__main__':
    logging.basicConfig(level=logging.INFO)
    b = qubit_bounds(22, 2)
    print(f"Bounds M=22 N=2: GV {b.gv_qubits}, impossibility {b.impossibility_qubits}, 2N log2 M {b.compression_bound}")
    code = rle_search(22, 2, 10, seed=0)
    if code:
        print(f"Found code after {code.attempts} attempts")
        print(verify_code(code).to_dict())
