"""
Dense linear algebra over GF(2).

Bit vectors are 1-D numpy uint8 arrays holding 0/1; bit index 0 is mode 1 and
renders leftmost. Bit matrices wrap a 2-D uint8 array, row-major, and are
read-only once built. Elimination is plain Gaussian elimination with XOR row
operations.
"""

from __future__ import annotations

import logging

import numpy as np

from utils import bits_to_string, string_to_bits

logger = logging.getLogger(__name__)

BitVector = np.ndarray


class DimensionMismatchError(ValueError):
    pass


class SingularMatrixError(ValueError):
    pass


def as_bits(values) -> BitVector:
    """Coerce any 0/1 (or integer, reduced mod 2) sequence to a uint8 bit vector."""
    return (np.asarray(values, dtype=np.int64) % 2).astype(np.uint8).reshape(-1)


def weight(v: BitVector) -> int:
    return int(np.count_nonzero(v))


class BitMatrix:
    """An immutable rows x cols matrix over GF(2)."""

    def __init__(self, data):
        array = (np.asarray(data, dtype=np.int64) % 2).astype(np.uint8)
        if array.ndim == 1:
            array = array.reshape(1, -1)
        if array.ndim != 2:
            raise DimensionMismatchError(f"BitMatrix needs 2-D data, got shape {array.shape}")
        array.setflags(write=False)
        self.data = array

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape

    @classmethod
    def identity(cls, n: int) -> BitMatrix:
        return cls(np.eye(n, dtype=np.uint8))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> BitMatrix:
        return cls(np.zeros((rows, cols), dtype=np.uint8))

    @classmethod
    def from_strings(cls, rows: list[str]) -> BitMatrix:
        if not rows:
            raise DimensionMismatchError("from_strings needs at least one row")
        parsed = [string_to_bits(r) for r in rows]
        if len({len(r) for r in parsed}) != 1:
            raise DimensionMismatchError("Rows of unequal length")
        return cls(np.vstack(parsed))

    @classmethod
    def hstack(cls, blocks: list[BitMatrix]) -> BitMatrix:
        return cls(np.hstack([b.data for b in blocks]))

    def to_strings(self) -> list[str]:
        return [bits_to_string(row) for row in self.data]

    def transpose(self) -> BitMatrix:
        return BitMatrix(self.data.T)

    @property
    def T(self) -> BitMatrix:
        return self.transpose()

    def column(self, j: int) -> BitVector:
        return self.data[:, j].copy()

    def row(self, i: int) -> BitVector:
        return self.data[i].copy()

    def __matmul__(self, other):
        if isinstance(other, BitMatrix):
            return matmul(self, other)
        return matvec(self, other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, BitMatrix):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self.data, other.data))

    def __hash__(self) -> int:
        return hash((self.shape, self.data.tobytes()))

    def __repr__(self) -> str:
        return f"BitMatrix({self.rows}x{self.cols}, {self.to_strings()})"


def matvec(m: BitMatrix, v) -> BitVector:
    """m . v over GF(2)."""
    v = as_bits(v)
    if v.shape[0] != m.cols:
        raise DimensionMismatchError(f"matvec: matrix has {m.cols} columns, vector has length {v.shape[0]}")
    return ((m.data.astype(np.int64) @ v.astype(np.int64)) % 2).astype(np.uint8)


def matmul(a: BitMatrix, b: BitMatrix) -> BitMatrix:
    if a.cols != b.rows:
        raise DimensionMismatchError(f"matmul: {a.shape} x {b.shape}")
    return BitMatrix((a.data.astype(np.int64) @ b.data.astype(np.int64)) % 2)


def row_reduce(data, n_pivot_cols: int | None = None) -> tuple[np.ndarray, list[int]]:
    """Reduced row-echelon form over GF(2).

    Args:
        data: Binary matrix (m x n).
        n_pivot_cols: Only search for pivots in the first *n_pivot_cols*
            columns. Row operations still apply to the full row width, which is
            how augmented systems are solved.

    Returns:
        (R, pivot_cols): R in reduced row-echelon form (uint8 copy) and the
        pivot column of each leading row; len(pivot_cols) is the rank.
    """
    R = (np.asarray(data, dtype=np.int64) % 2).astype(np.uint8)
    m, n = R.shape
    if n_pivot_cols is None:
        n_pivot_cols = n

    pivot_cols: list[int] = []
    pivot_row = 0
    for col in range(n_pivot_cols):
        if pivot_row == m:
            break
        candidates = np.flatnonzero(R[pivot_row:, col])
        if candidates.size == 0:
            continue
        found = pivot_row + int(candidates[0])
        if found != pivot_row:
            R[[pivot_row, found]] = R[[found, pivot_row]]
        # Clear the column everywhere else, above and below.
        hits = np.flatnonzero(R[:, col])
        hits = hits[hits != pivot_row]
        R[hits] ^= R[pivot_row]
        pivot_cols.append(col)
        pivot_row += 1
    return R, pivot_cols


def rank(m: BitMatrix) -> int:
    _, pivots = row_reduce(m.data)
    return len(pivots)


def kernel_basis(m: BitMatrix) -> list[BitVector]:
    """Basis of {v : m v = 0}; one vector per free column, cols - rank in total."""
    R, pivots = row_reduce(m.data)
    pivot_set = set(pivots)
    basis = []
    for free in range(m.cols):
        if free in pivot_set:
            continue
        v = np.zeros(m.cols, dtype=np.uint8)
        v[free] = 1
        for r, p in enumerate(pivots):
            v[p] = R[r, free]
        basis.append(v)
    return basis


def kernel_matrix(m: BitMatrix) -> BitMatrix | None:
    """Kernel basis stacked as rows, or None when the kernel is trivial."""
    basis = kernel_basis(m)
    if not basis:
        return None
    return BitMatrix(np.vstack(basis))


def solve_affine(m: BitMatrix, target) -> BitVector | None:
    """A solution x of m x = target with every free variable set to 0, or None."""
    target = as_bits(target)
    if target.shape[0] != m.rows:
        raise DimensionMismatchError(f"solve_affine: matrix has {m.rows} rows, target has length {target.shape[0]}")
    augmented = np.hstack([m.data, target.reshape(-1, 1)])
    R, pivots = row_reduce(augmented, n_pivot_cols=m.cols)
    # A row that is zero on the coefficient block but 1 on the right-hand side is inconsistent.
    if np.any((R[:, : m.cols].sum(axis=1) == 0) & (R[:, m.cols] == 1)):
        return None
    x = np.zeros(m.cols, dtype=np.uint8)
    for r, p in enumerate(pivots):
        x[p] = R[r, m.cols]
    return x


def invert(m: BitMatrix) -> BitMatrix:
    if m.rows != m.cols:
        raise DimensionMismatchError(f"invert needs a square matrix, got {m.shape}")
    n = m.rows
    augmented = np.hstack([m.data, np.eye(n, dtype=np.uint8)])
    R, pivots = row_reduce(augmented, n_pivot_cols=n)
    if len(pivots) != n:
        raise SingularMatrixError(f"Matrix of rank {len(pivots)} < {n} is not invertible")
    return BitMatrix(R[:, n:])


if __name__ == '__main__':
    g = BitMatrix.from_strings(["1001", "0101", "0011"])
    print(g)
    print(f"rank = {rank(g)}")
    print(f"kernel = {[bits_to_string(v) for v in kernel_basis(g)]}")
    print(f"solve G x = 111 -> {solve_affine(g, [1, 1, 1])}")
    cnot = BitMatrix.from_strings(["10", "11"])
    print(f"CNOT inverse = {invert(cnot).to_strings()}")
