import itertools

import numpy as np
import pytest

from gf2_linalg import (BitMatrix, DimensionMismatchError, SingularMatrixError, invert, kernel_basis, kernel_matrix,
                        matmul, matvec, rank, row_reduce, solve_affine)


@pytest.mark.parametrize("m,v,expected", [
    (BitMatrix.identity(3), [1, 0, 1], [1, 0, 1]),
    (BitMatrix([[1, 1], [0, 1]]), [1, 1], [0, 1]),
])
def test_matvec_examples(m, v, expected):
    assert matvec(m, v).tolist() == expected


def test_matvec_matches_parity_loop(rng):
    data = rng.integers(0, 2, size=(10, 20))
    v = rng.integers(0, 2, size=20)
    expected = [sum(int(data[i, j]) * int(v[j]) for j in range(20)) % 2 for i in range(10)]
    assert matvec(BitMatrix(data), v).tolist() == expected


def test_matvec_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        matvec(BitMatrix.identity(3), [1, 0])


def test_matmul_operator():
    a = BitMatrix([[1, 1], [0, 1]])
    assert (a @ a) == BitMatrix.identity(2)
    with pytest.raises(DimensionMismatchError):
        matmul(a, BitMatrix.identity(3))


@pytest.mark.parametrize("m,expected", [
    (BitMatrix.identity(4), 4),
    (BitMatrix.zeros(3, 5), 0),
    (BitMatrix([[1, 1, 0], [0, 1, 1], [1, 0, 1]]), 2),
])
def test_rank(m, expected):
    assert rank(m) == expected


def test_row_reduce_is_reduced():
    r, pivots = row_reduce([[1, 1, 0], [0, 1, 1], [1, 0, 1]])
    assert pivots == [0, 1]
    assert r.tolist() == [[1, 0, 1], [0, 1, 1], [0, 0, 0]]


def test_kernel_examples():
    assert [v.tolist() for v in kernel_basis(BitMatrix([[1, 1]]))] == [[1, 1]]
    assert kernel_basis(BitMatrix.identity(3)) == []
    assert kernel_matrix(BitMatrix.identity(3)) is None


def test_kernel_of_parity_generator_is_all_ones():
    g = BitMatrix.from_strings(["1001", "0101", "0011"])
    kernel = [list(v) for v in itertools.product([0, 1], repeat=4) if not matvec(g, v).any()]
    assert kernel == [[0, 0, 0, 0], [1, 1, 1, 1]]
    assert [v.tolist() for v in kernel_basis(g)] == [[1, 1, 1, 1]]


def test_kernel_dimension_and_membership(rng):
    for _ in range(20):
        m = BitMatrix(rng.integers(0, 2, size=(5, 9)))
        basis = kernel_basis(m)
        assert len(basis) == m.cols - rank(m)
        for v in basis:
            assert not matvec(m, v).any()


@pytest.mark.parametrize("m,target,expected", [
    (BitMatrix.identity(2), [1, 0], [1, 0]),
    (BitMatrix([[1, 1]]), [1], [1, 0]),
    (BitMatrix.zeros(2, 2), [1, 0], None),
])
def test_solve_affine(m, target, expected):
    x = solve_affine(m, target)
    if expected is None:
        assert x is None
    else:
        assert x.tolist() == expected


def test_solve_affine_random_consistent(rng):
    for _ in range(20):
        m = BitMatrix(rng.integers(0, 2, size=(6, 8)))
        x0 = rng.integers(0, 2, size=8)
        x = solve_affine(m, matvec(m, x0))
        assert np.array_equal(matvec(m, x), matvec(m, x0))


def test_invert():
    assert invert(BitMatrix.identity(5)) == BitMatrix.identity(5)
    cnot = BitMatrix([[1, 0], [1, 1]])
    assert invert(cnot) == cnot
    with pytest.raises(SingularMatrixError):
        invert(BitMatrix([[1, 1], [1, 1]]))


def test_invert_random(rng):
    found = 0
    while found < 5:
        m = BitMatrix(rng.integers(0, 2, size=(6, 6)))
        if rank(m) < 6:
            continue
        found += 1
        assert matmul(m, invert(m)) == BitMatrix.identity(6)


def test_from_strings_round_trip():
    rows = ["1001", "0110"]
    assert BitMatrix.from_strings(rows).to_strings() == rows
    assert BitMatrix.from_strings(rows).T.shape == (4, 2)
