# Utility functions shared across the toolkit

import math
from itertools import combinations

import numpy as np
from scipy.special import comb


def binomial(n: int, k: int) -> int:
    """Exact binomial coefficient as a Python int (0 outside the triangle)."""
    if k < 0 or k > n:
        return 0
    return int(comb(n, k, exact=True))


def ceil_log2(value: int) -> int:
    """Smallest q with 2**q >= value, for a positive integer value."""
    if value < 1:
        raise ValueError(f"ceil_log2 needs a positive integer, got {value}")
    return (value - 1).bit_length()


def compression_bound(modes: int, electrons: int) -> int:
    """The ceil(2N log2 M) qubit bound for linear encoders."""
    return math.ceil(2 * electrons * math.log2(modes))


def bits_to_string(bits) -> str:
    """Render a 0/1 sequence as ASCII, index 0 leftmost."""
    return "".join("1" if int(b) else "0" for b in bits)


def string_to_bits(text: str) -> np.ndarray:
    """Parse an ASCII '0'/'1' string into a uint8 array."""
    text = text.strip()
    if any(ch not in "01" for ch in text):
        raise ValueError(f"Not a bit string: {text!r}")
    return np.fromiter((ch == "1" for ch in text), dtype=np.uint8, count=len(text))


def bits_to_int(bits) -> int:
    """Pack bits into an integer with index 0 as the most significant bit."""
    value = 0
    for b in bits:
        value = (value << 1) | (int(b) & 1)
    return value


def int_to_bits(value: int, length: int) -> np.ndarray:
    """Inverse of bits_to_int for a fixed length."""
    return np.array([(value >> (length - 1 - i)) & 1 for i in range(length)], dtype=np.uint8)


def fixed_weight_states(modes: int, electrons: int) -> np.ndarray:
    """All weight-N occupation vectors of length M, lexicographically descending as bit strings.

    Returns a (C(M, N), M) uint8 array; row order matches itertools.combinations
    over mode indices, so (1,1,0,0) precedes (1,0,1,0).
    """
    count = binomial(modes, electrons)
    states = np.zeros((count, modes), dtype=np.uint8)
    for row, occupied in enumerate(combinations(range(modes), electrons)):
        states[row, list(occupied)] = 1
    return states


if __name__ == '__main__':
    print(f"C(22, 2) = {binomial(22, 2)}")
    print(f"ceil_log2(7) = {ceil_log2(7)}")
    print(f"ceil(2N log2 M) for M=22, N=2: {compression_bound(22, 2)}")
    bits = string_to_bits("0110")
    print(f"'0110' -> {bits} -> {bits_to_int(bits)} -> {bits_to_string(int_to_bits(6, 4))}")
    print(fixed_weight_states(4, 2))
