"""
Chemist-notation FCIDUMP importer.

Reads spatial-orbital integrals (pq|rs) with 8-fold symmetry and expands them to
spin-orbitals in the native coefficient convention: mode 2p + sigma + 1 (alpha
sigma = 0, beta sigma = 1), h[P,Q] = h_pq for equal spins and
g[P,R,S,Q] += (pq|rs)/2 for spin-conserving pairs (P,Q) and (R,S).
"""

import logging
import re

import numpy as np

from fermion_hamiltonian import FermionHamiltonian, HamiltonianFormatError

logger = logging.getLogger(__name__)

_DROP = 1e-14


def _read_header(lines):
    header_lines = []
    body_start = None
    for n, line in enumerate(lines):
        header_lines.append(line)
        stripped = line.strip().upper()
        if stripped.startswith("&END") or stripped == "/" or stripped.endswith("&END"):
            body_start = n + 1
            break
    if body_start is None:
        raise HamiltonianFormatError("FCIDUMP header is not terminated by &END or /")
    text = " ".join(header_lines).upper()
    norb = re.search(r"NORB\s*=\s*(\d+)", text)
    nelec = re.search(r"NELEC\s*=\s*(\d+)", text)
    if not norb or not nelec:
        raise HamiltonianFormatError("FCIDUMP header lacks NORB or NELEC")
    return int(norb.group(1)), int(nelec.group(1)), body_start


def read_integrals(path):
    """(ecore, h1 [n x n], eri [n x n x n x n], norb, nelec) with all symmetric images filled."""
    with open(path, 'r', encoding='utf-8') as f:
        lines = f.readlines()
    n, nelec, start = _read_header(lines)
    ecore = 0.0
    h1 = np.zeros((n, n))
    eri = np.zeros((n, n, n, n))
    for lineno, line in enumerate(lines[start:], start=start + 1):
        data = line.split()
        if not data:
            continue
        if len(data) != 5:
            raise HamiltonianFormatError(f"{path}:{lineno}: expected 'value i j k l'")
        try:
            value = float(data[0].replace("D", "E").replace("d", "e"))
            i, j, k, l = (int(x) - 1 for x in data[1:])
        except ValueError as e:
            raise HamiltonianFormatError(f"{path}:{lineno}: {e}") from None
        if k == -1 and l == -1:
            if i == -1 and j == -1:
                ecore = value
            else:
                h1[i, j] = h1[j, i] = value
        else:
            for a, b, c, d in ((i, j, k, l), (j, i, k, l), (i, j, l, k), (j, i, l, k),
                               (k, l, i, j), (l, k, i, j), (k, l, j, i), (l, k, j, i)):
                eri[a, b, c, d] = value
    return ecore, h1, eri, n, nelec


def spatial_to_spin(ecore, h1, eri, nelec) -> FermionHamiltonian:
    n = h1.shape[0]
    one_body = {}
    two_body = {}
    for p in range(n):
        for q in range(n):
            if abs(h1[p, q]) > _DROP:
                for sigma in (0, 1):
                    one_body[(2 * p + sigma + 1, 2 * q + sigma + 1)] = float(h1[p, q])
    for p, q, r, s in zip(*np.nonzero(np.abs(eri) > _DROP)):
        value = 0.5 * float(eri[p, q, r, s])
        for sigma in (0, 1):
            for tau in (0, 1):
                P, Q = 2 * p + sigma + 1, 2 * q + sigma + 1
                R, S = 2 * r + tau + 1, 2 * s + tau + 1
                if P == R or S == Q:
                    continue
                key = (int(P), int(R), int(S), int(Q))
                two_body[key] = two_body.get(key, 0.0) + value
    h = FermionHamiltonian(2 * n, nelec, float(ecore), one_body, two_body)
    h.validate()
    return h


def read_fcidump(path) -> FermionHamiltonian:
    ecore, h1, eri, norb, nelec = read_integrals(path)
    h = spatial_to_spin(ecore, h1, eri, nelec)
    logger.info("Imported FCIDUMP %s: %d spatial orbitals -> %d modes, %d electrons", path, norb, h.modes, nelec)
    return h
