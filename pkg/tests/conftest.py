import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")

X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
I2 = np.eye(2, dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
CZ = np.diag([1, 1, 1, -1]).astype(complex)
SWAP = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def kron(*ops):
    out = np.eye(1, dtype=complex)
    for op in ops:
        out = np.kron(out, op)
    return out


def brute_embed(op, targets, dims):
    """Embed by summing over basis indices: an independent oracle for tensor_embed."""
    total = int(np.prod(dims))
    rest = [i for i in range(len(dims)) if i not in targets]
    out = np.zeros((total, total), dtype=complex)
    for row in range(total):
        rd = np.unravel_index(row, dims)
        for col in range(total):
            cd = np.unravel_index(col, dims)
            if any(rd[k] != cd[k] for k in rest):
                continue
            r = np.ravel_multi_index([rd[t] for t in targets], [dims[t] for t in targets])
            c = np.ravel_multi_index([cd[t] for t in targets], [dims[t] for t in targets])
            out[row, col] = op[r, c]
    return out


def statevector(ops, n):
    """Oracle state: multiply dense embedded gates (built with brute_embed) onto |0...0>."""
    psi = np.zeros(2 ** n, dtype=complex)
    psi[0] = 1
    for op, targets in ops:
        psi = brute_embed(op, targets, [2] * n) @ psi
    return psi


def partial_trace(psi, keep, dims):
    """Reduced density via explicit index sums."""
    total = len(psi)
    kd = [dims[k] for k in keep]
    out = np.zeros((int(np.prod(kd)), int(np.prod(kd))), dtype=complex)
    for a in range(total):
        da = np.unravel_index(a, dims)
        for b in range(total):
            db = np.unravel_index(b, dims)
            if any(da[k] != db[k] for k in range(len(dims)) if k not in keep):
                continue
            i = np.ravel_multi_index([da[k] for k in keep], kd)
            j = np.ravel_multi_index([db[k] for k in keep], kd)
            out[i, j] += psi[a] * np.conj(psi[b])
    return out
