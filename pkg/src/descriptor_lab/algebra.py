"""Dense complex linear algebra over a tensor-product layout.

Operators are plain ``numpy`` complex arrays. Subsystem 0 is the leftmost
(most significant) tensor factor, so embedding ``X`` on qubit 1 of two qubits
gives ``kron(I, X)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Sequence

import numpy as np

from .config import TOL, max_dim

__all__ = [
    "DimensionError",
    "NotUnitaryError",
    "NotHermitianError",
    "SystemLayout",
    "as_matrix",
    "max_abs",
    "is_unitary",
    "is_hermitian",
    "check_unitary",
    "tensor_embed",
    "conjugate",
    "apply_local",
    "haar_unitary",
    "commutator_norm",
]


class DimensionError(ValueError):
    """Shapes, targets or layouts do not fit together."""


class NotUnitaryError(ValueError):
    pass


class NotHermitianError(ValueError):
    pass


@dataclass(frozen=True)
class SystemLayout:
    """Ordered subsystem dimensions of the universe."""

    dims: tuple[int, ...]

    def __init__(self, dims: Sequence[int], cap: int | None = None):
        dims = tuple(int(d) for d in dims)
        if not dims:
            raise DimensionError("layout needs at least one subsystem")
        if any(d < 2 for d in dims):
            raise DimensionError(f"subsystem dimensions must be >= 2, got {dims}")
        total = reduce(lambda a, b: a * b, dims, 1)
        limit = max_dim() if cap is None else cap
        if total > limit:
            raise DimensionError(f"total dimension {total} exceeds the cap {limit}")
        object.__setattr__(self, "dims", dims)

    @classmethod
    def qubits(cls, n: int, cap: int | None = None) -> "SystemLayout":
        return cls((2,) * n, cap=cap)

    @property
    def n(self) -> int:
        return len(self.dims)

    @property
    def total_dim(self) -> int:
        return reduce(lambda a, b: a * b, self.dims, 1)

    @property
    def all_qubits(self) -> bool:
        return all(d == 2 for d in self.dims)

    def is_qubit(self, index: int) -> bool:
        return self.dims[index] == 2

    def sub_dim(self, indices: Sequence[int]) -> int:
        return reduce(lambda a, b: a * b, (self.dims[i] for i in indices), 1)

    def check_targets(self, targets: Sequence[int]) -> tuple[int, ...]:
        targets = tuple(int(t) for t in targets)
        if not targets:
            raise DimensionError("at least one target is required")
        if len(set(targets)) != len(targets):
            raise DimensionError(f"duplicate target in {targets}")
        for t in targets:
            if not 0 <= t < self.n:
                raise DimensionError(f"target {t} out of range for {self.n} subsystems")
        return targets


def as_matrix(a) -> np.ndarray:
    """Coerce to a finite square complex matrix."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise DimensionError(f"expected a non-empty square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def max_abs(a: np.ndarray) -> float:
    """Max-norm; 0.0 for empty input."""
    return float(np.max(np.abs(a))) if np.size(a) else 0.0


def is_unitary(u: np.ndarray, tol: float = TOL.unitary) -> bool:
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    return max_abs(u.conj().T @ u - np.eye(u.shape[0])) <= tol


def is_hermitian(a: np.ndarray, tol: float = TOL.hermitian) -> bool:
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        return False
    return max_abs(a - a.conj().T) <= tol


def check_unitary(u: np.ndarray, tol: float = TOL.unitary) -> np.ndarray:
    u = as_matrix(u)
    err = max_abs(u.conj().T @ u - np.eye(u.shape[0]))
    if err > tol:
        raise NotUnitaryError(f"matrix is not unitary (max |U'U - 1| = {err:.3e})")
    return u


def tensor_embed(op, targets: Sequence[int], layout: SystemLayout) -> np.ndarray:
    """Embed ``op`` on ``targets`` (in the given order) and identity elsewhere.

    ``op`` is read with ``targets[0]`` as its most significant factor, so
    targets may be permuted or non-adjacent.
    """
    op = as_matrix(op)
    targets = layout.check_targets(targets)
    dims = layout.dims
    if op.shape[0] != layout.sub_dim(targets):
        raise DimensionError(
            f"operator of dim {op.shape[0]} does not match targets {targets} "
            f"(product of dims {layout.sub_dim(targets)})"
        )
    rest = [i for i in range(layout.n) if i not in targets]
    full = np.kron(op, np.eye(layout.sub_dim(rest), dtype=complex))
    order = list(targets) + rest
    shape = [dims[i] for i in order]
    full = full.reshape(shape + shape)
    pos = [order.index(i) for i in range(layout.n)]
    full = full.transpose(pos + [layout.n + p for p in pos])
    d = layout.total_dim
    return np.ascontiguousarray(full.reshape(d, d))


def conjugate(u, a, check: bool = True) -> np.ndarray:
    """Return ``u^dagger a u``."""
    u = as_matrix(u) if check else u
    a = as_matrix(a) if check else a
    if u.shape != a.shape:
        raise DimensionError(f"shape mismatch: {u.shape} vs {a.shape}")
    if check:
        check_unitary(u)
    return u.conj().T @ (a @ u)


def apply_local(state: np.ndarray, op: np.ndarray, targets: Sequence[int],
                dims: Sequence[int]) -> np.ndarray:
    """Apply a local operator to a state vector by tensor contraction."""
    n = len(dims)
    k = len(targets)
    tdims = [dims[t] for t in targets]
    psi = state.reshape(dims)
    op_t = op.reshape(tdims + tdims)
    out = np.tensordot(op_t, psi, axes=(list(range(k, 2 * k)), list(targets)))
    # tensordot puts the k output axes first; restore subsystem order
    rest = [i for i in range(n) if i not in targets]
    current = list(targets) + rest
    out = np.moveaxis(out, list(range(n)), current)
    return np.ascontiguousarray(out).reshape(-1)


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary from the QR decomposition of a complex Ginibre matrix."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    phases = np.diag(r) / np.abs(np.diag(r))
    return q * phases


def commutator_norm(a: np.ndarray, b: np.ndarray) -> float:
    return max_abs(a @ b - b @ a)
