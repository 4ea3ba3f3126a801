"""Gate library: name -> unitary matrix.

Names are matched case-insensitively. Angles are in radians. Two-qubit gates
use the first target as control.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

__all__ = ["GateError", "gate", "gate_arity", "gate_width", "GATE_NAMES", "canonical_name"]


class GateError(ValueError):
    pass


_R2 = 1 / np.sqrt(2)

_FIXED = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
    "H": np.array([[_R2, _R2], [_R2, -_R2]], dtype=complex),
    "S": np.diag([1, 1j]).astype(complex),
    "SDG": np.diag([1, -1j]).astype(complex),
    "T": np.diag([1, np.exp(1j * np.pi / 4)]).astype(complex),
    "TDG": np.diag([1, np.exp(-1j * np.pi / 4)]).astype(complex),
    "SX": 0.5 * np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]], dtype=complex),
    "CNOT": np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex),
    "CZ": np.diag([1, 1, 1, -1]).astype(complex),
    "SWAP": np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex),
}

_ALIASES = {"CX": "CNOT", "SDAG": "SDG", "TDAG": "TDG", "P": "PHASE", "CPHASE": "CP", "ID": "I"}


def _rx(t):
    c, s = np.cos(t / 2), np.sin(t / 2)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)


def _ry(t):
    c, s = np.cos(t / 2), np.sin(t / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def _rz(t):
    return np.diag([np.exp(-1j * t / 2), np.exp(1j * t / 2)])


def _u3(theta, phi, lam):
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array(
        [[c, -np.exp(1j * lam) * s], [np.exp(1j * phi) * s, np.exp(1j * (phi + lam)) * c]],
        dtype=complex,
    )


_PARAM = {
    "RX": (1, _rx),
    "RY": (1, _ry),
    "RZ": (1, _rz),
    "PHASE": (1, lambda p: np.diag([1, np.exp(1j * p)]).astype(complex)),
    "GPHASE": (1, lambda p: np.exp(1j * p) * np.eye(2, dtype=complex)),
    "CP": (1, lambda p: np.diag([1, 1, 1, np.exp(1j * p)]).astype(complex)),
    "U3": (3, _u3),
}


def _shift(d):
    return np.roll(np.eye(d, dtype=complex), 1, axis=0)


def _clock(d):
    return np.diag(np.exp(2j * np.pi * np.arange(d) / d))


def _dft(d):
    j, k = np.meshgrid(np.arange(d), np.arange(d), indexing="ij")
    return np.exp(2j * np.pi * j * k / d) / np.sqrt(d)


# generalized Pauli and Fourier gates for a single d-level system
_QUDIT = {"SHIFT": _shift, "CLOCK": _clock, "DFT": _dft}

GATE_NAMES = tuple(sorted(set(_FIXED) | set(_PARAM) | set(_QUDIT)))


def canonical_name(name: str) -> str:
    key = str(name).strip().upper()
    key = _ALIASES.get(key, key)
    if key not in _FIXED and key not in _PARAM and key not in _QUDIT:
        raise GateError(f"unknown gate {name!r}")
    return key


def gate_arity(name: str) -> int:
    key = canonical_name(name)
    return _PARAM[key][0] if key in _PARAM else 0


def gate_width(name: str) -> int:
    """Number of subsystems the gate acts on."""
    key = canonical_name(name)
    if key in _QUDIT:
        return 1
    if key in _FIXED:
        return int(np.log2(_FIXED[key].shape[0]))
    return 2 if key == "CP" else 1


def gate(name: str, params: Sequence[float] = (), dim: int = 2) -> np.ndarray:
    """Unitary matrix for a library gate.

    ``dim`` only matters for the qudit gates SHIFT, CLOCK and DFT; every other
    gate is defined on qubits and rejects ``dim != 2``.
    """
    key = canonical_name(name)
    params = tuple(float(p) for p in params)
    if gate_arity(key) != len(params):
        raise GateError(f"gate {key} takes {gate_arity(key)} parameter(s), got {len(params)}")
    if key in _QUDIT:
        if dim < 2:
            raise GateError(f"qudit dimension must be >= 2, got {dim}")
        return _QUDIT[key](dim)
    if dim != 2:
        raise GateError(f"gate {key} is only defined on qubits")
    if key in _FIXED:
        return _FIXED[key].copy()
    return _PARAM[key][1](*params)
