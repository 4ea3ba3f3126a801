"""Pauli words, Pauli sums and their evaluation on descriptor components.

A :class:`PauliSum` doubles as a *functional*: the same polynomial can be
materialized on bare Pauli matrices or evaluated on any pair of operators
standing in for ``X_i`` and ``Z_i`` (``Y_i`` is rebuilt as ``i X_i Z_i``).

Text forms::

    word:  "XZI", "-iXZI", "+iY"      (prefix one of +, -, +i, -i)
    sum:   "0.5+0i*II;-0.5+0i*ZX"     (";"-separated "coeff*word")
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Mapping, Sequence

import numpy as np

from .algebra import DimensionError, as_matrix
from .config import TOL

__all__ = [
    "PauliError",
    "PauliWord",
    "PauliSum",
    "LETTERS",
    "pauli_decompose",
    "pauli_eval",
    "pauli_apply",
    "parse_coefficient",
    "format_coefficient",
]

LETTERS = "IXYZ"
_PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}
_PHASES = {"": 1, "+": 1, "-": -1, "+i": 1j, "i": 1j, "-i": -1j}
_WORD_RE = re.compile(r"^\s*([+\-]?i?)([IXYZ]+)\s*$")


class PauliError(ValueError):
    pass


def _normalize_minus(text: str) -> str:
    return text.replace("−", "-")


@dataclass(frozen=True)
class PauliWord:
    letters: str
    phase: complex = 1

    def __post_init__(self):
        if not self.letters or any(c not in LETTERS for c in self.letters):
            raise PauliError(f"invalid Pauli letters {self.letters!r}")
        if complex(self.phase) not in (1, -1, 1j, -1j):
            raise PauliError(f"phase must be one of 1, -1, i, -i; got {self.phase}")
        object.__setattr__(self, "phase", complex(self.phase))

    @classmethod
    def parse(cls, text: str) -> "PauliWord":
        m = _WORD_RE.match(_normalize_minus(text))
        if m is None:
            raise PauliError(f"cannot parse Pauli word {text!r}")
        return cls(m.group(2), _PHASES[m.group(1)])

    @property
    def n_qubits(self) -> int:
        return len(self.letters)

    def matrix(self) -> np.ndarray:
        return self.phase * reduce(np.kron, (_PAULI[c] for c in self.letters))

    def __str__(self) -> str:
        prefix = {1: "", -1: "-", 1j: "+i", -1j: "-i"}[self.phase]
        return prefix + self.letters


def parse_coefficient(text: str) -> complex:
    s = _normalize_minus(text).strip().replace(" ", "")
    if not s:
        raise PauliError("empty coefficient")
    try:
        return complex(s.replace("i", "j"))
    except ValueError as exc:
        raise PauliError(f"cannot parse coefficient {text!r}") from exc


def format_coefficient(c: complex) -> str:
    c = complex(c)
    if c.imag == 0:
        return repr(c.real)
    sign = "-" if c.imag < 0 else "+"
    return f"{c.real!r}{sign}{abs(c.imag)!r}i"


class PauliSum:
    """Linear combination of Pauli words with merged, pruned coefficients.

    Word phases are folded into the coefficients, so every stored word has
    phase +1 and no two terms share a letter string.
    """

    __slots__ = ("_coeffs", "_n")

    def __init__(self, terms: Iterable[tuple[complex, PauliWord | str]] = (),
                 prune: float = TOL.prune):
        coeffs: dict[str, complex] = {}
        n = None
        for coeff, word in terms:
            if isinstance(word, str):
                word = PauliWord.parse(word)
            if n is None:
                n = word.n_qubits
            elif word.n_qubits != n:
                raise PauliError(f"mixed word lengths {n} and {word.n_qubits}")
            coeffs[word.letters] = coeffs.get(word.letters, 0j) + complex(coeff) * word.phase
        self._coeffs = {k: v for k, v in coeffs.items() if abs(v) > prune}
        self._n = n

    @classmethod
    def from_dict(cls, coeffs: Mapping[str, complex]) -> "PauliSum":
        return cls((c, PauliWord(k)) for k, c in coeffs.items())

    @classmethod
    def parse(cls, text: str, prune: float = TOL.prune) -> "PauliSum":
        terms = []
        for entry in _normalize_minus(text).split(";"):
            entry = entry.strip()
            if not entry:
                continue
            if "*" in entry:
                coeff, word = entry.split("*", 1)
                terms.append((parse_coefficient(coeff), PauliWord.parse(word)))
            else:
                terms.append((1.0, PauliWord.parse(entry)))
        if not terms:
            raise PauliError("empty Pauli sum")
        return cls(terms, prune=prune)

    @property
    def n_qubits(self) -> int | None:
        return self._n

    @property
    def terms(self) -> list[tuple[complex, PauliWord]]:
        return [(c, PauliWord(k)) for k, c in self._coeffs.items()]

    def coefficients(self) -> dict[str, complex]:
        return dict(self._coeffs)

    def __len__(self) -> int:
        return len(self._coeffs)

    def __iter__(self):
        return iter(self.terms)

    def __eq__(self, other) -> bool:
        return isinstance(other, PauliSum) and self._coeffs == other._coeffs

    def __repr__(self) -> str:
        return f"PauliSum({self.to_text()!r})"

    def allclose(self, other: "PauliSum", atol: float = 1e-12) -> bool:
        keys = set(self._coeffs) | set(other._coeffs)
        return all(abs(self._coeffs.get(k, 0) - other._coeffs.get(k, 0)) <= atol for k in keys)

    def to_text(self) -> str:
        return ";".join(f"{format_coefficient(c)}*{k}" for k, c in self._coeffs.items())

    def is_hermitian(self, tol: float = TOL.hermitian) -> bool:
        return all(abs(c.imag) <= tol for c in self._coeffs.values())

    def support(self) -> tuple[int, ...]:
        """Qubit positions carrying a non-identity letter in some term."""
        return tuple(sorted({i for k in self._coeffs for i, c in enumerate(k) if c != "I"}))

    def lift(self, targets: Sequence[int], n: int) -> "PauliSum":
        """Place the letters of each word on ``targets`` of an ``n``-qubit word."""
        if self._n is not None and len(targets) != self._n:
            raise PauliError(f"{len(targets)} targets for {self._n}-qubit words")
        out = []
        for k, c in self._coeffs.items():
            letters = ["I"] * n
            for t, ch in zip(targets, k):
                letters[t] = ch
            out.append((c, PauliWord("".join(letters))))
        return PauliSum(out)

    def materialize(self) -> np.ndarray:
        if self._n is None:
            raise PauliError("cannot materialize an empty Pauli sum without a size")
        d = 2 ** self._n
        out = np.zeros((d, d), dtype=complex)
        for k, c in self._coeffs.items():
            out += c * PauliWord(k).matrix()
        return out


# (r, c) flattened as 2r + c  ->  letter coefficient Tr(P^dagger B) / 2
_DECOMP = 0.5 * np.array(
    [
        [1, 0, 0, 1],  # I
        [0, 1, 1, 0],  # X
        [0, 1j, -1j, 0],  # Y
        [1, 0, 0, -1],  # Z
    ],
    dtype=complex,
)


def pauli_decompose(a, n_qubits: int | None = None, prune: float = TOL.prune) -> PauliSum:
    """Expand ``a`` as ``sum_w c_w w`` with ``c_w = Tr(w^dagger a) / 2^n``.

    Runs in O(n 4^n) by contracting one qubit's (row, column) pair at a time.
    """
    a = as_matrix(a)
    d = a.shape[0]
    n = int(round(np.log2(d))) if d > 1 else 0
    if d < 2 or 2 ** n != d:
        raise DimensionError(f"dimension {d} is not a power of two")
    if n_qubits is not None and n_qubits != n:
        raise DimensionError(f"matrix of dim {d} is not on {n_qubits} qubits")
    t = a.reshape([2] * (2 * n))
    order = [ax for q in range(n) for ax in (q, n + q)]
    t = t.transpose(order).reshape([4] * n)
    for axis in range(n):
        t = np.moveaxis(np.tensordot(_DECOMP, t, axes=([1], [axis])), 0, axis)
    flat = t.reshape(-1)
    idx = np.nonzero(np.abs(flat) > prune)[0]
    terms = []
    for i in idx:
        letters = []
        rem = int(i)
        for _ in range(n):
            letters.append(LETTERS[rem % 4])
            rem //= 4
        terms.append((flat[i], PauliWord("".join(reversed(letters)))))
    out = PauliSum(terms, prune=prune)
    if not len(out):
        out._n = n
    return out


ComponentMap = Mapping[tuple[int, str], np.ndarray]


def _component_dim(component_map: ComponentMap, dim: int | None) -> int:
    dims = {m.shape for m in component_map.values()}
    if len(dims) > 1:
        raise DimensionError(f"components have mismatched shapes {sorted(dims)}")
    if dims:
        shape = dims.pop()
        if dim is not None and shape[0] != dim:
            raise DimensionError(f"components have dim {shape[0]}, expected {dim}")
        return shape[0]
    if dim is None:
        raise PauliError("no components supplied and no dimension given")
    return dim


def _component(component_map: ComponentMap, i: int, label: str) -> np.ndarray:
    try:
        return component_map[(i, label)]
    except KeyError:
        raise PauliError(f"missing component {label.upper()}_{i}") from None


def pauli_eval(f: PauliSum, component_map: ComponentMap, dim: int | None = None) -> np.ndarray:
    """Evaluate the polynomial ``f`` on the operators in ``component_map``.

    ``component_map[(i, "x")]`` and ``component_map[(i, "z")]`` stand for
    ``X_i`` and ``Z_i``; ``Y_i`` is ``i X_i Z_i`` and ``I`` the identity.
    """
    d = _component_dim(component_map, dim)
    out = np.zeros((d, d), dtype=complex)
    eye = None
    for c, word in f.terms:
        prod = None
        for i, ch in enumerate(word.letters):
            if ch == "I":
                continue
            if ch == "X":
                factor = _component(component_map, i, "x")
            elif ch == "Z":
                factor = _component(component_map, i, "z")
            else:
                factor = 1j * (_component(component_map, i, "x") @ _component(component_map, i, "z"))
            prod = factor if prod is None else prod @ factor
        if prod is None:
            if eye is None:
                eye = np.eye(d, dtype=complex)
            prod = eye
        out += c * prod
    return out


def pauli_apply(f: PauliSum, component_map: ComponentMap, vec: np.ndarray) -> np.ndarray:
    """``pauli_eval(f, component_map) @ vec`` using matrix-vector products only."""
    out = np.zeros_like(vec, dtype=complex)
    for c, word in f.terms:
        v = vec
        for i in reversed(range(len(word.letters))):
            ch = word.letters[i]
            if ch == "I":
                continue
            if ch == "X":
                v = _component(component_map, i, "x") @ v
            elif ch == "Z":
                v = _component(component_map, i, "z") @ v
            else:
                v = 1j * (_component(component_map, i, "x") @ (_component(component_map, i, "z") @ v))
        out += c * v
    return out
