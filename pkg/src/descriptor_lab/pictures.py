"""Schrödinger-picture oracle and the comparisons between the two pictures."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .algebra import (
    DimensionError,
    NotHermitianError,
    SystemLayout,
    apply_local,
    as_matrix,
    check_unitary,
    is_hermitian,
    max_abs,
    tensor_embed,
)
from .circuit import Circuit
from .config import TOL
from .descriptors import (
    DescriptorFrame,
    evolve_global,
    expectation,
    generators,
    init_frame,
    run_circuit,
)
from .pauli import PauliError, PauliSum

__all__ = [
    "SchrodingerState",
    "NoumenalClassQuery",
    "EquivalenceReport",
    "schrodinger_run",
    "born_expectation",
    "observable_matrix",
    "circuit_unitary",
    "instrumental_equivalence_check",
    "same_noumenal_class",
    "noumenal_class_report",
    "noninjectivity_witness",
    "projective_equal",
    "state_distance",
]

_PAULI = {
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


@dataclass(frozen=True)
class SchrodingerState:
    layout: SystemLayout
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (self.layout.total_dim,):
            raise DimensionError(f"state of shape {amps.shape} for dim {self.layout.total_dim}")
        norm = np.linalg.norm(amps)
        if abs(norm - 1) > TOL.norm:
            raise ValueError(f"state norm {norm!r} deviates from 1")
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def zero(cls, layout: SystemLayout) -> "SchrodingerState":
        amps = np.zeros(layout.total_dim, dtype=complex)
        amps[0] = 1
        return cls(layout, amps)

    def density(self) -> np.ndarray:
        return np.outer(self.amplitudes, self.amplitudes.conj())

    def reduced_density(self, subset: Sequence[int]) -> np.ndarray:
        """Partial trace over everything outside ``subset`` (kept in the given order)."""
        subset = self.layout.check_targets(subset)
        dims = self.layout.dims
        rest = [i for i in range(self.layout.n) if i not in subset]
        psi = self.amplitudes.reshape(dims).transpose(list(subset) + rest)
        ds = self.layout.sub_dim(subset)
        psi = psi.reshape(ds, -1)
        return psi @ psi.conj().T


def schrodinger_run(circuit: Circuit, layout: SystemLayout | None = None) -> SchrodingerState:
    """Apply each gate of ``circuit`` to ``|0...0>`` in order."""
    layout = circuit.layout if layout is None else layout
    if layout != circuit.layout:
        raise DimensionError("circuit was built for a different layout")
    circuit.validate()
    psi = SchrodingerState.zero(layout).amplitudes.copy()
    for op in circuit.ops:
        psi = apply_local(psi, op.local_matrix(layout), op.targets, layout.dims)
    return SchrodingerState(layout, psi)


def born_expectation(state: SchrodingerState, observable) -> float:
    o = as_matrix(observable)
    if o.shape[0] != state.layout.total_dim:
        raise DimensionError(f"observable of dim {o.shape[0]} for state dim {state.layout.total_dim}")
    if not is_hermitian(o):
        raise NotHermitianError("observable is not Hermitian")
    psi = state.amplitudes
    value = np.vdot(psi, o @ psi)
    if abs(value.imag) > TOL.imag_residue:
        raise ArithmeticError(f"expectation has imaginary residue {value.imag:.3e}")
    return float(value.real)


def observable_matrix(f: PauliSum, layout: SystemLayout) -> np.ndarray:
    """Dense matrix of a Pauli-sum observable, built by embedding each letter."""
    if f.n_qubits is not None and f.n_qubits != layout.n:
        raise DimensionError(f"observable on {f.n_qubits} qubits for {layout.n} subsystems")
    d = layout.total_dim
    out = np.zeros((d, d), dtype=complex)
    for c, word in f.terms:
        term = np.eye(d, dtype=complex)
        for s, ch in enumerate(word.letters):
            if ch == "I":
                continue
            if layout.dims[s] != 2:
                raise PauliError(f"Pauli letter on qudit subsystem {s}")
            term = term @ tensor_embed(_PAULI[ch], [s], layout)
        out += c * term
    return out


def circuit_unitary(circuit: Circuit) -> np.ndarray:
    """``U = G_t ... G_1`` for the whole circuit."""
    layout = circuit.layout
    u = np.eye(layout.total_dim, dtype=complex)
    for op in circuit.ops:
        u = tensor_embed(op.local_matrix(layout), op.targets, layout) @ u
    return u


@dataclass(frozen=True)
class EquivalenceReport:
    schrodinger: float
    agnostic: float
    heisenberg: float
    tolerance: float

    @property
    def max_difference(self) -> float:
        v = (self.schrodinger, self.agnostic, self.heisenberg)
        return max(abs(a - b) for a in v for b in v)

    @property
    def passed(self) -> bool:
        return self.max_difference <= self.tolerance

    def to_dict(self) -> dict:
        return {
            "schrodinger": self.schrodinger,
            "agnostic": self.agnostic,
            "heisenberg": self.heisenberg,
            "max_difference": self.max_difference,
            "tolerance": self.tolerance,
            "pass": self.passed,
        }


def instrumental_equivalence_check(circuit: Circuit, observable: PauliSum,
                                   layout: SystemLayout | None = None,
                                   tol: float = TOL.equivalence) -> EquivalenceReport:
    """Evaluate the Born expectation three ways.

    Schrödinger: ``<psi_t|O|psi_t>``; agnostic: ``<psi_0|U^dagger O U|psi_0>``;
    Heisenberg: ``<0|O_t|0>`` from the evolved descriptors.
    """
    layout = circuit.layout if layout is None else layout
    if not observable.is_hermitian():
        raise NotHermitianError(f"observable {observable.to_text()} is not Hermitian")
    o = observable_matrix(observable, layout)
    state = schrodinger_run(circuit, layout)
    s_val = born_expectation(state, o)
    u = circuit_unitary(circuit)
    psi0 = SchrodingerState.zero(layout).amplitudes
    a_val = float(np.vdot(psi0, u.conj().T @ o @ u @ psi0).real)
    frame = run_circuit(circuit, mode="step" if layout.all_qubits else "global")
    h_val = expectation(frame, observable)
    return EquivalenceReport(s_val, a_val, h_val, tol)


@dataclass(frozen=True)
class NoumenalClassQuery:
    u: np.ndarray
    u_prime: np.ndarray
    system: int
    layout: SystemLayout

    def __post_init__(self):
        d = self.layout.total_dim
        for m in (self.u, self.u_prime):
            if np.shape(m) != (d, d):
                raise DimensionError(f"unitary of shape {np.shape(m)} for dim {d}")
            check_unitary(m)
        if not 0 <= self.system < self.layout.n:
            raise DimensionError(f"system {self.system} out of range")


def noumenal_class_report(query: NoumenalClassQuery, tol: float = TOL.equivalence,
                          cross_check_max_dim: int = 64) -> dict:
    """Descriptor comparison plus, on small spaces, the factorization test.

    The factorization test asks whether ``D = u' u^dagger`` commutes with every
    operator on the queried system, i.e. ``D = 1 (x) W``.
    """
    layout, s = query.layout, query.system
    fa = evolve_global(init_frame(layout), query.u)
    fb = evolve_global(init_frame(layout), query.u_prime)
    delta = max(max_abs(fa[s][k] - fb[s][k]) for k in fa[s].labels)
    same = delta <= tol
    factorizes = None
    commutator = None
    if layout.total_dim <= cross_check_max_dim:
        dmat = query.u_prime @ query.u.conj().T
        commutator = max(
            max_abs(dmat @ g @ dmat.conj().T - g)
            for g in (tensor_embed(g, [s], layout) for g in generators(layout.dims[s]).values())
        )
        factorizes = commutator <= tol
    return {
        "system": s,
        "descriptor_delta": delta,
        "same_class": same,
        "factorization_commutator": commutator,
        "factorizes": factorizes,
        "agree": factorizes is None or factorizes == same,
        "tolerance": tol,
    }


def same_noumenal_class(query: NoumenalClassQuery, tol: float = TOL.equivalence) -> bool:
    """Decide ``[U]^S = [U']^S`` by comparing the evolved descriptors of ``S``."""
    return noumenal_class_report(query, tol)["same_class"]


def state_distance(a: SchrodingerState, b: SchrodingerState) -> float:
    """``1 - |<a|b>|``: zero exactly when the states agree up to phase."""
    if a.layout != b.layout:
        raise DimensionError("states live on different layouts")
    return max(0.0, 1.0 - abs(np.vdot(a.amplitudes, b.amplitudes)))


def projective_equal(a: SchrodingerState, b: SchrodingerState, tol: float = TOL.projective) -> bool:
    return abs(np.vdot(a.amplitudes, b.amplitudes)) >= 1 - tol


def _largest_component_gap(fa: DescriptorFrame, fb: DescriptorFrame) -> tuple[int, str, float]:
    best = (0, "", -1.0)
    for s in range(fa.layout.n):
        for k in fa[s].labels:
            gap = max_abs(fa[s][k] - fb[s][k])
            if gap > best[2]:
                best = (s, k, gap)
    return best


def noninjectivity_witness(layout: SystemLayout, circuit_a: Circuit | None = None,
                           circuit_b: Circuit | None = None, min_gap: float = 0.5):
    """Two circuits with projectively equal states but different descriptors.

    Defaults to the empty circuit against a single ``CZ(0, 1)``, both acting on
    ``|0...0>``. Returns ``(circuit_a, circuit_b, report)``; ``report["witness"]``
    is true when the pair exhibits the many-to-one map.
    """
    if circuit_a is None and circuit_b is None:
        if layout.n < 2 or layout.dims[0] != 2 or layout.dims[1] != 2:
            raise DimensionError("default witness needs qubits 0 and 1")
        circuit_a = Circuit(layout)
        circuit_b = Circuit(layout).then("CZ", 0, 1)
    sa, sb = schrodinger_run(circuit_a, layout), schrodinger_run(circuit_b, layout)
    mode = "step" if layout.all_qubits else "global"
    fa, fb = run_circuit(circuit_a, mode=mode), run_circuit(circuit_b, mode=mode)
    system, label, gap = _largest_component_gap(fa, fb)
    states_equal = projective_equal(sa, sb)
    descriptors_equal = gap <= TOL.locality
    report = {
        "state_distance": state_distance(sa, sb),
        "states_equal": states_equal,
        "descriptor_delta": gap,
        "descriptors_equal": descriptors_equal,
        "largest_gap_at": {"system": system, "component": label},
        "witness": states_equal and gap >= min_gap,
        "injectivity_violation": descriptors_equal and not states_equal,
    }
    return circuit_a, circuit_b, report
