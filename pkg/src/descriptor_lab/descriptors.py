"""Heisenberg-picture engine: descriptor frames and their evolution.

A frame holds, for every subsystem, the time-evolved generators of that
subsystem's operator algebra (``x`` and ``z`` for a qubit, the matrix units
``E_{j,i}`` for a qudit) together with the fixed reference vector ``|0...0>``.

Two evolution laws are provided:

* :func:`evolve_global` conjugates every component by a global unitary,
  ``q(t) = u^dagger q u``.
* :func:`evolve_step` applies a gate *after* everything seen so far. The gate
  is rebuilt from the current components of its targets,
  ``M = f_G(q_S(t-1))``, and every component is conjugated by ``M``.

``frame.cumulative`` records the accumulated global unitary. It exists for
test oracles only; nothing here reads it to produce results.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .algebra import (
    DimensionError,
    NotUnitaryError,
    SystemLayout,
    as_matrix,
    check_unitary,
    max_abs,
    tensor_embed,
)
from .circuit import Circuit, Operation
from .config import TOL
from .pauli import PauliError, PauliSum, pauli_apply, pauli_decompose, pauli_eval

__all__ = [
    "StepModeError",
    "RecoveryError",
    "Descriptor",
    "DescriptorFrame",
    "GateEvent",
    "LocalityAudit",
    "generators",
    "unit_label",
    "init_frame",
    "evolve_global",
    "evolve_step",
    "make_event",
    "locality_audit",
    "reconstruct_density",
    "expectation",
    "recover_unitary",
    "run_circuit",
    "frame_delta",
    "descriptor_delta",
]

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)


class StepModeError(ValueError):
    """Step-wise evolution was requested where it is not supported."""


class RecoveryError(RuntimeError):
    pass


def _frozen(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


def unit_label(j: int, i: int) -> str:
    """Component label for the qudit matrix unit ``|j><i|``."""
    return f"E_{{{j},{i}}}"


def generators(d: int) -> dict[str, np.ndarray]:
    """Generating set of one subsystem: ``(x, z)`` for qubits, matrix units otherwise."""
    if d == 2:
        return {"x": SIGMA_X.copy(), "z": SIGMA_Z.copy()}
    out = {}
    for j in range(d):
        for i in range(d):
            e = np.zeros((d, d), dtype=complex)
            e[j, i] = 1
            out[unit_label(j, i)] = e
    return out


@dataclass(frozen=True)
class Descriptor:
    system: int
    components: Mapping[str, np.ndarray]

    def __getitem__(self, label: str) -> np.ndarray:
        return self.components[label]

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(self.components)


@dataclass(frozen=True)
class DescriptorFrame:
    layout: SystemLayout
    reference: np.ndarray
    descriptors: tuple[Descriptor, ...]
    time: int = 0
    cumulative: np.ndarray = field(default=None, repr=False)

    def __getitem__(self, system: int) -> Descriptor:
        return self.descriptors[system]

    def component_map(self, systems: Sequence[int] | None = None) -> dict[tuple[int, str], np.ndarray]:
        """``(index, "x"|"z") -> component`` for qubit systems.

        With ``systems`` given, keys use positions within ``systems`` so the
        map can feed a functional written on those targets alone.
        """
        local = systems is not None
        systems = systems if local else range(self.layout.n)
        out = {}
        for pos, s in enumerate(systems):
            if self.layout.dims[s] != 2:
                continue
            key = pos if local else s
            out[(key, "x")] = self.descriptors[s]["x"]
            out[(key, "z")] = self.descriptors[s]["z"]
        return out

    def _with(self, descriptors, cumulative) -> "DescriptorFrame":
        return DescriptorFrame(self.layout, self.reference, tuple(descriptors), self.time + 1,
                               _frozen(cumulative))


def init_frame(layout: SystemLayout) -> DescriptorFrame:
    """Descriptors at time 0: each generator embedded on its own subsystem."""
    d = layout.total_dim
    reference = np.zeros(d, dtype=complex)
    reference[0] = 1
    descriptors = []
    for s, ds in enumerate(layout.dims):
        comps = {label: _frozen(tensor_embed(g, [s], layout)) for label, g in generators(ds).items()}
        descriptors.append(Descriptor(s, comps))
    return DescriptorFrame(layout, _frozen(reference), tuple(descriptors), 0,
                           _frozen(np.eye(d, dtype=complex)))


def _conjugate_all(frame: DescriptorFrame, m: np.ndarray) -> list[Descriptor]:
    mh = m.conj().T
    return [
        Descriptor(desc.system, {k: _frozen(mh @ (c @ m)) for k, c in desc.components.items()})
        for desc in frame.descriptors
    ]


def _conjugate_commutator(c: np.ndarray, m: np.ndarray, mh: np.ndarray) -> np.ndarray:
    """``m^dagger c m`` written as ``c + m^dagger [c, m]`` for unitary ``m``.

    When ``c`` and ``m`` commute in floating point the result is ``c`` bit for
    bit, where the plain triple product would pick up rounding noise.
    """
    comm = c @ m - m @ c
    if not comm.any():
        return c
    return c + mh @ comm


def evolve_global(frame: DescriptorFrame, u) -> DescriptorFrame:
    """Conjugate every component by ``u``; cumulative becomes ``cumulative @ u``."""
    u = as_matrix(u)
    if u.shape[0] != frame.layout.total_dim:
        raise DimensionError(f"unitary of dim {u.shape[0]} for a frame of dim {frame.layout.total_dim}")
    check_unitary(u)
    return frame._with(_conjugate_all(frame, u), frame.cumulative @ u)


@dataclass(frozen=True)
class GateEvent:
    """A gate on qubit targets together with its functional form.

    ``functional`` is written on the targets alone (word position ``k`` is
    ``targets[k]``), and materializes to ``matrix``.
    """

    name: str
    params: tuple[float, ...]
    targets: tuple[int, ...]
    matrix: np.ndarray = field(repr=False)
    functional: PauliSum = field(repr=False)

    def defect(self) -> float:
        """Max-norm distance between the functional at time 0 and the gate."""
        return max_abs(self.functional.materialize() - self.matrix)

    def verify(self, tol: float = TOL.unitary) -> None:
        err = self.defect()
        if err > tol:
            raise StepModeError(f"functional of {self.name} does not reproduce the gate (err {err:.3e})")


def make_event(name: str, targets: Sequence[int], params: Sequence[float] = (),
               matrix=None, layout: SystemLayout | None = None) -> GateEvent:
    from .gates import gate

    targets = tuple(int(t) for t in targets)
    if layout is not None:
        layout.check_targets(targets)
        bad = [t for t in targets if layout.dims[t] != 2]
        if bad:
            raise StepModeError(f"step evolution needs qubit targets; {bad} are qudits")
    m = gate(name, params) if matrix is None else check_unitary(as_matrix(matrix))
    if m.shape[0] != 2 ** len(targets):
        raise DimensionError(f"{name} of dim {m.shape[0]} does not fit {len(targets)} qubit target(s)")
    event = GateEvent(str(name).upper(), tuple(float(p) for p in params), targets, m,
                      pauli_decompose(m))
    event.verify()
    return event


def event_from_operation(op: Operation, layout: SystemLayout) -> GateEvent:
    return make_event(op.name, op.targets, op.params, matrix=op.local_matrix(layout), layout=layout)


def evolve_step(frame: DescriptorFrame, event: GateEvent) -> DescriptorFrame:
    """Apply ``event`` after the history already in ``frame``."""
    layout = frame.layout
    layout.check_targets(event.targets)
    bad = [t for t in event.targets if layout.dims[t] != 2]
    if bad:
        raise StepModeError(f"step evolution needs qubit targets; {bad} are qudits")
    event.verify()
    m = pauli_eval(event.functional, frame.component_map(event.targets), dim=layout.total_dim)
    eye = np.eye(layout.total_dim, dtype=complex)
    gram = m.conj().T @ m
    defect = max_abs(gram - eye)
    if defect > TOL.step_global:
        raise NotUnitaryError(f"rebuilt {event.name} is not unitary (defect {defect:.3e})")
    # One Newton-Schulz polar step. Without it the rounding error of the
    # components feeds back through M and grows geometrically with depth.
    # It is the identity on an exactly unitary M.
    m = m @ (1.5 * eye - 0.5 * gram)
    mh = m.conj().T
    descriptors = [
        Descriptor(desc.system,
                   {k: _frozen(_conjugate_commutator(c, m, mh)) for k, c in desc.components.items()})
        for desc in frame.descriptors
    ]
    cumulative = tensor_embed(event.matrix, event.targets, layout) @ frame.cumulative
    return frame._with(descriptors, cumulative)


@dataclass(frozen=True)
class LocalityAudit:
    targets: tuple[int, ...]
    deltas: tuple[float, ...]
    tolerance: float
    passed: bool

    @property
    def max_off_target(self) -> float:
        off = [d for s, d in enumerate(self.deltas) if s not in self.targets]
        return max(off) if off else 0.0

    def to_dict(self) -> dict:
        return {
            "targets": list(self.targets),
            "deltas": list(self.deltas),
            "max_off_target": self.max_off_target,
            "tolerance": self.tolerance,
            "pass": self.passed,
        }


def descriptor_delta(a: DescriptorFrame, b: DescriptorFrame, system: int) -> float:
    da, db = a[system], b[system]
    return max(max_abs(da[k] - db[k]) for k in da.labels)


def frame_delta(a: DescriptorFrame, b: DescriptorFrame) -> float:
    if a.layout != b.layout:
        raise DimensionError("frames have different layouts")
    return max(descriptor_delta(a, b, s) for s in range(a.layout.n))


def locality_audit(before: DescriptorFrame, after: DescriptorFrame, targets: Iterable[int],
                   tol: float = TOL.locality) -> LocalityAudit:
    if before.layout != after.layout:
        raise DimensionError("frames have different layouts")
    if not np.array_equal(before.reference, after.reference):
        raise ValueError("frames have different reference vectors")
    if after.time != before.time + 1:
        raise ValueError(f"audit needs consecutive frames, got times {before.time} and {after.time}")
    targets = tuple(sorted(int(t) for t in targets))
    deltas = tuple(descriptor_delta(before, after, s) for s in range(before.layout.n))
    passed = all(d <= tol for s, d in enumerate(deltas) if s not in targets)
    return LocalityAudit(targets, deltas, tol, passed)


def _apply_unit(frame: DescriptorFrame, system: int, j: int, i: int, v: np.ndarray) -> np.ndarray:
    """Apply the evolved matrix unit ``|j><i|`` of ``system`` to ``v``.

    Qubit units come from ``x`` and ``z`` through ``|0><0| = (1+z)/2``,
    ``|1><1| = (1-z)/2``, ``|1><0| = x(1+z)/2``, ``|0><1| = x(1-z)/2``.
    """
    desc = frame[system]
    if frame.layout.dims[system] != 2:
        return desc[unit_label(j, i)] @ v
    zv = desc["z"] @ v
    proj = (v + zv) / 2 if i == 0 else (v - zv) / 2
    return proj if j == i else desc["x"] @ proj


def _digits(index: int, dims: Sequence[int]) -> list[int]:
    out = []
    for d in reversed(dims):
        out.append(index % d)
        index //= d
    return out[::-1]


def _apply_units(frame: DescriptorFrame, systems: Sequence[int], rows: Sequence[int],
                 cols: Sequence[int], v: np.ndarray) -> np.ndarray:
    for s, j, i in zip(reversed(systems), reversed(rows), reversed(cols)):
        v = _apply_unit(frame, s, j, i, v)
    return v


def reconstruct_density(frame: DescriptorFrame, subset: Sequence[int]) -> np.ndarray:
    """Reduced density matrix of ``subset`` read off the descriptors.

    ``rho[i, j] = <0| f_ij(q(t)) |0>`` where ``f_ij`` builds ``|j><i|`` on the
    subset from the subset's own components. The products are expanded as a
    tree of matrix-vector applications starting from the reference vector.
    """
    subset = frame.layout.check_targets(subset)
    dims = [frame.layout.dims[s] for s in subset]
    # level k holds f(prod of units on subset[k:]) |0> keyed by (rows, cols)
    level: dict[tuple[tuple[int, ...], tuple[int, ...]], np.ndarray] = {((), ()): frame.reference}
    for s, d in zip(reversed(subset), reversed(dims)):
        nxt = {}
        for (rows, cols), v in level.items():
            for j in range(d):
                for i in range(d):
                    nxt[((j,) + rows, (i,) + cols)] = _apply_unit(frame, s, j, i, v)
        level = nxt
    dim = int(np.prod(dims))
    rho = np.zeros((dim, dim), dtype=complex)
    ref = frame.reference.conj()
    strides = [int(np.prod(dims[k + 1:])) for k in range(len(dims))]
    for (rows, cols), v in level.items():
        # the unit |j><i| gives the element rho[i, j]
        i_idx = sum(c * st for c, st in zip(cols, strides))
        j_idx = sum(r * st for r, st in zip(rows, strides))
        rho[i_idx, j_idx] = ref @ v
    return rho


def _observable_on_layout(frame: DescriptorFrame, observable: PauliSum,
                          targets: Sequence[int] | None) -> PauliSum:
    n = frame.layout.n
    if targets is not None:
        targets = frame.layout.check_targets(targets)
        observable = observable.lift(targets, n)
    if observable.n_qubits is not None and observable.n_qubits != n:
        raise DimensionError(f"observable on {observable.n_qubits} qubits for {n} subsystems")
    for s in observable.support():
        if frame.layout.dims[s] != 2:
            raise PauliError(f"Pauli letter on qudit subsystem {s}")
    return observable


def expectation(frame: DescriptorFrame, observable: PauliSum,
                targets: Sequence[int] | None = None) -> float:
    """``<0| f_O(q(t)) |0>`` for a Hermitian Pauli-sum observable."""
    from .algebra import NotHermitianError

    if not observable.is_hermitian():
        raise NotHermitianError(f"observable {observable.to_text()} is not Hermitian")
    if not len(observable):
        return 0.0
    observable = _observable_on_layout(frame, observable, targets)
    value = np.vdot(frame.reference, pauli_apply(observable, frame.component_map(), frame.reference))
    if abs(value.imag) > TOL.imag_residue:
        raise ArithmeticError(f"expectation has imaginary residue {value.imag:.3e}")
    return float(value.real)


def recover_unitary(frame: DescriptorFrame) -> np.ndarray:
    """Rebuild the global unitary (up to phase) from the descriptors alone.

    Uses ``<l| U^dagger |j><i| U |k> = conj(u_jl) u_ik``. With ``l = 0`` and a
    pivot row ``j`` for which ``|u_j0|`` is large, the evolved units
    ``|j><i|`` give ``conj(u_j0) u_ik`` for every ``i, k``. The phase is fixed
    so the first non-negligible entry of column 0 is real and positive.
    """
    layout = frame.layout
    dims = layout.dims
    systems = tuple(range(layout.n))
    d = layout.total_dim
    e0 = np.zeros(d, dtype=complex)
    e0[0] = 1

    def weight(j: int) -> float:
        # <0| U^dagger |j><j| U |0> = |u_j0|^2
        dj = _digits(j, dims)
        return float(np.real(_apply_units(frame, systems, dj, dj, e0)[0]))

    pivot, w = 0, weight(0)
    if w < TOL.pivot ** 2:
        weights = np.array([weight(j) for j in range(d)])
        pivot = int(np.argmax(weights))
        w = float(weights[pivot])
        if w < TOL.pivot ** 2:
            raise RecoveryError("no usable pivot entry; the frame is not unitary evolution of a basis")
    dp = _digits(pivot, dims)
    rows = np.empty((d, d), dtype=complex)
    for i in range(d):
        # row 0 of f(|p><i|) is the conjugate of column 0 of f(|i><p|)
        rows[i] = np.conj(_apply_units(frame, systems, _digits(i, dims), dp, e0))
    u = rows / np.sqrt(w)
    col = u[:, 0]
    first = int(np.argmax(np.abs(col) > TOL.pivot))
    u = u * (abs(col[first]) / col[first])
    u[first, 0] = abs(col[first])
    return u


def run_circuit(circuit: Circuit, mode: str = "step", audit: bool = False):
    """Run a circuit on a fresh frame.

    ``mode="step"`` applies each gate with :func:`evolve_step` (qubit targets
    only); ``mode="global"`` conjugates once by the product of the embedded
    gates. With ``audit=True`` returns ``(frame, audits)``.
    """
    frame = init_frame(circuit.layout)
    audits: list[LocalityAudit] = []
    if mode == "global":
        u = np.eye(circuit.layout.total_dim, dtype=complex)
        for op in circuit.ops:
            u = tensor_embed(op.local_matrix(circuit.layout), op.targets, circuit.layout) @ u
        frame = evolve_global(frame, u)
    elif mode == "step":
        for op in circuit.ops:
            after = evolve_step(frame, event_from_operation(op, circuit.layout))
            if audit:
                audits.append(locality_audit(frame, after, op.targets))
            frame = after
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return (frame, audits) if audit else frame
