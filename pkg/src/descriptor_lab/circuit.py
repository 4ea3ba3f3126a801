"""Circuits shared by both picture engines, and the JSON circuit file format.

Circuit file schema::

    {
      "qubits": 2,                      # number of subsystems
      "dims": [2, 3],                   # optional, defaults to all qubits
      "gates": [
        {"name": "H", "targets": [0]},
        {"name": "CNOT", "targets": [0, 1]},
        {"name": "RZ", "targets": [1], "params": [0.25]}
      ]
    }
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from .algebra import DimensionError, SystemLayout, as_matrix, check_unitary
from .gates import GateError, canonical_name, gate, gate_arity, gate_width

__all__ = [
    "CircuitError",
    "CircuitParseError",
    "Operation",
    "Circuit",
    "GateSpec",
    "CircuitFile",
    "parse_circuit_file",
    "load_circuit_file",
    "random_circuit",
    "RANDOM_GATESET",
]


class CircuitError(ValueError):
    pass


class CircuitParseError(CircuitError):
    """Circuit file error carrying a location (line/column/byte or JSON path)."""

    def __init__(self, message: str, *, line: int | None = None, column: int | None = None,
                 offset: int | None = None, path: str | None = None):
        self.line, self.column, self.offset, self.path = line, column, offset, path
        where = []
        if line is not None:
            where.append(f"line {line}, column {column} (byte offset {offset})")
        if path is not None:
            where.append(f"at {path}")
        super().__init__(f"{message} [{'; '.join(where)}]" if where else message)


@dataclass(frozen=True)
class Operation:
    """One gate application. ``matrix`` is set only for custom unitaries."""

    name: str
    targets: tuple[int, ...]
    params: tuple[float, ...] = ()
    matrix: np.ndarray | None = field(default=None, compare=False, repr=False)

    def local_matrix(self, layout: SystemLayout) -> np.ndarray:
        if self.matrix is not None:
            return self.matrix
        if len(self.targets) != gate_width(self.name):
            raise CircuitError(f"{self.name} acts on {gate_width(self.name)} subsystem(s), "
                               f"got targets {self.targets}")
        dims = {layout.dims[t] for t in self.targets}
        return gate(self.name, self.params, dim=dims.pop() if len(dims) == 1 else 2)


def make_operation(name: str, targets: Sequence[int], params: Sequence[float] = (),
                   matrix=None) -> Operation:
    targets = tuple(int(t) for t in targets)
    if matrix is not None:
        m = check_unitary(as_matrix(matrix))
        return Operation(str(name).upper(), targets, tuple(float(p) for p in params), m)
    key = canonical_name(name)
    params = tuple(float(p) for p in params)
    if gate_arity(key) != len(params):
        raise GateError(f"gate {key} takes {gate_arity(key)} parameter(s), got {len(params)}")
    return Operation(key, targets, params)


@dataclass(frozen=True)
class Circuit:
    layout: SystemLayout
    ops: tuple[Operation, ...] = ()

    def then(self, name: str, *targets: int, params: Sequence[float] = (), matrix=None) -> "Circuit":
        op = make_operation(name, targets, params, matrix)
        self.validate_op(op)
        return Circuit(self.layout, self.ops + (op,))

    def extend(self, other: "Circuit") -> "Circuit":
        if other.layout != self.layout:
            raise CircuitError("cannot join circuits on different layouts")
        return Circuit(self.layout, self.ops + other.ops)

    def validate_op(self, op: Operation) -> None:
        try:
            targets = self.layout.check_targets(op.targets)
        except DimensionError as exc:
            raise CircuitError(str(exc)) from exc
        m = op.local_matrix(self.layout)
        if m.shape[0] != self.layout.sub_dim(targets):
            raise CircuitError(f"{op.name} of dim {m.shape[0]} does not fit targets {targets}")

    def validate(self) -> "Circuit":
        for op in self.ops:
            self.validate_op(op)
        return self

    def __len__(self) -> int:
        return len(self.ops)


@dataclass(frozen=True)
class GateSpec:
    name: str
    targets: tuple[int, ...]
    params: tuple[float, ...] = ()

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"name": self.name, "targets": list(self.targets)}
        if self.params:
            out["params"] = list(self.params)
        return out


@dataclass(frozen=True)
class CircuitFile:
    qubits: int
    gates: tuple[GateSpec, ...]
    dims: tuple[int, ...] | None = None

    @property
    def layout(self) -> SystemLayout:
        return SystemLayout(self.dims if self.dims is not None else (2,) * self.qubits)

    def to_circuit(self) -> Circuit:
        circuit = Circuit(self.layout)
        for i, g in enumerate(self.gates):
            try:
                circuit = circuit.then(g.name, *g.targets, params=g.params)
            except (CircuitError, GateError) as exc:
                raise CircuitParseError(str(exc), path=f"gates[{i}]") from exc
        return circuit

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"qubits": self.qubits}
        if self.dims is not None:
            out["dims"] = list(self.dims)
        out["gates"] = [g.to_dict() for g in self.gates]
        return out

    def dumps(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    @classmethod
    def from_circuit(cls, circuit: Circuit) -> "CircuitFile":
        if any(op.matrix is not None for op in circuit.ops):
            raise CircuitError("custom-matrix operations have no circuit-file form")
        dims = circuit.layout.dims
        return cls(
            qubits=len(dims),
            gates=tuple(GateSpec(op.name, op.targets, op.params) for op in circuit.ops),
            dims=None if all(d == 2 for d in dims) else dims,
        )


def _is_int(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def _is_real(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool) and np.isfinite(x)


def parse_circuit_file(text: str | bytes) -> CircuitFile:
    """Parse and validate a circuit file; errors carry their location."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        offset = len(text[: exc.pos].encode("utf-8"))
        raise CircuitParseError(f"malformed JSON: {exc.msg}", line=exc.lineno,
                                column=exc.colno, offset=offset) from None
    if not isinstance(doc, dict):
        raise CircuitParseError("top level must be an object", path="$")
    unknown = set(doc) - {"qubits", "dims", "gates"}
    if unknown:
        raise CircuitParseError(f"unknown field(s) {sorted(unknown)}", path="$")
    qubits = doc.get("qubits")
    if not _is_int(qubits) or qubits < 1:
        raise CircuitParseError("'qubits' must be a positive integer", path="qubits")
    dims = doc.get("dims")
    if dims is not None:
        if not isinstance(dims, list) or not all(_is_int(d) and d >= 2 for d in dims):
            raise CircuitParseError("'dims' must be a list of integers >= 2", path="dims")
        if len(dims) != qubits:
            raise CircuitParseError(f"'dims' has {len(dims)} entries for {qubits} subsystems",
                                    path="dims")
        dims = tuple(dims)
    gates_raw = doc.get("gates", [])
    if not isinstance(gates_raw, list):
        raise CircuitParseError("'gates' must be a list", path="gates")
    gates = []
    for i, g in enumerate(gates_raw):
        path = f"gates[{i}]"
        if not isinstance(g, dict):
            raise CircuitParseError("gate entry must be an object", path=path)
        extra = set(g) - {"name", "targets", "params"}
        if extra:
            raise CircuitParseError(f"unknown field(s) {sorted(extra)}", path=path)
        name = g.get("name")
        if not isinstance(name, str):
            raise CircuitParseError("'name' must be a string", path=f"{path}.name")
        try:
            key = canonical_name(name)
        except GateError as exc:
            raise CircuitParseError(str(exc), path=f"{path}.name") from None
        targets = g.get("targets")
        if not isinstance(targets, list) or not targets or not all(_is_int(t) for t in targets):
            raise CircuitParseError("'targets' must be a non-empty list of integers",
                                    path=f"{path}.targets")
        params = g.get("params", [])
        if not isinstance(params, list) or not all(_is_real(p) for p in params):
            raise CircuitParseError("'params' must be a list of finite numbers",
                                    path=f"{path}.params")
        gates.append(GateSpec(key, tuple(targets), tuple(float(p) for p in params)))
    cf = CircuitFile(qubits=qubits, gates=tuple(gates), dims=dims)
    try:
        cf.to_circuit()
    except DimensionError as exc:
        raise CircuitParseError(str(exc), path="$") from None
    return cf


def load_circuit_file(path) -> CircuitFile:
    with open(path, "rb") as fh:
        return parse_circuit_file(fh.read())


RANDOM_GATESET = (
    ("H", 1, 0), ("S", 1, 0), ("SDG", 1, 0), ("T", 1, 0), ("TDG", 1, 0),
    ("X", 1, 0), ("Y", 1, 0), ("Z", 1, 0), ("SX", 1, 0),
    ("RX", 1, 1), ("RY", 1, 1), ("RZ", 1, 1),
    ("CNOT", 2, 0), ("CZ", 2, 0), ("SWAP", 2, 0), ("CP", 2, 1),
)


def random_circuit(n_qubits: int, n_gates: int, rng: np.random.Generator,
                   gateset=RANDOM_GATESET) -> Circuit:
    """Random Clifford+T+rotation circuit with ``n_gates`` gates."""
    layout = SystemLayout.qubits(n_qubits)
    usable = [g for g in gateset if g[1] <= n_qubits]
    circuit = Circuit(layout)
    for _ in range(n_gates):
        name, width, arity = usable[rng.integers(len(usable))]
        targets = rng.choice(n_qubits, size=width, replace=False)
        params = rng.uniform(-np.pi, np.pi, size=arity)
        circuit = circuit.then(name, *map(int, targets), params=params)
    return circuit
