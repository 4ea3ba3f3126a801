import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from descriptor_lab.algebra import SystemLayout
from descriptor_lab.circuit import (
    Circuit,
    CircuitError,
    CircuitFile,
    CircuitParseError,
    load_circuit_file,
    parse_circuit_file,
    random_circuit,
)
from descriptor_lab.gates import GATE_NAMES, gate_arity, gate_width
from pathlib import Path

DOCS = Path(__file__).resolve().parents[1] / "docs" / "circuits"


@pytest.mark.parametrize("name", ["bell", "ghz", "teleport", "empty", "qutrit"])
def test_doc_circuits_parse(name):
    cf = load_circuit_file(DOCS / f"{name}.json")
    assert parse_circuit_file(cf.dumps()) == cf


def test_names_are_case_insensitive():
    cf = parse_circuit_file('{"qubits": 2, "gates": [{"name": "cx", "targets": [0, 1]}]}')
    assert cf.gates[0].name == "CNOT"


def test_malformed_json_reports_position():
    text = '{"qubits": 2,\n  "gates": [}'
    with pytest.raises(CircuitParseError) as info:
        parse_circuit_file(text)
    err = info.value
    assert (err.line, err.column) == (2, 13)
    assert err.offset == text.index("}")
    assert "byte offset" in str(err)


def test_byte_offset_counts_utf8():
    text = '{"qubits": 1, "x": "é",,}'
    with pytest.raises(CircuitParseError) as info:
        parse_circuit_file(text)
    assert info.value.offset == len(text[: text.index(",,") + 1].encode())


@pytest.mark.parametrize("doc,path", [
    ([], "$"),
    ({"qubits": 0}, "qubits"),
    ({"qubits": 2, "extra": 1}, "$"),
    ({"qubits": 2, "dims": [2]}, "dims"),
    ({"qubits": 1, "gates": {}}, "gates"),
    ({"qubits": 1, "gates": [{"name": "NOPE", "targets": [0]}]}, "gates[0].name"),
    ({"qubits": 1, "gates": [{"name": "H", "targets": []}]}, "gates[0].targets"),
    ({"qubits": 1, "gates": [{"name": "RX", "targets": [0], "params": ["a"]}]}, "gates[0].params"),
    ({"qubits": 1, "gates": [{"name": "H", "targets": [0]}, {"name": "H", "targets": [1]}]}, "gates[1]"),
    ({"qubits": 2, "gates": [{"name": "RX", "targets": [0]}]}, "gates[0]"),
    ({"qubits": 2, "gates": [{"name": "CNOT", "targets": [0]}]}, "gates[0]"),
])
def test_schema_errors_carry_path(doc, path):
    with pytest.raises(CircuitParseError) as info:
        parse_circuit_file(json.dumps(doc))
    assert info.value.path == path


gate_entries = st.sampled_from([g for g in GATE_NAMES if g not in ("SHIFT", "CLOCK", "DFT")])


@given(st.lists(gate_entries, max_size=8), st.integers(0, 10_000))
def test_parse_serialize_round_trip(names, seed):
    rng = np.random.default_rng(seed)
    n = 3
    gates = []
    for name in names:
        targets = [int(t) for t in rng.choice(n, size=gate_width(name), replace=False)]
        entry = {"name": name.lower(), "targets": targets}
        if gate_arity(name):
            entry["params"] = [float(p) for p in rng.uniform(-3, 3, size=gate_arity(name))]
        gates.append(entry)
    cf = parse_circuit_file(json.dumps({"qubits": n, "gates": gates}))
    again = parse_circuit_file(cf.dumps())
    assert again == cf
    assert parse_circuit_file(again.dumps(indent=None)) == cf


def test_from_circuit_round_trip():
    c = random_circuit(3, 10, np.random.default_rng(2))
    cf = CircuitFile.from_circuit(c)
    assert cf.to_circuit() == c
    with pytest.raises(CircuitError):
        CircuitFile.from_circuit(Circuit(SystemLayout.qubits(1)).then("U", 0, matrix=np.eye(2)))


def test_circuit_builder_validates():
    c = Circuit(SystemLayout.qubits(2))
    with pytest.raises(CircuitError):
        c.then("CNOT", 0)
    with pytest.raises(Exception):
        c.then("H", 5)
    assert len(c.then("H", 0).then("CZ", 0, 1)) == 2


def test_random_circuit_is_seeded():
    a = random_circuit(4, 15, np.random.default_rng(9))
    b = random_circuit(4, 15, np.random.default_rng(9))
    assert a == b and len(a) == 15
