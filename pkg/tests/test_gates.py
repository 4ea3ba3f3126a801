import numpy as np
import pytest

from descriptor_lab.algebra import is_unitary
from descriptor_lab.gates import GATE_NAMES, GateError, canonical_name, gate, gate_arity, gate_width


def test_z_and_rz_definitions():
    assert np.array_equal(gate("Z"), np.diag([1, -1]))
    assert np.allclose(gate("RZ", [np.pi]), np.diag([np.exp(-1j * np.pi / 2), np.exp(1j * np.pi / 2)]))


def test_cnot_involution():
    assert np.array_equal(gate("CNOT") @ gate("CNOT"), np.eye(4))


@pytest.mark.parametrize("name", GATE_NAMES)
def test_every_gate_is_unitary(name):
    params = [0.37 * (k + 1) for k in range(gate_arity(name))]
    dims = (3, 5) if name in ("SHIFT", "CLOCK", "DFT") else (2,)
    for d in dims:
        m = gate(name, params, dim=d)
        assert m.shape[0] == d ** gate_width(name)
        assert is_unitary(m)


def test_names_are_case_insensitive_and_aliased():
    assert canonical_name("cx") == "CNOT"
    assert np.array_equal(gate("h"), gate("H"))
    assert np.array_equal(gate("sdag"), gate("SDG"))


def test_rotations_match_exponentials():
    x = np.array([[0, 1], [1, 0]])
    t = 0.81
    expected = np.cos(t / 2) * np.eye(2) - 1j * np.sin(t / 2) * x
    assert np.allclose(gate("RX", [t]), expected, atol=1e-15)


def test_qudit_shift_and_clock_commutation():
    d = 3
    w = np.exp(2j * np.pi / d)
    s, c = gate("SHIFT", dim=d), gate("CLOCK", dim=d)
    assert np.allclose(c @ s, w * s @ c)


@pytest.mark.parametrize("name,params", [("FOO", []), ("RX", []), ("H", [1.0])])
def test_gate_errors(name, params):
    with pytest.raises(GateError):
        gate(name, params)


def test_qubit_gate_rejects_qudit_dim():
    with pytest.raises(GateError):
        gate("H", dim=3)
