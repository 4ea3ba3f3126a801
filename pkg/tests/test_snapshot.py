import numpy as np
import pytest

from descriptor_lab.algebra import SystemLayout, haar_unitary
from descriptor_lab.descriptors import evolve_global, init_frame, make_event, evolve_step
from descriptor_lab.snapshot import dumps, frame_to_dict, loads


def _same(a, b):
    assert a.layout == b.layout and a.time == b.time
    assert np.array_equal(a.reference, b.reference)
    assert np.array_equal(a.cumulative, b.cumulative)
    for s in range(a.layout.n):
        assert a[s].labels == b[s].labels
        for k in a[s].labels:
            assert np.array_equal(a[s][k], b[s][k])


def test_fresh_frame_uses_pauli_text():
    f = init_frame(SystemLayout.qubits(2))
    doc = frame_to_dict(f)
    assert doc["descriptors"][0]["components"]["x"] == {"pauli": "1.0*XI"}
    _same(f, loads(dumps(f)))


def test_random_frame_round_trips_bit_exact():
    f = evolve_global(init_frame(SystemLayout.qubits(3)), haar_unitary(8, np.random.default_rng(5)))
    _same(f, loads(dumps(f, indent=1)))


def test_qudit_frame_is_dense():
    f = evolve_global(init_frame(SystemLayout([3, 2])), haar_unitary(6, np.random.default_rng(1)))
    doc = frame_to_dict(f)
    assert "dense" in doc["descriptors"][0]["components"]["E_{0,0}"]
    _same(f, loads(dumps(f)))


def test_stepped_frame_round_trips():
    f = init_frame(SystemLayout.qubits(2))
    f = evolve_step(f, make_event("H", [0], layout=f.layout))
    _same(f, loads(dumps(f)))


def test_rejects_unknown_format():
    with pytest.raises(ValueError):
        loads('{"format": "other"}')
