import numpy as np
import pytest
from hypothesis import given, strategies as st

from descriptor_lab.algebra import (
    DimensionError,
    NotUnitaryError,
    SystemLayout,
    commutator_norm,
    haar_unitary,
    max_abs,
    tensor_embed,
)
from descriptor_lab.circuit import Circuit, random_circuit
from descriptor_lab.descriptors import (
    StepModeError,
    descriptor_delta,
    evolve_global,
    evolve_step,
    expectation,
    frame_delta,
    init_frame,
    locality_audit,
    make_event,
    reconstruct_density,
    recover_unitary,
    run_circuit,
    unit_label,
)
from descriptor_lab.pauli import PauliSum
from descriptor_lab.algebra import NotHermitianError
from descriptor_lab.suites import phase_aligned_distance

from conftest import CNOT, CZ, H, I2, X, Z, brute_embed, kron, partial_trace, statevector


def _step(frame, name, *targets, params=()):
    return evolve_step(frame, make_event(name, targets, params, layout=frame.layout))


def bell_frame(n=2):
    f = init_frame(SystemLayout.qubits(n))
    return _step(_step(f, "H", 0), "CNOT", 0, 1)


# ---- init_frame

def test_init_one_qubit():
    f = init_frame(SystemLayout.qubits(1))
    assert np.array_equal(f[0]["x"], X) and np.array_equal(f[0]["z"], Z)
    assert f.time == 0 and np.array_equal(f.cumulative, np.eye(2))
    assert np.array_equal(f.reference, [1, 0])


def test_init_two_qubits():
    f = init_frame(SystemLayout.qubits(2))
    assert np.array_equal(f[1]["x"], kron(I2, X)) and np.array_equal(f[1]["z"], kron(I2, Z))


def test_init_qutrit_units():
    f = init_frame(SystemLayout([2, 3]))
    assert len(f[1].labels) == 9
    for j in range(3):
        for i in range(3):
            e = np.zeros((3, 3))
            e[j, i] = 1
            assert np.array_equal(f[1][unit_label(j, i)], kron(I2, e))


def test_reference_is_sharp_on_z():
    f = init_frame(SystemLayout([2, 3, 2]))
    for q in (0, 2):
        assert f.reference.conj() @ f[q]["z"] @ f.reference == 1


def test_frame_arrays_are_read_only():
    f = init_frame(SystemLayout.qubits(1))
    with pytest.raises(ValueError):
        f[0]["x"][0, 0] = 5


# ---- evolve_global

def test_global_identity_advances_time_only():
    f = init_frame(SystemLayout.qubits(2))
    g = evolve_global(f, np.eye(4))
    assert g.time == 1 and frame_delta(f, g) == 0


def test_global_x_flips_z():
    f = init_frame(SystemLayout.qubits(2))
    g = evolve_global(f, kron(X, I2))
    assert np.array_equal(g[0]["z"], -f[0]["z"]) and np.array_equal(g[0]["x"], f[0]["x"])


def test_global_cz():
    g = evolve_global(init_frame(SystemLayout.qubits(2)), CZ)
    assert np.array_equal(g[0]["x"], kron(X, Z))
    assert np.array_equal(g[1]["x"], kron(Z, X))
    assert np.array_equal(g[0]["z"], kron(Z, I2)) and np.array_equal(g[1]["z"], kron(I2, Z))


def test_global_errors():
    f = init_frame(SystemLayout.qubits(1))
    with pytest.raises(NotUnitaryError):
        evolve_global(f, np.diag([1, 2]))
    with pytest.raises(DimensionError):
        evolve_global(f, np.eye(4))


def test_components_equal_cumulative_conjugation(rng):
    f0 = init_frame(SystemLayout([2, 3]))
    f = evolve_global(evolve_global(f0, haar_unitary(6, rng)), haar_unitary(6, rng))
    u = f.cumulative
    for s in range(2):
        for k in f[s].labels:
            assert max_abs(f[s][k] - u.conj().T @ f0[s][k] @ u) <= 1e-12


# ---- evolve_step

def test_step_hadamard_swaps_components():
    f = init_frame(SystemLayout.qubits(2))
    g = _step(f, "H", 0)
    oracle = evolve_global(f, tensor_embed(H, [0], f.layout))
    assert max_abs(g[0]["x"] - kron(Z, I2)) < 1e-15 and max_abs(g[0]["z"] - kron(X, I2)) < 1e-15
    assert frame_delta(g, oracle) <= 1e-9
    assert np.array_equal(g[1]["x"], f[1]["x"]) and np.array_equal(g[1]["z"], f[1]["z"])


def test_step_cnot_after_h_matches_global_product():
    f = bell_frame()
    lay = f.layout
    oracle = evolve_global(init_frame(lay), tensor_embed(CNOT, [0, 1], lay) @ tensor_embed(H, [0], lay))
    assert frame_delta(f, oracle) <= 1e-9


def test_step_on_bell_frame_leaves_other_qubit():
    f = bell_frame()
    g = _step(f, "RY", 1, params=[0.4])
    assert descriptor_delta(f, g, 0) <= 1e-10


def test_step_rejects_qudit_targets():
    lay = SystemLayout([2, 3])
    with pytest.raises(StepModeError):
        make_event("SHIFT", [1], layout=lay)
    ev = make_event("H", [0])
    with pytest.raises(StepModeError):
        evolve_step(init_frame(SystemLayout([3, 2])), ev)


def test_event_defect_and_custom_matrix(rng):
    u = haar_unitary(4, rng)
    ev = make_event("custom", [1, 0], matrix=u)
    assert ev.defect() <= 1e-12
    with pytest.raises(NotUnitaryError):
        make_event("bad", [0], matrix=np.diag([1, 2]))


@given(st.integers(0, 10_000), st.integers(2, 4), st.integers(1, 12))
def test_step_matches_global_on_random_circuits(seed, n, depth):
    rng = np.random.default_rng(seed)
    c = random_circuit(n, depth, rng)
    step = run_circuit(c, "step")
    glob = run_circuit(c, "global")
    assert frame_delta(step, glob) <= 1e-9


def test_step_error_stays_small_for_deep_circuits(rng):
    c = random_circuit(3, 200, rng)
    assert frame_delta(run_circuit(c, "step"), run_circuit(c, "global")) <= 1e-9


@given(st.integers(0, 10_000))
def test_algebra_preserved(seed):
    rng = np.random.default_rng(seed)
    f = run_circuit(random_circuit(3, 10, rng))
    eye = np.eye(8)
    for s in range(3):
        x, z = f[s]["x"], f[s]["z"]
        assert max_abs(x @ x - eye) <= 1e-9 and max_abs(z @ z - eye) <= 1e-9
        assert max_abs(x @ z + z @ x) <= 1e-9
        for t in range(s + 1, 3):
            for a in (x, z):
                for b in (f[t]["x"], f[t]["z"]):
                    assert commutator_norm(a, b) <= 1e-10


# ---- locality audit

def test_audit_single_qubit_gate_exact():
    f = bell_frame(3)
    a = locality_audit(f, _step(f, "T", 2), [2])
    assert a.passed and a.deltas[0] == 0 and a.deltas[1] == 0


def test_audit_cnot_in_three_qubit_frame():
    f = init_frame(SystemLayout.qubits(3))
    a = locality_audit(f, _step(f, "CNOT", 0, 1), [0, 1])
    assert a.passed and a.deltas[2] <= 1e-10
    assert a.deltas[0] > 0.1 and a.deltas[1] > 0.1
    assert a.to_dict()["max_off_target"] == a.max_off_target


def test_disjoint_gates_commute():
    f = bell_frame(3)
    ab = _step(_step(f, "RX", 0, params=[0.3]), "H", 2)
    ba = _step(_step(f, "H", 2), "RX", 0, params=[0.3])
    assert frame_delta(ab, ba) <= 1e-10


def test_audit_detects_nonlocal_change():
    f = init_frame(SystemLayout.qubits(2))
    g = evolve_global(f, kron(I2, X))
    assert not locality_audit(f, g, [0]).passed


def test_audit_preconditions():
    f = init_frame(SystemLayout.qubits(2))
    g = _step(f, "H", 0)
    with pytest.raises(ValueError):
        locality_audit(f, _step(g, "H", 0), [0])
    with pytest.raises(DimensionError):
        locality_audit(f, _step(init_frame(SystemLayout.qubits(3)), "H", 0), [0])


# ---- reconstruction and expectation

def test_reconstruct_fresh():
    rho = reconstruct_density(init_frame(SystemLayout.qubits(2)), [0])
    assert np.array_equal(rho, [[1, 0], [0, 0]])


def test_reconstruct_after_h():
    f = _step(init_frame(SystemLayout.qubits(1)), "H", 0)
    oracle = partial_trace(statevector([(H, [0])], 1), [0], [2])
    assert max_abs(reconstruct_density(f, [0]) - oracle) <= 1e-12
    assert max_abs(oracle - 0.5 * np.ones((2, 2))) <= 1e-12


def test_reconstruct_bell():
    f = bell_frame()
    psi = statevector([(H, [0]), (CNOT, [0, 1])], 2)
    assert max_abs(reconstruct_density(f, [0]) - np.eye(2) / 2) <= 1e-12
    assert max_abs(reconstruct_density(f, [0, 1]) - np.outer(psi, psi.conj())) <= 1e-12


def test_reconstruct_permuted_subset_and_qudits(rng):
    lay = SystemLayout([2, 3, 2])
    u = haar_unitary(12, rng)
    f = evolve_global(init_frame(lay), u)
    psi = u[:, 0]
    for subset in ([1], [2, 0], [1, 2, 0]):
        rho = reconstruct_density(f, subset)
        assert max_abs(rho - partial_trace(psi, subset, [2, 3, 2])) <= 1e-9
        assert abs(np.trace(rho) - 1) <= 1e-10
        assert np.min(np.linalg.eigvalsh(rho)) >= -1e-9


def test_reconstruct_rejects_bad_subset():
    f = init_frame(SystemLayout.qubits(2))
    with pytest.raises(DimensionError):
        reconstruct_density(f, [2])
    with pytest.raises(DimensionError):
        reconstruct_density(f, [])


def test_expectation_examples():
    f0 = init_frame(SystemLayout.qubits(2))
    assert expectation(f0, PauliSum.parse("ZI")) == 1
    assert abs(expectation(_step(f0, "H", 0), PauliSum.parse("ZI"))) <= 1e-15
    assert abs(expectation(bell_frame(), PauliSum.parse("ZZ")) - 1) <= 1e-15
    assert expectation(f0, PauliSum.parse("Z"), targets=[1]) == 1


def test_expectation_rejects_non_hermitian():
    with pytest.raises(NotHermitianError):
        expectation(init_frame(SystemLayout.qubits(1)), PauliSum.parse("1i*X"))


# ---- recovery

def test_recover_fresh_is_identity():
    assert max_abs(recover_unitary(init_frame(SystemLayout.qubits(2))) - np.eye(4)) <= 1e-15


def test_recover_hadamard():
    f = evolve_global(init_frame(SystemLayout.qubits(1)), H)
    assert phase_aligned_distance(recover_unitary(f), H) <= 1e-12


def test_recover_phase_convention(rng):
    u = haar_unitary(4, rng) * np.exp(0.7j)
    got = recover_unitary(evolve_global(init_frame(SystemLayout.qubits(2)), u))
    assert got[0, 0].imag == 0 and got[0, 0].real > 0
    assert phase_aligned_distance(got, u) <= 1e-8


def test_recover_with_zero_pivot():
    # X has u00 = 0, which forces a different pivot row
    u = kron(X, H)
    got = recover_unitary(evolve_global(init_frame(SystemLayout.qubits(2)), u))
    assert phase_aligned_distance(got, u) <= 1e-12
    first = np.flatnonzero(np.abs(got[:, 0]) > 1e-6)[0]
    assert got[first, 0].real > 0 and got[first, 0].imag == 0


def test_recover_qudit(rng):
    u = haar_unitary(6, rng)
    got = recover_unitary(evolve_global(init_frame(SystemLayout([3, 2])), u))
    assert phase_aligned_distance(got, u) <= 1e-8


def test_run_circuit_modes_and_audit(rng):
    c = random_circuit(3, 6, rng)
    frame, audits = run_circuit(c, audit=True)
    assert len(audits) == 6 and all(a.passed for a in audits)
    with pytest.raises(ValueError):
        run_circuit(c, mode="sideways")
    assert run_circuit(Circuit(SystemLayout.qubits(1))).time == 0
