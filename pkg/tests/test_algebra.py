import numpy as np
import pytest
from hypothesis import given, strategies as st

from descriptor_lab.algebra import (
    DimensionError,
    NotUnitaryError,
    SystemLayout,
    apply_local,
    conjugate,
    haar_unitary,
    is_hermitian,
    is_unitary,
    max_abs,
    tensor_embed,
)
from descriptor_lab.config import MAX_DIM_ENV

from conftest import CNOT, CZ, I2, SWAP, X, Z, brute_embed, kron


def test_layout_basics():
    lay = SystemLayout([2, 3, 2])
    assert lay.n == 3 and lay.total_dim == 12
    assert not lay.all_qubits and lay.is_qubit(0) and not lay.is_qubit(1)
    assert lay.sub_dim([1, 2]) == 6


@pytest.mark.parametrize("dims", [[], [1], [2, 0]])
def test_layout_rejects_bad_dims(dims):
    with pytest.raises(DimensionError):
        SystemLayout(dims)


def test_layout_cap_default_and_env(monkeypatch):
    SystemLayout.qubits(12)
    with pytest.raises(DimensionError):
        SystemLayout.qubits(13)
    monkeypatch.setenv(MAX_DIM_ENV, "16")
    SystemLayout.qubits(4)
    with pytest.raises(DimensionError):
        SystemLayout.qubits(5)
    monkeypatch.setenv(MAX_DIM_ENV, "zero")
    with pytest.raises(ValueError):
        SystemLayout.qubits(1)


def test_embed_single_qubit_identity():
    assert np.array_equal(tensor_embed(Z, [0], SystemLayout.qubits(1)), Z)


def test_embed_x_on_qubit_one_literal():
    literal = np.array([[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
    assert np.array_equal(tensor_embed(X, [1], SystemLayout.qubits(2)), literal)


def test_embed_reversed_cnot_matches_swap_conjugation():
    # permutation-matrix oracle: SWAP . CNOT(0,1) . SWAP
    got = tensor_embed(CNOT, [1, 0], SystemLayout.qubits(2))
    assert np.array_equal(got, SWAP @ CNOT @ SWAP)


def test_embed_errors():
    lay = SystemLayout.qubits(3)
    with pytest.raises(DimensionError):
        tensor_embed(CNOT, [0], lay)
    with pytest.raises(DimensionError):
        tensor_embed(CNOT, [1, 1], lay)
    with pytest.raises(DimensionError):
        tensor_embed(X, [3], lay)


@given(st.integers(0, 10_000), st.sampled_from([(2, 2, 2), (2, 3, 2), (3, 2), (2, 2, 2, 2)]),
       st.data())
def test_embed_matches_brute_force(seed, dims, data):
    rng = np.random.default_rng(seed)
    k = data.draw(st.integers(1, min(3, len(dims))))
    targets = data.draw(st.permutations(range(len(dims))))[:k]
    d = int(np.prod([dims[t] for t in targets]))
    op = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    lay = SystemLayout(dims)
    assert max_abs(tensor_embed(op, targets, lay) - brute_embed(op, list(targets), list(dims))) == 0


def test_conjugate_examples():
    a = np.arange(4).reshape(2, 2).astype(complex)
    assert np.array_equal(conjugate(I2, a), a)
    assert np.array_equal(conjugate(X, Z), -Z)
    assert np.allclose(conjugate(CZ, kron(X, I2)), kron(X, Z), atol=0)


def test_conjugate_rejects_non_unitary_and_mismatch():
    with pytest.raises(NotUnitaryError):
        conjugate(np.diag([1.0, 2.0]), Z)
    with pytest.raises(DimensionError):
        conjugate(CNOT, Z)


@given(st.integers(0, 10_000), st.integers(1, 4))
def test_composition_law(seed, d):
    rng = np.random.default_rng(seed)
    u, v = haar_unitary(d, rng), haar_unitary(d, rng)
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    assert max_abs(conjugate(u @ v, a) - conjugate(v, conjugate(u, a))) <= 1e-10


@given(st.integers(0, 10_000), st.sampled_from([2, 3, 4, 8, 16]))
def test_conjugation_preserves_spectrum(seed, d):
    rng = np.random.default_rng(seed)
    u = haar_unitary(d, rng)
    b = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    a = b + b.conj().T
    ev0 = np.linalg.eigvalsh(a)
    ev1 = np.linalg.eigvalsh(conjugate(u, a))
    assert np.allclose(ev0, ev1, atol=1e-8)


@given(st.integers(0, 10_000))
def test_embedding_preserves_tags(seed):
    rng = np.random.default_rng(seed)
    lay = SystemLayout([2, 3, 2])
    u = haar_unitary(6, rng)
    b = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
    assert is_unitary(tensor_embed(u, [2, 1], lay))
    assert is_hermitian(tensor_embed(b + b.conj().T, [1, 0], lay))


def test_haar_unitary_is_unitary_and_seeded():
    a = haar_unitary(8, np.random.default_rng(3))
    b = haar_unitary(8, np.random.default_rng(3))
    assert is_unitary(a) and np.array_equal(a, b)


def test_apply_local_agrees_with_embedding(rng):
    dims = [2, 3, 2]
    psi = rng.normal(size=12) + 1j * rng.normal(size=12)
    op = haar_unitary(4, rng)
    got = apply_local(psi, op, [2, 0], dims)
    assert np.allclose(got, brute_embed(op, [2, 0], dims) @ psi, atol=1e-13)
