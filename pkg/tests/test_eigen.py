import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bipartite_walk.eigen import eig, hessenberg, schur


def _match(values, ref):
    # Greedy pairing of two eigenvalue lists.
    ref = list(ref)
    for v in values:
        j = int(np.argmin([abs(v - r) for r in ref]))
        assert abs(v - ref.pop(j)) < 1e-9 * max(1.0, abs(v))


@settings(max_examples=40)
@given(st.integers(1, 9), st.integers(0, 2**31))
def test_random_matrices_against_numpy(n, seed):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    values, vectors = eig(a)
    _match(values, np.linalg.eigvals(a))
    assert np.allclose(np.linalg.norm(vectors, axis=0), 1.0)
    assert np.max(np.abs(a @ vectors - vectors * values)) < 1e-9 * np.abs(a).max()


@given(st.integers(2, 8), st.integers(0, 2**31))
def test_unitary_gives_orthonormal_vectors(n, seed):
    rng = np.random.default_rng(seed)
    q, _ = np.linalg.qr(rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
    values, vectors = eig(q)
    assert np.allclose(np.abs(values), 1.0, atol=1e-12)
    assert np.allclose(vectors.conj().T @ vectors, np.eye(n), atol=1e-10)


def test_degenerate_unitary():
    # Leading-order walk operator style: +-1 each four-fold degenerate.
    d = np.diag([1, 1, 1, 1, -1, -1, -1, -1]).astype(complex)
    rng = np.random.default_rng(1)
    q, _ = np.linalg.qr(rng.normal(size=(8, 8)))
    a = q @ d @ q.T
    values, vectors = eig(a)
    assert sorted(np.round(values.real, 12)) == [-1] * 4 + [1] * 4
    assert np.max(np.abs(a @ vectors - vectors * values)) < 1e-12


def test_hessenberg_and_schur_factorizations():
    rng = np.random.default_rng(5)
    a = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
    h, q = hessenberg(a)
    assert np.allclose(np.tril(h, -2), 0)
    assert np.allclose(q @ h @ q.conj().T, a)
    t, z = schur(a)
    assert np.allclose(np.tril(t, -1), 0)
    assert np.allclose(z @ t @ z.conj().T, a)
    assert np.allclose(z.conj().T @ z, np.eye(6))


def test_jordan_block_is_handled():
    values, vectors = eig(np.array([[2.0, 1.0], [0.0, 2.0]]))
    assert np.allclose(values, 2.0)
    assert np.all(np.isfinite(vectors))


def test_rejects_non_square():
    with pytest.raises(ValueError):
        eig(np.zeros((2, 3)))
