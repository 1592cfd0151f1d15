import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from povmred.errors import EigFailure, NotHermitian, NotPositiveDefinite
from povmred.matops import eig_hermitian, hermitian, inv_sqrt_psd, is_psd, trace_norm

PAULI_X = np.array([[0, 1], [1, 0]])


def random_hermitian(seed, n):
    rng = np.random.default_rng(seed)
    m = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return m + m.conj().T


@pytest.mark.parametrize(
    "m, expected",
    [
        (np.eye(2), [1.0, 1.0]),
        (np.diag([0.7, 0.3]), [0.7, 0.3]),
        (np.diag([0.3, 0.7]), [0.7, 0.3]),
        (PAULI_X, [1.0, -1.0]),
        (np.array([[0, -1j], [1j, 0]]), [1.0, -1.0]),
    ],
)
def test_eigenvalue_examples(m, expected):
    w, v = eig_hermitian(m)
    np.testing.assert_allclose(w, expected, atol=1e-14)
    np.testing.assert_allclose(v.conj().T @ v, np.eye(2), atol=1e-12)


@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 12))
@settings(max_examples=60, deadline=None)
def test_eig_reconstruction(seed, n):
    m = random_hermitian(seed, n)
    w, v = eig_hermitian(m)
    norm = np.linalg.norm(m)
    assert np.linalg.norm(m @ v - v * w) <= 1e-10 * norm
    assert np.linalg.norm(v.conj().T @ v - np.eye(n)) <= 1e-10
    assert np.linalg.norm(v @ np.diag(w) @ v.conj().T - m) <= 1e-9 * norm
    assert np.all(np.diff(w) <= 0)
    # independent oracle: LAPACK
    np.testing.assert_allclose(w, np.linalg.eigvalsh(m)[::-1], atol=1e-10 * norm)


def test_degenerate_and_large():
    m = np.diag([2.0, 2.0, 2.0, -1.0])
    u = np.linalg.qr(random_hermitian(3, 4))[0]
    w, _ = eig_hermitian(u @ m @ u.conj().T)
    np.testing.assert_allclose(w, [2, 2, 2, -1], atol=1e-12)
    big = random_hermitian(9, 64)
    w, v = eig_hermitian(big)
    assert np.linalg.norm(big @ v - v * w) <= 1e-10 * np.linalg.norm(big)


def test_rejects_non_hermitian_and_oversize():
    with pytest.raises(NotHermitian):
        eig_hermitian(np.array([[0, 1], [0, 0]]))
    with pytest.raises(NotHermitian):
        eig_hermitian(np.array([[np.nan, 0], [0, 1]]))
    with pytest.raises(ValueError):
        eig_hermitian(np.eye(65))


def test_eig_failure_on_sweep_cap(monkeypatch):
    import povmred.matops as matops

    monkeypatch.setattr(matops, "MAX_SWEEPS", 0)
    with pytest.raises(EigFailure):
        matops.eig_hermitian(PAULI_X)


def test_hermitian_symmetrizes_exactly():
    m = np.array([[1, 0.5 + 1e-13j], [0.5, 2]])
    h = hermitian(m)
    assert np.array_equal(h, h.conj().T)


@pytest.mark.parametrize(
    "m, expected",
    [
        (np.zeros((2, 2)), 0.0),
        (np.diag([1.0, -1.0]), 2.0),
        (np.diag([0.7, 0.3]) - np.diag([0.5, 0.5]), 0.4),
    ],
)
def test_trace_norm_examples(m, expected):
    assert trace_norm(m) == pytest.approx(expected, abs=1e-14)


@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 6))
@settings(max_examples=50, deadline=None)
def test_trace_norm_dominates_trace(seed, n):
    m = random_hermitian(seed, n)
    assert trace_norm(m) >= abs(np.trace(m).real) - 1e-12


@pytest.mark.parametrize(
    "m, expected",
    [
        (np.eye(2), np.eye(2)),
        (np.diag([4.0, 1.0]), np.diag([0.5, 1.0])),
        (4 * np.eye(3), 0.5 * np.eye(3)),
    ],
)
def test_inv_sqrt_examples(m, expected):
    np.testing.assert_allclose(inv_sqrt_psd(m), expected, atol=1e-14)


@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 6))
@settings(max_examples=50, deadline=None)
def test_inv_sqrt_properties(seed, n):
    g = random_hermitian(seed, n)
    m = g @ g + 0.1 * np.eye(n)
    s = inv_sqrt_psd(m)
    np.testing.assert_allclose(s @ m @ s, np.eye(n), atol=1e-8)
    np.testing.assert_allclose(s @ m, m @ s, atol=1e-8 * np.linalg.norm(m))


def test_inv_sqrt_rejects_singular():
    with pytest.raises(NotPositiveDefinite):
        inv_sqrt_psd(np.diag([1.0, 0.0]))


def test_is_psd_examples():
    assert is_psd(np.diag([1.0, 0.0]))
    assert not is_psd(np.diag([1.0, -0.1]), tol=1e-9)
    plus = np.array([1, 1]) / np.sqrt(2)
    assert is_psd(np.outer(plus, plus))
