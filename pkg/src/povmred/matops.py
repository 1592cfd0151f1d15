"""Complex Hermitian matrix utilities.

The spectral routines use a cyclic Jacobi sweep on complex Hermitian
matrices.  Each rotation annihilates one off-diagonal pair with a 2x2
unitary that first removes the phase of the pivot and then applies a real
Givens rotation.
"""

import math

import numpy as np

from povmred.config import resolve
from povmred.errors import EigFailure, NotHermitian, NotPositiveDefinite

MAX_DIM = 64
MAX_SWEEPS = 60


def as_cmatrix(m) -> np.ndarray:
    """Coerce ``m`` to a square complex array with finite entries."""
    a = np.array(m, dtype=np.complex128)
    if a.ndim == 0:
        a = a.reshape(1, 1)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NotHermitian(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise NotHermitian("matrix has non-finite entries")
    return a


def hermitian(m, tol=None) -> np.ndarray:
    """Validate near-Hermiticity and return the exactly symmetrized matrix."""
    tol = resolve(tol)
    a = as_cmatrix(m)
    norm = np.linalg.norm(a)
    defect = np.linalg.norm(a - a.conj().T)
    if defect > tol.herm * norm:
        raise NotHermitian(
            f"matrix is not Hermitian: ||M - M^H||_F = {defect:.3e}", magnitude=defect
        )
    return (a + a.conj().T) / 2


def _rotation(app: float, aqq: float, apq: complex):
    # Unitary G with (G^H M G)[p, q] = 0 for the block [[app, apq], [conj(apq), aqq]].
    r = abs(apq)
    phase = apq / r
    theta = 0.5 * math.atan2(2.0 * r, app - aqq)
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s * phase.conjugate(), c * phase.conjugate()]])


def eig_hermitian(m, tol=None):
    """Eigen-decomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Returns ``(w, v)`` with ``w`` real and sorted in descending order and
    ``v`` unitary such that ``m @ v == v @ diag(w)``.

    Raises :class:`EigFailure` if the off-diagonal mass has not fallen below
    working precision after ``MAX_SWEEPS`` sweeps.
    """
    a = hermitian(m, tol).copy()
    n = a.shape[0]
    if n > MAX_DIM:
        raise ValueError(f"dimension {n} exceeds supported maximum {MAX_DIM}")
    v = np.eye(n, dtype=np.complex128)
    scale = np.linalg.norm(a)
    if n == 1 or scale == 0.0:
        return np.real(np.diag(a)).copy(), v
    target = 4 * n * np.finfo(float).eps * scale
    diag_mask = np.eye(n, dtype=bool)
    for _ in range(MAX_SWEEPS):
        if np.linalg.norm(a[~diag_mask]) <= target:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= 1e-300:
                    continue
                g = _rotation(a[p, p].real, a[q, q].real, apq)
                idx = [p, q]
                a[:, idx] = a[:, idx] @ g
                a[idx, :] = g.conj().T @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                v[:, idx] = v[:, idx] @ g
    else:
        raise EigFailure(f"Jacobi iteration did not converge in {MAX_SWEEPS} sweeps")
    w = np.real(np.diag(a))
    order = np.argsort(-w, kind="stable")
    return w[order], v[:, order]


def eigvalsh(m, tol=None) -> np.ndarray:
    return eig_hermitian(m, tol)[0]


def trace_norm(m, tol=None) -> float:
    """Sum of the absolute eigenvalues."""
    return float(np.sum(np.abs(eigvalsh(m, tol))))


def operator_norm(m, tol=None) -> float:
    return float(np.max(np.abs(eigvalsh(m, tol))))


def inv_sqrt_psd(m, tol=None) -> np.ndarray:
    tol = resolve(tol)
    w, v = eig_hermitian(m, tol)
    if w[-1] < tol.pd:
        raise NotPositiveDefinite(
            f"matrix is not positive definite: min eigenvalue {w[-1]:.3e}", magnitude=w[-1]
        )
    s = (v * (1.0 / np.sqrt(w))) @ v.conj().T
    return (s + s.conj().T) / 2


def is_psd(m, tol: float = 1e-9) -> bool:
    return bool(eigvalsh(m)[-1] >= -tol)


def hs_inner(a, b) -> float:
    """Real Hilbert-Schmidt inner product tr(a^H b) for Hermitian arguments."""
    return float(np.real(np.vdot(a, b)))
