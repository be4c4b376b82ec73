"""Dense complex linear algebra for small Hermitian matrices.

Matrices are plain numpy arrays. ``hermitian`` validates and returns a
read-only symmetrised copy; every other routine here expects its output.
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidInputError

HERMITIAN_TOL = 1e-12


def as_cmatrix(a) -> np.ndarray:
    """Square complex matrix view of ``a``."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise InvalidInputError(f"expected a non-empty square matrix, got shape {m.shape}")
    return m


def hermitian(a, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Return (a + a^dagger)/2 as a read-only array with an exactly real diagonal.

    Raises InvalidInputError when any entry differs from the conjugate of its
    mirror by more than ``tol``.
    """
    m = as_cmatrix(a)
    mismatch = np.max(np.abs(m - m.conj().T))
    if mismatch > tol:
        raise InvalidInputError(f"matrix is not Hermitian (max |A - A^H| = {mismatch:.3e})")
    h = (m + m.conj().T) / 2
    idx = np.arange(h.shape[0])
    h[idx, idx] = h[idx, idx].real
    h.flags.writeable = False
    return h


def herm_eigenvalues(h) -> np.ndarray:
    """Ascending real eigenvalues of a Hermitian matrix."""
    return np.linalg.eigvalsh(hermitian(h))


def det_herm(h) -> float:
    """Real determinant of a Hermitian matrix, via LU with partial pivoting."""
    h = hermitian(h)
    d = np.linalg.det(h)
    # Hadamard's inequality bounds |det|; rounding in the imaginary part scales with it
    scale = max(abs(d), float(np.prod(np.linalg.norm(h, axis=1))))
    if abs(d.imag) > 1e-9 * scale:
        raise AssertionError(f"determinant of Hermitian input has imaginary part {d.imag:.3e}")
    return float(d.real)


def outer(psi) -> np.ndarray:
    """The rank-one matrix |psi><psi|."""
    psi = np.asarray(psi, dtype=complex).ravel()
    if psi.size == 0:
        raise InvalidInputError("empty vector")
    return hermitian(np.outer(psi, psi.conj()))
