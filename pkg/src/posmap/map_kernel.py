"""The maps tau_{n,k} and their Hadamard-subtracted versions.

Indices run 0..n-1 and are taken mod n. The diagonal part of tau_{n,k}(X) is

    D_i = (n-k) X_ii + X_{i+1,i+1} + ... + X_{i+k,i+k},

and tau_{n,k}(X) = Diag(D) - X. The subtracted map is

    X -> tau_{n,k}(X) - lam * (|v><v| o X)

where o is the entrywise product and v = sum_r coeffs[r-1] |v_r> with
(|v_r>)_j = exp(2 pi i (n/d) r j / n) / sqrt(n), d = gcd(n, k).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from math import gcd

import numpy as np

from .errors import InvalidInputError
from .linalg_core import as_cmatrix, hermitian

NORM_TOL = 1e-12


def eps_project(x) -> np.ndarray:
    """Keep the diagonal of ``x``, zero everything else."""
    m = as_cmatrix(x)
    return np.diag(np.diag(m))


def shift_matrix(n: int) -> np.ndarray:
    """Cyclic shift S with S e_i = e_{(i+1) mod n}."""
    if n < 2:
        raise InvalidInputError(f"shift needs n >= 2, got {n}")
    s = np.zeros((n, n), dtype=complex)
    s[(np.arange(n) + 1) % n, np.arange(n)] = 1.0
    return s


def _check_nk(n: int, k: int) -> None:
    if n < 2:
        raise InvalidInputError(f"n must be >= 2, got {n}")
    if not 1 <= k <= n - 1:
        raise InvalidInputError(f"k must satisfy 1 <= k <= n-1, got k={k} for n={n}")


def diag_weights(n: int, k: int, diag: np.ndarray) -> np.ndarray:
    """D_i from the diagonal of X; works on stacked diagonals (..., n)."""
    diag = np.asarray(diag)
    out = (n - k) * diag
    for j in range(1, k + 1):
        out = out + np.roll(diag, -j, axis=-1)
    return out


def diag_D(n: int, k: int, x) -> np.ndarray:
    """D_0..D_{n-1} for a Hermitian X."""
    _check_nk(n, k)
    h = hermitian(x)
    if h.shape[0] != n:
        raise InvalidInputError(f"expected {n}x{n} matrix, got {h.shape}")
    return diag_weights(n, k, np.diag(h).real)


def tau_apply(n: int, k: int, x) -> np.ndarray:
    """tau_{n,k}(X) = Diag(D(X)) - X."""
    h = hermitian(x)
    return hermitian(np.diag(diag_D(n, k, h)) - h)


def basis_vectors(n: int, d: int) -> np.ndarray:
    """Rows are |v_1>, ..., |v_{d-1}>."""
    if d < 2:
        raise InvalidInputError(f"need d >= 2, got {d}")
    if n % d:
        raise InvalidInputError(f"d={d} does not divide n={n}")
    r = np.arange(1, d)[:, None]
    j = np.arange(n)[None, :]
    # reduce the exponent mod n before scaling so the phases stay exact at wraparound
    return np.exp(2j * np.pi * (((n // d) * r * j) % n) / n) / np.sqrt(n)


def build_v(n: int, d: int, coeffs) -> np.ndarray:
    """Unit vector sum_r coeffs[r-1] |v_r>."""
    c = np.asarray(coeffs, dtype=complex).ravel()
    if c.size != d - 1:
        raise InvalidInputError(f"need {d - 1} coefficients for d={d}, got {c.size}")
    norm2 = float(np.sum(np.abs(c) ** 2))
    if abs(norm2 - 1.0) > NORM_TOL:
        raise InvalidInputError(f"coefficients not normalised (sum |a_r|^2 = {norm2!r})")
    return c @ basis_vectors(n, d)


def hadamard_project(v, x) -> np.ndarray:
    """(|v><v| o X), entrywise v_i conj(v_j) X_ij."""
    v = np.asarray(v, dtype=complex).ravel()
    h = hermitian(x)
    if h.shape[0] != v.size:
        raise InvalidInputError(f"vector length {v.size} does not match matrix {h.shape}")
    if abs(np.linalg.norm(v) - 1.0) > NORM_TOL:
        raise InvalidInputError("v must be a unit vector")
    return hermitian(np.outer(v, v.conj()) * h)


@dataclass(frozen=True)
class MapSpec:
    """An instance tau_{n,k} - lam * H_v, with v given by its coefficients."""

    n: int
    k: int
    lam: float = 0.0
    coeffs: tuple[complex, ...] = field(default=())

    def __post_init__(self):
        _check_nk(self.n, self.k)
        object.__setattr__(self, "coeffs", tuple(complex(c) for c in self.coeffs))
        if self.lam < 0:
            raise InvalidInputError(f"lam must be >= 0, got {self.lam}")
        d = self.d
        if d == 1:
            if self.coeffs:
                raise InvalidInputError("gcd(n,k)=1 admits no subtraction vector")
            if self.lam != 0:
                raise InvalidInputError("gcd(n,k)=1 requires lam = 0")
        elif self.coeffs or self.lam != 0:
            build_v(self.n, d, self.coeffs)  # validates length and norm

    @property
    def d(self) -> int:
        return gcd(self.n, self.k)

    @cached_property
    def v(self) -> np.ndarray | None:
        if self.d == 1 or not self.coeffs:
            return None
        return build_v(self.n, self.d, self.coeffs)

    def with_lam(self, lam: float) -> "MapSpec":
        return MapSpec(self.n, self.k, lam, self.coeffs)


def optimized_apply(spec: MapSpec, x) -> np.ndarray:
    """tau_{n,k}(X) - lam * (|v><v| o X)."""
    out = tau_apply(spec.n, spec.k, x)
    if spec.lam == 0:
        return out
    return hermitian(out - spec.lam * hadamard_project(spec.v, x))
