"""Circulant matrices A, B, C on R^{n/2} and the spectrum of (C + C^T)/2.

With P the cyclic permutation (P y)_i = y_{i+1 mod n/2}:

    A = (n-k) I + sum_{i=1}^{k/2} P^i
    B = sum_{i=0}^{k/2-1} P^i
    C = sum_{i=1}^{k/2} P^i

The eigenvalues of (C + C^T)/2 are c^(0) = k/2 and, for j = 1..n/2-1,

    c^(j) = ( sin(2 pi (k+1) j / n) / sin(2 pi j / n) - 1 ) / 2 .
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError


def check_even_pair(n: int, k: int) -> None:
    if n % 2 or k % 2:
        raise InvalidInputError(f"n and k must both be even, got ({n}, {k})")
    if not 2 <= k <= n - 2:
        raise InvalidInputError(f"need 2 <= k <= n-2, got ({n}, {k})")


def cyclic_permutation(m: int) -> np.ndarray:
    """P = sum_i |e_i><e_{i+1}| on R^m (indices mod m)."""
    p = np.zeros((m, m))
    p[np.arange(m), (np.arange(m) + 1) % m] = 1.0
    return p


@dataclass(frozen=True)
class CirculantTriple:
    half: int
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray


def build_ABC(n: int, k: int) -> CirculantTriple:
    check_even_pair(n, k)
    m = n // 2
    p = cyclic_permutation(m)
    powers = [np.linalg.matrix_power(p, i) for i in range(k // 2 + 1)]
    c = sum(powers[1:])
    b = sum(powers[:-1])
    a = (n - k) * np.eye(m) + c
    for arr in (a, b, c):
        arr.flags.writeable = False
    return CirculantTriple(half=m, A=a, B=b, C=c)


@dataclass
class SpectrumReport:
    n: int
    k: int
    values: list[float]
    c_min: float  # over j >= 1
    c_max: float  # over j >= 1
    bounds_ok: bool | None = None  # None: bounds not applicable (k < 4)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "values": list(self.values),
            "c_min": self.c_min,
            "c_max": self.c_max,
            "bounds_ok": self.bounds_ok,
        }


def c_values(n: int, k: int) -> np.ndarray:
    """Closed-form c^(0..n/2-1)."""
    check_even_pair(n, k)
    j = np.arange(1, n // 2)
    base = 2 * np.pi * j / n
    denom = np.sin(base)
    assert np.all(denom > 0), "sin(2 pi j / n) vanished inside 1..n/2-1"
    rest = 0.5 * (np.sin((k + 1) * base) / denom - 1.0)
    return np.concatenate(([k / 2], rest))


def c_spectrum(n: int, k: int) -> SpectrumReport:
    vals = c_values(n, k)
    tail = vals[1:]
    report = SpectrumReport(
        n=n,
        k=k,
        values=[float(x) for x in vals],
        c_min=float(tail.min()),
        c_max=float(tail.max()),
    )
    report.bounds_ok = check_fact2_bounds(report)
    return report


def mu_constant() -> float:
    return 1.0 / (2.5 * math.sqrt((5 - math.sqrt(5)) / 2))


def check_fact2_bounds(report: SpectrumReport) -> bool | None:
    """c_max <= k/2 and c_min >= -(mu (k+1) + 1)/2; None when k < 4."""
    k = report.k
    if k < 4:
        return None
    lower = -0.5 * (mu_constant() * (k + 1) + 1)
    return report.c_max <= k / 2 and report.c_min >= lower
