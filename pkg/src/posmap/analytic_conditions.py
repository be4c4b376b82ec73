"""Sufficient conditions for positivity of tau_{n,k} - (n-k) H_{v_1}, n and k even.

Three closed-form tests (two corollaries and the spectral proposition) and a
numerical search for the infimum of the quartic form whose nonnegativity on
the zero-sum subspace is equivalent to positivity.
"""

from __future__ import annotations

import enum
from dataclasses import asdict, dataclass
from math import gcd

import numpy as np

from .circulant_spectra import build_ABC, c_spectrum, check_even_pair, mu_constant
from .errors import SearchFailure
from .simplex import minimize_batch

THM2_TOL = 1e-9


class Category(str, enum.Enum):
    COR1 = "COR1"
    COR2 = "COR2"
    PROP = "PROP"
    THM2 = "THM2"
    UNRESOLVED = "UNRESOLVED"


def proposition_holds(n: int, k: int) -> bool:
    check_even_pair(n, k)
    if k == 2:
        return True
    rep = c_spectrum(n, k)
    lo, hi = rep.c_min, rep.c_max
    cond_max = (n - k + lo) * (n - k + hi) >= k / 4 * (n - 2) * hi
    cond_min = (n - k + lo) ** 2 >= -k / 4 * (n - 2) * lo
    return bool(cond_max and cond_min)


def corollary1_holds(n: int, k: int) -> bool:
    return n in (2 * k, 2 * k + 2, 2 * k + 4)


def corollary2_holds(n: int, k: int) -> bool:
    if n < 4 or k < 4:
        return False
    mu = mu_constant()
    return 16 * n >= 2 * k**2 + 8 * (mu + 4) * k + 4 * (mu + 1) - 27


def zero_sum_basis(m: int) -> np.ndarray:
    """Orthonormal basis (m, m-1) of the complement of the all-ones vector.

    Gram-Schmidt on e_i - e_{i+1}, i = 0..m-2.
    """
    basis: list[np.ndarray] = []
    for i in range(m - 1):
        w = np.zeros(m)
        w[i], w[i + 1] = 1.0, -1.0
        for q in basis:
            w -= (q @ w) * q
        basis.append(w / np.linalg.norm(w))
    return np.array(basis).T


def theorem2_lhs(n: int, k: int, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Quartic form at zero-sum u, v; accepts stacked rows (batch, n/2)."""
    t = build_ABC(n, k)
    u = np.atleast_2d(u)
    v = np.atleast_2d(v)
    uAu = np.einsum("bi,ij,bj->b", u, t.A, u)
    vAv = np.einsum("bi,ij,bj->b", v, t.A, v)
    uBv = np.einsum("bi,ij,bj->b", u, t.B, v)
    vCu = np.einsum("bi,ij,bj->b", v, t.C, u)
    first = uAu + uBv
    second = vAv + vCu
    return n * k / 4 * u.min(axis=1) * v.min(axis=1) * (first + second) + first * second


@dataclass
class Thm2Search:
    infimum: float
    u: np.ndarray
    v: np.ndarray
    restarts: int
    failed: int


def theorem2_search(n: int, k: int, budget: int = 200, seed: int = 0) -> Thm2Search:
    """Multistart simplex search for the smallest form value on the unit sphere.

    Restart i starts from a normal sample drawn with seed ``seed + i``.
    """
    check_even_pair(n, k)
    if budget < 1:
        raise ValueError("budget must be >= 1")
    m = n // 2
    q = zero_sum_basis(m)
    dim = 2 * (m - 1)

    def objective(z: np.ndarray) -> np.ndarray:
        z = z / np.linalg.norm(z, axis=1, keepdims=True)
        u = z[:, : m - 1] @ q.T
        v = z[:, m - 1 :] @ q.T
        return theorem2_lhs(n, k, u, v)

    x0 = np.array([np.random.default_rng(seed + i).standard_normal(dim) for i in range(budget)])
    res = minimize_batch(objective, x0, xtol=1e-10, maxiter=1000 * dim, adaptive=True)
    ok = np.flatnonzero(res.converged)
    if ok.size == 0:
        raise SearchFailure(
            f"no restart converged for ({n}, {k})",
            {"restarts": budget, "min_unconverged": float(res.fun.min())},
        )
    best = ok[np.argmin(res.fun[ok])]
    z = res.x[best] / np.linalg.norm(res.x[best])
    return Thm2Search(
        infimum=float(res.fun[best]),
        u=z[: m - 1] @ q.T,
        v=z[m - 1 :] @ q.T,
        restarts=budget,
        failed=int(budget - ok.size),
    )


def theorem2_infimum(n: int, k: int, budget: int = 200, seed: int = 0) -> float:
    return theorem2_search(n, k, budget, seed).infimum


@dataclass
class ClassificationRecord:
    n: int
    k: int
    gcd: int
    cor1: bool
    cor2: bool
    prop: bool
    thm2_numeric: bool | None = None  # None: not run
    thm2_infimum: float | None = None
    category: Category = Category.UNRESOLVED

    def to_dict(self) -> dict:
        out = asdict(self)
        out["category"] = self.category.value
        return out


def classify(
    n: int, k: int, budget: int = 200, seed: int = 0, with_thm2: bool = False
) -> ClassificationRecord:
    check_even_pair(n, k)
    rec = ClassificationRecord(
        n=n,
        k=k,
        gcd=gcd(n, k),
        cor1=corollary1_holds(n, k),
        cor2=corollary2_holds(n, k),
        prop=proposition_holds(n, k),
    )
    assert rec.prop or not (rec.cor1 or rec.cor2), f"corollary without proposition at ({n}, {k})"
    if with_thm2:
        rec.thm2_infimum = theorem2_infimum(n, k, budget, seed)
        rec.thm2_numeric = rec.thm2_infimum >= -THM2_TOL
    if rec.cor1:
        rec.category = Category.COR1
    elif rec.cor2:
        rec.category = Category.COR2
    elif rec.prop:
        rec.category = Category.PROP
    elif rec.thm2_numeric:
        rec.category = Category.THM2
    return rec


def even_pairs(n_max: int):
    """All (n, k) with n, k even, 4 <= n <= n_max, 2 <= k <= n-2."""
    for n in range(4, n_max + 1, 2):
        for k in range(2, n - 1, 2):
            yield n, k
