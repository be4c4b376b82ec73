"""Numerical positivity test and lambda_max search for subtracted maps.

A map Phi is positive iff Phi(|x><x|) is PSD for every x, and multiplying x
by diagonal phases only conjugates the output by a diagonal unitary, so real
unit x suffice. For each lam the objective is minimised over x with a batch
of simplex searches; lambda_max is then the largest lam at which the minimum
is still zero.

For fixed x the output is M0(x) - lam * w w^dagger, so both the determinant
and the smallest eigenvalue are concave in lam, and so is their minimum over
x. Secant steps started to the right of the root therefore approach it from
above without overshooting.
"""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field, replace
from math import gcd

import numpy as np

from .errors import InvalidInputError, SearchFailure
from .linalg_core import det_herm, herm_eigenvalues, outer
from .map_kernel import MapSpec, diag_weights, optimized_apply
from .simplex import minimize_batch

log = logging.getLogger(__name__)

OBJECTIVES = ("mineig", "det")


@dataclass(frozen=True)
class SearchSettings:
    restarts: int = 50
    seed: int = 0
    inner_tol: float = 1e-10
    newton_tol: float = 1e-4
    max_newton_iters: int = 40
    zero_band: float = 1e-8
    objective: str = "mineig"
    max_inner_iter: int | None = None  # default 400 * n

    def __post_init__(self):
        if self.restarts < 1:
            raise InvalidInputError("restarts must be >= 1")
        for name in ("inner_tol", "newton_tol", "zero_band"):
            if getattr(self, name) <= 0:
                raise InvalidInputError(f"{name} must be > 0")
        if self.max_newton_iters < 1:
            raise InvalidInputError("max_newton_iters must be >= 1")
        if self.objective not in OBJECTIVES:
            raise InvalidInputError(f"objective must be one of {OBJECTIVES}")


@dataclass
class LambdaMaxResult:
    lambda_max: float
    iterations: int
    converged: bool
    final_objective: float
    witness_x: list[float] = field(default_factory=list)
    history: list[tuple[float, float]] = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


def _unit(x) -> np.ndarray:
    x = np.asarray(x, dtype=float).ravel()
    nrm = np.linalg.norm(x)
    if nrm == 0:
        raise InvalidInputError("zero vector")
    return x / nrm


def det_objective(spec: MapSpec, x) -> float:
    """det of the map's output on |x><x|, x normalised first."""
    return det_herm(optimized_apply(spec, outer(_unit(x))))


def mineig_objective(spec: MapSpec, x) -> float:
    """Smallest eigenvalue of the map's output on |x><x|, x normalised first."""
    return float(herm_eigenvalues(optimized_apply(spec, outer(_unit(x))))[0])


def batch_outputs(spec: MapSpec, xs: np.ndarray) -> np.ndarray:
    """Outputs on |x><x| for each row of xs (rows normalised), shape (m, n, n)."""
    n, k = spec.n, spec.k
    xs = xs / np.linalg.norm(xs, axis=1, keepdims=True)
    out = -xs[:, :, None] * xs[:, None, :]
    if spec.lam:
        w = xs * spec.v
        out = out - spec.lam * (w[:, :, None] * w[:, None, :].conj())
    idx = np.arange(n)
    out[:, idx, idx] += diag_weights(n, k, xs * xs)
    return out


def batch_objective(spec: MapSpec, kind: str = "mineig"):
    """Vectorised objective over rows of x, same values as the scalar versions."""
    if kind == "det":
        return lambda xs: np.linalg.det(batch_outputs(spec, xs)).real
    if kind == "mineig":
        return lambda xs: np.linalg.eigvalsh(batch_outputs(spec, xs))[:, 0]
    raise InvalidInputError(f"unknown objective {kind!r}")


def start_points(n: int, restarts: int, key: tuple[int, ...]) -> np.ndarray:
    """Unit starting vectors; row i depends only on (key, i)."""
    rows = [np.random.default_rng([*key, i]).standard_normal(n) for i in range(restarts)]
    x0 = np.array(rows)
    return x0 / np.linalg.norm(x0, axis=1, keepdims=True)


def robust_min(
    spec: MapSpec, settings: SearchSettings, starts: np.ndarray | None = None
) -> tuple[float, np.ndarray]:
    """Smallest objective value over the converged restarts, and its argmin."""
    if starts is None:
        starts = start_points(spec.n, settings.restarts, (settings.seed,))
    res = minimize_batch(
        batch_objective(spec, settings.objective),
        starts,
        xtol=settings.inner_tol,
        maxiter=settings.max_inner_iter,
    )
    ok = np.flatnonzero(res.converged)
    if ok.size < len(starts):
        log.debug("%d of %d restarts did not converge", len(starts) - ok.size, len(starts))
    if ok.size == 0:
        raise SearchFailure(
            "no local minimisation converged",
            {
                "restarts": len(starts),
                "best_unconverged": float(res.fun.min()),
                "max_diameter": float(res.diameter.max()),
            },
        )
    best = ok[np.argmin(res.fun[ok])]
    return float(res.fun[best]), _unit(res.x[best])


def is_positive(spec: MapSpec, settings: SearchSettings) -> bool:
    """Search verdict; the witness spectrum is checked as well as its objective."""
    value, x = robust_min(spec, settings)
    if value < -settings.zero_band:
        return False
    # an even number of negative eigenvalues leaves det >= 0
    return bool(mineig_objective(spec, x) >= -settings.zero_band)


def lambda_max(
    n: int,
    k: int,
    coeffs,
    settings: SearchSettings,
    key: tuple[int, ...] | None = None,
) -> LambdaMaxResult:
    """Largest lam keeping tau_{n,k} - lam H_v positive, by secant iteration.

    Starts from lam = n and n - 1. All evaluations reuse one set of
    restart points (derived from ``key``, default ``(seed,)``), which makes
    the minimum a deterministic function of lam.
    """
    if gcd(n, k) < 2:
        raise InvalidInputError(f"gcd({n},{k}) = 1: nothing to subtract")
    base = MapSpec(n, k, 0.0, tuple(coeffs))
    starts = start_points(n, settings.restarts, key if key is not None else (settings.seed,))
    zb = settings.zero_band
    history: list[tuple[float, float]] = []
    witness: dict[float, np.ndarray] = {}

    def g(lam: float) -> float:
        value, x = robust_min(base.with_lam(lam), settings, starts)
        history.append((lam, value))
        witness[lam] = x
        return value

    def result(lam: float, value: float, iters: int, converged: bool) -> LambdaMaxResult:
        return LambdaMaxResult(
            lambda_max=float(lam),
            iterations=iters,
            converged=converged,
            final_objective=float(value),
            witness_x=[float(t) for t in witness[lam]],
            history=history,
        )

    lam0, lam1 = float(n), float(n - 1)
    g0 = g(lam0)
    if g0 >= -zb:
        return result(lam0, g0, 0, True)
    g1 = g(lam1)
    for it in range(1, settings.max_newton_iters + 1):
        if abs(g1) <= zb:
            return result(lam1, g1, it - 1, True)
        if g1 == g0:
            new = lam1 - settings.newton_tol
        else:
            new = lam1 - g1 * (lam1 - lam0) / (g1 - g0)
        new = min(max(new, 0.0), float(n))
        step = abs(new - lam1)
        lam0, g0 = lam1, g1
        lam1, g1 = new, g(new)
        if step <= settings.newton_tol:
            return result(lam1, g1, it, abs(g1) <= zb or g1 >= -zb)
    return result(lam1, g1, settings.max_newton_iters, False)


def d2_witness(n: int, k: int, lam: float, psi) -> float:
    """Reduced 2x2 determinant (up to a factor 4) for the alternating-sign vector.

    With s = |psi|^2 (psi normalised), X_ev/X_od the even/odd sums of s and
    D_ev/D_od the even/odd sums of D_i s_i, returns

        [D_ev - (1+lam/n) X_ev^2][D_od - (1+lam/n) X_od^2] - (1-lam/n)^2 X_ev^2 X_od^2.
    """
    if n % 2:
        raise InvalidInputError(f"n must be even, got {n}")
    psi = np.asarray(psi, dtype=complex).ravel()
    if psi.size != n:
        raise InvalidInputError(f"psi must have length {n}")
    s = np.abs(psi) ** 2
    s = s / s.sum()
    d = diag_weights(n, k, s)
    x_ev, x_od = s[0::2].sum(), s[1::2].sum()
    d_ev, d_od = (d * s)[0::2].sum(), (d * s)[1::2].sum()
    a = 1 + lam / n
    b = 1 - lam / n
    return float((d_ev - a * x_ev**2) * (d_od - a * x_od**2) - b**2 * x_ev**2 * x_od**2)


def with_settings(settings: SearchSettings, **changes) -> SearchSettings:
    return replace(settings, **changes)
