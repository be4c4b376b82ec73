"""Batched Nelder-Mead minimisation.

Runs many independent simplex searches in lockstep so that the objective is
evaluated on stacked inputs (one numpy call per step instead of one per
restart). Each simplex follows the textbook reflect/expand/contract/shrink
rules on its own; a restart's trajectory does not depend on which other
restarts share the batch, so results are reproducible restart by restart.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

BatchObjective = Callable[[np.ndarray], np.ndarray]


def _coefficients(dim: int, adaptive: bool) -> tuple[float, float, float, float]:
    """Reflection, expansion, contraction and shrink factors."""
    if adaptive:
        # Gao & Han (2012) dimension-dependent choice
        return 1.0, 1.0 + 2.0 / dim, 0.75 - 1.0 / (2.0 * dim), 1.0 - 1.0 / dim
    return 1.0, 2.0, 0.5, 0.5


@dataclass
class SimplexResult:
    x: np.ndarray  # (batch, dim) best vertex per restart
    fun: np.ndarray  # (batch,)
    converged: np.ndarray  # (batch,) bool
    iterations: np.ndarray  # (batch,) int
    diameter: np.ndarray  # (batch,) final simplex diameter


def initial_simplex(x0: np.ndarray, nonzdelt: float = 0.05, zdelt: float = 0.00025) -> np.ndarray:
    """Axis-aligned start simplices around each row of x0, shape (batch, dim+1, dim)."""
    batch, dim = x0.shape
    sim = np.repeat(x0[:, None, :], dim + 1, axis=1)
    idx = np.arange(dim)
    step = np.where(x0 != 0.0, nonzdelt * x0, zdelt)
    sim[:, idx + 1, idx] += step
    return sim


def _diameter(sim: np.ndarray) -> np.ndarray:
    return np.max(np.abs(sim[:, 1:, :] - sim[:, :1, :]), axis=(1, 2))


def minimize_batch(
    f: BatchObjective,
    x0: np.ndarray,
    *,
    xtol: float = 1e-10,
    ftol: float = np.inf,
    maxiter: int | None = None,
    adaptive: bool = False,
) -> SimplexResult:
    """Minimise ``f`` from every row of ``x0`` simultaneously.

    ``f`` maps an array of points (m, dim) to values (m,). A restart is
    converged once its simplex diameter (max-norm distance of vertices to
    the best vertex) is at most ``xtol`` and its value spread at most
    ``ftol``; converged restarts are frozen. ``maxiter`` defaults to
    ``400 * dim``. ``adaptive`` switches to dimension-dependent
    coefficients, which stall less often above a handful of dimensions.
    """
    x0 = np.atleast_2d(np.asarray(x0, dtype=float))
    batch, dim = x0.shape
    if maxiter is None:
        maxiter = 400 * dim
    rho, chi, psi, sigma = _coefficients(dim, adaptive)

    sim = initial_simplex(x0)
    fsim = f(sim.reshape(-1, dim)).reshape(batch, dim + 1)
    iters = np.zeros(batch, dtype=int)
    done = np.zeros(batch, dtype=bool)

    for _ in range(maxiter):
        order = np.argsort(fsim, axis=1, kind="stable")
        sim = np.take_along_axis(sim, order[:, :, None], axis=1)
        fsim = np.take_along_axis(fsim, order, axis=1)

        spread = fsim[:, -1] - fsim[:, 0]
        done |= (_diameter(sim) <= xtol) & (spread <= ftol)
        act = np.flatnonzero(~done)
        if act.size == 0:
            break
        iters[act] += 1

        s = sim[act]
        fs = fsim[act]
        worst = s[:, -1, :]
        xbar = s[:, :-1, :].mean(axis=1)

        xr = xbar + rho * (xbar - worst)
        fr = f(xr)

        f_best = fs[:, 0]
        f_second = fs[:, -2]
        f_worst = fs[:, -1]

        expand = fr < f_best
        accept_r = (fr >= f_best) & (fr < f_second)
        outside = (fr >= f_second) & (fr < f_worst)
        inside = fr >= f_worst

        new_x = xr.copy()
        new_f = fr.copy()
        shrink = np.zeros(act.size, dtype=bool)

        trial_x = np.empty_like(xr)
        trial_x[expand] = xbar[expand] + rho * chi * (xbar[expand] - worst[expand])
        trial_x[outside] = xbar[outside] + psi * rho * (xbar[outside] - worst[outside])
        trial_x[inside] = xbar[inside] - psi * (xbar[inside] - worst[inside])
        need = ~accept_r
        if need.any():
            ft = np.full(act.size, np.inf)
            ft[need] = f(trial_x[need])

            take_e = expand & (ft < fr)
            new_x[take_e] = trial_x[take_e]
            new_f[take_e] = ft[take_e]

            ok_out = outside & (ft <= fr)
            new_x[ok_out] = trial_x[ok_out]
            new_f[ok_out] = ft[ok_out]
            shrink |= outside & ~ok_out

            ok_in = inside & (ft < f_worst)
            new_x[ok_in] = trial_x[ok_in]
            new_f[ok_in] = ft[ok_in]
            shrink |= inside & ~ok_in

        keep = ~shrink
        s[keep, -1, :] = new_x[keep]
        fs[keep, -1] = new_f[keep]

        if shrink.any():
            sh = s[shrink]
            sh[:, 1:, :] = sh[:, :1, :] + sigma * (sh[:, 1:, :] - sh[:, :1, :])
            fsh = f(sh[:, 1:, :].reshape(-1, dim)).reshape(-1, dim)
            s[shrink] = sh
            fs[shrink, 1:] = fsh

        sim[act] = s
        fsim[act] = fs

    order = np.argsort(fsim, axis=1, kind="stable")
    sim = np.take_along_axis(sim, order[:, :, None], axis=1)
    fsim = np.take_along_axis(fsim, order, axis=1)
    diam = _diameter(sim)
    done |= (diam <= xtol) & (fsim[:, -1] - fsim[:, 0] <= ftol)
    return SimplexResult(
        x=sim[:, 0, :].copy(),
        fun=fsim[:, 0].copy(),
        converged=done,
        iterations=iters,
        diameter=diam,
    )
