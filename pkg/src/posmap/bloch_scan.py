"""lambda_max over the Bloch sphere of subtraction vectors when gcd(n, k) = 3.

For d = 3 the subtraction vector is alpha |v_1> + beta |v_2>, and up to a
global phase the pair (alpha, beta) is a point on a 2-sphere. A grid of
(phi, theta) points is filled with lambda_max values, written atomically to a
JSON checkpoint after every point so an interrupted scan can resume.
"""

from __future__ import annotations

import csv
import json
import logging
import math
import os
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from math import gcd
from pathlib import Path
from typing import Callable

import numpy as np

from .errors import InvalidInputError, InvalidStateError
from .map_kernel import MapSpec, basis_vectors, optimized_apply
from .positivity_engine import SearchSettings, lambda_max

log = logging.getLogger(__name__)

ProgressFn = Callable[[int, int, float, bool], None]


def bloch_coeffs(phi: float, theta: float) -> tuple[complex, complex]:
    """(cos(theta/2), e^{i phi} sin(theta/2))."""
    return complex(math.cos(theta / 2)), complex(np.exp(1j * phi) * math.sin(theta / 2))


def lambda_range_bounds(n: int, k: int) -> tuple[float, float]:
    """Ends of the expected lambda_max range, n-k and n-k + (n-3)/(n-2k/3)."""
    return float(n - k), n - k + (n - 3) / (n - 2 * k / 3)


@dataclass
class ScanGrid:
    n: int
    k: int
    phi_values: np.ndarray
    theta_values: np.ndarray
    lambda_grid: np.ndarray  # (P, T), NaN where not yet computed
    converged: np.ndarray  # (P, T) bool
    meta: dict = field(default_factory=dict)

    @classmethod
    def create(
        cls, n: int, k: int, phi_res: int = 24, theta_res: int = 13, settings: SearchSettings | None = None
    ) -> "ScanGrid":
        """Uniform grid: phi = -pi + 2 pi p / P (periodic), theta from 0 to pi inclusive."""
        if gcd(n, k) != 3:
            raise InvalidInputError(f"Bloch scans need gcd(n,k) = 3, got gcd({n},{k}) = {gcd(n, k)}")
        if phi_res < 2 or theta_res < 2:
            raise InvalidInputError("grid must be at least 2 x 2")
        settings = settings or SearchSettings()
        phis = -np.pi + 2 * np.pi * np.arange(phi_res) / phi_res
        thetas = np.linspace(0.0, np.pi, theta_res)
        return cls(
            n=n,
            k=k,
            phi_values=phis,
            theta_values=thetas,
            lambda_grid=np.full((phi_res, theta_res), np.nan),
            converged=np.zeros((phi_res, theta_res), dtype=bool),
            meta={"settings": asdict(settings)},
        )

    @property
    def shape(self) -> tuple[int, int]:
        return self.lambda_grid.shape

    def settings(self) -> SearchSettings:
        return SearchSettings(**self.meta["settings"])

    def complete(self) -> bool:
        return not np.isnan(self.lambda_grid).any()

    def to_dict(self) -> dict:
        lam = [[None if np.isnan(x) else float(x) for x in row] for row in self.lambda_grid]
        return {
            "n": self.n,
            "k": self.k,
            "phi_values": self.phi_values.tolist(),
            "theta_values": self.theta_values.tolist(),
            "lambda_grid": lam,
            "converged": self.converged.tolist(),
            "meta": self.meta,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ScanGrid":
        lam = np.array(
            [[np.nan if x is None else x for x in row] for row in data["lambda_grid"]], dtype=float
        )
        return cls(
            n=int(data["n"]),
            k=int(data["k"]),
            phi_values=np.array(data["phi_values"], dtype=float),
            theta_values=np.array(data["theta_values"], dtype=float),
            lambda_grid=lam,
            converged=np.array(data["converged"], dtype=bool),
            meta=data["meta"],
        )

    def same_layout(self, other: "ScanGrid") -> bool:
        return (
            (self.n, self.k) == (other.n, other.k)
            and np.array_equal(self.phi_values, other.phi_values)
            and np.array_equal(self.theta_values, other.theta_values)
            and self.meta == other.meta
        )


def save_grid(grid: ScanGrid, path) -> None:
    """Write the grid as JSON via a temporary file and an atomic rename."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            json.dump(grid.to_dict(), fh)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_grid(path) -> ScanGrid:
    with open(path) as fh:
        return ScanGrid.from_dict(json.load(fh))


def _point(args) -> tuple[int, int, float, bool]:
    n, k, p, t, phi, theta, settings = args
    res = lambda_max(n, k, bloch_coeffs(phi, theta), settings, key=(settings.seed, p, t))
    return p, t, res.lambda_max, res.converged


def _pending(grid: ScanGrid) -> list[tuple[int, int]]:
    """Uncomputed points, poles first; a pole stands for its whole column."""
    P, T = grid.shape
    todo = []
    for t in (0, T - 1):
        if np.isnan(grid.lambda_grid[:, t]).any():
            todo.append((0, t))
    for p in range(P):
        for t in range(1, T - 1):
            if np.isnan(grid.lambda_grid[p, t]):
                todo.append((p, t))
    return todo


def default_workers() -> int:
    env = os.environ.get("POSMAP_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise InvalidInputError(f"POSMAP_THREADS must be an integer, got {env!r}") from None
    return os.cpu_count() or 1


def scan(
    n: int,
    k: int,
    grid: ScanGrid,
    settings: SearchSettings,
    checkpoint_path=None,
    workers: int = 1,
    progress: ProgressFn | None = None,
) -> ScanGrid:
    """Fill every uncomputed grid entry with lambda_max.

    If ``checkpoint_path`` exists it must hold a grid with the same layout
    and settings, and its entries are kept. Point (p, t) uses restart
    streams keyed by (seed, p, t), so the result does not depend on the
    order of evaluation or on the number of workers.
    """
    if (grid.n, grid.k) != (n, k):
        raise InvalidInputError(f"grid is for ({grid.n},{grid.k}), asked for ({n},{k})")
    if grid.meta.get("settings") != asdict(settings):
        raise InvalidInputError("grid settings differ from the search settings")
    if checkpoint_path is not None and os.path.exists(checkpoint_path):
        saved = load_grid(checkpoint_path)
        if not saved.same_layout(grid):
            raise InvalidStateError(f"checkpoint {checkpoint_path} belongs to a different scan")
        grid = saved
        log.info("resuming from %s", checkpoint_path)
    P, T = grid.shape
    todo = _pending(grid)
    jobs = [(n, k, p, t, grid.phi_values[p], grid.theta_values[t], settings) for p, t in todo]

    def record(p: int, t: int, lam: float, ok: bool) -> None:
        if t in (0, T - 1):
            grid.lambda_grid[:, t] = lam
            grid.converged[:, t] = ok
        else:
            grid.lambda_grid[p, t] = lam
            grid.converged[p, t] = ok
        if not ok:
            log.warning("point (phi=%g, theta=%g) did not converge", grid.phi_values[p], grid.theta_values[t])
        if checkpoint_path is not None:
            save_grid(grid, checkpoint_path)
        if progress is not None:
            progress(p, t, lam, ok)

    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for out in pool.map(_point, jobs):
                record(*out)
    else:
        for job in jobs:
            record(*_point(job))
    return grid


def q_matrix(n: int) -> np.ndarray:
    """Block-diagonal matrix of n/3 copies of the 3-cycle [[0,1,0],[0,0,1],[1,0,0]]."""
    if n % 3:
        raise InvalidInputError(f"3 must divide n, got {n}")
    block = np.roll(np.eye(3), 1, axis=1)
    return np.kron(np.eye(n // 3), block)


def cyclic_unitary(n: int) -> np.ndarray:
    """Full cyclic permutation with (U x)_i = x_{i+1 mod n}."""
    if n < 2:
        raise InvalidInputError(f"n must be >= 2, got {n}")
    return np.roll(np.eye(n), 1, axis=1)


def _check_pair(alpha: complex, beta: complex) -> None:
    if abs(abs(alpha) ** 2 + abs(beta) ** 2 - 1) > 1e-12:
        raise InvalidInputError("need |alpha|^2 + |beta|^2 = 1")


def verify_rotation_identity(n: int, alpha: complex, beta: complex) -> float:
    """Norm of (alpha v1 + w beta v2) - conj(w) Q (alpha v1 + beta v2), w = e^{2 pi i/3}."""
    q = q_matrix(n)
    _check_pair(alpha, beta)
    v1, v2 = basis_vectors(n, 3)
    w = np.exp(2j * np.pi / 3)
    lhs = alpha * v1 + w * beta * v2
    rhs = np.conj(w) * (q @ (alpha * v1 + beta * v2))
    return float(np.linalg.norm(lhs - rhs))


def map_rotation_defect(n: int, k: int, lam: float, alpha: complex, beta: complex, x, unitary=None) -> float:
    """Max entry of Phi'(X) - U Phi(U^T X U) U^T, where Phi' has beta rotated by e^{2 pi i/3}.

    ``unitary`` defaults to the full cyclic shift; passing ``q_matrix(n)``
    shows that the block 3-cycle does not intertwine the maps once n > 3.
    """
    if gcd(n, k) != 3:
        raise InvalidInputError(f"need gcd(n,k) = 3, got {gcd(n, k)}")
    _check_pair(alpha, beta)
    u = cyclic_unitary(n) if unitary is None else np.asarray(unitary)
    w = np.exp(2j * np.pi / 3)
    x = np.asarray(x, dtype=complex)
    rotated = optimized_apply(MapSpec(n, k, lam, (alpha, w * beta)), x)
    conj = u @ optimized_apply(MapSpec(n, k, lam, (alpha, beta)), u.T @ x @ u) @ u.T
    return float(np.abs(rotated - conj).max())


@dataclass
class ConjectureReport:
    n: int
    k: int
    lo: float
    hi: float
    observed_min: float
    observed_max: float
    range_ok: bool
    pole_value: float
    equator_value: float
    symmetry_defect: float
    all_converged: bool
    tol: float

    def to_dict(self) -> dict:
        return asdict(self)


def _nearest(values: np.ndarray, target: float) -> int:
    return int(np.argmin(np.abs(values - target)))


def symmetry_defect(grid: ScanGrid) -> float:
    """Max |lambda(phi, theta) - lambda(phi + 2 pi/3, theta)| over the grid."""
    P = grid.shape[0]
    if P % 3:
        raise InvalidInputError(f"phi resolution {P} is not a multiple of 3")
    shifted = np.roll(grid.lambda_grid, -P // 3, axis=0)
    return float(np.abs(grid.lambda_grid - shifted).max())


def conjecture_report(grid: ScanGrid, tol: float = 0.05) -> ConjectureReport:
    if not grid.complete():
        raise InvalidStateError(f"{int(np.isnan(grid.lambda_grid).sum())} grid points not computed")
    lo, hi = lambda_range_bounds(grid.n, grid.k)
    lam = grid.lambda_grid
    p0 = _nearest(grid.phi_values, 0.0)
    t_eq = _nearest(grid.theta_values, np.pi / 2)
    return ConjectureReport(
        n=grid.n,
        k=grid.k,
        lo=lo,
        hi=hi,
        observed_min=float(lam.min()),
        observed_max=float(lam.max()),
        range_ok=bool(lam.min() >= lo - tol and lam.max() <= hi + tol),
        pole_value=float(lam[p0, 0]),
        equator_value=float(lam[p0, t_eq]),
        symmetry_defect=symmetry_defect(grid),
        all_converged=bool(grid.converged.all()),
        tol=tol,
    )


def export_csv(grid: ScanGrid, path) -> None:
    """Columns phi,theta,lambda_max,converged; one row per grid point."""
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(["phi", "theta", "lambda_max", "converged"])
        for p, phi in enumerate(grid.phi_values):
            for t, theta in enumerate(grid.theta_values):
                lam = grid.lambda_grid[p, t]
                out.writerow([repr(float(phi)), repr(float(theta)), "" if np.isnan(lam) else repr(float(lam)), str(bool(grid.converged[p, t])).lower()])
