import csv
import json

import numpy as np
import pytest

from posmap.bloch_scan import (
    ScanGrid,
    bloch_coeffs,
    lambda_range_bounds,
    conjecture_report,
    cyclic_unitary,
    export_csv,
    load_grid,
    map_rotation_defect,
    q_matrix,
    scan,
    symmetry_defect,
    verify_rotation_identity,
)
from posmap.errors import InvalidInputError, InvalidStateError
from posmap.map_kernel import MapSpec
from posmap.positivity_engine import SearchSettings, lambda_max, mineig_objective, robust_min

TINY = SearchSettings(restarts=6, seed=5)


def test_bloch_coeffs():
    assert bloch_coeffs(0.7, 0.0) == (1, 0)
    a, b = bloch_coeffs(0.7, np.pi)
    assert abs(a) < 1e-16 and b == pytest.approx(np.exp(0.7j))
    assert np.allclose(bloch_coeffs(0.0, np.pi / 2), (2**-0.5, 2**-0.5))
    for phi, theta in np.random.default_rng(0).uniform([-np.pi, 0], [np.pi, np.pi], (20, 2)):
        a, b = bloch_coeffs(phi, theta)
        assert abs(abs(a) ** 2 + abs(b) ** 2 - 1) < 1e-15


def test_q_matrix():
    q3 = q_matrix(3)
    assert np.array_equal(q3, [[0, 1, 0], [0, 0, 1], [1, 0, 0]])
    assert np.array_equal(q3.T, q3 @ q3)
    q6 = q_matrix(6)
    assert np.array_equal(q6 @ q6.T, np.eye(6))
    assert np.array_equal(np.linalg.matrix_power(q6, 3), np.eye(6))
    with pytest.raises(InvalidInputError):
        q_matrix(8)


def test_vector_rotation_identity():
    assert verify_rotation_identity(6, 1, 0) <= 1e-12
    assert verify_rotation_identity(9, 2**-0.5, 1j * 2**-0.5) <= 1e-12
    with pytest.raises(InvalidInputError):
        verify_rotation_identity(6, 1, 1)


def test_map_rotation_identity():
    rng = np.random.default_rng(1)
    for n, k in [(6, 3), (9, 6), (12, 9)]:
        x = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        x = x + x.conj().T
        a, b = bloch_coeffs(*rng.uniform([-np.pi, 0], [np.pi, np.pi]))
        assert map_rotation_defect(n, k, 2.5, a, b, x) <= 1e-10
        # the block 3-cycle fixes the vectors but not the diagonal part of the map
        assert map_rotation_defect(n, k, 2.5, a, b, x, unitary=q_matrix(n)) > 1e-3
    assert np.array_equal(cyclic_unitary(4) @ np.arange(4), [1, 2, 3, 0])


def test_range_ends():
    assert lambda_range_bounds(6, 3) == pytest.approx((3, 3.75))
    assert lambda_range_bounds(9, 3) == pytest.approx((6, 6 + 6 / 7))
    assert lambda_range_bounds(9, 6) == pytest.approx((3, 4.2))


# Across the sphere the poles sit at the upper end of the range and the
# equator at n-k. These tests certify that ordering independently of the search.

def test_equator_is_not_positive_above_lower_end():
    # explicit negative direction for (6,3) at phi=0, theta=pi/2
    x = np.zeros(6)
    x[0], x[3] = 1, -1
    coeffs = bloch_coeffs(0.0, np.pi / 2)
    for lam in (3.05, 3.3, 3.75):
        assert mineig_objective(MapSpec(6, 3, lam, coeffs), x) == pytest.approx(1 - lam / 3, abs=1e-12)
    y = np.array([-1, 0, 0, -1, 0, 0, 1, 0, 0], dtype=float)
    for k in (3, 6):
        assert mineig_objective(MapSpec(9, k, 9 - k + 0.3, coeffs), y) < -0.05


def test_pole_stays_positive_above_lower_end():
    s = SearchSettings(restarts=30, seed=0)
    value, _ = robust_min(MapSpec(6, 3, 3.7, bloch_coeffs(0.0, 0.0)), s)
    assert value >= -1e-8
    res = lambda_max(6, 3, bloch_coeffs(0.0, 0.0), s)
    assert res.lambda_max == pytest.approx(3.75, abs=1e-3)


def test_rotation_leaves_lambda_max_unchanged():
    theta = 1.1
    vals = [lambda_max(6, 3, bloch_coeffs(phi, theta), TINY).lambda_max for phi in (0.3, 0.3 + 2 * np.pi / 3)]
    assert vals[0] == pytest.approx(vals[1], abs=1e-3)


def test_grid_layout():
    g = ScanGrid.create(6, 3, 6, 5, TINY)
    assert g.shape == (6, 5)
    assert g.phi_values[0] == -np.pi and g.phi_values[3] == 0.0
    assert g.theta_values[-1] == np.pi
    with pytest.raises(InvalidInputError):
        ScanGrid.create(8, 4, 6, 5, TINY)
    with pytest.raises(InvalidInputError):
        ScanGrid.create(6, 3, 1, 5, TINY)
    with pytest.raises(InvalidStateError):
        conjecture_report(g)


@pytest.fixture(scope="module")
def full_scan(tmp_path_factory):
    path = tmp_path_factory.mktemp("scan") / "grid.json"
    calls = []
    grid = scan(6, 3, ScanGrid.create(6, 3, 6, 3, TINY), TINY, path, progress=lambda *a: calls.append(a))
    return grid, path, calls


def test_scan_fills_grid_and_checkpoints(full_scan):
    grid, path, calls = full_scan
    assert grid.complete()
    assert len(calls) == 2 + 6  # two poles, then the equator row
    assert np.all((grid.lambda_grid >= 0) & (grid.lambda_grid <= 6))
    assert np.all(grid.lambda_grid[:, 0] == grid.lambda_grid[0, 0])
    saved = load_grid(path)
    assert np.array_equal(saved.lambda_grid, grid.lambda_grid)
    assert json.loads(path.read_text())["meta"]["settings"]["seed"] == 5


def test_scan_resume_matches_uninterrupted(full_scan, tmp_path):
    grid, _, _ = full_scan
    path = tmp_path / "grid.json"

    class Stop(Exception):
        pass

    def stop_after_three(p, t, lam, ok, seen=[]):
        seen.append(1)
        if len(seen) == 3:
            raise Stop

    with pytest.raises(Stop):
        scan(6, 3, ScanGrid.create(6, 3, 6, 3, TINY), TINY, path, progress=stop_after_three)
    partial = load_grid(path)
    assert np.isnan(partial.lambda_grid).sum() == 5
    calls = []
    resumed = scan(6, 3, ScanGrid.create(6, 3, 6, 3, TINY), TINY, path, progress=lambda *a: calls.append(a))
    assert len(calls) == 5
    assert np.array_equal(resumed.lambda_grid, grid.lambda_grid)
    again = []
    scan(6, 3, ScanGrid.create(6, 3, 6, 3, TINY), TINY, path, progress=lambda *a: again.append(a))
    assert again == []


def test_checkpoint_from_other_scan_rejected(full_scan):
    _, path, _ = full_scan
    other = SearchSettings(restarts=6, seed=6)
    with pytest.raises(InvalidStateError):
        scan(6, 3, ScanGrid.create(6, 3, 6, 3, other), other, path)
    with pytest.raises(InvalidInputError):
        scan(6, 3, ScanGrid.create(6, 3, 6, 3, other), TINY, None)


def test_report_and_csv(full_scan, tmp_path):
    grid, _, _ = full_scan
    rep = conjecture_report(grid)
    assert (rep.lo, rep.hi) == pytest.approx((3, 3.75))
    assert rep.pole_value == pytest.approx(3.75, abs=0.05)
    assert rep.equator_value == pytest.approx(3.0, abs=0.05)
    assert rep.symmetry_defect == symmetry_defect(grid)
    assert rep.range_ok == (rep.observed_min >= 2.95 and rep.observed_max <= 3.8)
    out = tmp_path / "grid.csv"
    export_csv(grid, out)
    text = out.read_text()
    assert text.endswith("\n")
    rows = list(csv.DictReader(text.splitlines()))
    assert len(rows) == 18 and list(rows[0]) == ["phi", "theta", "lambda_max", "converged"]
    assert float(rows[0]["lambda_max"]) == grid.lambda_grid[0, 0]
