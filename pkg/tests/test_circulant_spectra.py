import math

import numpy as np
import pytest

from posmap.circulant_spectra import (
    build_ABC,
    c_spectrum,
    c_values,
    check_fact2_bounds,
    cyclic_permutation,
    mu_constant,
)
from posmap.errors import InvalidInputError


def test_small_triples():
    t = build_ABC(4, 2)
    assert np.array_equal(t.A, [[2, 1], [1, 2]])
    assert np.array_equal(t.B, np.eye(2))
    assert np.array_equal(t.C, [[0, 1], [1, 0]])
    p = cyclic_permutation(4)
    t = build_ABC(8, 4)
    assert np.array_equal(t.A, 4 * np.eye(4) + p + p @ p)
    assert np.array_equal(t.B, np.eye(4) + p)
    assert np.array_equal(t.C, p + p @ p)
    assert np.array_equal(build_ABC(8, 6).A, 2 * np.eye(4) + np.ones((4, 4)) - np.eye(4))
    assert not t.A.flags.writeable


def test_permutation_direction():
    y = np.arange(5.0)
    assert np.array_equal(cyclic_permutation(5) @ y, np.roll(y, -1))


@pytest.mark.parametrize("n,k", [(4, 3), (5, 2), (6, 6), (6, 0)])
def test_rejects_bad_pairs(n, k):
    with pytest.raises(InvalidInputError):
        build_ABC(n, k)


def test_closed_form_matches_dense():
    for n in range(4, 41, 2):
        for k in range(2, n - 1, 2):
            c = build_ABC(n, k).C
            dense = np.linalg.eigvalsh((c + c.T) / 2)
            assert np.max(np.abs(np.sort(c_values(n, k)) - dense)) <= 1e-10


def test_spectrum_examples():
    for n in (6, 10, 14):
        j = np.arange(1, n // 2)
        assert np.allclose(c_values(n, 2)[1:], np.cos(4 * np.pi * j / n))
    rep = c_spectrum(8, 4)
    assert set(np.round(rep.values[1:], 12)) <= {0.0, -1.0}
    assert (rep.c_max, rep.c_min) == pytest.approx((0.0, -1.0))
    for k in (4, 6, 8):
        assert np.allclose(c_values(2 * k + 2, k)[1:], -0.5)


def test_spectrum_structure():
    for n, k in [(12, 4), (20, 8), (30, 10)]:
        vals = c_values(n, k)
        assert vals[0] == k / 2
        assert np.allclose(vals[1:], vals[1:][::-1])
        rep = c_spectrum(n, k)
        assert rep.c_max <= k / 2
        a = build_ABC(n, k).A
        assert np.linalg.eigvalsh((a + a.T) / 2).min() == pytest.approx(n - k + rep.c_min)


def test_mu():
    assert abs(mu_constant() - 0.34026) < 5e-6
    assert 1 / mu_constant() == pytest.approx(2.5 * math.sqrt((5 - math.sqrt(5)) / 2), rel=1e-15)
    assert math.sin(math.pi / 5) == pytest.approx(math.sqrt(5 / 8 - math.sqrt(5) / 8), abs=1e-15)


def test_spectral_bounds():
    assert check_fact2_bounds(c_spectrum(8, 4)) is True
    assert check_fact2_bounds(c_spectrum(8, 6)) is True
    assert check_fact2_bounds(c_spectrum(10, 2)) is None
    assert all(c_spectrum(n, k).bounds_ok is not False for n in range(4, 41, 2) for k in range(2, n - 1, 2))
    assert c_spectrum(8, 4).to_dict()["bounds_ok"] is True
