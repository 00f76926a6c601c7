import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from emfourier.errors import ConfigurationError, DomainError
from emfourier.spectral_grid import (GridParams, admissible_wavenumber, build_probe_set,
                                     observation_direction, probe_arrays, truncation_order)


def test_admissible_wavenumber():
    assert admissible_wavenumber((1, 0, 0), 1.0, 1e-3) == pytest.approx(2 * math.pi)
    assert admissible_wavenumber((0, 0, 0), 1.0, 1e-3) == pytest.approx(2 * math.pi * 1e-3)
    assert admissible_wavenumber((1, 1, 1), 2.0, 1e-3) == pytest.approx(math.pi * math.sqrt(3))


@pytest.mark.parametrize("l,want", [
    ((0, 0, 2), (0, 0, 1)),
    ((0, 0, 0), (1, 0, 0)),
    ((1, 1, 0), (1 / math.sqrt(2), 1 / math.sqrt(2), 0)),
])
def test_observation_direction(l, want):
    assert np.allclose(observation_direction(l), want, atol=1e-15)


@pytest.mark.parametrize("N,count", [(1, 27), (2, 125), (4, 729)])
def test_probe_counts(N, count):
    probes = build_probe_set(GridParams(N=N))
    assert len(probes) == count
    for pr in probes:
        assert abs(np.linalg.norm(pr.xhat) - 1) <= 1e-12
        if pr.is_zero_mode:
            assert pr.xhat == (1.0, 0.0, 0.0)
            assert pr.k == pytest.approx(2 * math.pi * 1e-3)
        else:
            l = np.array(pr.l, dtype=float)
            assert pr.k == pytest.approx(2 * math.pi * np.linalg.norm(l))
            assert np.allclose(pr.xhat, l / np.linalg.norm(l))


def test_probe_order_is_lexicographic():
    modes, _, _ = probe_arrays(GridParams(N=2))
    keys = [tuple(m) for m in modes]
    assert keys == sorted(keys)


def test_probe_symmetry_and_injectivity():
    modes, k, xhat = probe_arrays(GridParams(N=3))
    where = {tuple(m): i for i, m in enumerate(modes)}
    for i, m in enumerate(modes):
        if not m.any():
            continue
        j = where[tuple(-m)]
        assert k[j] == k[i]
        assert np.array_equal(xhat[j], -xhat[i])
    pairs = {(round(float(kk), 12), tuple(np.round(x, 12))) for kk, x in zip(k, xhat)}
    assert len(pairs) == len(modes)


@pytest.mark.parametrize("delta,N", [(0.02, 10), (0.05, 8), (0.10, 6), (0.20, 5), (1.0, 4)])
def test_truncation_order(delta, N):
    assert truncation_order(delta) == N


@pytest.mark.parametrize("bad", [0.0, -0.1, 1.5])
def test_truncation_order_domain(bad):
    with pytest.raises(DomainError):
        truncation_order(bad)
    with pytest.raises(DomainError):
        truncation_order(0.1, tau=0.5)


@given(st.floats(1e-4, 1.0), st.floats(1e-4, 1.0))
def test_truncation_order_monotone(d1, d2):
    lo, hi = sorted((d1, d2))
    assert truncation_order(lo) >= truncation_order(hi)


def test_grid_params_validation():
    with pytest.raises(ConfigurationError):
        GridParams(a=0.0)
    with pytest.raises(ConfigurationError):
        GridParams(N=0)
    with pytest.raises(ConfigurationError):
        GridParams(lam=0.7)
    assert GridParams.normalized().omega(2.0) == 2.0
