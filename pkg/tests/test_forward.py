import math
import warnings

import numpy as np
import pytest

from emfourier.errors import DomainError, QuadratureWarning
from emfourier.forward import (closed_form_radiation, electric_far_field, magnetic_far_field,
                               radiation_vector, single_mode_far_field)
from emfourier.measurement import synthesize
from emfourier.quadrature import QuadratureSpec
from emfourier.source_model import (Polarization, SourceSpec, constant_profile,
                                    fourier_mode_profile, summed_source, zero_profile)
from emfourier.spectral_grid import MU0, GridParams, ProbePoint, build_probe_set

EZ = Polarization((0.0, 0.0, 1.0))
# standalone 200^3 midpoint evaluation of Example 2's electric far field at the zero-mode probe
EX2_E_ZERO_MIDPOINT = np.array([0j, -5.89276845590971e-06 - 0.0014658454218639627j,
                                -2.1172820061521839e-07 + 0.00253891874671062j])


def probe_for(l, params=GridParams(N=3)):
    return next(pr for pr in build_probe_set(params) if pr.l == tuple(l))


def test_constant_source_at_zero_wavenumber():
    src = SourceSpec(EZ, constant_profile(1.0), zero_profile())
    assert np.allclose(radiation_vector(src, 0.0, (1, 0, 0)), [0, 0, 1], atol=1e-14)


def test_matched_mode_phases_cancel():
    l = (1, 2, -1)
    src = SourceSpec(EZ, fourier_mode_profile(l), zero_profile())
    pr = probe_for(l)
    assert np.allclose(radiation_vector(src, pr.k, pr.xhat), [0, 0, 1], atol=1e-12)
    other = probe_for((2, 0, 1))
    assert np.allclose(radiation_vector(src, other.k, other.xhat), 0, atol=1e-12)


def test_single_mode_electric():
    src = SourceSpec(EZ, fourier_mode_profile((1, 0, 0)), zero_profile())
    pr = probe_for((1, 0, 0))
    E = electric_far_field(src, pr).value
    want = 1j * pr.omega * MU0 / (4 * math.pi) * np.array([0, 0, 1])
    assert np.allclose(E, want, rtol=1e-12, atol=1e-12 * abs(want[2]))


def test_single_mode_magnetic():
    pr = probe_for((1, 0, 0))
    H = magnetic_far_field(SourceSpec(EZ, fourier_mode_profile((1, 0, 0)), zero_profile()), pr).value
    assert np.allclose(H, [0, -0.5j, 0], atol=1e-12)
    H = magnetic_far_field(SourceSpec(EZ, zero_profile(), fourier_mode_profile((1, 0, 0))), pr).value
    assert np.allclose(H, [0, 0, -math.pi], atol=1e-11)


def test_closed_forms():
    pr = probe_for((1, 0, 0))
    assert np.allclose(single_mode_far_field((1, 0, 0), 1, 0, pr, EZ, 1.0, "magnetic").value,
                       [0, -0.5j, 0])
    E = single_mode_far_field((1, 0, 0), 0, 1, pr, EZ, 1.0, "electric").value
    assert np.allclose(E, -(pr.omega * MU0 / 2) * np.array([0, 1, 0]))
    assert not np.any(single_mode_far_field((1, 0, 0), 0, 0, pr, EZ, 1.0, "electric").value)
    with pytest.raises(DomainError):
        single_mode_far_field((2, 0, 0), 1, 0, pr, EZ, 1.0, "magnetic")


def test_example2_zero_probe_matches_midpoint(example2):
    pr = probe_for((0, 0, 0))
    E = electric_far_field(example2, pr).value
    assert np.max(np.abs(E - EX2_E_ZERO_MIDPOINT)) <= 1e-7 * np.max(np.abs(EX2_E_ZERO_MIDPOINT))


def test_transversality_and_conjugate_symmetry(ex1_small):
    d = ex1_small
    for F in (d.E, d.H):
        radial = np.abs(np.sum(d.xhat * F, axis=1))
        assert np.all(radial <= 1e-10 * np.linalg.norm(F, axis=1) + 1e-300)
    idx = d.index()
    for i, m in enumerate(d.modes):
        if not m.any():
            continue
        j = idx[tuple(-m)]
        scale_E, scale_H = np.abs(d.E[i]).max(), np.abs(d.H[i]).max()
        assert np.max(np.abs(d.E[j] + np.conj(d.E[i]))) <= 1e-10 * scale_E
        assert np.max(np.abs(d.H[j] - np.conj(d.H[i]))) <= 1e-10 * scale_H


def test_linearity(example1, example2):
    s1 = SourceSpec(example1.p, example2.f, example1.g, min_points=64)
    s2 = SourceSpec(example1.p, constant_profile(0.5), zero_profile())
    pr = probe_for((1, -1, 2))
    q = QuadratureSpec("gauss", 64)
    both = magnetic_far_field(summed_source(s1, s2), pr, q).value
    parts = magnetic_far_field(s1, pr, q).value + magnetic_far_field(s2, pr, q).value
    assert np.allclose(both, parts, rtol=1e-13, atol=1e-16)


def test_underresolved_quadrature_warns(example1):
    pr = probe_for((3, 3, 3))
    with pytest.warns(QuadratureWarning):
        fv = magnetic_far_field(example1, pr, QuadratureSpec("gauss", 8))
    assert fv.diagnostics


def test_closed_form_radiation_single_mode():
    N = 2
    A = np.zeros((5, 5, 5, 3), complex)
    A[N + 1, N, N] = [0, 0, 1]
    kv = 2 * math.pi * np.array([[1.0, 0, 0], [0, 1.0, 0], [0.3, 0.1, 0.0]])
    R = closed_form_radiation(A, 1.0, kv)
    assert np.allclose(R[0], [0, 0, 1]) and np.allclose(R[1], 0, atol=1e-15)
    src = SourceSpec(EZ, fourier_mode_profile((1, 0, 0)), zero_profile())
    assert np.allclose(R[2], radiation_vector(src, np.linalg.norm(kv[2]), kv[2] / np.linalg.norm(kv[2])),
                       atol=1e-12)


def test_multithreaded_forward_is_identical(example1):
    p = GridParams(N=4)
    a = synthesize(example1, p, "H", workers=1)
    b = synthesize(example1, p, "H", workers=4)
    assert np.array_equal(a.H, b.H)
