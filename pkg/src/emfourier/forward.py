"""Electric and magnetic far-field patterns of a current source.

Far fields are obtained from the radiation vector

    R(k, xhat) = integral over D of exp(-i k xhat . y) J(y) dy

as ``E = (i omega mu0 / 4 pi) (I - xhat xhat^T) R`` and
``H = (i k / 4 pi) xhat x R``.  ``R`` is computed by tensor quadrature;
finite Fourier-mode sources also have the closed forms below.
"""

from dataclasses import dataclass
import math
import warnings

import numpy as np

from .errors import DomainError, QuadratureWarning
from .quadrature import cube_transform, required_points
from .source_model import evaluate_current
from .spectral_grid import MU0

KINDS = ("electric", "magnetic")


@dataclass(frozen=True)
class FarFieldVector:
    value: np.ndarray
    kind: str
    diagnostics: tuple = ()


def _check_resolution(quad, k_max, a):
    need = required_points(k_max, a)
    if quad.points_per_axis < need:
        msg = (f"{quad.rule} quadrature with {quad.points_per_axis} points per axis "
               f"under-resolves k={k_max:.6g} (needs >= {need})")
        warnings.warn(msg, QuadratureWarning, stacklevel=3)
        return (msg,)
    return ()


def radiation_vectors(src, wavevectors, quad=None, workers=1):
    """Radiation vectors for wavevectors ``k xhat`` of shape ``(P, 3)``.

    Returns ``(R, quad_used, diagnostics)`` with ``R`` of shape ``(P, 3)``.
    """
    kv = np.atleast_2d(np.asarray(wavevectors, dtype=float))
    k_max = float(np.max(np.linalg.norm(kv, axis=1))) if len(kv) else 0.0
    q = src.resolve_quadrature(quad, k_max)
    diags = _check_resolution(q, k_max, src.a)
    vals = cube_transform(lambda y: evaluate_current(src, y), kv, src.a, q, workers=workers)
    return vals, q, diags


def radiation_vector(src, k, xhat, quad=None):
    """``integral over D of exp(-i k xhat . y) J(y) dy``; a complex 3-vector."""
    kv = k * np.asarray(xhat, dtype=float)
    vals, _, _ = radiation_vectors(src, kv[None, :], quad)
    return vals[0]


def electric_from_radiation(R, k, xhat, omega, mu0):
    R = np.asarray(R)
    xhat = np.asarray(xhat, dtype=float)
    radial = np.sum(xhat * R, axis=-1, keepdims=True)
    return (1j * np.asarray(omega)[..., None] * mu0 / (4 * math.pi)) * (R - xhat * radial)


def magnetic_from_radiation(R, k, xhat):
    R = np.asarray(R)
    xhat = np.asarray(xhat, dtype=float)
    return (1j * np.asarray(k)[..., None] / (4 * math.pi)) * np.cross(xhat, R)


def electric_far_field(src, probe, quad=None, mu0=MU0):
    kv = probe.k * np.asarray(probe.xhat)
    R, _, diags = radiation_vectors(src, kv[None, :], quad)
    E = electric_from_radiation(R[0], probe.k, probe.xhat, probe.omega, mu0)
    return FarFieldVector(E, "electric", diags)


def magnetic_far_field(src, probe, quad=None):
    kv = probe.k * np.asarray(probe.xhat)
    R, _, diags = radiation_vectors(src, kv[None, :], quad)
    H = magnetic_from_radiation(R[0], probe.k, probe.xhat)
    return FarFieldVector(H, "magnetic", diags)


def single_mode_far_field(l, fhat, ghat, probe, p, a, kind, mu0=MU0):
    """Closed-form far field of the single mode ``(p fhat + p x grad(ghat phi_l))`` at its own probe."""
    l = np.asarray(l, dtype=float)
    if tuple(int(v) for v in l) != tuple(probe.l) or not np.any(l):
        raise DomainError(f"probe at {probe.l} does not match nonzero mode {tuple(l)}")
    p = np.asarray(getattr(p, "vector", p), dtype=float)
    x = np.asarray(probe.xhat, dtype=float)
    pl = np.cross(p, l)
    if kind == "magnetic":
        pref = 1j * probe.k * a**3 / (4 * math.pi)
        val = pref * (np.cross(x, p) * fhat + (2j * math.pi / a) * np.cross(x, pl) * ghat)
    elif kind == "electric":
        pref = 1j * probe.omega * mu0 * a**3 / (4 * math.pi)
        val = pref * (-np.cross(x, np.cross(x, p)) * fhat
                      + (2j * math.pi / a) * (-np.cross(x, np.cross(x, pl))) * ghat)
    else:
        raise ValueError(f"unknown far-field kind {kind!r}")
    return FarFieldVector(val, kind)


def closed_form_radiation(amplitudes, a, wavevectors):
    """Radiation vectors of ``J = sum_l A_l phi_l`` (finitely many modes).

    ``amplitudes`` has shape ``(2N+1, 2N+1, 2N+1, 3)`` indexed by ``l + N``.
    Each mode integrates to a product of one-dimensional sinc factors.
    """
    A = np.asarray(amplitudes)
    N = (A.shape[0] - 1) // 2
    r = np.arange(-N, N + 1)
    kv = np.atleast_2d(np.asarray(wavevectors, dtype=float)) * a / (2 * math.pi)
    s = [a * np.sinc(r[None, :] - kv[:, j, None]) for j in range(3)]
    return np.einsum("abcd,pa,pb,pc->pd", A, s[0], s[1], s[2], optimize=True)
