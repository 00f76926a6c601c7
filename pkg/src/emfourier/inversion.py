"""Closed-form recovery of Fourier coefficients from far-field records.

For a nonzero mode ``l`` probed at ``k_l = (2 pi / a)|l|`` along
``xhat_l = l / |l|``, the far field only sees the coefficients of mode
``l``, and projecting onto ``xhat x p`` and ``xhat x (p x l)`` (magnetic
data) or onto ``p`` and ``p x l`` (electric data) separates ``f_l`` from
``g_l``.  All projections are bilinear dot products, without conjugation.
The zero mode is probed at the small wavenumber ``(2 pi / a) lam`` and
needs a correction for leakage from the ``(l1, 0, 0)`` modes.
"""

from collections.abc import Mapping
from dataclasses import dataclass
import math

import numpy as np

from .coefficients import CoefficientSet, fmt
from .errors import DegeneracyError, SequencingError
from .source_model import Polarization, mode_lattice
from .spectral_grid import MU0

DEGENERACY_TOL = 1e-9


def field_key(kind):
    """Normalize ``E``/``electric`` and ``H``/``magnetic`` to ``E`` or ``H``."""
    key = {"E": "E", "electric": "E", "H": "H", "magnetic": "H"}.get(kind)
    if key is None:
        raise ValueError(f"unknown field kind {kind!r}")
    return key


def _projectors(modes, xhat, p):
    """``xhat x p``, ``p x l`` and ``xhat x (p x l)`` for each probe."""
    ls = np.asarray(modes, dtype=float)
    xp = np.cross(xhat, p)
    pl = np.cross(p, ls)
    xpl = np.cross(xhat, pl)
    return xp, pl, xpl


def _check_degeneracy(modes, xp, xpl, tol, need_g=True):
    n_xp = np.linalg.norm(xp, axis=-1)
    bad = n_xp <= tol
    if need_g:
        bad |= np.linalg.norm(xpl, axis=-1) <= tol
    if np.any(bad):
        i = int(np.argmax(bad))
        which = "xhat x p" if n_xp[i] <= tol else "xhat x (p x l)"
        raise DegeneracyError(modes[i], which)


def _extract_arrays(modes, k, xhat, F, key, p, a, mu0, omega, tol):
    xp, pl, xpl = _projectors(modes, xhat, p)
    _check_degeneracy(modes, xp, xpl, tol)
    if key == "H":
        fhat = 4 * math.pi * np.sum(xp * F, axis=-1) / (1j * k * a**3 * np.sum(xp * xp, axis=-1))
        ghat = -2 * np.sum(xpl * F, axis=-1) / (k * a**2 * np.sum(xpl * xpl, axis=-1))
    else:
        fhat = 4 * math.pi * (F @ p) / (1j * omega * mu0 * a**3 * np.sum(xp * xp, axis=-1))
        ghat = -2 * np.sum(pl * F, axis=-1) / (omega * mu0 * a**2 * np.sum(xpl * xpl, axis=-1))
    return fhat, ghat


def extract_nonzero_mode(record, kind, p, a, mu0=None, tol=DEGENERACY_TOL):
    """``(f_l, g_l)`` from one record at a nonzero mode."""
    key = field_key(kind)
    probe = record.probe
    if not any(probe.l):
        raise ValueError("extract_nonzero_mode needs a probe at a nonzero mode")
    F = getattr(record, key)
    if F is None:
        raise ValueError(f"record at {probe.l} carries no {key} data")
    p = np.asarray(getattr(p, "vector", p), dtype=float)
    fhat, ghat = _extract_arrays(np.array([probe.l]), np.array([probe.k]), np.array([probe.xhat]),
                                 np.asarray(F)[None, :], key, p, a,
                                 MU0 if mu0 is None else mu0, np.array([probe.omega]), tol)
    return complex(fhat[0]), complex(ghat[0])


def zero_mode_correction_integral(l, a, lam):
    """``integral over D of exp(i (k_l lhat - k_0 xhat_0) . y) dy``.

    Equals ``a^3 sin((l1 - lam) pi) / ((l1 - lam) pi)`` when ``l2 = l3 = 0``
    and vanishes otherwise.
    """
    l = np.asarray(l)
    l1, l2, l3 = (int(v) for v in l)
    if (l1, l2, l3) == (0, 0, 0):
        raise ValueError("correction integral is defined for nonzero modes")
    if l2 != 0 or l3 != 0:
        return 0.0
    return float(a**3 * np.sinc(l1 - lam))


def _correction_weights(modes, a, lam):
    modes = np.asarray(modes)
    on_axis = (modes[:, 1] == 0) & (modes[:, 2] == 0) & (modes[:, 0] != 0)
    return np.where(on_axis, a**3 * np.sinc(modes[:, 0] - lam), 0.0)


def extract_zero_mode(record, kind, nonzero_fhats, a, lam, p, N=None, mu0=None,
                      tol=DEGENERACY_TOL):
    """``f_0`` from the zero-mode record and the already recovered nonzero ``f_l``.

    ``nonzero_fhats`` is a :class:`CoefficientSet` or a mapping ``l -> f_l``;
    a mapping must cover every ``1 <= |l|_inf <= N``.
    """
    key = field_key(kind)
    probe = record.probe
    if any(probe.l):
        raise ValueError("extract_zero_mode needs the zero-mode record")
    if isinstance(nonzero_fhats, CoefficientSet):
        modes = nonzero_fhats.modes()
        fvals = nonzero_fhats.fhat.reshape(-1)
    elif isinstance(nonzero_fhats, Mapping):
        if N is None:
            N = max((max(abs(int(v)) for v in l) for l in nonzero_fhats), default=0)
        need = [tuple(int(v) for v in m) for m in mode_lattice(N) if any(m)]
        missing = [m for m in need if m not in nonzero_fhats]
        if missing or N < 1:
            raise SequencingError(
                "zero-mode extraction needs every nonzero-mode coefficient first; "
                f"missing {missing[:5]}{' ...' if len(missing) > 5 else ''}")
        modes = np.array(need)
        fvals = np.array([nonzero_fhats[m] for m in need], dtype=complex)
    else:
        raise TypeError("nonzero_fhats must be a CoefficientSet or a mapping")
    F = getattr(record, key)
    if F is None:
        raise ValueError(f"zero-mode record carries no {key} data")
    return _zero_mode_value(np.asarray(F), key, probe.k, probe.omega, np.asarray(probe.xhat),
                            modes, fvals, np.asarray(getattr(p, "vector", p), dtype=float),
                            a, lam, MU0 if mu0 is None else mu0, tol)


def _zero_mode_value(F, key, k0, omega0, x0, modes, fvals, p, a, lam, mu0, tol):
    xp = np.cross(x0, p)
    nxp2 = float(xp @ xp)
    if math.sqrt(nxp2) <= tol:
        raise DegeneracyError((0, 0, 0), "xhat_0 x p")
    if key == "H":
        lead = 4 * math.pi * (xp @ F) / (1j * k0 * nxp2)
    else:
        lead = 4 * math.pi * (p @ F) / (1j * omega0 * mu0 * nxp2)
    nz = np.any(np.asarray(modes) != 0, axis=1)
    leak = np.sum(fvals[nz] * _correction_weights(np.asarray(modes)[nz], a, lam))
    return complex(lam * math.pi / (a**3 * math.sin(lam * math.pi)) * (lead - leak))


def recover_coefficients(d, p, kind="H", N=None, tol=DEGENERACY_TOL):
    """All ``f_l`` (``|l|_inf <= N``) and ``g_l`` (``l != 0``) from a dataset.

    ``p`` is the known polarization.  ``N`` defaults to the dataset order;
    a smaller order uses the corresponding subset of records.
    """
    key = field_key(kind)
    N = d.params.N if N is None else int(N)
    if getattr(d, key) is None:
        raise ValueError(f"dataset carries no {key} data")
    in_order = (N == d.params.N and len(d) == d.params.n_probes
                and np.array_equal(d.modes, mode_lattice(N)))
    sub = d if in_order else d.restricted(N)
    params = sub.params
    pv = np.asarray(getattr(p, "vector", p), dtype=float)
    F = getattr(sub, key)
    zero = np.all(sub.modes == 0, axis=1)
    nz = ~zero
    omega = params.omega(sub.k)

    fhat = np.zeros(len(sub), dtype=complex)
    ghat = np.zeros(len(sub), dtype=complex)
    fhat[nz], ghat[nz] = _extract_arrays(sub.modes[nz], sub.k[nz], sub.xhat[nz], F[nz], key, pv,
                                         params.a, params.mu0, omega[nz], tol)
    iz = int(np.argmax(zero))
    fhat[iz] = _zero_mode_value(F[iz], key, sub.k[iz], omega[iz], sub.xhat[iz],
                                sub.modes[nz], fhat[nz], pv, params.a, params.lam,
                                params.mu0, tol)
    polar = p if isinstance(p, Polarization) else Polarization(tuple(pv))
    return CoefficientSet(N, fhat, ghat, polar, params.a)


@dataclass
class ReconstructionField:
    """Samples of the truncated series on a tensor lattice over the cube."""

    axes: tuple
    values: np.ndarray
    imag_residual: float
    coefficients: CoefficientSet = None

    @property
    def real(self):
        return self.values.real

    @property
    def shape(self):
        return tuple(len(x) for x in self.axes)

    def points(self):
        g = np.meshgrid(*self.axes, indexing="ij")
        return np.stack(g, axis=-1)


def grid_axis(a, n):
    """``n`` uniformly spaced nodes on ``[-a/2, a/2]``, endpoints included."""
    return np.linspace(-0.5 * a, 0.5 * a, n)


def evaluate_series(c, x1, x2, x3):
    """``J_N`` on the tensor lattice ``x1 x x2 x x3``; shape ``(n1, n2, n3, 3)``."""
    A = c.amplitudes()
    r = np.arange(-c.N, c.N + 1)
    w = 2 * math.pi / c.a
    e = [np.exp(1j * w * r[:, None] * np.asarray(x, dtype=float)[None, :]) for x in (x1, x2, x3)]
    return np.einsum("abcd,ax,by,cz->xyzd", A, e[0], e[1], e[2], optimize=True)


def reconstruct(c, points_per_axis=50):
    """Evaluate ``J_N`` at the nodes of a uniform ``n^3`` grid over the cube."""
    ax = grid_axis(c.a, points_per_axis)
    vals = evaluate_series(c, ax, ax, ax)
    return ReconstructionField((ax, ax, ax), vals, float(np.max(np.abs(vals.imag))), c)


def write_reconstruction(rf, path):
    pts = rf.points().reshape(-1, 3)
    v = rf.values.reshape(-1, 3)
    cols = np.column_stack([pts, v[:, 0].real, v[:, 0].imag, v[:, 1].real, v[:, 1].imag,
                            v[:, 2].real, v[:, 2].imag])
    header = [f"# imag_residual={fmt(rf.imag_residual)}"]
    if rf.coefficients is not None:
        header.append(f"# N={rf.coefficients.N}")
    header.append("x1,x2,x3,reJ1,imJ1,reJ2,imJ2,reJ3,imJ3")
    with open(path, "w") as fh:
        fh.write("\n".join(header) + "\n")
        np.savetxt(fh, cols, fmt="%.17g", delimiter=",")
