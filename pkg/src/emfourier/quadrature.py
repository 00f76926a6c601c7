"""Tensor-product quadrature of oscillatory integrals over the cube (-a/2, a/2)^3.

The workhorse is :func:`cube_transform`, which evaluates

    T(kappa) = integral over D of F(y) exp(-i kappa . y) dy

for a batch of wavevectors ``kappa``.  Because the exponential factorizes
along the axes, the integrand is sampled once on the tensor grid and
contracted axis by axis against one-dimensional phase matrices.  When the
wavevectors take few distinct values per axis (the probe lattices used here
do), the whole batch costs little more than a single evaluation.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
import math

import numpy as np

from .errors import ConfigurationError

RULES = ("gauss", "midpoint")

# Floors of the automatic order rule.
GAUSS_FLOOR = 12
MIDPOINT_FLOOR = 200

# Bytes allowed for one slab of intermediate arrays.
_SLAB_BYTES = 64 * 2**20


@dataclass(frozen=True)
class QuadratureSpec:
    """Quadrature rule and number of nodes per axis.

    ``points_per_axis == 0`` means "choose automatically" (see
    :func:`auto_points`); use :meth:`resolved` to obtain a concrete rule.
    """

    rule: str = "gauss"
    points_per_axis: int = 0

    def __post_init__(self):
        if self.rule not in RULES:
            raise ConfigurationError(
                f"unknown quadrature rule {self.rule!r}; expected one of {RULES}")
        if self.points_per_axis != 0 and self.points_per_axis < 2:
            raise ConfigurationError("points_per_axis must be >= 2 (or 0 for auto)")

    @property
    def is_auto(self):
        return self.points_per_axis == 0

    def resolved(self, k_max, a):
        if not self.is_auto:
            return self
        return QuadratureSpec(self.rule, auto_points(self.rule, k_max, a))


def required_points(k, a):
    """Minimum nodes per axis that resolve ``exp(-i k xhat . y)`` on an edge of length ``a``."""
    return max(GAUSS_FLOOR, math.ceil(3.0 * k * a / math.pi))


def auto_points(rule, k_max, a):
    n = required_points(k_max, a)
    if rule == "midpoint":
        n = max(n, MIDPOINT_FLOOR)
    return n


def nodes_weights(quad, a):
    """One-dimensional nodes and weights on (-a/2, a/2)."""
    n = quad.points_per_axis
    if n < 2:
        raise ConfigurationError("quadrature order unresolved; call QuadratureSpec.resolved first")
    if quad.rule == "gauss":
        t, w = np.polynomial.legendre.leggauss(n)
        return 0.5 * a * t, 0.5 * a * w
    h = a / n
    x = -0.5 * a + h * (np.arange(n) + 0.5)
    return x, np.full(n, h)


def _slab_size(q, width, ncomp):
    per_plane = q * q * max(width, 1) * max(ncomp, 3) * 16
    return int(max(1, min(q, _SLAB_BYTES // per_plane)))


def _unique_close(v):
    """``np.unique`` with values closer than ~1e-12 relative treated as equal."""
    scale = max(1.0, float(np.max(np.abs(v)))) if v.size else 1.0
    keys = np.rint(v / scale * 1e12).astype(np.int64)
    _, first, inv = np.unique(keys, return_index=True, return_inverse=True)
    return v[first], inv.reshape(-1)


def cube_transform(func, wavevectors, a, quad, workers=1):
    """Integrate ``func(y) * exp(-i kappa . y)`` over the cube for each wavevector.

    Parameters
    ----------
    func : callable
        Vectorized integrand.  Receives points of shape ``(..., 3)`` and
        returns an array of shape ``(...,)`` (scalar integrand) or
        ``(..., C)``.
    wavevectors : array_like, shape (P, 3)
    a : float
        Cube edge.
    quad : QuadratureSpec
        Must be resolved (``points_per_axis > 0``).
    workers : int
        Thread count used to process slabs of the tensor grid.  The result
        does not depend on it: partial sums are always accumulated in slab
        order.

    Returns
    -------
    ndarray, shape (P,) or (P, C), complex
    """
    kv = np.atleast_2d(np.asarray(wavevectors, dtype=float))
    if kv.shape[-1] != 3:
        raise ValueError("wavevectors must have shape (P, 3)")
    y, w = nodes_weights(quad, a)
    q = y.size

    uniq, inv = zip(*(_unique_close(kv[:, j]) for j in range(3)))
    sizes = [u.size for u in uniq]
    lattice = sizes[0] * sizes[1] * sizes[2] <= max(4 * kv.shape[0], 4096)

    # Probe the integrand shape on one point.
    sample = np.asarray(func(np.zeros((1, 3))))
    scalar = sample.ndim == 1
    ncomp = 1 if scalar else sample.shape[-1]

    if lattice:
        phases = [w[None, :] * np.exp(-1j * u[:, None] * y[None, :]) for u in uniq]
        width = max(sizes[1], sizes[2])
    else:
        phases = [w[None, :] * np.exp(-1j * kv[:, j, None] * y[None, :]) for j in range(3)]
        width = kv.shape[0]

    s = _slab_size(q, width, ncomp)
    starts = list(range(0, q, s))
    yy, zz = np.meshgrid(y, y, indexing="ij")

    def slab_values(i0):
        x = y[i0:i0 + s]
        pts = np.empty((x.size, q, q, 3))
        pts[..., 0] = x[:, None, None]
        pts[..., 1] = yy[None]
        pts[..., 2] = zz[None]
        vals = np.asarray(func(pts))
        if scalar:
            vals = vals[..., None]
        return vals

    def lattice_partial(i0):
        vals = slab_values(i0)
        m1, m2, m3 = phases
        t = np.einsum("abcd,zc->abzd", vals, m3, optimize=True)
        t = np.einsum("abzd,yb->ayzd", t, m2, optimize=True)
        return np.einsum("ayzd,xa->xyzd", t, m1[:, i0:i0 + s], optimize=True)

    def direct_partial(i0):
        vals = slab_values(i0)
        m1, m2, m3 = phases
        t = np.einsum("abcd,pc->pabd", vals, m3, optimize=True)
        t = np.einsum("pabd,pb->pad", t, m2)
        return np.einsum("pad,pa->pd", t, m1[:, i0:i0 + s])

    partial = lattice_partial if lattice else direct_partial
    acc = None
    if workers > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for part in pool.map(partial, starts):
                acc = part if acc is None else acc + part
    else:
        for i0 in starts:
            part = partial(i0)
            acc = part if acc is None else acc + part

    out = acc[inv[0], inv[1], inv[2]] if lattice else acc
    return out[:, 0] if scalar else out
