"""Vector current sources J = p f + p x grad(g) supported in the cube (-a/2, a/2)^3.

Scalar profiles are vectorized callables acting on arrays of points with a
trailing axis of length 3.  Gradients are analytic for every built-in
profile; :func:`with_fd_gradient` wraps a user profile that lacks one.
"""

from dataclasses import dataclass, field
import math
from typing import Callable, Optional

import numpy as np

from .errors import ConfigurationError, DomainError
from .quadrature import QuadratureSpec, auto_points, cube_transform

ArrayFn = Callable[[np.ndarray], np.ndarray]


# --------------------------------------------------------------------------
# Polarization


@dataclass(frozen=True)
class Polarization:
    """Unit polarization vector ``p``."""

    components: tuple

    def __post_init__(self):
        v = np.asarray(self.components, dtype=float)
        if v.shape != (3,) or not np.all(np.isfinite(v)):
            raise ConfigurationError(f"polarization must be a finite 3-vector, got {self.components!r}")
        if abs(np.linalg.norm(v) - 1.0) > 1e-12:
            raise ConfigurationError(f"polarization must have unit length, |p| = {np.linalg.norm(v)!r}")
        object.__setattr__(self, "components", tuple(float(c) for c in v))

    @classmethod
    def from_direction(cls, v):
        v = np.asarray(v, dtype=float)
        n = np.linalg.norm(v)
        if not n > 0:
            raise ConfigurationError("polarization direction must be nonzero")
        return cls(tuple(v / n))

    @property
    def vector(self):
        return np.array(self.components)

    def is_admissible(self, n_check=50, tol=1e-9):
        """True when ``|p x l| > tol |l|`` for every nonzero ``l`` with ``|l|_inf <= n_check``."""
        return min_cross_ratio(self.vector, n_check) > tol


def min_cross_ratio(p, n_check):
    """Smallest ``|p x l| / |l|`` over nonzero integer ``l`` with ``|l|_inf <= n_check``."""
    r = np.arange(-n_check, n_check + 1)
    best = np.inf
    # one l1-slab at a time to bound memory
    l2, l3 = np.meshgrid(r, r, indexing="ij")
    for l1 in r:
        ls = np.stack([np.full(l2.shape, l1), l2, l3], axis=-1).reshape(-1, 3).astype(float)
        norms = np.linalg.norm(ls, axis=1)
        keep = norms > 0
        ratio = np.linalg.norm(np.cross(p, ls[keep]), axis=1) / norms[keep]
        best = min(best, float(ratio.min()))
    return best


# --------------------------------------------------------------------------
# Scalar profiles


@dataclass(frozen=True)
class ScalarProfile:
    """A scalar function on the cube, optionally with its gradient.

    ``transform``, when given, returns the exact integral over the cube of
    ``value(y) exp(-i kappa . y)`` for wavevectors of shape ``(P, 3)``.  It
    is only used as an independent check of the quadrature path.
    """

    value: ArrayFn
    gradient: Optional[ArrayFn] = None
    name: str = "custom"
    params: dict = field(default_factory=dict)
    transform: Optional[ArrayFn] = None
    is_zero: bool = False
    smooth: bool = True

    def __call__(self, x):
        return self.value(np.asarray(x, dtype=float))


def zero_profile():
    def value(x):
        return np.zeros(np.shape(x)[:-1])

    def gradient(x):
        return np.zeros(np.shape(x))

    return ScalarProfile(value, gradient, name="zero", is_zero=True,
                         transform=lambda kv: np.zeros(len(kv), dtype=complex))


def constant_profile(c=1.0):
    def value(x):
        return np.full(np.shape(x)[:-1], c)

    def gradient(x):
        return np.zeros(np.shape(x))

    return ScalarProfile(value, gradient, name="constant", params={"value": c})


def gaussian_profile(amplitude, alpha, center=(0.0, 0.0, 0.0)):
    """``amplitude * exp(-alpha |x - center|^2)``."""
    c = np.asarray(center, dtype=float)

    def value(x):
        d = x - c
        return amplitude * np.exp(-alpha * np.sum(d * d, axis=-1))

    def gradient(x):
        d = x - c
        return (-2.0 * alpha * amplitude * np.exp(-alpha * np.sum(d * d, axis=-1)))[..., None] * d

    return ScalarProfile(value, gradient, name="gaussian",
                         params={"amplitude": amplitude, "alpha": alpha, "center": tuple(c)})


def ring_gaussian_profile(amplitude, alpha):
    """``amplitude * (x1^2 + x2^2) * exp(-alpha |x|^2)``."""

    def value(x):
        s = x[..., 0] ** 2 + x[..., 1] ** 2
        return amplitude * s * np.exp(-alpha * (s + x[..., 2] ** 2))

    def gradient(x):
        s = x[..., 0] ** 2 + x[..., 1] ** 2
        e = amplitude * np.exp(-alpha * (s + x[..., 2] ** 2))
        g = np.empty(np.shape(x))
        g[..., 0] = e * x[..., 0] * (2.0 - 2.0 * alpha * s)
        g[..., 1] = e * x[..., 1] * (2.0 - 2.0 * alpha * s)
        g[..., 2] = e * x[..., 2] * (-2.0 * alpha * s)
        return g

    return ScalarProfile(value, gradient, name="ring_gaussian",
                         params={"amplitude": amplitude, "alpha": alpha})


def fourier_mode_profile(mode, a=1.0, coefficient=1.0):
    """``coefficient * exp(i (2 pi / a) m . x)``; complex valued."""
    m = np.asarray(mode, dtype=float)
    kvec = 2.0 * np.pi / a * m

    def value(x):
        return coefficient * np.exp(1j * (x @ kvec))

    def gradient(x):
        return (1j * coefficient * np.exp(1j * (x @ kvec)))[..., None] * kvec

    def transform(kv):
        d = (kvec[None, :] - np.asarray(kv, dtype=float)) * a / (2.0 * np.pi)
        return coefficient * a**3 * np.prod(np.sinc(d), axis=-1)

    return ScalarProfile(value, gradient, name="fourier_mode",
                         params={"mode": tuple(int(v) for v in mode), "a": a,
                                 "coefficient": coefficient},
                         transform=transform)


@dataclass(frozen=True)
class Ball:
    value: float
    center: tuple
    radius: float


@dataclass(frozen=True)
class Box:
    value: float
    lo: tuple
    hi: tuple


def piecewise_constant_profile(pieces):
    """Sum of constant values on disjoint closed balls and boxes."""
    pieces = tuple(pieces)

    def value(x):
        out = np.zeros(np.shape(x)[:-1])
        for pc in pieces:
            if isinstance(pc, Ball):
                d = x - np.asarray(pc.center)
                inside = np.sum(d * d, axis=-1) <= pc.radius**2
            else:
                inside = np.all((x >= np.asarray(pc.lo)) & (x <= np.asarray(pc.hi)), axis=-1)
            out = out + np.where(inside, pc.value, 0.0)
        return out

    def gradient(x):
        # zero almost everywhere; not usable as a g profile
        return np.zeros(np.shape(x))

    def transform(kv):
        kv = np.asarray(kv, dtype=float)
        out = np.zeros(len(kv), dtype=complex)
        for pc in pieces:
            if isinstance(pc, Ball):
                c = np.asarray(pc.center)
                kr = np.linalg.norm(kv, axis=1) * pc.radius
                small = kr < 1e-3
                safe = np.where(small, 1.0, kr)
                shape = np.where(small,
                                 1.0 - kr**2 / 10.0,
                                 3.0 * (np.sin(safe) - safe * np.cos(safe)) / safe**3)
                out += pc.value * (4.0 / 3.0) * np.pi * pc.radius**3 * shape * np.exp(-1j * kv @ c)
            else:
                lo, hi = np.asarray(pc.lo), np.asarray(pc.hi)
                width, mid = hi - lo, 0.5 * (hi + lo)
                fac = width * np.sinc(kv * width / (2.0 * np.pi)) * np.exp(-1j * kv * mid)
                out += pc.value * np.prod(fac, axis=1)
        return out

    return ScalarProfile(value, gradient, name="piecewise",
                         params={"pieces": pieces}, transform=transform, smooth=False)


def with_fd_gradient(profile, a=1.0, step=None):
    """Attach a central finite-difference gradient (step ``1e-6 a`` by default)."""
    h = 1e-6 * a if step is None else step

    def gradient(x):
        x = np.asarray(x, dtype=float)
        cols = []
        for j in range(3):
            e = np.zeros(3)
            e[j] = h
            cols.append((profile.value(x + e) - profile.value(x - e)) / (2.0 * h))
        return np.stack(cols, axis=-1)

    return ScalarProfile(profile.value, gradient, name=profile.name, params=profile.params,
                         transform=profile.transform, is_zero=profile.is_zero,
                         smooth=profile.smooth)


# --------------------------------------------------------------------------
# Sources


@dataclass(frozen=True)
class SourceSpec:
    """Current ``J = p f + p x grad(g)`` on ``D = (-a/2, a/2)^3``.

    ``min_points`` is a resolution floor (nodes per axis) for automatic
    quadrature orders; it accounts for the length scale of the profiles,
    which the oscillation-based rule alone does not see.
    """

    p: Polarization
    f: ScalarProfile
    g: ScalarProfile
    a: float = 1.0
    name: str = "custom"
    min_points: int = 0

    def __post_init__(self):
        if not self.a > 0:
            raise ConfigurationError(f"cube edge must be positive, got {self.a!r}")
        if self.g.gradient is None and not self.g.is_zero:
            raise ConfigurationError(
                "g profile has no gradient; supply one or wrap it with with_fd_gradient()")

    @property
    def smooth(self):
        return self.f.smooth and self.g.smooth

    def default_quadrature(self, k_max):
        """Automatic quadrature: Gauss-Legendre for smooth sources, midpoint otherwise."""
        rule = "gauss" if self.smooth else "midpoint"
        return QuadratureSpec(rule, max(auto_points(rule, k_max, self.a), self.min_points))

    def resolve_quadrature(self, quad, k_max):
        if quad is None:
            return self.default_quadrature(k_max)
        if quad.is_auto:
            return QuadratureSpec(quad.rule, max(auto_points(quad.rule, k_max, self.a), self.min_points))
        return quad


def evaluate_current(src, x):
    """``J(x) = p f(x) + p x grad g(x)`` for points ``x`` of shape ``(..., 3)``."""
    x = np.asarray(x, dtype=float)
    p = src.p.vector
    out = src.f.value(x)[..., None] * p
    if not src.g.is_zero:
        if src.g.gradient is None:
            raise ConfigurationError("g profile has no gradient")
        out = out + np.cross(p, src.g.gradient(x))
    return out


def fourier_basis(l, a, x):
    """``exp(i (2 pi / a) l . x)``."""
    if not a > 0:
        raise DomainError("cube edge must be positive")
    x = np.asarray(x, dtype=float)
    return np.exp(1j * (2.0 * np.pi / a) * (x @ np.asarray(l, dtype=float)))


def mode_lattice(N):
    """All ``l`` with ``|l|_inf <= N`` in lexicographic order, shape ``((2N+1)^3, 3)``."""
    r = np.arange(-N, N + 1)
    return np.stack(np.meshgrid(r, r, r, indexing="ij"), axis=-1).reshape(-1, 3)


def oracle_coefficients(src, l, quad=None):
    """Fourier coefficients ``(f_l, g_l)`` of the source profiles by quadrature."""
    f, g = oracle_coefficient_table(src, np.atleast_2d(l), quad)
    return complex(f[0]), complex(g[0])


def oracle_coefficient_table(src, modes, quad=None, workers=1):
    """Quadrature Fourier coefficients for many modes at once.

    ``g_0`` is returned like every other entry although it never enters
    ``J``.  Returns two complex arrays of length ``len(modes)``.
    """
    modes = np.asarray(modes, dtype=float).reshape(-1, 3)
    a = src.a
    kv = 2.0 * np.pi / a * modes
    k_max = float(np.max(np.linalg.norm(kv, axis=1))) if len(kv) else 0.0
    q = src.resolve_quadrature(quad, k_max)

    def integrand(y):
        return np.stack([src.f.value(y), src.g.value(y)], axis=-1)

    vals = cube_transform(integrand, kv, a, q, workers=workers) / a**3
    return vals[:, 0], vals[:, 1]


# --------------------------------------------------------------------------
# Catalog

SQRT = math.sqrt

CATALOG_NAMES = ("example1", "example2", "example3")


def catalog(name):
    """Built-in sources on the unit cube ``[-0.5, 0.5]^3``."""
    if name == "example1":
        return SourceSpec(
            p=Polarization((SQRT(5) / 4, -2 / 4, SQRT(7) / 4)),
            f=zero_profile(),
            g=ring_gaussian_profile(10.0, 50.0),
            a=1.0, name=name, min_points=64)
    if name == "example2":
        return SourceSpec(
            p=Polarization((SQRT(5) / 3, -1 / 3, SQRT(3) / 3)),
            f=gaussian_profile(3.0, 80.0, (0.15, 0.15, 0.0)),
            g=gaussian_profile(0.3, 40.0),
            a=1.0, name=name, min_points=64)
    if name == "example3":
        return SourceSpec(
            p=Polarization((1 / SQRT(6), SQRT(2) / SQRT(6), SQRT(3) / SQRT(6))),
            f=piecewise_constant_profile([
                Ball(1.0, (-0.25, 0.0, 0.0), 0.15),
                Box(0.5, (0.1, -0.15, -0.15), (0.4, 0.15, 0.15)),
            ]),
            g=zero_profile(),
            a=1.0, name=name)
    raise KeyError(f"unknown catalog source {name!r}; available: {', '.join(CATALOG_NAMES)}")


def scaled_source(src, factor):
    """The source ``factor * J`` (real factor)."""

    def scale(profile):
        if profile.is_zero:
            return profile
        grad = None if profile.gradient is None else (lambda x: factor * profile.gradient(x))
        tr = None if profile.transform is None else (lambda kv: factor * profile.transform(kv))
        return ScalarProfile(lambda x: factor * profile.value(x), grad, name=profile.name,
                             params=profile.params, transform=tr, smooth=profile.smooth)

    return SourceSpec(src.p, scale(src.f), scale(src.g), src.a, src.name, src.min_points)


def summed_source(a_src, b_src):
    """``J_a + J_b`` for two sources sharing polarization and cube."""
    if a_src.p != b_src.p or a_src.a != b_src.a:
        raise ConfigurationError("summed sources must share polarization and cube edge")

    def add(u, v):
        if u.is_zero:
            return v
        if v.is_zero:
            return u
        grad = None
        if u.gradient is not None and v.gradient is not None:
            grad = lambda x: u.gradient(x) + v.gradient(x)
        return ScalarProfile(lambda x: u.value(x) + v.value(x), grad, name="sum",
                             smooth=u.smooth and v.smooth)

    return SourceSpec(a_src.p, add(a_src.f, b_src.f), add(a_src.g, b_src.g), a_src.a,
                      "sum", max(a_src.min_points, b_src.min_points))
