"""Probe points: admissible wavenumbers paired with observation directions."""

from dataclasses import dataclass
import math

import numpy as np

from .errors import ConfigurationError, DomainError
from .source_model import mode_lattice

MU0 = 4.0 * math.pi * 1e-7
EPS0 = 8.8541e-12


@dataclass(frozen=True)
class GridParams:
    a: float = 1.0
    lam: float = 1e-3
    N: int = 1
    mu0: float = MU0
    eps0: float = EPS0

    def __post_init__(self):
        if not self.a > 0:
            raise ConfigurationError("a must be positive")
        if not 0 < self.lam < 0.5:
            raise ConfigurationError("lambda must lie in (0, 1/2)")
        if int(self.N) != self.N or self.N < 1:
            raise ConfigurationError("N must be a positive integer")
        if not (self.mu0 > 0 and self.eps0 > 0):
            raise ConfigurationError("mu0 and eps0 must be positive")
        object.__setattr__(self, "N", int(self.N))

    @classmethod
    def normalized(cls, **kw):
        """Parameters with ``mu0 = eps0 = 1``."""
        return cls(mu0=1.0, eps0=1.0, **kw)

    @property
    def n_probes(self):
        return (2 * self.N + 1) ** 3

    def omega(self, k):
        return np.asarray(k) / math.sqrt(self.mu0 * self.eps0)

    def with_order(self, N):
        return GridParams(self.a, self.lam, N, self.mu0, self.eps0)


@dataclass(frozen=True)
class ProbePoint:
    l: tuple
    k: float
    xhat: tuple
    omega: float

    @property
    def is_zero_mode(self):
        return not any(self.l)


def admissible_wavenumber(l, a, lam):
    """``(2 pi / a)|l|`` for ``l != 0`` and ``(2 pi / a) lam`` for the zero mode."""
    if not (a > 0 and lam > 0):
        raise DomainError("a and lambda must be positive")
    l = np.asarray(l, dtype=float)
    n = float(np.linalg.norm(l))
    return 2.0 * math.pi / a * (n if n > 0 else lam)


def observation_direction(l):
    l = np.asarray(l, dtype=float)
    n = np.linalg.norm(l)
    if n == 0:
        return np.array([1.0, 0.0, 0.0])
    return l / n


def probe_arrays(params):
    """Vectorized probe set: ``(modes, k, xhat)`` in lexicographic mode order."""
    return probe_arrays_for(mode_lattice(params.N), params)


def probe_arrays_for(modes, params):
    modes = np.asarray(modes, dtype=np.int64).reshape(-1, 3)
    norms = np.linalg.norm(modes.astype(float), axis=1)
    zero = norms == 0
    k = 2.0 * math.pi / params.a * np.where(zero, params.lam, norms)
    xhat = np.where(zero[:, None], np.array([1.0, 0.0, 0.0]),
                    modes / np.where(zero, 1.0, norms)[:, None])
    return modes, k, xhat


def build_probe_set(params):
    """All ``(2N+1)^3`` probe points, ordered lexicographically by ``l``."""
    modes, k, xhat = probe_arrays(params)
    om = params.omega(k)
    return [ProbePoint(tuple(int(v) for v in m), float(kk), tuple(float(v) for v in x), float(w))
            for m, kk, x, w in zip(modes, k, xhat, om)]


def truncation_order(delta, tau=3.0, sigma=1.0):
    """Number of modes per half-axis for noise level ``delta``.

    ``floor(tau * delta**(-1/(sigma + 5/2))) + 1``; the defaults give
    ``[3 delta^(-2/7)] + 1``.
    """
    if not delta > 0:
        raise DomainError(f"noise level must be positive, got {delta!r}")
    if delta > 1:
        raise DomainError(f"noise level must be at most 1, got {delta!r}")
    if tau < 1:
        raise DomainError("tau must be >= 1")
    return int(math.floor(tau * delta ** (-1.0 / (sigma + 2.5)))) + 1
