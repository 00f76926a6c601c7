"""Fourier coefficient sets ``{f_l, g_l : |l|_inf <= N}`` and their CSV form."""

from dataclasses import dataclass
import math

import numpy as np

from .errors import DatasetFormatError
from .source_model import Polarization, mode_lattice, oracle_coefficient_table

COEF_COLUMNS = ["l1", "l2", "l3", "reF", "imF", "reG", "imG"]
COEF_FORMAT = "emfourier-coefficients-v1"


def fmt(x):
    return format(float(x), ".17g")


@dataclass
class CoefficientSet:
    """Dense coefficient arrays indexed by ``l + N`` along each axis.

    ``ghat`` at the zero mode is not part of the set; it is stored as 0
    and never used.
    """

    N: int
    fhat: np.ndarray
    ghat: np.ndarray
    p: Polarization
    a: float = 1.0

    def __post_init__(self):
        n = 2 * self.N + 1
        self.fhat = np.asarray(self.fhat, dtype=complex).reshape(n, n, n)
        self.ghat = np.asarray(self.ghat, dtype=complex).reshape(n, n, n).copy()
        self.ghat[self.N, self.N, self.N] = 0.0

    @classmethod
    def zeros(cls, N, p, a=1.0):
        n = 2 * N + 1
        return cls(N, np.zeros((n, n, n), complex), np.zeros((n, n, n), complex), p, a)

    @classmethod
    def from_source(cls, src, N, quad=None, workers=1):
        """Quadrature coefficients of a source's profiles (an oracle, not a recovery)."""
        f, g = oracle_coefficient_table(src, mode_lattice(N), quad, workers=workers)
        return cls(N, f, g, src.p, src.a)

    def _idx(self, l):
        i = tuple(int(v) + self.N for v in l)
        if any(j < 0 or j > 2 * self.N for j in i):
            raise KeyError(f"mode {tuple(l)} outside |l|_inf <= {self.N}")
        return i

    def f(self, l):
        return complex(self.fhat[self._idx(l)])

    def g(self, l):
        if not any(l):
            raise KeyError("g has no zero-mode coefficient")
        return complex(self.ghat[self._idx(l)])

    def modes(self):
        return mode_lattice(self.N)

    def truncated(self, N):
        """The sub-set with ``|l|_inf <= N``."""
        if N > self.N:
            raise ValueError(f"cannot extend a set of order {self.N} to {N}")
        s = slice(self.N - N, self.N + N + 1)
        return CoefficientSet(N, self.fhat[s, s, s], self.ghat[s, s, s], self.p, self.a)

    def amplitudes(self):
        """Vector amplitudes ``A_l = p f_l + (2 pi i / a)(p x l) g_l``, shape ``(n, n, n, 3)``."""
        n = 2 * self.N + 1
        p = self.p.vector
        ls = self.modes().reshape(n, n, n, 3).astype(float)
        pl = np.cross(p, ls)
        return self.fhat[..., None] * p + (2j * math.pi / self.a) * pl * self.ghat[..., None]

    def mirrored_conjugate(self):
        """The set ``l -> conj(c_{-l})``; equals ``self`` for a real source."""
        return CoefficientSet(self.N, np.conj(self.fhat[::-1, ::-1, ::-1]),
                              np.conj(self.ghat[::-1, ::-1, ::-1]), self.p, self.a)

    def max_abs(self):
        return float(max(np.max(np.abs(self.fhat)), np.max(np.abs(self.ghat))))

    def __add__(self, other):
        return CoefficientSet(self.N, self.fhat + other.fhat, self.ghat + other.ghat, self.p, self.a)

    def __rmul__(self, c):
        return CoefficientSet(self.N, c * self.fhat, c * self.ghat, self.p, self.a)


def max_relative_error(got, want):
    """``max |got - want| / max |want|`` over both coefficient families (zero-mode g excluded)."""
    err = max(np.max(np.abs(got.fhat - want.fhat)), np.max(np.abs(got.ghat - want.ghat)))
    scale = want.max_abs()
    return float(err / scale) if scale > 0 else float(err)


def write_coefficients(c, path, extra=None):
    lines = [f"# format={COEF_FORMAT}", f"# N={c.N}", f"# a={fmt(c.a)}"]
    lines += [f"# p{i + 1}={fmt(v)}" for i, v in enumerate(c.p.components)]
    for key, val in (extra or {}).items():
        lines.append(f"# {key}={val}")
    lines.append(",".join(COEF_COLUMNS))
    f = c.fhat.reshape(-1)
    g = c.ghat.reshape(-1)
    for j, l in enumerate(c.modes()):
        if any(l):
            gcols = f"{fmt(g[j].real)},{fmt(g[j].imag)}"
        else:
            gcols = ","
        lines.append(f"{l[0]},{l[1]},{l[2]},{fmt(f[j].real)},{fmt(f[j].imag)},{gcols}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_coefficients(path):
    meta = {}
    rows = []
    header_seen = False
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line:
                continue
            if line.startswith("#"):
                if header_seen:
                    raise DatasetFormatError("comment after header row", lineno)
                key, sep, val = line[1:].strip().partition("=")
                if not sep:
                    raise DatasetFormatError(f"malformed comment {line!r}", lineno)
                meta[key.strip()] = val.strip()
                continue
            if not header_seen:
                if line.split(",") != COEF_COLUMNS:
                    raise DatasetFormatError(f"unexpected header {line!r}", lineno)
                header_seen = True
                continue
            cols = line.split(",")
            if len(cols) != len(COEF_COLUMNS):
                raise DatasetFormatError(f"expected {len(COEF_COLUMNS)} columns, got {len(cols)}", lineno)
            try:
                l = tuple(int(v) for v in cols[:3])
                fv = complex(float(cols[3]), float(cols[4]))
                gv = complex(float(cols[5]), float(cols[6])) if cols[5] else 0j
            except ValueError as exc:
                raise DatasetFormatError(str(exc), lineno) from None
            rows.append((l, fv, gv, lineno))
    try:
        N = int(meta["N"])
        a = float(meta["a"])
        p = Polarization(tuple(float(meta[f"p{i}"]) for i in (1, 2, 3)))
    except (KeyError, ValueError) as exc:
        raise DatasetFormatError(f"missing or invalid metadata: {exc}") from None
    n = 2 * N + 1
    if len(rows) != n**3:
        raise DatasetFormatError(f"expected {n**3} coefficient rows for N={N}, got {len(rows)}")
    c = CoefficientSet.zeros(N, p, a)
    seen = set()
    for l, fv, gv, lineno in rows:
        if l in seen:
            raise DatasetFormatError(f"duplicate mode {l}", lineno)
        seen.add(l)
        try:
            i = c._idx(l)
        except KeyError as exc:
            raise DatasetFormatError(str(exc), lineno) from None
        c.fhat[i] = fv
        if any(l):
            c.ghat[i] = gv
    return c
