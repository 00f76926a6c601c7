"""Far-field datasets over a probe set: synthesis, noise, symmetry completion, files.

Noise draws use numpy's ``Philox`` counter-based bit generator seeded with
the user seed.  For each field kind present (E first, then H) two blocks of
``P x 3`` uniforms on (-1, 1) are drawn in probe order, ``r1`` then ``r2``,
one pair per complex component.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from .errors import DatasetFormatError, DomainError, IncompleteDataError
from .forward import (closed_form_radiation, electric_from_radiation,
                      magnetic_from_radiation, radiation_vectors)
from .source_model import mode_lattice
from .spectral_grid import GridParams, ProbePoint, probe_arrays

DATASET_FORMAT = "emfourier-dataset-v1"
DATASET_COLUMNS = (["l1", "l2", "l3", "k", "xhat1", "xhat2", "xhat3"]
                   + [f"{part}{f}{i}" for f in "EH" for i in (1, 2, 3) for part in ("re", "im")])
GENERATOR = "numpy-Philox4x64"
NOISE_MODELS = ("supnorm", "global", "relative")
FIELD_CHOICES = {"E": ("E",), "H": ("H",), "both": ("E", "H")}


def fmt(x):
    return format(float(x), ".17g")


@dataclass(frozen=True)
class Provenance:
    status: str = "clean"
    model: str = None
    delta: float = None
    seed: int = None
    draw: str = "per-component"
    generator: str = GENERATOR

    def items(self):
        out = [("provenance", self.status)]
        if self.status == "noisy":
            out += [("noise.model", self.model), ("noise.delta", fmt(self.delta)),
                    ("noise.seed", str(self.seed)), ("noise.draw", self.draw),
                    ("noise.generator", self.generator)]
        return out


@dataclass(frozen=True)
class FarFieldRecord:
    probe: ProbePoint
    E: np.ndarray = None
    H: np.ndarray = None

    def __post_init__(self):
        if self.E is None and self.H is None:
            raise ValueError("a far-field record needs E, H or both")


@dataclass
class Dataset:
    """Far-field records keyed by mode index, stored as parallel arrays.

    ``modes``, ``k`` and ``xhat`` describe the probes; ``E`` and ``H`` are
    ``(P, 3)`` complex arrays or ``None`` when that field was not measured.
    """

    params: GridParams
    modes: np.ndarray
    k: np.ndarray
    xhat: np.ndarray
    E: np.ndarray = None
    H: np.ndarray = None
    provenance: Provenance = field(default_factory=Provenance)
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.modes = np.asarray(self.modes, dtype=np.int64).reshape(-1, 3)
        self.k = np.asarray(self.k, dtype=float).reshape(-1)
        self.xhat = np.asarray(self.xhat, dtype=float).reshape(-1, 3)
        if self.E is None and self.H is None:
            raise ValueError("a dataset needs E, H or both")
        self._index = None

    def __len__(self):
        return len(self.modes)

    @property
    def fields(self):
        return tuple(f for f in "EH" if getattr(self, f) is not None)

    @property
    def omega(self):
        return self.params.omega(self.k)

    def index(self):
        if self._index is None:
            self._index = {tuple(int(v) for v in m): i for i, m in enumerate(self.modes)}
        return self._index

    def position(self, l):
        try:
            return self.index()[tuple(int(v) for v in l)]
        except KeyError:
            raise IncompleteDataError([l]) from None

    def record(self, l):
        i = self.position(l)
        probe = ProbePoint(tuple(int(v) for v in self.modes[i]), float(self.k[i]),
                           tuple(float(v) for v in self.xhat[i]), float(self.omega[i]))
        return FarFieldRecord(probe,
                              None if self.E is None else self.E[i].copy(),
                              None if self.H is None else self.H[i].copy())

    @property
    def records(self):
        return [self.record(m) for m in self.modes]

    def missing_modes(self, N=None):
        N = self.params.N if N is None else N
        idx = self.index()
        return [tuple(int(v) for v in m) for m in mode_lattice(N) if tuple(int(v) for v in m) not in idx]

    @property
    def complete(self):
        return len(self) == self.params.n_probes and not self.missing_modes()

    def select(self, rows):
        rows = np.asarray(rows)
        return Dataset(self.params, self.modes[rows], self.k[rows], self.xhat[rows],
                       None if self.E is None else self.E[rows],
                       None if self.H is None else self.H[rows],
                       self.provenance, dict(self.metadata))

    def restricted(self, N):
        """Records with ``|l|_inf <= N``, reordered lexicographically, as an order-``N`` dataset."""
        missing = self.missing_modes(N)
        if missing:
            raise IncompleteDataError(missing)
        idx = self.index()
        rows = [idx[tuple(int(v) for v in m)] for m in mode_lattice(N)]
        out = self.select(rows)
        out.params = self.params.with_order(N)
        return out

    def equals(self, other):
        """Exact (bitwise) equality of probes, fields and provenance."""
        def same(x, y):
            if x is None or y is None:
                return x is None and y is None
            return x.shape == y.shape and np.array_equal(x, y)

        return (self.params == other.params and self.provenance == other.provenance
                and all(same(getattr(self, n), getattr(other, n))
                        for n in ("modes", "k", "xhat", "E", "H")))


def _field_names(fields):
    try:
        return FIELD_CHOICES[fields]
    except KeyError:
        raise ValueError(f"fields must be one of {sorted(FIELD_CHOICES)}, got {fields!r}") from None


def synthesize(src, params, fields="H", quad=None, workers=1):
    """Far-field records at every probe of ``params`` by quadrature of the source."""
    names = _field_names(fields)
    if abs(src.a - params.a) > 1e-15 * params.a:
        raise DomainError("source cube edge and grid parameter a differ")
    modes, k, xhat = probe_arrays(params)
    R, q, diags = radiation_vectors(src, k[:, None] * xhat, quad, workers=workers)
    E = electric_from_radiation(R, k, xhat, params.omega(k), params.mu0) if "E" in names else None
    H = magnetic_from_radiation(R, k, xhat) if "H" in names else None
    meta = {"quad.rule": q.rule, "quad.points_per_axis": str(q.points_per_axis),
            "source": src.name}
    if diags:
        meta["warnings"] = "; ".join(diags)
    return Dataset(params, modes, k, xhat, E, H, Provenance(), meta)


def synthesize_band_limited(coeffs, params, fields="H"):
    """Exact records for the finite-mode source described by a coefficient set."""
    names = _field_names(fields)
    modes, k, xhat = probe_arrays(params)
    R = closed_form_radiation(coeffs.amplitudes(), coeffs.a, k[:, None] * xhat)
    E = electric_from_radiation(R, k, xhat, params.omega(k), params.mu0) if "E" in names else None
    H = magnetic_from_radiation(R, k, xhat) if "H" in names else None
    return Dataset(params, modes, k, xhat, E, H, Provenance(), {"source": "band-limited"})


def add_noise(d, delta, seed, model="supnorm"):
    """Perturb every complex field component as ``c + delta r1 M exp(i pi r2)``.

    The scale ``M`` depends on ``model``:

    ``supnorm``
        the sup-norm of the record's own field vector (largest component
        modulus of that record);
    ``global``
        the largest component modulus of that field over the whole dataset;
    ``relative``
        ``|record| / sqrt(3)``, which keeps ``|F' - F| <= delta |F|`` per record.

    In every model ``|c' - c| <= delta M`` holds for each component.
    """
    if not delta >= 0:
        raise DomainError(f"noise level must be non-negative, got {delta!r}")
    if model not in NOISE_MODELS:
        raise ValueError(f"noise model must be one of {NOISE_MODELS}, got {model!r}")
    rng = np.random.Generator(np.random.Philox(int(seed)))
    out = {}
    for name in d.fields:
        F = getattr(d, name)
        r1 = rng.uniform(-1.0, 1.0, F.shape)
        r2 = rng.uniform(-1.0, 1.0, F.shape)
        if delta == 0:
            out[name] = F.copy()
            continue
        out[name] = F + delta * r1 * noise_scale(F, model) * np.exp(1j * math.pi * r2)
    prov = Provenance("noisy", model, float(delta), int(seed))
    return Dataset(d.params, d.modes.copy(), d.k.copy(), d.xhat.copy(),
                   out.get("E"), out.get("H"), prov, dict(d.metadata))


def noise_scale(F, model):
    """The scale ``M`` of :func:`add_noise`, broadcastable against ``F``."""
    if model == "supnorm":
        return np.max(np.abs(F), axis=1, keepdims=True)
    if model == "global":
        return np.max(np.abs(F)) if F.size else 0.0
    if model == "relative":
        return (np.linalg.norm(F, axis=1) / math.sqrt(3.0))[:, None]
    raise ValueError(f"noise model must be one of {NOISE_MODELS}, got {model!r}")


def upper_hemisphere(d):
    """Records whose observation direction has ``xhat3 >= 0``."""
    return d.select(np.nonzero(d.xhat[:, 2] >= 0)[0])


def extend_by_symmetry(d):
    """Complete a dataset from its upper hemisphere.

    Uses ``E(-xhat) = -conj(E(xhat))`` and ``H(-xhat) = conj(H(xhat))``
    (valid for real sources).  Records already present are kept as they are.
    """
    params = d.params
    idx = d.index()
    full = mode_lattice(params.N)
    upper_missing = []
    rows = []
    for m in full:
        key = tuple(int(v) for v in m)
        if key in idx:
            rows.append((idx[key], False))
            continue
        mirror = tuple(-v for v in key)
        if mirror in idx:
            rows.append((idx[mirror], True))
        else:
            upper_missing.append(key)
    if upper_missing:
        raise IncompleteDataError(upper_missing)
    src_rows = np.array([r for r, _ in rows], dtype=np.int64)
    flip = np.array([f for _, f in rows])
    modes = d.modes[src_rows] * np.where(flip, -1, 1)[:, None]

    def fill(F, sign):
        if F is None:
            return None
        out = F[src_rows].copy()
        out[flip] = sign * np.conj(out[flip])
        return out

    # existing rows keep their stored probe geometry bit-for-bit
    k_out = d.k[src_rows]
    x_out = np.where(flip[:, None], -d.xhat[src_rows], d.xhat[src_rows])
    meta = dict(d.metadata)
    meta["symmetry_completed"] = str(int(flip.sum()))
    return Dataset(params, modes, k_out, x_out, fill(d.E, -1.0), fill(d.H, 1.0),
                   d.provenance, meta)


# --------------------------------------------------------------------------
# Files


def write_dataset(d, path):
    lines = [f"# format={DATASET_FORMAT}",
             f"# a={fmt(d.params.a)}", f"# lambda={fmt(d.params.lam)}", f"# N={d.params.N}",
             f"# mu0={fmt(d.params.mu0)}", f"# eps0={fmt(d.params.eps0)}",
             f"# fields={''.join(d.fields)}"]
    lines += [f"# {key}={val}" for key, val in d.provenance.items()]
    lines += [f"# meta.{key}={val}" for key, val in sorted(d.metadata.items())]
    lines.append(",".join(DATASET_COLUMNS))
    empty = ",".join([""] * 6)
    for i in range(len(d)):
        m = d.modes[i]
        cols = [str(int(m[0])), str(int(m[1])), str(int(m[2])), fmt(d.k[i])]
        cols += [fmt(v) for v in d.xhat[i]]
        row = ",".join(cols)
        for F in (d.E, d.H):
            if F is None:
                row += "," + empty
            else:
                row += "," + ",".join(f"{fmt(c.real)},{fmt(c.imag)}" for c in F[i])
        lines.append(row)
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def _parse_float(text, lineno):
    try:
        return float(text)
    except ValueError:
        raise DatasetFormatError(f"invalid number {text!r}", lineno) from None


def read_dataset(path, require_complete=True):
    """Parse a dataset file; by default it must hold exactly ``(2N+1)^3`` records."""
    meta = {}
    header_seen = False
    modes, ks, xs, Es, Hs = [], [], [], [], []
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
                    raise DatasetFormatError(f"malformed comment line {line!r}", lineno)
                meta[key.strip()] = val.strip()
                continue
            if not header_seen:
                if line.split(",") != DATASET_COLUMNS:
                    raise DatasetFormatError(f"unexpected header {line!r}", lineno)
                if meta.get("format") != DATASET_FORMAT:
                    raise DatasetFormatError(f"unsupported format {meta.get('format')!r}", lineno)
                header_seen = True
                fields = meta.get("fields", "")
                if fields not in ("E", "H", "EH"):
                    raise DatasetFormatError(f"invalid fields entry {fields!r}", lineno)
                continue
            cols = line.split(",")
            if len(cols) != len(DATASET_COLUMNS):
                raise DatasetFormatError(
                    f"expected {len(DATASET_COLUMNS)} columns, got {len(cols)}", lineno)
            try:
                modes.append([int(c) for c in cols[:3]])
            except ValueError:
                raise DatasetFormatError(f"invalid mode index {cols[:3]!r}", lineno) from None
            ks.append(_parse_float(cols[3], lineno))
            xs.append([_parse_float(c, lineno) for c in cols[4:7]])
            for name, store, block in (("E", Es, cols[7:13]), ("H", Hs, cols[13:19])):
                present = name in fields
                if not present:
                    if any(block):
                        raise DatasetFormatError(f"{name} columns filled but {name} not declared", lineno)
                    continue
                if not all(block):
                    raise DatasetFormatError(f"missing {name} values", lineno)
                v = [_parse_float(c, lineno) for c in block]
                store.append([complex(v[0], v[1]), complex(v[2], v[3]), complex(v[4], v[5])])
    if not header_seen:
        raise DatasetFormatError("no header row found")
    try:
        params = GridParams(float(meta["a"]), float(meta["lambda"]), int(meta["N"]),
                            float(meta["mu0"]), float(meta["eps0"]))
    except (KeyError, ValueError) as exc:
        raise DatasetFormatError(f"missing or invalid grid parameters: {exc}") from None
    status = meta.get("provenance", "clean")
    if status == "noisy":
        try:
            prov = Provenance("noisy", meta["noise.model"], float(meta["noise.delta"]),
                              int(meta["noise.seed"]), meta.get("noise.draw", "per-component"),
                              meta.get("noise.generator", GENERATOR))
        except (KeyError, ValueError) as exc:
            raise DatasetFormatError(f"incomplete noise provenance: {exc}") from None
    elif status == "clean":
        prov = Provenance()
    else:
        raise DatasetFormatError(f"unknown provenance {status!r}")
    extra = {k[5:]: v for k, v in meta.items() if k.startswith("meta.")}
    d = Dataset(params, np.array(modes, dtype=np.int64).reshape(-1, 3), np.array(ks),
                np.array(xs).reshape(-1, 3),
                np.array(Es, dtype=complex).reshape(-1, 3) if "E" in fields else None,
                np.array(Hs, dtype=complex).reshape(-1, 3) if "H" in fields else None,
                prov, extra)
    if len(d.index()) != len(d):
        raise DatasetFormatError("duplicate mode rows")
    if require_complete:
        if len(d) != params.n_probes:
            raise DatasetFormatError(
                f"expected {params.n_probes} records for N={params.N}, got {len(d)}")
        if d.missing_modes():
            raise DatasetFormatError(f"records outside the probe set for N={params.N}")
    return d
