"""Error metrics, norms, noise sweeps and profile extraction.

Components are numbered 1, 2, 3 throughout this module (``J_1`` is the
x1 component).
"""

from dataclasses import dataclass, field
import math
import time

import numpy as np

from .errors import DomainError
from .inversion import evaluate_series, reconstruct, recover_coefficients
from .measurement import add_noise, synthesize
from .source_model import evaluate_current, mode_lattice
from .spectral_grid import GridParams, truncation_order


@dataclass(frozen=True)
class ErrorReport:
    relative_l2: float
    per_component_l2: tuple
    N: int
    delta: float = 0.0
    wall_time_s: float = 0.0
    imag_residual: float = 0.0


@dataclass(frozen=True)
class LineProfile:
    coordinates: np.ndarray
    values: np.ndarray
    exact: np.ndarray = None

    def __post_init__(self):
        if np.any(np.diff(self.coordinates) <= 0):
            raise ValueError("profile coordinates must be strictly increasing")


@dataclass(frozen=True)
class PlaneSlice:
    x1: np.ndarray
    x2: np.ndarray
    values: np.ndarray
    level: float
    component: int


def _component_index(component):
    if component not in (1, 2, 3):
        raise ValueError(f"component must be 1, 2 or 3, got {component!r}")
    return component - 1


def relative_l2_error(exact, recon, delta=0.0, wall_time_s=0.0):
    """``||J - Re J_N|| / ||J||`` as uniform-weight sums over the reconstruction grid.

    ``per_component_l2`` holds the per-component error norms divided by the
    full ``||J||``, so their squares add up to ``relative_l2**2``.
    """
    J = evaluate_current(exact, recon.points())
    if np.iscomplexobj(J):
        J = J.real
    diff = J - recon.real
    norm = float(np.sqrt(np.sum(J * J)))
    if norm == 0.0:
        raise ZeroDivisionError("relative error undefined: exact source vanishes on the grid")
    per = tuple(float(np.sqrt(np.sum(diff[..., i] ** 2)) / norm) for i in range(3))
    N = recon.coefficients.N if recon.coefficients is not None else -1
    return ErrorReport(float(np.sqrt(np.sum(diff * diff)) / norm), per, N, float(delta),
                       float(wall_time_s), float(recon.imag_residual))


def sobolev_norm(c, sigma):
    if sigma < 0:
        raise DomainError("sigma must be non-negative")
    ls = mode_lattice(c.N).astype(float)
    w = (1.0 + np.sum(ls * ls, axis=1)) ** sigma
    f2 = np.abs(c.fhat.reshape(-1)) ** 2
    pl2 = np.sum(np.cross(c.p.vector, ls) ** 2, axis=1)
    g2 = np.abs(c.ghat.reshape(-1)) ** 2
    nz = np.any(ls != 0, axis=1)
    total = np.sum(w * f2) + 4 * math.pi**2 / c.a**2 * np.sum((w * pl2 * g2)[nz])
    return float(math.sqrt(total))


def grid_l2_norm(recon):
    """``||Re J_N||_{L2(D)}`` by the tensor trapezoid rule on the reconstruction grid.

    The grid includes both faces of the cube, so for the periodic series
    this equals the plain sum over the distinct nodes and is exact for
    ``Re J_N`` whenever the grid has more than ``2N + 1`` points per axis.
    """
    v = recon.real
    w = []
    for x in recon.axes:
        h = np.diff(x)
        wx = np.zeros(len(x))
        wx[:-1] += 0.5 * h
        wx[1:] += 0.5 * h
        w.append(wx)
    dens = np.sum(v * v, axis=-1)
    return float(math.sqrt(np.einsum("ijk,i,j,k->", dens, *w)))


# --------------------------------------------------------------------------
# Sweeps


@dataclass
class SweepRow:
    delta: float
    N: int
    relative_error: float
    time_s: float
    errors: list = field(default_factory=list)
    imag_residual: float = float("nan")
    failure: str = ""


@dataclass
class SweepTable:
    rows: list
    seed: int
    seeds: int
    kind: str
    model: str
    forward_time_s: float = 0.0
    metadata: dict = field(default_factory=dict)

    @property
    def N_column(self):
        return [r.N for r in self.rows]

    @property
    def error_column(self):
        return [r.relative_error for r in self.rows]


def stability_sweep(src, deltas, seed=0, seeds=1, kind="H", model="supnorm",
                    params=None, quad=None, points_per_axis=50, tau=3.0, sigma=1.0,
                    clean_N=10, workers=1):
    """Noise-level sweep: for each delta, recover at N(delta), reconstruct and score.

    One clean dataset is synthesized at the largest order needed; each row
    uses its ``N(delta)`` subset.  ``seeds`` runs use seeds ``seed, seed+1,
    ...`` and the row reports their median error.  A ``delta`` of 0 uses
    ``clean_N`` and no noise.  A failing row records its error message
    instead of aborting the sweep.
    """
    base = params or GridParams(a=src.a)
    orders = []
    for d in deltas:
        try:
            orders.append(clean_N if d == 0 else truncation_order(d, tau, sigma))
        except DomainError as exc:
            orders.append(exc)
    valid = [n for n in orders if isinstance(n, int)]
    fields = "E" if kind in ("E", "electric") else "H"
    t0 = time.perf_counter()
    data = synthesize(src, base.with_order(max(valid)), fields, quad, workers) if valid else None
    t_fwd = time.perf_counter() - t0

    rows = []
    for delta, N in zip(deltas, orders):
        if not isinstance(N, int):
            rows.append(SweepRow(float(delta), -1, float("nan"), 0.0, failure=str(N)))
            continue
        t1 = time.perf_counter()
        try:
            sub = data.restricted(N)
            errs, imag = [], 0.0
            for s in range(seed, seed + (1 if delta == 0 else seeds)):
                noisy = sub if delta == 0 else add_noise(sub, delta, s, model)
                c = recover_coefficients(noisy, src.p, kind)
                rf = reconstruct(c, points_per_axis)
                errs.append(relative_l2_error(src, rf, delta).relative_l2)
                imag = max(imag, rf.imag_residual)
            rows.append(SweepRow(float(delta), N, float(np.median(errs)),
                                 time.perf_counter() - t1, errs, imag))
        except (ArithmeticError, ValueError, LookupError) as exc:
            rows.append(SweepRow(float(delta), N, float("nan"), time.perf_counter() - t1,
                                 failure=f"{type(exc).__name__}: {exc}"))
    meta = {"source": src.name, "grid.points": points_per_axis, "tau": tau, "sigma": sigma}
    if data is not None:
        meta.update({f"forward.{k}": v for k, v in data.metadata.items()})
    return SweepTable(rows, seed, seeds, kind, model, t_fwd, meta)


def write_sweep_metadata(table, path, extra=None):
    """key=value run record: sweep settings, forward metadata and library versions."""
    import platform

    info = {"seed": table.seed, "seeds": table.seeds, "field": table.kind,
            "noise.model": table.model, "forward_time_s": f"{table.forward_time_s:.3f}",
            "numpy": np.__version__, "python": platform.python_version()}
    info.update(table.metadata)
    info.update(extra or {})
    with open(path, "w") as fh:
        for key in sorted(info):
            fh.write(f"{key}={info[key]}\n")


def write_sweep(table, path, per_seed_path=None):
    from .coefficients import fmt

    lines = ["delta,N,relative_error,time_s,imag_residual,failure"]
    for r in table.rows:
        lines.append(f"{fmt(r.delta)},{r.N},{fmt(r.relative_error)},{r.time_s:.3f},"
                     f"{fmt(r.imag_residual)},{r.failure.replace(',', ';')}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    if per_seed_path is not None:
        lines = ["delta,N,seed,relative_error"]
        for r in table.rows:
            for i, e in enumerate(r.errors):
                lines.append(f"{fmt(r.delta)},{r.N},{table.seed + i},{fmt(e)}")
        with open(per_seed_path, "w") as fh:
            fh.write("\n".join(lines) + "\n")


# --------------------------------------------------------------------------
# Slices and profiles


def plane_slice(recon, level=0.0, component=3):
    """``Re J_N`` component on the plane ``x3 = level``, sampled on the grid's (x1, x2) nodes.

    The series is evaluated on the plane directly when the reconstruction
    carries its coefficients; otherwise the two neighbouring grid planes
    are interpolated linearly.
    """
    i = _component_index(component)
    x1, x2, x3 = recon.axes
    if not x3[0] - 1e-12 <= level <= x3[-1] + 1e-12:
        raise DomainError(f"plane x3={level} lies outside the cube")
    if recon.coefficients is not None:
        vals = evaluate_series(recon.coefficients, x1, x2, [level])[:, :, 0, i].real
    else:
        j = int(np.clip(np.searchsorted(x3, level) - 1, 0, len(x3) - 2))
        t = (level - x3[j]) / (x3[j + 1] - x3[j])
        vals = (1 - t) * recon.real[:, :, j, i] + t * recon.real[:, :, j + 1, i]
    return PlaneSlice(x1, x2, vals, float(level), component)


def exact_plane_slice(src, x1, x2, level=0.0, component=3):
    i = _component_index(component)
    X1, X2 = np.meshgrid(x1, x2, indexing="ij")
    pts = np.stack([X1, X2, np.full_like(X1, level)], axis=-1)
    return PlaneSlice(np.asarray(x1), np.asarray(x2), evaluate_current(src, pts)[..., i].real,
                      float(level), component)


def gibbs_profile(recon, exact, component=1, n_points=1001):
    """``Re J_N`` along the line ``x2 = x3 = 0`` and its overshoot.

    ``overshoot = max(0, max(Re J_N) - max(J)) / (max(J) - min(J))`` with
    all extrema taken over the sampled line; it is 0 when the exact
    component is constant along the line.
    """
    i = _component_index(component)
    a = recon.axes[0][-1] - recon.axes[0][0]
    xs = np.linspace(-0.5 * a, 0.5 * a, n_points)
    if recon.coefficients is not None:
        vals = evaluate_series(recon.coefficients, xs, [0.0], [0.0])[:, 0, 0, i].real
    else:
        vals = _interp_line(recon, xs, i)
    pts = np.stack([xs, np.zeros_like(xs), np.zeros_like(xs)], axis=-1)
    ex = evaluate_current(exact, pts)[:, i].real
    jump = float(ex.max() - ex.min())
    over = 0.0 if jump <= 0 else max(0.0, float(vals.max() - ex.max()) / jump)
    return LineProfile(xs, vals, ex), over


def _interp_line(recon, xs, i):
    """Bilinear interpolation across (x2, x3) to the axis, then linear along x1."""
    _, x2, x3 = recon.axes
    v = recon.real[..., i]
    for axis, nodes in ((2, x3), (1, x2)):
        j = int(np.clip(np.searchsorted(nodes, 0.0) - 1, 0, len(nodes) - 2))
        t = (0.0 - nodes[j]) / (nodes[j + 1] - nodes[j])
        v = (1 - t) * np.take(v, j, axis=axis) + t * np.take(v, j + 1, axis=axis)
    return np.interp(xs, recon.axes[0], v)


def write_slice(sl, path, exact=None):
    from .coefficients import fmt

    X1, X2 = np.meshgrid(sl.x1, sl.x2, indexing="ij")
    head = f"x1,x2,J{sl.component}" + (f",exactJ{sl.component}" if exact is not None else "")
    lines = [f"# plane=x3={fmt(sl.level)}", head]
    ex = None if exact is None else exact.values.reshape(-1)
    for j, (a, b, v) in enumerate(zip(X1.reshape(-1), X2.reshape(-1), sl.values.reshape(-1))):
        row = f"{fmt(a)},{fmt(b)},{fmt(v)}"
        if ex is not None:
            row += f",{fmt(ex[j])}"
        lines.append(row)
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def write_profile(profile, path, overshoot=None):
    from .coefficients import fmt

    lines = []
    if overshoot is not None:
        lines.append(f"# overshoot={fmt(overshoot)}")
    lines.append("x1,value,exact")
    for x, v, e in zip(profile.coordinates, profile.values,
                       profile.exact if profile.exact is not None else [float("nan")] * len(profile.values)):
        lines.append(f"{fmt(x)},{fmt(v)},{fmt(e)}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def write_error_report(reports, path):
    from .coefficients import fmt

    lines = ["N,delta,relative_l2,l2_J1,l2_J2,l2_J3,imag_residual,wall_time_s"]
    for r in reports:
        lines.append(",".join([str(r.N), fmt(r.delta), fmt(r.relative_l2)]
                              + [fmt(v) for v in r.per_component_l2]
                              + [fmt(r.imag_residual), f"{r.wall_time_s:.3f}"]))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
