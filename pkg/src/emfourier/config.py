"""Run configuration: a flat ``key = value`` text file.

Blank lines and ``#`` comments are ignored.  A ``[section]`` line prefixes
the keys that follow it, so ``[quad]`` then ``rule = gauss`` is the same as
``quad.rule = gauss``.

Example::

    source = example1
    N = 10
    field = H
    [noise]
    delta = 0.02
    seed = 7
"""

from dataclasses import dataclass, field, replace
import math

from .errors import ConfigurationError
from .measurement import FIELD_CHOICES, NOISE_MODELS
from .quadrature import RULES, QuadratureSpec
from .source_model import (CATALOG_NAMES, Polarization, SourceSpec, catalog, constant_profile,
                           gaussian_profile, ring_gaussian_profile, zero_profile)
from .spectral_grid import EPS0, MU0, GridParams, truncation_order

TABLE1_DELTAS = (0.02, 0.05, 0.10, 0.20)

KNOWN_KEYS = {
    "source", "source.p", "a", "lambda", "N", "delta", "tau", "sigma", "field",
    "quad.rule", "quad.points_per_axis", "noise.model", "noise.delta", "noise.seed",
    "grid.points", "output", "mu0", "eps0", "units", "sweep.deltas", "sweep.seeds",
    "sweep.clean_N",
}
PROFILE_KINDS = ("zero", "constant", "gaussian", "ring_gaussian")
PROFILE_PARAMS = ("value", "amplitude", "alpha", "center")


@dataclass
class RunConfig:
    source: str = "example1"
    source_p: tuple = None
    profiles: dict = field(default_factory=dict)
    a: float = 1.0
    lam: float = 1e-3
    N: tuple = None
    delta: float = None
    tau: float = 3.0
    sigma: float = 1.0
    field: str = "H"
    quad_rule: str = "auto"
    quad_points: int = 0
    noise_model: str = "supnorm"
    noise_delta: float = None
    noise_seed: int = 0
    grid_points: int = 50
    output: str = "out"
    mu0: float = MU0
    eps0: float = EPS0
    sweep_deltas: tuple = TABLE1_DELTAS
    sweep_seeds: int = 5
    sweep_clean_N: int = 10

    def check(self):
        if self.N is not None and self.delta is not None:
            raise ConfigurationError("specify exactly one of N and delta, not both")
        if self.N is not None and any(n < 1 for n in self.N):
            raise ConfigurationError(f"N must be positive, got {self.N}")
        if self.field not in FIELD_CHOICES:
            raise ConfigurationError(f"field must be one of {sorted(FIELD_CHOICES)}")
        if self.quad_rule not in RULES + ("auto",):
            raise ConfigurationError(f"quad.rule must be gauss, midpoint or auto, got {self.quad_rule!r}")
        if self.noise_model not in NOISE_MODELS:
            raise ConfigurationError(f"noise.model must be one of {NOISE_MODELS}")
        if self.grid_points < 2:
            raise ConfigurationError("grid.points must be at least 2")
        if self.source not in CATALOG_NAMES + ("custom",):
            raise ConfigurationError(
                f"unknown source {self.source!r}; use one of {', '.join(CATALOG_NAMES)} or custom")
        if self.source != "custom" and self.a != 1.0:
            raise ConfigurationError("catalog sources are defined on the unit cube (a = 1)")
        return self

    # -- derived objects

    @property
    def orders(self):
        """The truncation orders requested, from ``N`` or from ``delta``."""
        if self.N is not None:
            return self.N
        if self.delta is not None:
            return (truncation_order(self.delta, self.tau, self.sigma),)
        raise ConfigurationError("this command needs an order: specify exactly one of N and delta")

    @property
    def order(self):
        return max(self.orders)

    @property
    def noise_level(self):
        if self.noise_delta is not None:
            return self.noise_delta
        return self.delta if self.delta is not None else 0.0

    @property
    def inversion_kind(self):
        return "H" if self.field == "both" else self.field

    def grid_params(self, N=None):
        return GridParams(a=self.a, lam=self.lam, N=self.order if N is None else N,
                          mu0=self.mu0, eps0=self.eps0)

    def quadrature(self):
        """``None`` (the source's automatic choice) or an explicit rule."""
        if self.quad_rule == "auto":
            return None
        return QuadratureSpec(self.quad_rule, self.quad_points)

    def source_spec(self):
        if self.source != "custom":
            return catalog(self.source)
        if self.source_p is None:
            raise ConfigurationError("a custom source needs source.p")
        try:
            p = Polarization.from_direction(self.source_p)
        except ValueError as exc:
            raise ConfigurationError(f"source.p: {exc}") from None
        f = _build_profile("f", self.profiles.get("f", {"kind": "zero"}))
        g = _build_profile("g", self.profiles.get("g", {"kind": "zero"}))
        return SourceSpec(p, f, g, a=self.a, name="custom")

    def with_overrides(self, **kw):
        return replace(self, **kw).check()


def _floats(text, key, n=None):
    try:
        vals = tuple(float(v) for v in text.split(","))
    except ValueError:
        raise ConfigurationError(f"{key}: expected comma-separated numbers, got {text!r}") from None
    if n is not None and len(vals) != n:
        raise ConfigurationError(f"{key}: expected {n} numbers, got {len(vals)}")
    return vals


def _build_profile(name, spec):
    kind = spec.get("kind", "zero")
    try:
        if kind == "zero":
            return zero_profile()
        if kind == "constant":
            return constant_profile(float(spec.get("value", 1.0)))
        if kind == "gaussian":
            center = _floats(spec.get("center", "0,0,0"), f"source.{name}.center", 3)
            return gaussian_profile(float(spec["amplitude"]), float(spec["alpha"]), center)
        if kind == "ring_gaussian":
            return ring_gaussian_profile(float(spec["amplitude"]), float(spec["alpha"]))
    except KeyError as exc:
        raise ConfigurationError(f"source.{name} = {kind} needs source.{name}.{exc.args[0]}") from None
    except ValueError as exc:
        raise ConfigurationError(f"source.{name}: {exc}") from None
    raise ConfigurationError(f"source.{name}: unknown profile {kind!r}; use one of {PROFILE_KINDS}")


def parse_pairs(lines, origin="<config>"):
    """``(key, value, line number)`` triples from config text lines."""
    section = ""
    out = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            continue
        key, sep, val = line.partition("=")
        if not sep:
            raise ConfigurationError(f"{origin}:{lineno}: expected key = value, got {raw.strip()!r}")
        key = key.strip()
        if section:
            key = f"{section}.{key}"
        out.append((key, val.strip(), f"{origin}:{lineno}"))
    return out


def _apply(cfg, key, val, where):
    try:
        name, _, param = key[len("source."):].partition(".")
        if key.startswith("source.") and name in ("f", "g"):
            prof = cfg.profiles.setdefault(name, {"kind": "zero"})
            if not param:
                prof["kind"] = val
            elif param in PROFILE_PARAMS:
                prof[param] = val
            else:
                raise ConfigurationError(f"{where}: unknown profile parameter {key!r}")
            return
        if key not in KNOWN_KEYS:
            raise ConfigurationError(f"{where}: unknown key {key!r}")
        if key == "source":
            cfg.source = val
        elif key == "source.p":
            cfg.source_p = _floats(val, key, 3)
        elif key == "a":
            cfg.a = float(val)
        elif key == "lambda":
            cfg.lam = float(val)
        elif key == "N":
            cfg.N = tuple(int(v) for v in val.split(","))
        elif key == "delta":
            cfg.delta = float(val)
        elif key == "tau":
            cfg.tau = float(val)
        elif key == "sigma":
            cfg.sigma = float(val)
        elif key == "field":
            cfg.field = val
        elif key == "quad.rule":
            cfg.quad_rule = val
        elif key == "quad.points_per_axis":
            cfg.quad_points = int(val)
        elif key == "noise.model":
            cfg.noise_model = val
        elif key == "noise.delta":
            cfg.noise_delta = float(val)
        elif key == "noise.seed":
            cfg.noise_seed = int(val)
        elif key == "grid.points":
            cfg.grid_points = int(val)
        elif key == "output":
            cfg.output = val
        elif key == "mu0":
            cfg.mu0 = float(val)
        elif key == "eps0":
            cfg.eps0 = float(val)
        elif key == "units":
            if val == "normalized":
                cfg.mu0, cfg.eps0 = 1.0, 1.0
            elif val != "si":
                raise ConfigurationError(f"{where}: units must be si or normalized, got {val!r}")
        elif key == "sweep.deltas":
            cfg.sweep_deltas = _floats(val, key)
        elif key == "sweep.seeds":
            cfg.sweep_seeds = int(val)
        elif key == "sweep.clean_N":
            cfg.sweep_clean_N = int(val)
    except ValueError as exc:
        if isinstance(exc, ConfigurationError):
            raise
        raise ConfigurationError(f"{where}: bad value for {key}: {exc}") from None


def load_config(path=None, overrides=()):
    """Read a config file (optional) and apply ``KEY=VALUE`` overrides on top."""
    cfg = RunConfig()
    pairs = []
    if path is not None:
        try:
            with open(path) as fh:
                pairs = parse_pairs(fh, str(path))
        except OSError as exc:
            raise ConfigurationError(f"cannot read config {path}: {exc.strerror}") from None
    pairs += parse_pairs(list(overrides), "--set")
    for key, val, where in pairs:
        _apply(cfg, key, val, where)
    for v in (cfg.a, cfg.lam, cfg.tau, cfg.sigma, cfg.mu0, cfg.eps0):
        if not math.isfinite(v):
            raise ConfigurationError("numeric settings must be finite")
    return cfg.check()


def dump_config(cfg):
    """A config text that loads back to ``cfg``; used for run records."""
    lines = [f"source = {cfg.source}"]
    if cfg.source_p is not None:
        lines.append("source.p = " + ",".join(repr(v) for v in cfg.source_p))
    for name, prof in sorted(cfg.profiles.items()):
        lines.append(f"source.{name} = {prof['kind']}")
        lines += [f"source.{name}.{k} = {v}" for k, v in prof.items() if k != "kind"]
    lines += [f"a = {cfg.a!r}", f"lambda = {cfg.lam!r}"]
    if cfg.N is not None:
        lines.append("N = " + ",".join(str(n) for n in cfg.N))
    if cfg.delta is not None:
        lines.append(f"delta = {cfg.delta!r}")
    lines += [f"tau = {cfg.tau!r}", f"sigma = {cfg.sigma!r}", f"field = {cfg.field}",
              f"quad.rule = {cfg.quad_rule}", f"quad.points_per_axis = {cfg.quad_points}",
              f"noise.model = {cfg.noise_model}"]
    if cfg.noise_delta is not None:
        lines.append(f"noise.delta = {cfg.noise_delta!r}")
    lines += [f"noise.seed = {cfg.noise_seed}", f"grid.points = {cfg.grid_points}",
              f"output = {cfg.output}", f"mu0 = {cfg.mu0!r}", f"eps0 = {cfg.eps0!r}",
              "sweep.deltas = " + ",".join(repr(d) for d in cfg.sweep_deltas),
              f"sweep.seeds = {cfg.sweep_seeds}", f"sweep.clean_N = {cfg.sweep_clean_N}"]
    return "\n".join(lines) + "\n"
