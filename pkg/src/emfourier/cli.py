"""Command-line driver: ``emfourier <command> [options]``.

Commands
--------
forward    synthesize a clean far-field dataset
noise      perturb a dataset file
invert     recover coefficients from a dataset and sample the series
evaluate   compare a coefficient file with the configured source
pipeline   forward, noise, invert and evaluate in one run
sweep      noise-level sweep table
examples   list the catalog sources

Exit status is 0 on success, 2 for configuration or input errors, 3 for a
dataset that lacks required modes and 1 for any other failure.
"""

import argparse
import os
from pathlib import Path
import sys
import time
import warnings

import numpy as np

from . import analysis
from .coefficients import read_coefficients, write_coefficients
from .config import dump_config, load_config
from .errors import ConfigurationError, DatasetFormatError, DomainError, IncompleteDataError
from .inversion import reconstruct, recover_coefficients, write_reconstruction
from .measurement import add_noise, read_dataset, synthesize, write_dataset
from .source_model import CATALOG_NAMES, catalog

EXIT_FAILURE, EXIT_USAGE, EXIT_INCOMPLETE = 1, 2, 3


class StageError(Exception):
    def __init__(self, stage, exc):
        super().__init__(f"stage {stage} failed: {exc}")
        self.stage = stage
        self.cause = exc


class Runner:
    def __init__(self, args):
        self.args = args
        overrides = list(args.set or [])
        if args.seed is not None:
            overrides.append(f"noise.seed={args.seed}")
        if args.field is not None:
            overrides.append(f"field={args.field}")
        self.cfg = load_config(args.config, overrides)
        self.out = Path(args.out if args.out is not None else self.cfg.output)
        self.workers = max(1, args.threads or os.cpu_count() or 1)

    def say(self, msg):
        if not self.args.quiet:
            print(msg)

    def outfile(self, name):
        self.out.mkdir(parents=True, exist_ok=True)
        return self.out / name

    # -- stages

    def forward(self):
        cfg = self.cfg
        src = cfg.source_spec()
        params = cfg.grid_params()
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            t0 = time.perf_counter()
            d = synthesize(src, params, cfg.field, cfg.quadrature(), self.workers)
            elapsed = time.perf_counter() - t0
        for w in caught:
            self.say(f"warning: {w.message}")
        path = self.outfile("dataset.csv")
        write_dataset(d, path)
        peak = max(float(np.max(np.abs(getattr(d, f)))) for f in d.fields)
        self.say(f"forward: {len(d)} probes, N={params.N}, quadrature "
                 f"{d.metadata['quad.rule']}/{d.metadata['quad.points_per_axis']}, "
                 f"max|field|={peak:.6g}, {elapsed:.2f} s -> {path}")
        return d, path

    def noise(self, d, name="dataset_noisy.csv"):
        cfg = self.cfg
        noisy = add_noise(d, cfg.noise_level, cfg.noise_seed, cfg.noise_model)
        path = self.outfile(name)
        write_dataset(noisy, path)
        self.say(f"noise: model={cfg.noise_model} delta={cfg.noise_level:g} "
                 f"seed={cfg.noise_seed} -> {path}")
        return noisy, path

    def invert(self, d, N):
        cfg = self.cfg
        src = cfg.source_spec()
        t0 = time.perf_counter()
        c = recover_coefficients(d, src.p, cfg.inversion_kind, N)
        rf = reconstruct(c, cfg.grid_points)
        elapsed = time.perf_counter() - t0
        cpath = self.outfile(f"coefficients_N{N}.csv")
        write_coefficients(c, cpath, {"field": cfg.inversion_kind})
        rpath = self.outfile(f"reconstruction_N{N}.csv")
        write_reconstruction(rf, rpath)
        self.say(f"invert: N={N} from {cfg.inversion_kind} data, "
                 f"imag_residual={rf.imag_residual:.3e}, {elapsed:.2f} s -> {cpath}, {rpath}")
        return c, rf, elapsed

    def evaluate(self, c, rf=None, elapsed=0.0, delta=0.0):
        cfg = self.cfg
        src = cfg.source_spec()
        if not np.allclose(c.p.vector, src.p.vector, atol=1e-12):
            raise ConfigurationError(
                f"coefficient polarization {c.p.components} does not match source {src.name}")
        if rf is None:
            rf = reconstruct(c, cfg.grid_points)
        report = analysis.relative_l2_error(src, rf, delta, elapsed)
        N = c.N
        for comp in (1, 2, 3):
            sl = analysis.plane_slice(rf, 0.0, comp)
            ex = analysis.exact_plane_slice(src, sl.x1, sl.x2, 0.0, comp)
            analysis.write_slice(sl, self.outfile(f"slice_x3_0_J{comp}_N{N}.csv"), ex)
        profile, over = analysis.gibbs_profile(rf, src, 1)
        analysis.write_profile(profile, self.outfile(f"profile_J1_N{N}.csv"), over)
        self.say(f"evaluate: N={N} relative_l2={report.relative_l2:.6e} "
                 f"overshoot_J1={over:.4f}")
        return report


def cmd_forward(run):
    run.forward()


def cmd_noise(run):
    d = read_dataset(run.args.input)
    run.noise(d)


def cmd_invert(run):
    d = read_dataset(run.args.input, require_complete=False)
    given = run.cfg.N is not None or run.cfg.delta is not None
    orders = run.cfg.orders if given else (d.params.N,)
    for N in orders:
        run.invert(d, N)


def cmd_evaluate(run):
    c = read_coefficients(run.args.coefficients)
    report = run.evaluate(c, delta=run.cfg.noise_level)
    analysis.write_error_report([report], run.outfile(f"errors_N{c.N}.csv"))


def cmd_pipeline(run):
    stage = "config"
    try:
        orders = run.cfg.orders
        stage = "forward"
        d, _ = run.forward()
        if run.cfg.noise_level > 0:
            stage = "noise"
            d, _ = run.noise(d)
        reports = []
        for N in orders:
            stage = f"invert(N={N})"
            c, rf, elapsed = run.invert(d, N)
            stage = f"evaluate(N={N})"
            reports.append(run.evaluate(c, rf, elapsed, run.cfg.noise_level))
        stage = "report"
        analysis.write_error_report(reports, run.outfile("errors.csv"))
        with open(run.outfile("run_config.txt"), "w") as fh:
            fh.write(dump_config(run.cfg))
    except (ConfigurationError, IncompleteDataError):
        raise
    except Exception as exc:
        raise StageError(stage, exc) from exc


def cmd_sweep(run):
    cfg = run.cfg
    table = analysis.stability_sweep(
        cfg.source_spec(), cfg.sweep_deltas, cfg.noise_seed, cfg.sweep_seeds,
        cfg.inversion_kind, cfg.noise_model, cfg.grid_params(1), cfg.quadrature(),
        cfg.grid_points, cfg.tau, cfg.sigma, cfg.sweep_clean_N, run.workers)
    analysis.write_sweep(table, run.outfile("sweep.csv"), run.outfile("sweep_seeds.csv"))
    analysis.write_sweep_metadata(table, run.outfile("sweep_meta.txt"),
                                  {f"config.{line.split(' = ')[0]}": line.split(" = ", 1)[1]
                                   for line in dump_config(cfg).splitlines()})
    run.say("delta     N   relative_error   time_s")
    for r in table.rows:
        note = f"  ({r.failure})" if r.failure else ""
        run.say(f"{r.delta:<8g} {r.N:>3}   {r.relative_error:.6e}   {r.time_s:7.2f}{note}")
    if any(r.failure for r in table.rows):
        return EXIT_FAILURE


def cmd_examples(run):
    for name in CATALOG_NAMES:
        src = catalog(name)
        p = ", ".join(f"{v:.6f}" for v in src.p.components)
        kind = "smooth" if src.smooth else "piecewise constant"
        print(f"{name}: p = ({p}); f = {src.f.name}; g = {src.g.name}; {kind}")


COMMANDS = {
    "forward": cmd_forward, "noise": cmd_noise, "invert": cmd_invert,
    "evaluate": cmd_evaluate, "pipeline": cmd_pipeline, "sweep": cmd_sweep,
    "examples": cmd_examples,
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="key = value run configuration")
    common.add_argument("--set", action="append", metavar="KEY=VALUE",
                        help="override one configuration key (repeatable)")
    common.add_argument("--out", metavar="DIR", help="output directory (default: config output)")
    common.add_argument("--seed", type=int, metavar="U64", help="noise seed")
    common.add_argument("--threads", type=int, metavar="N", help="worker threads (default: all cores)")
    common.add_argument("--field", choices=("E", "H", "both"), help="far-field kind")
    common.add_argument("--quiet", action="store_true", help="suppress progress output")

    parser = argparse.ArgumentParser(prog="emfourier",
                                     description="Fourier-method electromagnetic source reconstruction")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, parents=[common])
        if name in ("noise", "invert"):
            p.add_argument("--in", dest="input", required=True, metavar="PATH", help="dataset file")
        if name == "evaluate":
            p.add_argument("--coefficients", required=True, metavar="PATH",
                           help="coefficient file")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        run = Runner(args)
        status = COMMANDS[args.command](run)
    except IncompleteDataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        print("missing modes: " + " ".join(f"({l[0]},{l[1]},{l[2]})" for l in exc.missing),
              file=sys.stderr)
        return EXIT_INCOMPLETE
    except StageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        if isinstance(exc.cause, IncompleteDataError):
            return EXIT_INCOMPLETE
        usage = (ConfigurationError, DatasetFormatError, DomainError, OSError)
        return EXIT_USAGE if isinstance(exc.cause, usage) else EXIT_FAILURE
    except (ConfigurationError, DatasetFormatError, DomainError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ArithmeticError, ValueError, RuntimeError, LookupError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    return status or 0


if __name__ == "__main__":
    sys.exit(main())
