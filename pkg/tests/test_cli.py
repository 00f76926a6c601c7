import numpy as np
import pytest

from emfourier.cli import main
from emfourier.coefficients import read_coefficients
from emfourier.config import RunConfig, dump_config, load_config, parse_pairs
from emfourier.errors import ConfigurationError
from emfourier.measurement import read_dataset


def run(*args):
    return main([*args, "--quiet", "--threads", "2"])


def test_config_sections_and_comments(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("# comment\nsource = example2\nN = 4, 6\n[noise]\ndelta = 0.05  # trailing\n"
                    "seed = 9\n[quad]\nrule = gauss\n")
    cfg = load_config(path)
    assert cfg.source == "example2" and cfg.N == (4, 6)
    assert cfg.noise_delta == 0.05 and cfg.noise_seed == 9 and cfg.quad_rule == "gauss"


def test_config_round_trip(tmp_path):
    cfg = load_config(None, ["source=custom", "source.p=1,2,3", "source.f=gaussian",
                             "source.f.amplitude=2", "source.f.alpha=30", "delta=0.1"])
    path = tmp_path / "c.cfg"
    path.write_text(dump_config(cfg))
    assert load_config(path) == cfg
    src = cfg.source_spec()
    assert np.allclose(np.linalg.norm(src.p.vector), 1.0) and cfg.orders == (6,)


@pytest.mark.parametrize("bad", [
    ["N=4", "delta=0.1"], ["sorce=example1"], ["field=X"], ["source=example7"],
    ["source=example1", "a=2"], ["units=metric"], ["N=abc"], ["source.f.radius=1"],
])
def test_config_rejects(bad):
    with pytest.raises(ConfigurationError):
        load_config(None, bad)


def test_config_needs_an_order():
    with pytest.raises(ConfigurationError, match="exactly one"):
        RunConfig().orders


def test_parse_pairs_reports_line():
    with pytest.raises(ConfigurationError, match=":2:"):
        parse_pairs(["a = 1", "nonsense"], "x.cfg")


def test_forward_rows_and_determinism(tmp_path):
    for name in ("a", "b"):
        assert run("forward", "--set", "N=2", "--field", "both", "--out", str(tmp_path / name)) == 0
    d = read_dataset(tmp_path / "a" / "dataset.csv")
    assert len(d) == 125 and d.E is not None and d.H is not None
    assert (tmp_path / "a" / "dataset.csv").read_bytes() == (tmp_path / "b" / "dataset.csv").read_bytes()


def test_noise_command(tmp_path):
    run("forward", "--set", "N=2", "--out", str(tmp_path))
    clean = tmp_path / "dataset.csv"
    assert run("noise", "--in", str(clean), "--set", "noise.delta=0", "--out", str(tmp_path / "z")) == 0
    assert read_dataset(tmp_path / "z" / "dataset_noisy.csv").H.tolist() == read_dataset(clean).H.tolist()
    outs = []
    for name in ("n1", "n2"):
        run("noise", "--in", str(clean), "--set", "noise.delta=0.02", "--seed", "7",
            "--out", str(tmp_path / name))
        outs.append((tmp_path / name / "dataset_noisy.csv").read_text())
    assert outs[0] == outs[1]
    assert "# noise.model=supnorm" in outs[0] and "# noise.delta=0.02" in outs[0]
    assert "# noise.seed=7" in outs[0]


def test_invert_and_missing_modes(tmp_path, capsys):
    run("forward", "--set", "N=3", "--out", str(tmp_path))
    assert run("invert", "--in", str(tmp_path / "dataset.csv"), "--set", "grid.points=10",
               "--out", str(tmp_path)) == 0
    c = read_coefficients(tmp_path / "coefficients_N3.csv")
    assert c.N == 3 and len(c.modes()) == 343
    assert "imag_residual" in (tmp_path / "reconstruction_N3.csv").read_text().splitlines()[0]
    assert len((tmp_path / "reconstruction_N3.csv").read_text().splitlines()) == 3 + 1000
    capsys.readouterr()
    assert run("invert", "--in", str(tmp_path / "dataset.csv"), "--set", "N=4",
               "--out", str(tmp_path)) == 3
    assert "(4,4,4)" in capsys.readouterr().err


def test_pipeline_equals_composed_commands(tmp_path):
    common = ["--set", "source=example2", "--set", "N=4", "--set", "noise.delta=0.05",
              "--set", "grid.points=12", "--field", "E", "--seed", "3"]
    assert run("pipeline", *common, "--out", str(tmp_path / "p")) == 0
    step = tmp_path / "s"
    run("forward", *common, "--out", str(step))
    run("noise", *common, "--in", str(step / "dataset.csv"), "--out", str(step))
    run("invert", *common, "--in", str(step / "dataset_noisy.csv"), "--out", str(step))
    run("evaluate", *common, "--coefficients", str(step / "coefficients_N4.csv"), "--out", str(step))
    for name in ("dataset_noisy.csv", "coefficients_N4.csv", "reconstruction_N4.csv",
                 "slice_x3_0_J3_N4.csv", "profile_J1_N4.csv"):
        assert (tmp_path / "p" / name).read_bytes() == (step / name).read_bytes()
    p_rows = (tmp_path / "p" / "errors.csv").read_text().splitlines()
    s_rows = (step / "errors_N4.csv").read_text().splitlines()
    assert p_rows[1].split(",")[:7] == s_rows[1].split(",")[:7]


def test_pipeline_several_orders(tmp_path):
    assert run("pipeline", "--set", "source=example3", "--set", "N=2,3", "--set", "grid.points=8",
               "--out", str(tmp_path)) == 0
    for N in (2, 3):
        assert (tmp_path / f"reconstruction_N{N}.csv").exists()


def test_sweep_command(tmp_path):
    assert run("sweep", "--set", "sweep.seeds=1", "--set", "grid.points=12", "--out", str(tmp_path)) == 0
    rows = (tmp_path / "sweep.csv").read_text().splitlines()
    assert [r.split(",")[1] for r in rows[1:]] == ["10", "8", "6", "5"]
    meta = (tmp_path / "sweep_meta.txt").read_text()
    assert "numpy=" in meta and "seed=0" in meta


def test_examples_and_errors(tmp_path, capsys):
    assert main(["examples"]) == 0
    assert "example3" in capsys.readouterr().out
    assert run("forward", "--set", "delta=0.1", "--set", "N=2", "--out", str(tmp_path)) == 2
    assert run("noise", "--in", str(tmp_path / "nope.csv"), "--out", str(tmp_path)) == 2
    assert run("forward", "--config", str(tmp_path / "missing.cfg")) == 2
