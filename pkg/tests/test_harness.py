import json
import os

import numpy as np
import pytest

from mflangevin.cli import EXIT_CONFIG, EXIT_NUMERIC, EXIT_OK, main
from mflangevin.dynamics import ParticleSystem
from mflangevin.harness import (
    ConfigError,
    distance_metrics,
    init_particles,
    load_preset,
    parse_config,
    preset_names,
    run_experiment,
    serialize_config,
    summarize,
)

MINIMAL = "method = sgld\nobjective = camel6\n"


def test_parse_minimal_uses_defaults():
    cfg = parse_config(MINIMAL)
    assert cfg.method == "sgld" and cfg.objective == "camel6"
    assert cfg.N == 25 and cfg.runs == 1 and cfg.record_traces is False


def test_parse_comments_and_blank_lines():
    cfg = parse_config("# a comment\n\nmethod = sgld  # trailing\n"
                       "objective = camel6\nbeta = 2.5\n")
    assert cfg.beta == 2.5


@pytest.mark.parametrize("text", [
    "objective = camel6\n",                          # missing method
    "method = sgld\n",                               # missing objective
    MINIMAL + "typo_key = 1\n",                      # unknown key
    MINIMAL + "beta = 1\nbeta = 2\n",                # duplicate
    MINIMAL + "beta = abc\n",                        # bad float
    MINIMAL + "record_traces = yes\n",               # bad bool
    MINIMAL + "runs = 0\n",
    MINIMAL + "init_lo = 3\ninit_hi = -3\n",
    "method = adam\nobjective = camel6\n",
    "method = sgld\nobjective = rosenbrock\n",       # rejected on use
    "just a line\nmethod = sgld\nobjective = camel6\n",
])
def test_parse_rejections(text):
    with pytest.raises(ConfigError):
        cfg = parse_config(text)
        cfg.make_objective()


def test_round_trip_identity():
    cfg = parse_config(MINIMAL + "beta = 10.0\nlambda = 2.0\nM = 7\n"
                       "outer_dt = 0.014\nrecord_traces = true\n")
    text = serialize_config(cfg)
    assert parse_config(text) == cfg
    # canonical: serializing twice gives identical bytes
    assert serialize_config(parse_config(text)) == text


def test_bad_hyperparams_become_config_errors():
    cfg = parse_config(MINIMAL + "m_prime = 30\nM = 20\n")
    with pytest.raises(ConfigError):
        cfg.hyperparams()


def test_presets_all_load():
    names = preset_names()
    assert names == sorted(names)
    assert "fig1_a" in names and "ellipse_sgld_verlet" in names
    for name in names:
        cfg = load_preset(name)
        cfg.hyperparams()
        if cfg.objective != "ellipse":
            cfg.make_objective()
    with pytest.raises(ConfigError):
        load_preset("does_not_exist")


def test_init_particles():
    cfg = parse_config(MINIMAL + "N = 7\ninit_lo = -1.5\ninit_hi = 1.5\n")
    s1 = init_particles(cfg, run=0)
    s2 = init_particles(cfg, run=0)
    assert np.array_equal(s1.X, s2.X)
    assert s1.X.shape == (7, 2)
    assert s1.X.min() >= -1.5 and s1.X.max() <= 1.5
    assert s1.Y is None
    cfg_hom = parse_config("method = hom-sgld\nobjective = camel6\nN = 3\n")
    sh = init_particles(cfg_hom, run=0)
    assert np.array_equal(sh.Y, sh.X)
    assert not np.array_equal(init_particles(cfg, run=1).X, s1.X)


def test_distance_metrics():
    sys = ParticleSystem(np.array([[0.0, 0.0], [3.0, 4.0]]))
    best, worst = distance_metrics(sys, [[0.0, 0.0]])
    assert (best, worst) == (0.0, 5.0)
    # nearest of several minimizers counts
    best, worst = distance_metrics(sys, [[0.0, 1.0], [3.0, 3.0]])
    assert best == 1.0 and worst == 1.0
    with pytest.raises(ValueError):
        distance_metrics(sys, np.empty((0, 2)))


def test_summarize_medians():
    runs = [
        np.array([[1, 0.1, 1.0], [2, 0.2, 2.0]]),
        np.array([[1, 0.3, 3.0], [2, 0.4, 4.0]]),
        np.array([[1, 0.5, 5.0], [2, 0.6, 6.0]]),
    ]
    s = summarize(runs)
    assert np.allclose(s, [[1, 0.3, 3.0], [2, 0.4, 4.0]])
    even = summarize(runs[:2])
    assert np.allclose(even[0], [1, 0.2, 2.0])


SMALL = (MINIMAL + "N = 4\niters = 20\nruns = 3\nbeta = 10.0\n"
         "outer_dt = 0.01\nrecord_traces = true\nseed = 1\n")


def _read(path):
    with open(path, "rb") as f:
        return f.read()


def test_run_experiment_artifacts(tmp_path):
    cfg = parse_config(SMALL)
    art = run_experiment(cfg, out_dir=str(tmp_path / "a"))
    assert art.ok
    assert len(art.runs) == 3
    assert art.summary.shape == (20, 3)
    m = _read(tmp_path / "a" / "metrics.csv").decode()
    assert m.startswith("run,iter,best_dist,worst_dist\n")
    assert len(m.strip().splitlines()) == 1 + 3 * 20
    s = _read(tmp_path / "a" / "summary.csv").decode()
    assert s.startswith("iter,median_best,median_worst\n")
    t = _read(tmp_path / "a" / "traces.csv").decode()
    assert t.startswith("run,agent,iter,x0,x1\n")
    assert len(t.strip().splitlines()) == 1 + 3 * 21 * 4


def test_run_experiment_deterministic_and_worker_independent(tmp_path):
    cfg = parse_config(SMALL)
    run_experiment(cfg, out_dir=str(tmp_path / "a"), workers=1)
    run_experiment(cfg, out_dir=str(tmp_path / "b"), workers=1)
    run_experiment(cfg, out_dir=str(tmp_path / "c"), workers=3)
    for name in ("metrics.csv", "summary.csv", "traces.csv"):
        ref = _read(tmp_path / "a" / name)
        assert _read(tmp_path / "b" / name) == ref
        assert _read(tmp_path / "c" / name) == ref


def test_run_experiment_records_aborts(tmp_path):
    # a quartic with a huge step blows up immediately
    cfg = parse_config("method = sgld\nobjective = doublewell1d\ndim = 1\n"
                       "N = 3\niters = 400\nruns = 2\nouter_dt = 10.0\n"
                       "init_lo = -2.4\ninit_hi = 2.4\n")
    art = run_experiment(cfg, out_dir=str(tmp_path))
    assert not art.ok
    assert len(art.aborts) == 2
    assert os.path.exists(tmp_path / "metrics.csv")
    assert art.summary.shape == (0, 3)


def test_run_experiment_ellipse(tmp_path):
    cfg = parse_config(
        "method = sgld\nobjective = ellipse\nN = 2\nepochs = 2\n"
        "n_per_class = 20\nouter_dt = 0.5\nbeta = 1000000.0\n"
        "init_scale = 1.0\ngrid_resolution = 5\n")
    run_experiment(cfg, out_dir=str(tmp_path))
    for name in ("dataset.csv", "loss_curve.csv", "grid.csv", "params.npy"):
        assert os.path.exists(tmp_path / name)
    grid = _read(tmp_path / "grid.csv").decode()
    assert grid.startswith("x,y,prob\n")
    assert len(grid.strip().splitlines()) == 1 + 25
    curve = _read(tmp_path / "loss_curve.csv").decode()
    assert len(curve.strip().splitlines()) == 1 + 3


def test_cli_run_and_overrides(tmp_path):
    cfg_path = tmp_path / "exp.cfg"
    cfg_path.write_text(SMALL)
    out = tmp_path / "out"
    assert main(["run", str(cfg_path), "--out", str(out),
                 "--set", "iters=5", "--set", "runs=1"]) == EXIT_OK
    m = _read(out / "metrics.csv").decode()
    assert len(m.strip().splitlines()) == 1 + 5


def test_cli_exit_codes(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text(MINIMAL + "nonsense = 1\n")
    assert main(["run", str(bad), "--out", str(tmp_path / "x")]) == EXIT_CONFIG
    stiff = tmp_path / "stiff.cfg"
    stiff.write_text("method = sgld\nobjective = doublewell1d\ndim = 1\n"
                     "N = 2\niters = 400\nouter_dt = 10.0\n"
                     "init_lo = -2.4\ninit_hi = 2.4\n")
    assert main(["run", str(stiff), "--out", str(tmp_path / "y")]) == EXIT_NUMERIC


def test_cli_presets_and_preset_run(tmp_path, capsys):
    assert main(["presets", "list"]) == EXIT_OK
    listed = capsys.readouterr().out.split()
    assert listed == preset_names()
    assert main(["presets", "show", "fig1_a"]) == EXIT_OK
    shown = capsys.readouterr().out
    assert parse_config(shown) == load_preset("fig1_a")
    out = tmp_path / "out"
    assert main(["run", "preset:fig1_a", "--out", str(out),
                 "--set", "iters=3", "--set", "record_traces=false"]) == EXIT_OK
    assert os.path.exists(out / "summary.csv")


def test_cli_smooth_diagnose(tmp_path):
    out = tmp_path / "rep.json"
    csv = tmp_path / "rep.csv"
    assert main(["smooth-diagnose", "--objective", "doublewell1d",
                 "--beta", "2.0", "--lambda", "1.0", "--grid-n", "21",
                 "--out", str(out), "--csv", str(csv)]) == EXIT_OK
    rep = json.loads(out.read_text())
    assert rep["objective"] == "doublewell1d"
    assert rep["critical_lambda"] > 0
    lines = csv.read_text().strip().splitlines()
    assert lines[0] == "x,phi,phi_kernel_h,phi_colehopf_gamma"
    assert len(lines) == 1 + 21


def test_cli_ellipse_pipeline(tmp_path):
    data = tmp_path / "ds.csv"
    assert main(["ellipse-gen", "--n-per-class", "20", "--out", str(data)]) == EXIT_OK
    assert data.read_text().startswith("x,y,label,split\n")
    out = tmp_path / "train"
    assert main(["ellipse-train", "--data", str(data), "--epochs", "2",
                 "--replicas", "2", "--out", str(out)]) == EXIT_OK
    params = out / "params.npy"
    assert params.exists()
    grid = tmp_path / "grid.csv"
    assert main(["grid-export", "--params", str(params),
                 "--resolution", "4", "--out", str(grid)]) == EXIT_OK
    assert len(grid.read_text().strip().splitlines()) == 1 + 16
