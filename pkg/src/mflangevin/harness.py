"""Config-driven experiment runner: replicated runs, best/worst-agent
metrics, cross-run medians and bit-exact CSV artifacts.

The config format is flat ``key = value`` text, one experiment per file.
Unknown keys are rejected so typos in the Greek-letter knobs fail loudly.
Reals are serialized as their shortest round-trip decimal, which makes the
CSV artifacts byte-identical across repeated and parallel executions.
"""

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import ellipse as ellipse_mod
from .dynamics import (METHOD_IDS, NumericalAbort, ParticleSystem,
                       needs_fast_state, run_method)
from .noise import NoiseStream
from .objectives import make_objective
from .params import HyperParams

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "RunArtifacts",
    "parse_config",
    "serialize_config",
    "load_config",
    "load_preset",
    "preset_names",
    "init_particles",
    "distance_metrics",
    "summarize",
    "run_experiment",
]


class ConfigError(ValueError):
    pass


def _parse_bool(s):
    if s in ("true", "false"):
        return s == "true"
    raise ConfigError(f"expected true/false, got {s!r}")


# key -> (parser, default); None default means "required"
_SCHEMA = {
    "method": (str, None),
    "objective": (str, None),
    "dim": (int, 2),
    "osc_delta": (float, 0.01),
    "beta": (float, 1.0),
    "lambda": (float, 0.0),
    "gamma": (float, 0.1),
    "epsilon": (float, 1.0),
    "outer_dt": (float, 0.01),
    "M": (int, 20),
    "m_prime": (int, 1),
    "N": (int, 25),
    "iters": (int, 100),
    "runs": (int, 1),
    "seed": (int, 0),
    "init_lo": (float, -2.0),
    "init_hi": (float, 2.0),
    "record_traces": (_parse_bool, False),
    "smooth_h": (float, 1.0),
    "smooth_samples": (int, 10),
    "out_dir": (str, ""),
    # ellipse-experiment keys
    "scheme": (str, "verlet"),
    "epochs": (int, 100),
    "n_per_class": (int, 500),
    "noise_sigma": (float, 0.05),
    "init_scale": (float, 0.1),
    "grid_resolution": (int, 81),
}

_ATTR = {k: ("lam" if k == "lambda" else k) for k in _SCHEMA}


@dataclass
class ExperimentConfig:
    method: str
    objective: str
    dim: int = 2
    osc_delta: float = 0.01
    beta: float = 1.0
    lam: float = 0.0
    gamma: float = 0.1
    epsilon: float = 1.0
    outer_dt: float = 0.01
    M: int = 20
    m_prime: int = 1
    N: int = 25
    iters: int = 100
    runs: int = 1
    seed: int = 0
    init_lo: float = -2.0
    init_hi: float = 2.0
    record_traces: bool = False
    smooth_h: float = 1.0
    smooth_samples: int = 10
    out_dir: str = ""
    scheme: str = "verlet"
    epochs: int = 100
    n_per_class: int = 500
    noise_sigma: float = 0.05
    init_scale: float = 0.1
    grid_resolution: int = 81

    def __post_init__(self):
        if self.method not in METHOD_IDS:
            raise ConfigError(f"unknown method {self.method!r}")
        if self.objective == "ellipse" and self.scheme not in ("verlet", "euler"):
            raise ConfigError(f"unknown scheme {self.scheme!r}")
        if self.runs < 1:
            raise ConfigError("runs must be >= 1")
        if self.init_lo > self.init_hi:
            raise ConfigError("init_lo must not exceed init_hi")

    def make_objective(self):
        if self.objective == "camel6":
            if self.dim != 2:
                raise ConfigError("camel6 is 2-dimensional")
            return make_objective("camel6")
        if self.objective == "oscillatory":
            return make_objective("oscillatory", dim=self.dim,
                                  osc_delta=self.osc_delta)
        if self.objective == "doublewell1d":
            if self.dim != 1:
                raise ConfigError("doublewell1d is 1-dimensional")
            return make_objective("doublewell1d")
        raise ConfigError(f"unknown objective {self.objective!r}")

    def hyperparams(self):
        try:
            return HyperParams(
                beta=self.beta, lam=self.lam, gamma=self.gamma,
                epsilon=self.epsilon, outer_dt=self.outer_dt, M=self.M,
                m_prime=self.m_prime, N=self.N, n_iter=self.iters,
                smooth_h=self.smooth_h, smooth_samples=self.smooth_samples)
        except ValueError as e:
            raise ConfigError(str(e)) from None


def parse_config(text):
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if key not in _SCHEMA:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        parser = _SCHEMA[key][0]
        try:
            values[key] = parser(val)
        except ConfigError:
            raise
        except ValueError:
            raise ConfigError(f"line {lineno}: bad value {val!r} for {key!r}") from None
    for key, (_, default) in _SCHEMA.items():
        if key not in values:
            if default is None:
                raise ConfigError(f"missing required key {key!r}")
            values[key] = default
    return ExperimentConfig(**{_ATTR[k]: v for k, v in values.items()})


def _format_value(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def serialize_config(cfg):
    lines = [f"{k} = {_format_value(getattr(cfg, _ATTR[k]))}" for k in _SCHEMA]
    return "\n".join(lines) + "\n"


def load_config(path):
    with open(path, encoding="utf-8") as f:
        return parse_config(f.read())


def preset_names():
    from importlib import resources
    root = resources.files("mflangevin") / "presets"
    return sorted(p.name[:-4] for p in root.iterdir() if p.name.endswith(".cfg"))


def load_preset(name):
    from importlib import resources
    path = resources.files("mflangevin") / "presets" / f"{name}.cfg"
    if not path.is_file():
        raise ConfigError(
            f"unknown preset {name!r}; available: {', '.join(preset_names())}")
    return parse_config(path.read_text(encoding="utf-8"))


def init_particles(cfg, run):
    """N i.i.d. uniform draws from the init box, from the run-level
    substream; the fast state starts at the slow one."""
    obj = cfg.make_objective()
    gen = NoiseStream.init_generator(cfg.seed, run)
    X = gen.uniform(cfg.init_lo, cfg.init_hi, size=(cfg.N, obj.dim))
    Y = X.copy() if needs_fast_state(cfg.method) else None
    return ParticleSystem(X, Y, 0)


def distance_metrics(sys, minimizers):
    """(best, worst) agent distance, each agent scored by its distance to
    the nearest known minimizer (Euclidean norm)."""
    minimizers = np.atleast_2d(np.asarray(minimizers, dtype=float))
    if len(minimizers) == 0:
        raise ValueError("minimizers must be non-empty")
    with np.errstate(over="ignore"):
        d = np.linalg.norm(sys.X[:, None, :] - minimizers[None], axis=-1).min(axis=1)
    return float(d.min()), float(d.max())


def summarize(metrics_per_run):
    """Per-iteration medians across runs of best and worst agent distance.

    Input rows are (iter, best, worst) arrays of identical shape; the median
    of an even count is the mean of the two central order statistics
    (numpy convention).
    """
    stack = np.stack([np.asarray(m, dtype=float) for m in metrics_per_run])
    iters = stack[0, :, 0]
    med = np.median(stack[:, :, 1:], axis=0)
    return np.column_stack([iters, med])


def _run_one(cfg, run):
    obj = cfg.make_objective()
    hp = cfg.hyperparams()
    sys0 = init_particles(cfg, run)
    metrics = []
    traces = [] if cfg.record_traces else None

    def trace(sys):
        if sys.iter > 0:
            best, worst = distance_metrics(sys, obj.known_minimizers)
            metrics.append((sys.iter, best, worst))
        if traces is not None:
            traces.append((sys.iter, sys.X.copy()))

    abort_iter = None
    try:
        run_method(cfg.method, obj, hp, cfg.seed, run=run, sys0=sys0,
                   trace=trace)
    except NumericalAbort as e:
        abort_iter = e.iteration
    return {"run": run, "metrics": np.array(metrics, dtype=float).reshape(-1, 3),
            "traces": traces, "abort": abort_iter}


@dataclass
class RunArtifacts:
    config: ExperimentConfig
    runs: list
    summary: np.ndarray
    aborts: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.aborts


def run_experiment(cfg, out_dir=None, workers=1):
    """Execute all replicated runs (optionally on a process pool), compute
    the cross-run summary and, if requested, write the CSV artifacts.

    Aborted runs keep their partial metrics and are excluded from the
    summary; the abort (run, iteration) pairs are recorded.
    """
    if cfg.objective == "ellipse":
        return _run_ellipse_experiment(cfg, out_dir)
    if workers > 1 and cfg.runs > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(_run_one, [cfg] * cfg.runs, range(cfg.runs)))
    else:
        results = [_run_one(cfg, r) for r in range(cfg.runs)]
    results.sort(key=lambda r: r["run"])
    aborts = [(r["run"], r["abort"]) for r in results if r["abort"] is not None]
    complete = [r["metrics"] for r in results if r["abort"] is None]
    summary = summarize(complete) if complete else np.empty((0, 3))
    art = RunArtifacts(cfg, results, summary, aborts)
    if out_dir is not None:
        write_artifacts(art, out_dir)
    return art


def _fmt(v):
    return repr(float(v))


def write_artifacts(art, out_dir):
    os.makedirs(out_dir, exist_ok=True)
    cfg = art.config
    with open(os.path.join(out_dir, "metrics.csv"), "w", encoding="utf-8",
              newline="\n") as f:
        f.write("run,iter,best_dist,worst_dist\n")
        for r in art.runs:
            for it, best, worst in r["metrics"]:
                f.write(f"{r['run']},{int(it)},{_fmt(best)},{_fmt(worst)}\n")
    with open(os.path.join(out_dir, "summary.csv"), "w", encoding="utf-8",
              newline="\n") as f:
        f.write("iter,median_best,median_worst\n")
        for it, mb, mw in art.summary:
            f.write(f"{int(it)},{_fmt(mb)},{_fmt(mw)}\n")
    if cfg.record_traces:
        with open(os.path.join(out_dir, "traces.csv"), "w", encoding="utf-8",
                  newline="\n") as f:
            dim = art.runs[0]["traces"][0][1].shape[1] if art.runs else 0
            cols = ",".join(f"x{i}" for i in range(dim))
            f.write(f"run,agent,iter,{cols}\n")
            for r in art.runs:
                for it, X in r["traces"]:
                    for a in range(X.shape[0]):
                        vals = ",".join(_fmt(v) for v in X[a])
                        f.write(f"{r['run']},{a},{it},{vals}\n")


def _run_ellipse_experiment(cfg, out_dir):
    dataset = ellipse_mod.generate_ellipses(
        n_per_class=cfg.n_per_class, noise_sigma=cfg.noise_sigma, seed=cfg.seed)
    hp = cfg.hyperparams()
    net, curve = ellipse_mod.train(dataset, cfg.scheme, cfg.method, hp,
                                   cfg.seed, epochs=cfg.epochs,
                                   init_scale=cfg.init_scale)
    art = RunArtifacts(cfg, [{"run": 0, "curve": curve, "net": net,
                              "dataset": dataset}], np.empty((0, 3)))
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        write_dataset_csv(dataset, os.path.join(out_dir, "dataset.csv"))
        write_loss_curve_csv(curve, os.path.join(out_dir, "loss_curve.csv"))
        xs, ys, probs = ellipse_mod.probability_grid(
            net, resolution=cfg.grid_resolution)
        write_grid_csv(xs, ys, probs, os.path.join(out_dir, "grid.csv"))
        np.save(os.path.join(out_dir, "params.npy"), net.params)
    return art


def write_dataset_csv(dataset, path):
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write("x,y,label,split\n")
        for p, lab, tr in zip(dataset.points, dataset.labels,
                              dataset.train_mask):
            split = "train" if tr else "test"
            f.write(f"{_fmt(p[0])},{_fmt(p[1])},{int(lab)},{split}\n")


def write_loss_curve_csv(curve, path):
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write("epoch,train_loss,test_acc\n")
        for row in curve:
            f.write(f"{row['epoch']},{_fmt(row['train_loss'])},"
                    f"{_fmt(row['test_acc'])}\n")


def write_grid_csv(xs, ys, probs, path):
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write("x,y,prob\n")
        for j, y in enumerate(ys):
            for i, x in enumerate(xs):
                f.write(f"{_fmt(x)},{_fmt(y)},{_fmt(probs[j, i])}\n")
