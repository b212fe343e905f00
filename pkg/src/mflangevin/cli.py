"""Command-line entry point.

Exit codes: 0 success, 2 config error, 3 numerical abort (partial
artifacts are kept).
"""

import argparse
import json
import sys

import numpy as np

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3


def _resolve_config(arg, overrides):
    from .harness import ConfigError, load_config, load_preset, parse_config, serialize_config
    if arg.startswith("preset:"):
        cfg = load_preset(arg[len("preset:"):])
    else:
        cfg = load_config(arg)
    if overrides:
        text = serialize_config(cfg)
        lines = {ln.split("=")[0].strip(): ln for ln in text.splitlines()}
        for ov in overrides:
            if "=" not in ov:
                raise ConfigError(f"override must be key=value, got {ov!r}")
            key, _, val = ov.partition("=")
            lines[key.strip()] = f"{key.strip()} = {val.strip()}"
        cfg = parse_config("\n".join(lines.values()))
    return cfg


def _cmd_run(args):
    from .harness import run_experiment
    overrides = list(args.set or [])
    if args.seed is not None:
        overrides.append(f"seed={args.seed}")
    cfg = _resolve_config(args.config, overrides)
    out = args.out or cfg.out_dir or "."
    art = run_experiment(cfg, out_dir=out, workers=args.workers)
    if art.aborts:
        for run, it in art.aborts:
            print(f"numerical abort in run {run} at iteration {it}",
                  file=sys.stderr)
        return EXIT_NUMERIC
    print(f"wrote artifacts to {out}")
    return EXIT_OK


def _cmd_smooth_diagnose(args):
    from .harness import ConfigError
    from .objectives import make_objective
    from .smoothing import smoothing_report
    params = {}
    if args.objective == "oscillatory":
        params = {"dim": 1, "osc_delta": args.osc_delta}
    obj = make_objective(args.objective, **params)
    if obj.dim != 1:
        raise ConfigError("smooth-diagnose needs a 1D objective")
    rep = smoothing_report(obj, args.beta, getattr(args, "lambda"),
                           args.gamma, args.h,
                           grid=(args.grid_lo, args.grid_hi, args.grid_n))
    with open(args.out, "w", encoding="utf-8") as f:
        json.dump(rep.to_dict(), f, indent=2, sort_keys=True)
        f.write("\n")
    if args.csv:
        with open(args.csv, "w", encoding="utf-8", newline="\n") as f:
            f.write("x,phi,phi_kernel_h,phi_colehopf_gamma\n")
            for row in zip(rep.grid, rep.phi, rep.phi_kernel_h,
                           rep.phi_colehopf_gamma):
                f.write(",".join(repr(float(v)) for v in row) + "\n")
    print(f"wrote report to {args.out}")
    return EXIT_OK


def _cmd_ellipse_gen(args):
    from .ellipse import generate_ellipses
    from .harness import write_dataset_csv
    ds = generate_ellipses(n_per_class=args.n_per_class,
                           noise_sigma=args.noise_sigma, seed=args.seed)
    write_dataset_csv(ds, args.out)
    print(f"wrote dataset to {args.out}")
    return EXIT_OK


def _load_dataset_csv(path):
    from .ellipse import EllipseDataset
    pts, labels, mask = [], [], []
    with open(path, encoding="utf-8") as f:
        header = f.readline().strip()
        if header != "x,y,label,split":
            raise ValueError(f"unexpected dataset header {header!r} in {path}")
        for line in f:
            x, y, lab, split = line.strip().split(",")
            pts.append((float(x), float(y)))
            labels.append(int(lab))
            mask.append(split == "train")
    return EllipseDataset(np.array(pts), np.array(labels),
                          np.array(mask, dtype=bool), 0)


def _cmd_ellipse_train(args):
    import os

    from .ellipse import train
    from .harness import write_loss_curve_csv
    from .params import HyperParams
    ds = _load_dataset_csv(args.data)
    hp = HyperParams(beta=args.beta, lam=getattr(args, "lambda"),
                     gamma=args.gamma, epsilon=args.epsilon,
                     outer_dt=args.outer_dt, M=args.M, N=args.replicas,
                     n_iter=args.epochs)
    net, curve = train(ds, args.scheme, args.method, hp, args.seed,
                       epochs=args.epochs, init_scale=args.init_scale)
    os.makedirs(args.out, exist_ok=True)
    write_loss_curve_csv(curve, os.path.join(args.out, "loss_curve.csv"))
    np.save(os.path.join(args.out, "params.npy"), net.params)
    print(f"final train loss {curve[-1]['train_loss']:.4f}, "
          f"test acc {curve[-1]['test_acc']:.3f}; wrote {args.out}")
    return EXIT_OK


def _cmd_grid_export(args):
    from .ellipse import VerletNet, probability_grid
    from .harness import write_grid_csv
    net = VerletNet(np.load(args.params), args.scheme)
    xs, ys, probs = probability_grid(
        net, x_range=(args.x_lo, args.x_hi), y_range=(args.y_lo, args.y_hi),
        resolution=args.resolution)
    write_grid_csv(xs, ys, probs, args.out)
    print(f"wrote probability grid to {args.out}")
    return EXIT_OK


def _cmd_presets(args):
    from .harness import preset_names, serialize_config, load_preset
    if args.action == "list":
        for name in preset_names():
            print(name)
    else:
        print(serialize_config(load_preset(args.name)), end="")
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(
        prog="mflangevin",
        description="Langevin-dynamics optimizers, smoothing diagnostics "
                    "and experiment harness")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run an experiment config (path or preset:NAME)")
    r.add_argument("config")
    r.add_argument("--seed", type=int, default=None)
    r.add_argument("--out", default=None)
    r.add_argument("--workers", type=int, default=1)
    r.add_argument("--set", action="append", metavar="KEY=VALUE",
                   help="override a config key")
    r.set_defaults(func=_cmd_run)

    s = sub.add_parser("smooth-diagnose", help="emit smoothing diagnostics")
    s.add_argument("--objective", default="doublewell1d")
    s.add_argument("--osc-delta", dest="osc_delta", type=float, default=0.01)
    s.add_argument("--beta", type=float, default=1.0)
    s.add_argument("--lambda", type=float, default=1.0)
    s.add_argument("--gamma", type=float, default=0.1)
    s.add_argument("--h", type=float, default=0.5)
    s.add_argument("--grid-lo", type=float, default=-2.5)
    s.add_argument("--grid-hi", type=float, default=2.5)
    s.add_argument("--grid-n", type=int, default=201)
    s.add_argument("--out", default="smoothing_report.json")
    s.add_argument("--csv", default=None)
    s.set_defaults(func=_cmd_smooth_diagnose)

    g = sub.add_parser("ellipse-gen", help="generate the ellipse dataset")
    g.add_argument("--n-per-class", type=int, default=500)
    g.add_argument("--noise-sigma", type=float, default=0.05)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", default="dataset.csv")
    g.set_defaults(func=_cmd_ellipse_gen)

    t = sub.add_parser("ellipse-train", help="train the network on a dataset CSV")
    t.add_argument("--data", required=True)
    t.add_argument("--scheme", choices=["verlet", "euler"], default="verlet")
    t.add_argument("--method", default="sgld")
    t.add_argument("--beta", type=float, default=1e6)
    t.add_argument("--lambda", type=float, default=0.0)
    t.add_argument("--gamma", type=float, default=1.0)
    t.add_argument("--epsilon", type=float, default=0.1)
    t.add_argument("--outer-dt", dest="outer_dt", type=float, default=0.5)
    t.add_argument("--M", type=int, default=20)
    t.add_argument("--replicas", type=int, default=4)
    t.add_argument("--epochs", type=int, default=100)
    t.add_argument("--init-scale", dest="init_scale", type=float, default=1.0)
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--out", default="ellipse_out")
    t.set_defaults(func=_cmd_ellipse_train)

    e = sub.add_parser("grid-export", help="export classification probabilities")
    e.add_argument("--params", required=True)
    e.add_argument("--scheme", choices=["verlet", "euler"], default="verlet")
    e.add_argument("--x-lo", type=float, default=-2.0)
    e.add_argument("--x-hi", type=float, default=2.0)
    e.add_argument("--y-lo", type=float, default=-4.0)
    e.add_argument("--y-hi", type=float, default=4.0)
    e.add_argument("--resolution", type=int, default=101)
    e.add_argument("--out", default="grid.csv")
    e.set_defaults(func=_cmd_grid_export)

    pr = sub.add_parser("presets", help="list or show bundled presets")
    pr.add_argument("action", choices=["list", "show"])
    pr.add_argument("name", nargs="?")
    pr.set_defaults(func=_cmd_presets)
    return p


def main(argv=None):
    from .dynamics import NumericalAbort
    from .harness import ConfigError
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalAbort as e:
        print(f"numerical abort: {e}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
