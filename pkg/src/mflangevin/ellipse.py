"""Co-centric ellipse classification with a discretized-ODE residual
network.

The network integrates a two-dimensional state through 128 layers with step
0.05 and tanh activations, either with a Verlet (leapfrog) scheme carrying
an auxiliary velocity, or with plain explicit Euler.  Gradients are
hand-rolled reverse-mode through the cached forward pass.  The flat
parameter vector (length 774) is the "agent position" the Langevin
optimizers act on.
"""

from dataclasses import dataclass

import numpy as np

from .objectives import Objective
from .dynamics import run_method, needs_fast_state
from .params import HyperParams

__all__ = [
    "EllipseDataset",
    "VerletNet",
    "generate_ellipses",
    "loss_and_grad",
    "probability_grid",
    "train",
    "N_LAYERS",
    "N_PARAMS",
    "STEP_SIZE",
]

N_LAYERS = 128
STEP_SIZE = 0.05
# per layer a 2x2 weight and a 2-bias (6*128), a linear opening layer
# (1x2 weight + bias) and a scalar readout (2 weights + bias)
N_PARAMS = 6 * N_LAYERS + 3 + 3

INNER_AXES = (0.35, 0.7)
OUTER_AXES = (0.8, 1.6)
DATA_RANGE = ((-1.0, 1.0), (-2.0, 2.0))


@dataclass
class EllipseDataset:
    points: np.ndarray        # (n, 2)
    labels: np.ndarray        # (n,) in {0, 1}
    train_mask: np.ndarray    # (n,) bool
    seed: int

    @property
    def train(self):
        return self.points[self.train_mask], self.labels[self.train_mask]

    @property
    def test(self):
        return self.points[~self.train_mask], self.labels[~self.train_mask]


def generate_ellipses(n_per_class=500, noise_sigma=0.05, seed=0, train_frac=0.8):
    """Sample two classes on co-centric ellipses with radial Gaussian jitter,
    clipped to the data range [-1,1] x [-2,2]."""
    if n_per_class < 1:
        raise ValueError("n_per_class must be >= 1")
    gen = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(3,)))
    pts, labels = [], []
    for label, (a, b) in enumerate((INNER_AXES, OUTER_AXES)):
        theta = gen.uniform(0.0, 2.0 * np.pi, n_per_class)
        r = 1.0 + noise_sigma * gen.standard_normal(n_per_class)
        x = np.clip(a * r * np.cos(theta), *DATA_RANGE[0])
        y = np.clip(b * r * np.sin(theta), *DATA_RANGE[1])
        pts.append(np.stack([x, y], axis=-1))
        labels.append(np.full(n_per_class, label))
    pts = np.concatenate(pts)
    labels = np.concatenate(labels)
    mask = np.zeros(len(pts), dtype=bool)
    n_train = int(round(train_frac * n_per_class))
    for label in (0, 1):
        idx = np.flatnonzero(labels == label)
        mask[gen.permutation(idx)[:n_train]] = True
    return EllipseDataset(pts, labels, mask, seed)


def _unpack(params):
    p = np.asarray(params, dtype=float)
    if p.shape != (N_PARAMS,):
        raise ValueError(f"expected a parameter vector of length {N_PARAMS}, "
                         f"got shape {p.shape}")
    W = p[:4 * N_LAYERS].reshape(N_LAYERS, 2, 2)
    b = p[4 * N_LAYERS:6 * N_LAYERS].reshape(N_LAYERS, 2)
    w_open = p[6 * N_LAYERS:6 * N_LAYERS + 2]
    b_open = p[6 * N_LAYERS + 2]
    w_out = p[6 * N_LAYERS + 3:6 * N_LAYERS + 5]
    b_out = p[6 * N_LAYERS + 5]
    return W, b, w_open, b_open, w_out, b_out


class VerletNet:
    """Parameter vector plus architecture descriptor.

    ``scheme`` selects the layer recursion:

    * ``"verlet"``: v_{l+1} = v_l - h*tanh(W_l x_l + b_l),
      x_{l+1} = x_l + h*v_{l+1}, with the opening layer setting the initial
      velocity v_0 = tanh(w.x + c) in both components.
    * ``"euler"``: x_{l+1} = x_l + h*tanh(W_l x_l + b_l), with the opening
      layer shifting x_0 = x + h*tanh(w.x + c).
    """

    def __init__(self, params=None, scheme="verlet"):
        if scheme not in ("verlet", "euler"):
            raise ValueError(f"unknown scheme {scheme!r}")
        if params is None:
            params = np.zeros(N_PARAMS)
        self.params = np.asarray(params, dtype=float)
        _unpack(self.params)  # validates the length
        self.scheme = scheme
        self.n_layers = N_LAYERS
        self.step = STEP_SIZE

    def forward(self, x, with_cache=False):
        """Logits for inputs ``x`` of shape (batch, 2); optionally the
        per-layer cache needed by the backward pass."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        W, b, w_open, b_open, w_out, b_out = _unpack(self.params)
        h = self.step
        s = np.tanh(x @ w_open + b_open)          # (batch,)
        cache = {"x_in": x, "s": s, "xs": [], "ts": []}
        if self.scheme == "verlet":
            v = s[:, None] * np.ones(2)
            state = x
            for l in range(N_LAYERS):
                t = np.tanh(state @ W[l].T + b[l])
                cache["xs"].append(state)
                cache["ts"].append(t)
                v = v - h * t
                state = state + h * v
            cache["v"] = v
        else:
            state = x + h * s[:, None] * np.ones(2)
            for l in range(N_LAYERS):
                t = np.tanh(state @ W[l].T + b[l])
                cache["xs"].append(state)
                cache["ts"].append(t)
                state = state + h * t
        cache["x_out"] = state
        logits = state @ w_out + b_out
        return (logits, cache) if with_cache else logits

    def predict_proba(self, x):
        return _sigmoid(self.forward(x))


def _sigmoid(z):
    out = np.empty_like(z, dtype=float)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def loss_and_grad(net, X, y):
    """Mean binary cross-entropy of sigmoid(logit) against labels and its
    gradient with respect to the flat parameter vector (reverse mode)."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=float)
    if len(X) == 0:
        raise ValueError("batch must be non-empty")
    W, b, w_open, b_open, w_out, b_out = _unpack(net.params)
    h = net.step
    B = len(X)
    logits, cache = net.forward(X, with_cache=True)
    # log-sum-exp stable BCE: softplus(z) - y*z
    loss = float(np.mean(np.logaddexp(0.0, logits) - y * logits))
    dlogit = (_sigmoid(logits) - y) / B      # (B,)

    gW = np.zeros_like(W)
    gb = np.zeros_like(b)
    g_wout = cache["x_out"].T @ dlogit
    g_bout = dlogit.sum()
    dstate = dlogit[:, None] * w_out         # d loss / d x_L
    if net.scheme == "verlet":
        dv = np.zeros_like(dstate)
        for l in range(N_LAYERS - 1, -1, -1):
            # x_{l+1} = x_l + h v_{l+1};  v_{l+1} = v_l - h t_l
            dv = dv + h * dstate
            dt = -h * dv
            t = cache["ts"][l]
            da = dt * (1.0 - t**2)
            gW[l] = da.T @ cache["xs"][l]
            gb[l] = da.sum(axis=0)
            dstate = dstate + da @ W[l]
        ds = dv.sum(axis=1)                  # v_0 = s * ones(2)
        s = cache["s"]
        d_pre = ds * (1.0 - s**2)
        g_wopen = cache["x_in"].T @ d_pre
        g_bopen = d_pre.sum()
    else:
        for l in range(N_LAYERS - 1, -1, -1):
            t = cache["ts"][l]
            da = h * dstate * (1.0 - t**2)
            gW[l] = da.T @ cache["xs"][l]
            gb[l] = da.sum(axis=0)
            dstate = dstate + da @ W[l]
        s = cache["s"]
        ds = h * dstate.sum(axis=1)          # x_0 = x + h * s * ones(2)
        d_pre = ds * (1.0 - s**2)
        g_wopen = cache["x_in"].T @ d_pre
        g_bopen = d_pre.sum()
    grad = np.concatenate([
        gW.reshape(-1), gb.reshape(-1),
        g_wopen, [g_bopen], g_wout, [g_bout],
    ])
    return loss, grad


def probability_grid(net, x_range=(-2.0, 2.0), y_range=(-4.0, 4.0),
                     resolution=101):
    """Class-1 probabilities on a uniform lattice (covers a region wider
    than the data range on purpose, to expose out-of-range behavior).

    Returns (xs, ys, probs) with probs of shape (resolution_y, resolution_x).
    """
    if np.isscalar(resolution):
        resolution = (int(resolution), int(resolution))
    if min(resolution) < 2:
        raise ValueError("resolution must be >= 2 per axis")
    xs = np.linspace(*x_range, resolution[0])
    ys = np.linspace(*y_range, resolution[1])
    gx, gy = np.meshgrid(xs, ys)
    pts = np.stack([gx.reshape(-1), gy.reshape(-1)], axis=-1)
    probs = net.predict_proba(pts).reshape(len(ys), len(xs))
    return xs, ys, probs


def _training_objective(dataset, scheme):
    Xtr, ytr = dataset.train

    def value(p):
        p = np.asarray(p, dtype=float)
        if p.ndim == 1:
            return loss_and_grad(VerletNet(p, scheme), Xtr, ytr)[0]
        flat = p.reshape(-1, N_PARAMS)
        out = np.array([loss_and_grad(VerletNet(q, scheme), Xtr, ytr)[0]
                        for q in flat])
        return out.reshape(p.shape[:-1])

    def gradient(p):
        p = np.asarray(p, dtype=float)
        if p.ndim == 1:
            return loss_and_grad(VerletNet(p, scheme), Xtr, ytr)[1]
        flat = p.reshape(-1, N_PARAMS)
        out = np.stack([loss_and_grad(VerletNet(q, scheme), Xtr, ytr)[1]
                        for q in flat])
        return out.reshape(p.shape)

    return Objective(f"ellipse-{scheme}", N_PARAMS, value, gradient)


def test_accuracy(net, dataset):
    Xte, yte = dataset.test
    if len(Xte) == 0:
        return float("nan")
    pred = (net.predict_proba(Xte) >= 0.5).astype(int)
    return float((pred == yte).mean())


def train(dataset, scheme, method, hp, seed, epochs=100, init_scale=0.1):
    """Drive the 774-dim parameter vector with one of the Langevin
    optimizers for ``epochs`` full-batch iterations.

    For mean-field methods the hp.N network replicas interact through the
    parameter-space empirical mean; for the i.i.d. methods the replicas are
    independent and the best one (lowest training loss) is reported.

    Returns (best VerletNet, per-epoch record dicts).
    """
    obj = _training_objective(dataset, scheme)
    hp = HyperParams(**{**hp.__dict__, "n_iter": int(epochs)})
    gen = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(4,)))
    X0 = init_scale * gen.standard_normal((hp.N, N_PARAMS))
    from .dynamics import ParticleSystem
    sys0 = ParticleSystem(X0, X0.copy() if needs_fast_state(method) else None)
    curve = []

    def record(sys):
        losses = obj.value(sys.X)
        i_best = int(np.argmin(losses))
        net = VerletNet(sys.X[i_best], scheme)
        curve.append({
            "epoch": sys.iter,
            "train_loss": float(losses[i_best]),
            "test_acc": test_accuracy(net, dataset),
        })

    final = run_method(method, obj, hp, seed, sys0=sys0, trace=record)
    losses = obj.value(final.X)
    best = VerletNet(final.X[int(np.argmin(losses))], scheme)
    return best, curve
