"""The optimizers: SGLD, MF-SGLD, HOM-SGLD, MF-HOM-SGLD and smoothed
gradient descent.

All steppers are deterministic functions of (objective, hyper-parameters,
noise substreams).  The empirical mean entering the interaction force is
always computed from the pre-update positions of all agents, so results do
not depend on scheduling.  Non-finite state aborts the run with
:class:`NumericalAbort`; there is no silent step-size reduction.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .noise import NoiseStream

__all__ = [
    "METHOD_IDS",
    "NumericalAbort",
    "ParticleSystem",
    "sgld_step",
    "interaction_force",
    "mf_sgld_step",
    "hom_inner_loop",
    "hom_sgld_step",
    "mf_hom_sgld_step",
    "smoothed_gd_step",
    "run_method",
]

METHOD_IDS = ("sgld", "mf-sgld", "hom-sgld", "mf-hom-sgld", "smoothed-gd")

_HOM_METHODS = frozenset({"hom-sgld", "mf-hom-sgld"})


class NumericalAbort(RuntimeError):
    """Raised when a trajectory leaves the finite floats (stiffness signal)."""

    def __init__(self, message, iteration=None):
        super().__init__(message)
        self.iteration = iteration


@dataclass
class ParticleSystem:
    """Slow positions X (N x d), fast positions Y (N x d, homogenized
    methods only) and the outer iteration counter."""

    X: np.ndarray
    Y: Optional[np.ndarray] = None
    iter: int = 0

    @property
    def n_agents(self):
        return self.X.shape[0]

    @property
    def dim(self):
        return self.X.shape[1]

    def check_finite(self):
        if not np.isfinite(self.X).all() or \
                (self.Y is not None and not np.isfinite(self.Y).all()):
            raise NumericalAbort(
                f"non-finite state at iteration {self.iter} "
                "(numerical stiffness; reduce the step size)",
                iteration=self.iter)
        return self


def sgld_step(x, obj, beta, dt, z):
    """One Euler-Maruyama step x' = x - dt*grad(x) + sqrt(2*dt/beta)*z.

    Broadcasts over leading axes, so a whole particle system can be stepped
    with a single call.
    """
    x = np.asarray(x, dtype=float)
    z = np.asarray(z, dtype=float)
    with np.errstate(over="ignore", invalid="ignore"):
        return (x - dt * obj.gradient(x)) + np.sqrt(2.0 * dt / beta) * z


def _empirical_mean(X):
    # math.fsum is exactly rounded, so the mean does not depend on agent
    # order; this makes permutation exchangeability hold bitwise.
    return np.array([math.fsum(col) for col in X.T]) / len(X)


def interaction_force(X, i, lam):
    """Curie-Weiss force lam * (X_i - empirical mean) on agent ``i``."""
    X = np.asarray(X, dtype=float)
    return lam * (X[i] - _empirical_mean(X))


def _interaction_forces(X, lam):
    return lam * (X - _empirical_mean(X))


def mf_sgld_step(sys, obj, hp, noise):
    """One step of the interacting SGLD system (Euler-Maruyama).

    The mean is computed from the pre-update positions; with ``lam == 0``
    the update is bit-identical to independent :func:`sgld_step` calls on
    the same substreams.
    """
    dt, beta = hp.outer_dt, hp.beta
    X = sys.X
    Z = noise.normal_block(sys.dim).reshape(X.shape)
    with np.errstate(over="ignore", invalid="ignore"):
        Xn = (X - dt * obj.gradient(X) - dt * _interaction_forces(X, hp.lam)) \
            + np.sqrt(2.0 * dt / beta) * Z
    return ParticleSystem(Xn, None, sys.iter + 1).check_finite()


def _inner_steps(hp):
    # Y_{n,0} is the previous step's Y_{m'+M-1}, so the fast recursion must
    # reach index m'+M-1; with the paper default m' = 1 that is M steps.
    return hp.m_prime + hp.M - 1


def _hom_inner_batched(X, Y0, obj, hp, Z):
    """Fast recursion for all agents at once.

    ``Z`` has shape (N, S, d) with S = m' + M - 1.  Returns the final fast
    state and the window average over the M iterates Y_{m'-1} .. Y_{m'+M-2}.
    """
    step = hp.inner_dt / hp.epsilon
    sig = np.sqrt(2.0 * hp.inner_dt / (hp.beta * hp.epsilon))
    inv_gamma = 1.0 / hp.gamma
    Y = Y0
    acc = np.zeros_like(Y0)
    with np.errstate(over="ignore", invalid="ignore"):
        for m in range(1, _inner_steps(hp) + 1):
            if m >= hp.m_prime:
                acc = acc + Y
            Y = Y - step * (obj.gradient(Y) - inv_gamma * (X - Y)) \
                + sig * Z[:, m - 1, :]
    return Y, acc / hp.M


def hom_inner_loop(x, y0, obj, hp, z):
    """Fast recursion for a single agent.

    ``z`` holds the m' + M - 1 Gaussian d-vectors of the inner steps,
    shape (m'+M-1, d).  Returns ``(y_final, y_avg)`` where ``y_avg`` is the
    average of the M window iterates.
    """
    x = np.atleast_2d(np.asarray(x, dtype=float))
    y0 = np.atleast_2d(np.asarray(y0, dtype=float))
    z = np.asarray(z, dtype=float).reshape(1, _inner_steps(hp), x.shape[-1])
    yf, ya = _hom_inner_batched(x, y0, obj, hp, z)
    return yf[0], ya[0]


def _hom_step(sys, obj, hp, noise, interacting):
    if sys.Y is None:
        raise ValueError("homogenized methods need a fast state Y; "
                         "initialize the system with Y = X")
    dt = hp.outer_dt
    X, Y = sys.X, sys.Y
    n, d = X.shape
    S = _inner_steps(hp)
    Z = noise.normal_block(S * d).reshape(n, S, d)
    Yn, Yavg = _hom_inner_batched(X, Y, obj, hp, Z)
    with np.errstate(over="ignore", invalid="ignore"):
        Xn = X - (dt / hp.gamma) * (X - Yavg)
        if interacting:
            Xn = Xn - dt * _interaction_forces(X, hp.lam)
    return ParticleSystem(Xn, Yn, sys.iter + 1).check_finite()


def hom_sgld_step(sys, obj, hp, noise):
    """Homogenized SGLD without interaction (N independent trajectories)."""
    return _hom_step(sys, obj, hp, noise, interacting=False)


def mf_hom_sgld_step(sys, obj, hp, noise):
    """One outer step of the full mean-field homogenized algorithm."""
    return _hom_step(sys, obj, hp, noise, interacting=True)


def smoothed_gd_step(x, obj, h, n_samples, dt, xi):
    """Gradient descent on the kernel-smoothed loss via the Monte-Carlo
    gradient estimate averaged over ``xi`` ~ N(0, I) scaled by sqrt(h).

    ``xi`` has shape (n_samples, d) for a single point or (N, n_samples, d)
    for a batch of agents.
    """
    if n_samples < 1:
        raise ValueError(f"n_samples must be >= 1, got {n_samples}")
    x = np.asarray(x, dtype=float)
    xi = np.asarray(xi, dtype=float)
    pts = x[..., None, :] + np.sqrt(h) * xi
    with np.errstate(over="ignore", invalid="ignore"):
        g = obj.gradient(pts).mean(axis=-2)
        return x - dt * g


def _smoothed_gd_system_step(sys, obj, hp, noise):
    n, d = sys.X.shape
    k = hp.smooth_samples
    Z = noise.normal_block(k * d).reshape(n, k, d)
    Xn = smoothed_gd_step(sys.X, obj, hp.smooth_h, k, hp.outer_dt, Z)
    return ParticleSystem(Xn, None, sys.iter + 1).check_finite()


def _sgld_system_step(sys, obj, hp, noise):
    Z = noise.normal_block(sys.dim).reshape(sys.X.shape)
    Xn = sgld_step(sys.X, obj, hp.beta, hp.outer_dt, Z)
    return ParticleSystem(Xn, None, sys.iter + 1).check_finite()


_STEPPERS = {
    "sgld": _sgld_system_step,
    "mf-sgld": mf_sgld_step,
    "hom-sgld": hom_sgld_step,
    "mf-hom-sgld": mf_hom_sgld_step,
    "smoothed-gd": _smoothed_gd_system_step,
}


def needs_fast_state(method):
    return method in _HOM_METHODS


def run_method(method, obj, hp, seed, run=0, sys0=None, init_box=None,
               trace=None, agent_keys=None):
    """Run ``hp.n_iter`` outer steps of the selected method.

    The initial system is either given explicitly (``sys0``) or drawn
    uniformly from ``init_box = (lo, hi)`` using the run-level substream.
    ``trace`` is called with every state, including the initial one.
    Deterministic given (method, obj, hp, seed, run).
    """
    if method not in _STEPPERS:
        raise ValueError(f"unknown method {method!r}; one of {METHOD_IDS}")
    if sys0 is None:
        if init_box is None:
            raise ValueError("provide sys0 or init_box")
        lo, hi = init_box
        gen = NoiseStream.init_generator(seed, run)
        X = gen.uniform(lo, hi, size=(hp.N, obj.dim))
        sys0 = ParticleSystem(X, X.copy() if needs_fast_state(method) else None, 0)
    elif needs_fast_state(method) and sys0.Y is None:
        sys0 = ParticleSystem(sys0.X, sys0.X.copy(), sys0.iter)
    noise = NoiseStream(seed, run=run, n_agents=sys0.n_agents,
                        agent_keys=agent_keys)
    stepper = _STEPPERS[method]
    sys = sys0
    if trace is not None:
        trace(sys)
    for _ in range(hp.n_iter):
        sys = stepper(sys, obj, hp, noise)
        if trace is not None:
            trace(sys)
    return sys
