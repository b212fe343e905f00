"""sklearn-style estimator wrappers around the functional core.

``LangevinOptimizer.fit`` runs one of the particle optimizers on an
objective; ``VerletNetClassifier`` exposes the ellipse network with the
usual fit/predict/predict_proba surface so it composes with sklearn
pipelines and model selection.
"""

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin

from . import ellipse as ellipse_mod
from .dynamics import ParticleSystem, needs_fast_state, run_method
from .objectives import Objective, make_objective
from .params import HyperParams
from .validation import check_array_2d, check_finite

__all__ = ["LangevinOptimizer", "VerletNetClassifier"]


class LangevinOptimizer(BaseEstimator):
    """Particle-based global optimizer with a fit() interface.

    Parameters mirror :class:`~mflangevin.params.HyperParams`; ``method``
    selects the dynamics.  After ``fit`` the final agent positions are in
    ``particles_`` and the best agent (lowest objective value) in ``x_``.
    """

    def __init__(self, method="mf-sgld", beta=1.0, lam=0.0, gamma=0.1,
                 epsilon=1.0, outer_dt=0.01, M=20, m_prime=1, n_agents=25,
                 n_iter=100, smooth_h=1.0, smooth_samples=10, seed=0):
        self.method = method
        self.beta = beta
        self.lam = lam
        self.gamma = gamma
        self.epsilon = epsilon
        self.outer_dt = outer_dt
        self.M = M
        self.m_prime = m_prime
        self.n_agents = n_agents
        self.n_iter = n_iter
        self.smooth_h = smooth_h
        self.smooth_samples = smooth_samples
        self.seed = seed

    def _hyperparams(self):
        return HyperParams(beta=self.beta, lam=self.lam, gamma=self.gamma,
                           epsilon=self.epsilon, outer_dt=self.outer_dt,
                           M=self.M, m_prime=self.m_prime, N=self.n_agents,
                           n_iter=self.n_iter, smooth_h=self.smooth_h,
                           smooth_samples=self.smooth_samples)

    def fit(self, objective, X0=None, init_box=None):
        """Run the dynamics on ``objective`` (an Objective or registry id).

        Provide either explicit initial positions ``X0`` of shape
        (n_agents, d) or a uniform ``init_box = (lo, hi)``; defaults to the
        objective's reference box.
        """
        if isinstance(objective, str):
            objective = make_objective(objective)
        if not isinstance(objective, Objective):
            raise TypeError("objective must be an Objective or a registry id")
        hp = self._hyperparams()
        sys0 = None
        if X0 is not None:
            X0 = check_array_2d(X0, "X0")
            sys0 = ParticleSystem(
                X0, X0.copy() if needs_fast_state(self.method) else None)
        elif init_box is None:
            if objective.box is None:
                raise ValueError("objective has no reference box; "
                                 "pass X0 or init_box")
            init_box = objective.box
        final = run_method(self.method, objective, hp, self.seed,
                           sys0=sys0, init_box=init_box)
        self.particles_ = final.X
        values = objective.value(final.X)
        self.fun_values_ = values
        best = int(np.argmin(values))
        self.x_ = final.X[best]
        self.fun_ = float(values[best])
        self.n_iter_ = final.iter
        return self


class VerletNetClassifier(BaseEstimator, ClassifierMixin):
    """Discretized-ODE residual network trained by a Langevin optimizer."""

    def __init__(self, scheme="verlet", method="sgld", beta=1e6,
                 lam=0.0, gamma=1.0, epsilon=0.1, outer_dt=0.5, M=20,
                 n_replicas=4, epochs=100, init_scale=1.0, seed=0):
        self.scheme = scheme
        self.method = method
        self.beta = beta
        self.lam = lam
        self.gamma = gamma
        self.epsilon = epsilon
        self.outer_dt = outer_dt
        self.M = M
        self.n_replicas = n_replicas
        self.epochs = epochs
        self.init_scale = init_scale
        self.seed = seed

    def fit(self, X, y):
        X = check_array_2d(X)
        y = np.asarray(y)
        classes = np.unique(y)
        if len(classes) != 2:
            raise ValueError("VerletNetClassifier is a binary classifier")
        self.classes_ = classes
        y01 = (y == classes[1]).astype(int)
        dataset = ellipse_mod.EllipseDataset(
            X, y01, np.ones(len(X), dtype=bool), self.seed)
        hp = HyperParams(beta=self.beta, lam=self.lam, gamma=self.gamma,
                         epsilon=self.epsilon, outer_dt=self.outer_dt,
                         M=self.M, N=self.n_replicas, n_iter=self.epochs)
        net, curve = ellipse_mod.train(dataset, self.scheme, self.method, hp,
                                       self.seed, epochs=self.epochs,
                                       init_scale=self.init_scale)
        self.net_ = net
        self.params_ = net.params
        self.loss_curve_ = curve
        return self

    def predict_proba(self, X):
        X = check_array_2d(X)
        p1 = self.net_.predict_proba(X)
        return np.stack([1.0 - p1, p1], axis=-1)

    def predict(self, X):
        return self.classes_[(self.predict_proba(X)[:, 1] >= 0.5).astype(int)]
