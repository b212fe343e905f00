"""Benchmark loss functions with exact analytic gradients.

Every objective evaluates on arrays of shape ``(..., d)`` so the optimizers
can process all agents of a particle system in one call.
"""

import numpy as np

__all__ = [
    "Objective",
    "make_objective",
    "camel_value",
    "camel_gradient",
    "oscillatory_value",
    "oscillatory_gradient",
    "double_well_value",
    "double_well_gradient",
    "OBJECTIVE_IDS",
]


class Objective:
    """A differentiable scalar field with an analytic gradient.

    Parameters
    ----------
    name : str
        Registry id of the objective.
    dim : int
        Dimension of the input space.
    value : callable
        Maps an array of shape ``(..., dim)`` to values of shape ``(...)``.
    gradient : callable
        Maps ``(..., dim)`` to gradients of shape ``(..., dim)``.
    known_minimizers : array-like, optional
        Rows are global minimizers; may be empty.
    params : dict, optional
        Named real parameters (e.g. the oscillation scale).
    box : tuple, optional
        Reference box ``(lo, hi)`` applied per axis, used for sampling.
    """

    def __init__(self, name, dim, value, gradient, known_minimizers=(),
                 params=None, box=None):
        if dim < 1:
            raise ValueError(f"dimension must be positive, got {dim}")
        self.name = name
        self.dim = int(dim)
        self._value = value
        self._gradient = gradient
        self.known_minimizers = np.atleast_2d(np.asarray(known_minimizers, dtype=float)) \
            if len(known_minimizers) else np.empty((0, dim))
        self.params = dict(params or {})
        self.box = box

    def value(self, x):
        x = np.asarray(x, dtype=float)
        return self._value(x)

    def gradient(self, x):
        x = np.asarray(x, dtype=float)
        return self._gradient(x)

    def __repr__(self):
        return f"Objective({self.name!r}, dim={self.dim})"


def camel_value(x):
    """Six-hump camel function on 2-vectors (broadcasts over leading axes)."""
    x = np.asarray(x, dtype=float)
    x1, x2 = x[..., 0], x[..., 1]
    return (4.0 - 2.1 * x1**2 + x1**4 / 3.0) * x1**2 + x1 * x2 \
        + (-4.0 + 4.0 * x2**2) * x2**2


def camel_gradient(x):
    x = np.asarray(x, dtype=float)
    x1, x2 = x[..., 0], x[..., 1]
    g1 = 8.0 * x1 - 8.4 * x1**3 + 2.0 * x1**5 + x2
    g2 = x1 - 8.0 * x2 + 16.0 * x2**3
    return np.stack([g1, g2], axis=-1)


def oscillatory_value(x, osc_delta):
    """Sum of squared oscillatory terms; >= 0 with the minimum at the origin."""
    if osc_delta <= 0:
        raise ValueError(f"osc_delta must be positive, got {osc_delta}")
    x = np.asarray(x, dtype=float)
    t = x * np.sin(x / osc_delta) + 0.1 * x
    return (t**2).sum(axis=-1)


def oscillatory_gradient(x, osc_delta):
    if osc_delta <= 0:
        raise ValueError(f"osc_delta must be positive, got {osc_delta}")
    x = np.asarray(x, dtype=float)
    u = x / osc_delta
    t = x * np.sin(u) + 0.1 * x
    return 2.0 * t * (np.sin(u) + u * np.cos(u) + 0.1)


def double_well_value(x):
    """Canonical 1D non-convex quartic x^4/4 - x^2/2 with minima at +-1."""
    x = np.asarray(x, dtype=float)
    return (x**4 / 4.0 - x**2 / 2.0).sum(axis=-1)


def double_well_gradient(x):
    x = np.asarray(x, dtype=float)
    return x**3 - x


def _camel6():
    return Objective(
        "camel6", 2, camel_value, camel_gradient,
        known_minimizers=[[-0.0898, 0.7126], [0.0898, -0.7126]],
        box=(-2.0, 2.0),
    )


def _oscillatory(dim=10, osc_delta=0.01):
    dim = int(dim)
    return Objective(
        "oscillatory", dim,
        lambda x: oscillatory_value(x, osc_delta),
        lambda x: oscillatory_gradient(x, osc_delta),
        known_minimizers=[np.zeros(dim)],
        params={"osc_delta": float(osc_delta)},
        box=(-10.0, 10.0),
    )


def _doublewell1d():
    return Objective(
        "doublewell1d", 1, double_well_value, double_well_gradient,
        known_minimizers=[[-1.0], [1.0]],
        box=(-2.5, 2.5),
    )


_REGISTRY = {
    "camel6": _camel6,
    "oscillatory": _oscillatory,
    "doublewell1d": _doublewell1d,
}

OBJECTIVE_IDS = tuple(sorted(_REGISTRY))


def make_objective(name, **params):
    """Build a registered objective by string id.

    Unknown ids and unknown parameters raise ``ValueError`` so config typos
    fail loudly.
    """
    try:
        factory = _REGISTRY[name]
    except KeyError:
        raise ValueError(
            f"unknown objective {name!r}; available: {', '.join(OBJECTIVE_IDS)}"
        ) from None
    try:
        return factory(**params)
    except TypeError:
        raise ValueError(f"invalid parameters for objective {name!r}: {params}") from None
