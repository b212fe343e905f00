"""Quantitative diagnostics of the three smoothing mechanisms: Gaussian
kernel convolution, mean-field stationary states and the log-convolution
(Cole-Hopf) effective potential.  Restricted to 1 and 2 dimensions, where
quadrature is cheap and the densities can be tabulated on grids.
"""

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "GridDensity",
    "FixedPointResult",
    "SmoothingReport",
    "kernel_smooth",
    "mc_smoothed_gradient",
    "stationary_density",
    "self_consistent_mean",
    "critical_lambda",
    "cole_hopf",
    "free_energy",
    "smoothing_report",
    "NonIntegrableError",
]

_DEFAULT_NODES_1D = 128
_DEFAULT_NODES_2D = 64

_gh_cache = {}


def _gauss_hermite(n):
    if n not in _gh_cache:
        t, w = np.polynomial.hermite.hermgauss(n)
        _gh_cache[n] = (t, w / np.sqrt(np.pi))
    return _gh_cache[n]


class NonIntegrableError(ValueError):
    """exp(-beta*Phi) carries too much mass at the grid boundary."""


@dataclass
class GridDensity:
    """A probability density tabulated on a uniform 1D lattice."""

    x: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.values.min() < 0:
            raise ValueError("density values must be non-negative")
        z = np.trapezoid(self.values, self.x)
        if not np.isfinite(z) or z <= 0:
            raise ValueError("density does not normalize")
        self.values = self.values / z

    def mean(self):
        return np.trapezoid(self.x * self.values, self.x)

    def variance(self):
        m = self.mean()
        return np.trapezoid((self.x - m) ** 2 * self.values, self.x)


@dataclass
class FixedPointResult:
    mean: float
    iterations: int
    converged: bool


def _eval_1d(obj, xs):
    """Evaluate a d<=2 objective on a flat array of scalars (d must be 1)."""
    return obj.value(np.asarray(xs, dtype=float)[..., None])


def kernel_smooth(obj, h, xs, nodes=_DEFAULT_NODES_1D):
    """Gaussian-kernel smoothing (G_h * Phi)(x) by Gauss-Hermite quadrature.

    ``xs`` is an array of evaluation points of shape (..., d) for d in
    {1, 2}; a bare (...,) array is treated as 1D.  ``h`` is the kernel
    variance.
    """
    if h <= 0:
        raise ValueError(f"h must be positive, got {h}")
    xs = np.asarray(xs, dtype=float)
    if obj.dim == 1:
        pts = xs if xs.ndim and xs.shape[-1] == 1 else xs[..., None]
        t, w = _gauss_hermite(nodes)
        shifted = pts[..., None, :] + np.sqrt(2.0 * h) * t[:, None]
        return (obj.value(shifted) * w).sum(axis=-1)
    if obj.dim == 2:
        t, w = _gauss_hermite(nodes)
        off = np.sqrt(2.0 * h) * np.stack(
            [np.repeat(t, nodes), np.tile(t, nodes)], axis=-1)
        ww = np.repeat(w, nodes) * np.tile(w, nodes)
        shifted = xs[..., None, :] + off
        return (obj.value(shifted) * ww).sum(axis=-1)
    raise ValueError("kernel_smooth supports 1D and 2D objectives only")


def mc_smoothed_gradient(obj, x, h, n, seed):
    """Monte-Carlo estimate of grad (G_h * Phi)(x): the average of
    grad Phi(x + xi) over n draws xi ~ N(0, h I)."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    x = np.asarray(x, dtype=float)
    gen = np.random.default_rng(seed)
    xi = np.sqrt(h) * gen.standard_normal((int(n),) + x.shape)
    return obj.gradient(x + xi).mean(axis=0)


def _grid(lo, hi, n):
    return np.linspace(lo, hi, int(n))


def stationary_density(obj, beta, grid, boundary_tol=1e-12):
    """Non-interacting equilibrium density Z^-1 exp(-beta*Phi) on a 1D grid.

    ``grid`` is (lo, hi, n_points) or an explicit array of points.  Raises
    :class:`NonIntegrableError` when the boundary values carry more than
    ``boundary_tol`` of the peak (the tails are then not captured).
    """
    xs = _grid(*grid) if isinstance(grid, tuple) else np.asarray(grid, dtype=float)
    with np.errstate(over="ignore"):
        w = np.exp(-beta * (_eval_1d(obj, xs) - _eval_1d(obj, xs).min()))
    if max(w[0], w[-1]) > boundary_tol * w.max():
        raise NonIntegrableError(
            "exp(-beta*Phi) has non-negligible boundary mass on the grid; "
            "enlarge the grid or increase beta")
    return GridDensity(xs, w)


def _tilted_mean(obj, beta, lam, m, xs):
    phi = _eval_1d(obj, xs)
    e = -beta * (phi + 0.5 * lam * (xs - m) ** 2)
    w = np.exp(e - e.max())
    return np.trapezoid(xs * w, xs) / np.trapezoid(w, xs)


def self_consistent_mean(obj, beta, lam, m0, tol=1e-10, max_iter=200,
                         grid=(-10.0, 10.0, 4001)):
    """Solve m = mean of the tilted density exp(-beta*(Phi + lam/2 (x-m)^2))
    by Picard iteration with 0.5 damping when the iterates oscillate.

    Non-convergence is reported, not fatal: in the strong-interaction regime
    several stationary states coexist and the map can cycle.
    """
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    xs = _grid(*grid) if isinstance(grid, tuple) else np.asarray(grid, dtype=float)
    m = float(m0)
    prev_delta = 0.0
    for k in range(1, int(max_iter) + 1):
        m_new = _tilted_mean(obj, beta, lam, m, xs)
        delta = m_new - m
        if delta * prev_delta < 0:   # oscillation: damp the update
            m_new = m + 0.5 * delta
            delta = m_new - m
        if abs(delta) < tol:
            return FixedPointResult(m_new, k, True)
        prev_delta = delta
        m = m_new
    return FixedPointResult(m, int(max_iter), False)


def critical_lambda(obj, beta, grid=(-10.0, 10.0, 4001)):
    """Interaction strength at the phase transition:
    Var_{rho_inf}(x) = 1/(beta * lambda_c)."""
    rho = stationary_density(obj, beta, grid)
    return 1.0 / (beta * rho.variance())


def cole_hopf(obj, beta, gamma, x, nodes=None, literal_sign=False):
    """Effective potential -(1/beta) * log(G_{gamma/beta} * exp(-beta*Phi)).

    Evaluated by Gauss-Hermite quadrature with the max subtracted inside the
    log (no underflow).  ``literal_sign=True`` flips the leading sign to the
    form with +(1/beta), exposed for comparison only.
    """
    if gamma <= 0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    x = np.asarray(x, dtype=float)
    h = gamma / beta
    if obj.dim == 1:
        nodes = nodes or _DEFAULT_NODES_1D
        t, w = _gauss_hermite(nodes)
        pts = (x if x.ndim and x.shape[-1] == 1 else x[..., None])[..., None, :] \
            + np.sqrt(2.0 * h) * t[:, None]
        a = -beta * obj.value(pts)
    elif obj.dim == 2:
        nodes = nodes or _DEFAULT_NODES_2D
        t, w = _gauss_hermite(nodes)
        off = np.sqrt(2.0 * h) * np.stack(
            [np.repeat(t, nodes), np.tile(t, nodes)], axis=-1)
        w = np.repeat(w, nodes) * np.tile(w, nodes)
        a = -beta * obj.value(x[..., None, :] + off)
    else:
        raise ValueError("cole_hopf supports 1D and 2D objectives only")
    amax = a.max(axis=-1, keepdims=True)
    log_conv = amax[..., 0] + np.log((w * np.exp(a - amax)).sum(axis=-1))
    sign = 1.0 if literal_sign else -1.0
    return sign * log_conv / beta


def free_energy(rho, obj, beta, lam):
    """Free energy F = beta^-1 * entropy term + potential energy +
    (lam/2) * interaction energy with the quadratic kernel |x-y|^2/2.

    For that kernel the double integral reduces to the variance of rho.
    The entropy integrand is taken as 0 where rho vanishes.
    """
    xs, p = rho.x, rho.values
    with np.errstate(divide="ignore", invalid="ignore"):
        plogp = np.where(p > 0, p * np.log(np.where(p > 0, p, 1.0)), 0.0)
    entropy_term = np.trapezoid(plogp, xs) / beta
    potential = np.trapezoid(_eval_1d(obj, xs) * p, xs)
    interaction = 0.5 * lam * rho.variance()
    return entropy_term + potential + interaction


@dataclass
class SmoothingReport:
    """Scalar diagnostics bundle emitted by the smooth-diagnose command."""

    objective: str
    beta: float
    lam: float
    gamma: float
    h: float
    critical_lam: float
    fixed_point_means: list = field(default_factory=list)
    grid: list = field(default_factory=list)
    phi: list = field(default_factory=list)
    phi_kernel_h: list = field(default_factory=list)
    phi_colehopf_gamma: list = field(default_factory=list)

    def to_dict(self):
        return {
            "objective": self.objective,
            "beta": self.beta,
            "lambda": self.lam,
            "gamma": self.gamma,
            "h": self.h,
            "critical_lambda": self.critical_lam,
            "fixed_point_means": self.fixed_point_means,
        }


def smoothing_report(obj, beta, lam, gamma, h, grid=(-2.5, 2.5, 201),
                     density_grid=(-10.0, 10.0, 4001)):
    """Compute the full diagnostics bundle for a 1D objective."""
    if obj.dim != 1:
        raise ValueError("smoothing_report is defined for 1D objectives")
    xs = _grid(*grid)
    lam_c = critical_lambda(obj, beta, density_grid)
    fp = []
    for m0 in (-1.0, 0.0, 1.0):
        r = self_consistent_mean(obj, beta, lam, m0, grid=density_grid)
        fp.append({"m0": m0, "mean": float(r.mean),
                   "iterations": r.iterations, "converged": r.converged})
    return SmoothingReport(
        objective=obj.name, beta=beta, lam=lam, gamma=gamma, h=h,
        critical_lam=float(lam_c),
        fixed_point_means=fp,
        grid=xs.tolist(),
        phi=_eval_1d(obj, xs).tolist(),
        phi_kernel_h=kernel_smooth(obj, h, xs).tolist(),
        phi_colehopf_gamma=cole_hopf(obj, beta, gamma, xs).tolist(),
    )
