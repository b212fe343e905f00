import numpy as np
import pytest

from mflangevin.objectives import Objective, make_objective
from mflangevin.smoothing import (
    GridDensity,
    NonIntegrableError,
    cole_hopf,
    critical_lambda,
    free_energy,
    kernel_smooth,
    mc_smoothed_gradient,
    self_consistent_mean,
    smoothing_report,
    stationary_density,
)


def quadratic(dim=1):
    return Objective("quadratic", dim,
                     lambda x: 0.5 * (np.asarray(x) ** 2).sum(axis=-1),
                     lambda x: np.asarray(x, dtype=float),
                     known_minimizers=[np.zeros(dim)])


def test_kernel_smooth_quadratic_exact():
    # G_h * (x^2/2) = x^2/2 + h/2 in 1D, plus h/2 per extra dimension
    xs = np.linspace(-3, 3, 41)[:, None]
    for h in (0.1, 1.0, 2.5):
        got = kernel_smooth(quadratic(1), h, xs)
        assert np.allclose(got, 0.5 * xs[:, 0] ** 2 + 0.5 * h, rtol=1e-12, atol=1e-12)
    pts = np.random.default_rng(0).uniform(-2, 2, (30, 2))
    got2 = kernel_smooth(quadratic(2), 0.7, pts)
    want2 = 0.5 * (pts ** 2).sum(axis=1) + 0.7
    assert np.allclose(got2, want2, rtol=1e-12, atol=1e-12)


def test_kernel_smooth_monotone_in_h_at_minimum():
    # smoothing raises the value at a strict minimum
    obj = make_objective("doublewell1d")
    x = np.array([[1.0]])
    vals = [kernel_smooth(obj, h, x)[0] for h in (0.01, 0.1, 0.5)]
    assert vals[0] < vals[1] < vals[2]
    with pytest.raises(ValueError):
        kernel_smooth(obj, 0.0, x)


def test_mc_smoothed_gradient_quadratic():
    # the smoothed gradient of a quadratic is exactly linear; the MC
    # estimate converges at sqrt(n)
    obj = quadratic(1)
    x = np.array([2.0])
    g = mc_smoothed_gradient(obj, x, h=1.0, n=200_000, seed=0)
    assert g[0] == pytest.approx(2.0, abs=0.01)
    with pytest.raises(ValueError):
        mc_smoothed_gradient(obj, x, 1.0, 0, 0)


def test_grid_density_normalizes():
    xs = np.linspace(-8, 8, 4001)
    d = GridDensity(xs, np.exp(-0.5 * xs**2))
    assert np.trapezoid(d.values, d.x) == pytest.approx(1.0, rel=1e-12)
    assert d.mean() == pytest.approx(0.0, abs=1e-12)
    assert d.variance() == pytest.approx(1.0, abs=1e-6)
    with pytest.raises(ValueError):
        GridDensity(xs, xs)  # negative values


def test_stationary_density_gaussian():
    rho = stationary_density(quadratic(1), beta=2.0, grid=(-8.0, 8.0, 4001))
    # exp(-beta x^2/2) is N(0, 1/beta)
    assert rho.mean() == pytest.approx(0.0, abs=1e-12)
    assert rho.variance() == pytest.approx(0.5, rel=1e-6)


def test_stationary_density_boundary_mass_rejected():
    with pytest.raises(NonIntegrableError):
        stationary_density(quadratic(1), beta=1.0, grid=(-1.0, 1.0, 101))


def test_critical_lambda_quadratic():
    # Var = 1/beta, so lambda_c = 1/(beta Var) = 1 for every beta
    for beta in (0.5, 1.0, 4.0):
        lam_c = critical_lambda(quadratic(1), beta, grid=(-30.0, 30.0, 8001))
        assert lam_c == pytest.approx(1.0, abs=1e-6)


def test_self_consistent_mean_quadratic_unique():
    r = self_consistent_mean(quadratic(1), beta=1.0, lam=2.0, m0=1.0)
    assert r.converged
    assert r.mean == pytest.approx(0.0, abs=1e-9)


def test_self_consistent_mean_double_well_multistate():
    # strong interaction at low temperature: two symmetric magnetized states
    obj = make_objective("doublewell1d")
    up = self_consistent_mean(obj, beta=5.0, lam=5.0, m0=1.0, grid=(-4.0, 4.0, 4001))
    dn = self_consistent_mean(obj, beta=5.0, lam=5.0, m0=-1.0, grid=(-4.0, 4.0, 4001))
    assert up.converged and dn.converged
    assert up.mean > 0.5 and dn.mean < -0.5
    assert up.mean == pytest.approx(-dn.mean, abs=1e-8)
    # below the transition the only state is symmetric
    weak = self_consistent_mean(obj, beta=5.0, lam=0.01, m0=1.0, grid=(-4.0, 4.0, 4001))
    assert weak.converged
    assert weak.mean == pytest.approx(0.0, abs=1e-6)


def test_cole_hopf_quadratic_oracle():
    # log-convolution of a Gaussian with a Gaussian is exact:
    # x^2 / (2 (1+gamma)) + ln(1+gamma) / (2 beta)
    xs = np.linspace(-2, 2, 21)[:, None]
    for beta, gamma in ((1.0, 0.5), (10.0, 0.1), (2.0, 2.0)):
        got = cole_hopf(quadratic(1), beta, gamma, xs)
        want = xs[:, 0] ** 2 / (2 * (1 + gamma)) + np.log(1 + gamma) / (2 * beta)
        assert np.allclose(got, want, atol=1e-6)


def test_cole_hopf_quadratic_oracle_2d():
    pts = np.random.default_rng(1).uniform(-1.5, 1.5, (20, 2))
    beta, gamma = 4.0, 0.3
    got = cole_hopf(quadratic(2), beta, gamma, pts)
    want = (pts ** 2).sum(axis=1) / (2 * (1 + gamma)) \
        + 2 * np.log(1 + gamma) / (2 * beta)
    assert np.allclose(got, want, atol=1e-6)


def test_cole_hopf_literal_sign_flips():
    xs = np.array([[0.7]])
    a = cole_hopf(quadratic(1), 1.0, 0.5, xs)
    b = cole_hopf(quadratic(1), 1.0, 0.5, xs, literal_sign=True)
    assert np.array_equal(a, -b)
    with pytest.raises(ValueError):
        cole_hopf(quadratic(1), 1.0, 0.0, xs)


def test_cole_hopf_flattens_double_well():
    # large gamma/beta smoothing lowers the barrier relative to the wells
    obj = make_objective("doublewell1d")
    xs = np.array([[0.0], [1.0]])
    raw_gap = obj.value(xs[0]) - obj.value(xs[1])        # 0.25
    eff = cole_hopf(obj, 2.0, 2.0, xs)
    assert (eff[0] - eff[1]) < raw_gap


def test_free_energy_gaussian():
    xs = np.linspace(-10, 10, 8001)
    rho = GridDensity(xs, np.exp(-0.5 * xs**2))
    # entropy term -(ln(2 pi e))/2, potential var/2 = 1/2
    f = free_energy(rho, quadratic(1), beta=1.0, lam=0.0)
    want = -0.5 * np.log(2 * np.pi * np.e) + 0.5
    assert f == pytest.approx(want, abs=1e-9)
    # the quadratic interaction adds lam/2 * variance
    f2 = free_energy(rho, quadratic(1), beta=1.0, lam=3.0)
    assert f2 - f == pytest.approx(1.5, abs=1e-9)


def test_free_energy_minimized_by_stationary_density():
    obj = make_objective("doublewell1d")
    beta = 2.0
    xs = np.linspace(-4, 4, 4001)
    rho = stationary_density(obj, beta, xs)
    f0 = free_energy(rho, obj, beta, lam=0.0)
    for shift in (0.3, -0.5):
        pert = GridDensity(xs, np.exp(-beta * obj.value((xs - shift)[:, None])))
        assert free_energy(pert, obj, beta, lam=0.0) > f0


def test_smoothing_report_bundle():
    obj = make_objective("doublewell1d")
    rep = smoothing_report(obj, beta=2.0, lam=1.0, gamma=0.5, h=0.5,
                           grid=(-2.5, 2.5, 41), density_grid=(-6.0, 6.0, 2001))
    assert len(rep.grid) == len(rep.phi) == len(rep.phi_kernel_h) == \
        len(rep.phi_colehopf_gamma) == 41
    assert rep.critical_lam > 0
    assert len(rep.fixed_point_means) == 3
    d = rep.to_dict()
    assert d["objective"] == "doublewell1d"
    assert set(d) == {"objective", "beta", "lambda", "gamma", "h",
                      "critical_lambda", "fixed_point_means"}
    with pytest.raises(ValueError):
        smoothing_report(quadratic(2), 1.0, 1.0, 1.0, 1.0)
