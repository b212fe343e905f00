import pytest

from mflangevin.params import HyperParams


def test_defaults_and_derived_inner_dt():
    hp = HyperParams()
    assert hp.inner_dt == pytest.approx(hp.outer_dt / hp.M, rel=1e-15)


def test_explicit_inner_dt_must_match():
    hp = HyperParams(outer_dt=0.02, M=4, inner_dt=0.005)
    assert hp.inner_dt == 0.005
    with pytest.raises(ValueError):
        HyperParams(outer_dt=0.02, M=4, inner_dt=0.004)


@pytest.mark.parametrize("kw", [
    {"beta": 0.0},
    {"beta": -1.0},
    {"gamma": 0.0},
    {"epsilon": -0.1},
    {"outer_dt": 0.0},
    {"lam": -0.5},
    {"M": 0},
    {"m_prime": 0},
    {"N": 0},
    {"n_iter": 0},
    {"smooth_samples": 0},
    {"M": 2.5},
    {"smooth_h": -1.0},
])
def test_rejects_bad_values(kw):
    with pytest.raises(ValueError):
        HyperParams(**kw)


def test_window_must_be_nonempty():
    HyperParams(M=5, m_prime=5)
    with pytest.raises(ValueError):
        HyperParams(M=5, m_prime=6)


def test_frozen():
    hp = HyperParams()
    with pytest.raises(AttributeError):
        hp.beta = 2.0
