"""Langevin-dynamics optimizers with mean-field interaction and
two-timescale homogenization, loss-smoothing diagnostics and a benchmark
harness."""

from .objectives import Objective, make_objective
from .params import HyperParams
from .dynamics import (METHOD_IDS, NumericalAbort, ParticleSystem,
                       run_method)
from .noise import NoiseStream
from .estimators import LangevinOptimizer, VerletNetClassifier

__all__ = [
    "Objective",
    "make_objective",
    "HyperParams",
    "METHOD_IDS",
    "NumericalAbort",
    "ParticleSystem",
    "run_method",
    "NoiseStream",
    "LangevinOptimizer",
    "VerletNetClassifier",
]

__version__ = "0.1.0"
