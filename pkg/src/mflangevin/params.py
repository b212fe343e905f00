"""Hyper-parameters shared by all optimizers."""

from dataclasses import dataclass, field

__all__ = ["HyperParams"]

_REL_TOL = 1e-12


@dataclass(frozen=True)
class HyperParams:
    """All scalar knobs of the dynamics module.

    ``inner_dt`` is derived as ``outer_dt / M`` when not given; an explicit
    value that violates ``inner_dt * M == outer_dt`` beyond 1e-12 relative is
    rejected, since the homogenized methods assume the two step sizes are
    locked together.
    """

    beta: float = 1.0            # inverse temperature
    lam: float = 0.0             # interaction strength (>= 0)
    gamma: float = 0.1           # homogenization regularizer
    epsilon: float = 1.0         # scale separation
    outer_dt: float = 0.01       # slow step
    M: int = 20                  # inner iterations per outer step
    m_prime: int = 1             # burn-in index of the averaging window
    N: int = 1                   # agent count
    n_iter: int = 100            # outer iterations
    inner_dt: float = None       # fast step, derived if None
    smooth_h: float = 1.0        # kernel variance for smoothed-gd
    smooth_samples: int = 10     # Monte-Carlo samples for smoothed-gd

    def __post_init__(self):
        for name in ("beta", "gamma", "epsilon", "outer_dt"):
            v = getattr(self, name)
            if not v > 0:
                raise ValueError(f"{name} must be positive, got {v}")
        if self.lam < 0:
            raise ValueError(f"lam must be non-negative, got {self.lam}")
        for name in ("M", "m_prime", "N", "n_iter", "smooth_samples"):
            v = getattr(self, name)
            if int(v) != v or v < 1:
                raise ValueError(f"{name} must be a positive integer, got {v}")
        if self.m_prime > self.M:
            raise ValueError(
                f"m_prime ({self.m_prime}) must not exceed M ({self.M}): "
                "the averaging window would be empty")
        if self.smooth_h < 0:
            raise ValueError(f"smooth_h must be non-negative, got {self.smooth_h}")
        derived = self.outer_dt / self.M
        if self.inner_dt is None:
            object.__setattr__(self, "inner_dt", derived)
        elif abs(self.inner_dt * self.M - self.outer_dt) > _REL_TOL * abs(self.outer_dt):
            raise ValueError(
                f"inner_dt * M = {self.inner_dt * self.M} must equal "
                f"outer_dt = {self.outer_dt} (relative tolerance {_REL_TOL})")
        elif not self.inner_dt > 0:
            raise ValueError(f"inner_dt must be positive, got {self.inner_dt}")
