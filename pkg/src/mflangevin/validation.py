"""Small input-validation helpers shared by the estimator layer."""

import numpy as np

__all__ = ["check_array_2d", "check_finite", "check_positive"]


def check_array_2d(X, name="X"):
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ValueError(f"{name} must be 2-dimensional, got shape {X.shape}")
    return check_finite(X, name)


def check_finite(X, name="X"):
    X = np.asarray(X, dtype=float)
    if not np.isfinite(X).all():
        raise ValueError(f"{name} contains non-finite values")
    return X


def check_positive(value, name):
    if not value > 0:
        raise ValueError(f"{name} must be positive, got {value}")
    return value
