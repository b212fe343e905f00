"""Contour backgrounds for trace plots.

Local formulas only: plotviz talks to the optimizer package exclusively
through CSV files, so the 2D objectives it can draw are reimplemented here.
"""

import numpy as np

__all__ = ["contour_function", "known_minimizers"]


def _camel6(x1, x2):
    return ((4.0 - 2.1 * x1**2 + x1**4 / 3.0) * x1**2
            + x1 * x2 + (-4.0 + 4.0 * x2**2) * x2**2)


_CAMEL6_MINIMA = np.array([[0.0898, -0.7126], [-0.0898, 0.7126]])


def _oscillatory2(x1, x2, delta=0.01):
    def term(t):
        return (t * np.sin(t / delta) + 0.1 * t) ** 2
    return term(x1) + term(x2)


_REGISTRY = {
    "camel6": (_camel6, _CAMEL6_MINIMA),
    "oscillatory2": (_oscillatory2, np.zeros((1, 2))),
}


def contour_function(name):
    if name not in _REGISTRY:
        raise ValueError(f"no contour background for objective {name!r}; "
                         f"available: {sorted(_REGISTRY)}")
    return _REGISTRY[name][0]


def known_minimizers(name):
    if name not in _REGISTRY:
        raise ValueError(f"no contour background for objective {name!r}; "
                         f"available: {sorted(_REGISTRY)}")
    return _REGISTRY[name][1]
