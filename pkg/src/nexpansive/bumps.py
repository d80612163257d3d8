"""Smooth plateau functions built from exp(-1/t).

All functions accept floats, numpy arrays or :class:`~nexpansive.jets.Jet`
objects.  Outside the open transition interval every derivative vanishes,
so the flat branches are returned as constants and only the transition
branch goes through the exponential formula.
"""
from __future__ import annotations

import numpy as np

from . import jets


def smooth_step(t):
    """C-infinity step: 0 for t <= 0, 1 for t >= 1."""
    tv = np.asarray(jets.value_of(t), dtype=float)
    inside = (tv > 0.0) & (tv < 1.0)
    ts = jets.substitute(t, ~inside, 0.5)
    a = jets.exp(-1.0 / ts)
    b = jets.exp(-1.0 / (1.0 - ts))
    mid = a / (a + b)
    out = jets.where(inside, mid, np.where(tv >= 1.0, 1.0, 0.0))
    if not jets.is_jet(out) and np.ndim(out) == 0:
        return float(out)
    return out


def plateau(r, inner: float, outer: float):
    """1 on (-inf, inner], 0 on [outer, inf), smooth and monotone between."""
    if not outer > inner:
        raise ValueError("plateau needs outer > inner")
    return 1.0 - smooth_step((r - inner) / (outer - inner))


def radial_plateau(x, y, inner: float, outer: float):
    """``plateau(sqrt(x^2 + y^2))`` with the square root kept off the flat
    core, where its jets would be singular at the origin."""
    r2 = x * x + y * y
    r2v = np.asarray(jets.value_of(r2), dtype=float)
    core = r2v <= inner * inner
    r = jets.sqrt(jets.substitute(r2, core, (inner + outer) ** 2 / 4.0))
    out = jets.where(core, 1.0, plateau(r, inner, outer))
    if not jets.is_jet(out) and np.ndim(out) == 0:
        return float(out)
    return out


def max_slope(inner: float, outer: float, samples: int = 20001) -> float:
    """Sup of |d plateau / dr|, estimated on a dense grid."""
    t = np.linspace(0.0, 1.0, samples)[1:-1]
    j = jets.Jet.variable(t, 0, 1)
    return float(np.max(np.abs(smooth_step(j).coeffs[1, 0]))) / (outer - inner)
