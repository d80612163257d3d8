#!/usr/bin/env python3
"""Distance along the orbits of the genus-two tangency witness pair."""
import numpy as np

from nexpansive.dynamics import genus2_map
from nexpansive.expansivity import find_tangency_witness, orbit_distances

DELTA, T = 0.05, 20

f = genus2_map("quadratic")
w = find_tangency_witness(f, DELTA, T)
print(f"circle c = {w.circle}, stable line y = {w.height:.10f}")
print(f"pair (disk units): {w.disk_points[0]}  {w.disk_points[1]}")
d = orbit_distances(f, w.states[0], w.states[1][None], T)[:, 0]
for n, v in zip(range(-T, T + 1), d):
    print(f"n = {n:+3d}  distance {v:.3e}")
print(f"max {np.max(d):.3e} (delta = {DELTA})")
