"""Numerical experiments on robustly N-expansive surface diffeomorphisms."""

__version__ = "0.1.0"

from .surface import GluedSurface, ChartPoint, canonical_rep, distance, inversion
from .dynamics import (SmoothMap, linear_toral_map, da_map, genus2_map, tangency_model_map,
                       local_scaling_perturbation, tangency_flattening_perturbation,
                       multipliers, cr_norm_distance)
from .manifolds import CurveGraph, local_stable_curve, local_unstable_curve, iterate_curve
from .tangency import taylor_at, tangency_order, count_roots, rolle_chain
from .foliation import family, census
from .expansivity import (dynamic_ball, expansivity_degree, separation_time,
                          arc_diameter_trace, nonwandering_classifier)

__all__ = [
    "GluedSurface", "ChartPoint", "canonical_rep", "distance", "inversion",
    "SmoothMap", "linear_toral_map", "da_map", "genus2_map", "tangency_model_map",
    "local_scaling_perturbation", "tangency_flattening_perturbation", "multipliers",
    "cr_norm_distance", "CurveGraph", "local_stable_curve", "local_unstable_curve",
    "iterate_curve", "taylor_at", "tangency_order", "count_roots", "rolle_chain",
    "family", "census", "dynamic_ball", "expansivity_degree", "separation_time",
    "arc_diameter_trace", "nonwandering_classifier",
]
