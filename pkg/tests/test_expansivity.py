import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nexpansive import dynamics as D
from nexpansive.expansivity import (arc_diameter_trace, dynamic_ball, dynamic_ball_bruteforce,
                                    expansivity_degree, find_tangency_witness, grid_candidates,
                                    model_expansivity_degree, neighbour_clusters,
                                    nonwandering_classifier, separation_time)
from nexpansive.foliation import census, family
from nexpansive.manifolds import CurveGraph


def test_identical_points_never_separate(cat):
    assert separation_time(cat, [0.3, 0.4], [0.3, 0.4], 0.05, 10) is None


def test_unstable_offset_separates_forward(cat):
    info = D.multipliers(cat, [0, 0])
    v = info.direction("unstable")
    x = np.array([0.3, 0.4])
    n = separation_time(cat, x, x + 1e-4 * v, 0.05, 25)
    assert n is not None and n > 0


def test_stable_offset_separates_backward(cat):
    info = D.multipliers(cat, [0, 0])
    v = info.direction("stable")
    x = np.array([0.3, 0.4])
    n = separation_time(cat, x, x + 1e-4 * v, 0.05, 25)
    assert n is not None and n < 0


@settings(max_examples=15, deadline=None)
@given(st.floats(0, 1, exclude_max=True), st.floats(0, 1, exclude_max=True))
def test_prefiltered_ball_matches_bruteforce(x, y):
    f = D.linear_toral_map()
    cand = grid_candidates(30)
    a = dynamic_ball(f, [x, y], 0.05, 6, cand)
    b = dynamic_ball_bruteforce(f, [x, y], 0.05, 6, cand)
    assert np.array_equal(a.members, b.members)


def test_cat_map_is_one_expansive(cat):
    rep = expansivity_degree(cat, 0.05, 25, {"kind": "grid", "n": 100, "centers": 20, "seed": 1})
    assert rep.n_obs == 1
    assert "not a proof" in rep.verdict


def test_grid_sampler_with_explicit_centres(cat):
    centres = np.random.default_rng(0).random((5, 2))
    a = expansivity_degree(cat, 0.05, 10, {"kind": "grid", "n": 50, "center_points": centres})
    assert a.n_centers == 5 and "center_points" not in a.sampler


def test_dynamic_ball_validates():
    f = D.linear_toral_map()
    with pytest.raises(ValueError):
        dynamic_ball(f, [0.1, 0.1], -1.0, 5, grid_candidates(5))


def test_unknown_sampler(cat):
    with pytest.raises(ValueError):
        expansivity_degree(cat, 0.05, 5, {"kind": "mystery"})


def test_model_degree_from_census():
    rep = model_expansivity_degree(census(family("cubic")))
    assert rep.n_obs == 3 and rep.level == "model"


@pytest.fixture(scope="module")
def witness():
    f = D.genus2_map("quadratic")
    return f, find_tangency_witness(f, 0.05, 20)


def test_tangency_witness_pair_stays_close(witness):
    f, w = witness
    assert separation_time(f, w.states[0], w.states[1], 0.05, 20) is None
    assert abs(w.disk_points[1, 0] - w.disk_points[0, 0]) >= 0.05 / 100


def test_three_point_clusters_violate(witness):
    f, w = witness
    clusters = neighbour_clusters(f, w, 20, 0.05, seed=3)
    rep = expansivity_degree(f, 0.05, 20, {"kind": "clusters", "clusters": [w.states] + clusters})
    assert rep.n_obs == 2


def test_arc_trace_on_flattened_model():
    f = D.tangency_model_map(2)
    p = np.asarray(f.params["p"])
    g_s = CurveGraph.from_polynomial([0, 0, 0, 1.0], -0.5, 0.5, origin=p)
    g_u = CurveGraph.from_polynomial([0.0], -0.5, 0.5, origin=p)
    g = D.tangency_flattening_perturbation(f, p, g_s, g_u, 0.1, 2)
    half = 0.1 / np.sqrt(8) * (1 - 1e-9)
    tr = arc_diameter_trace(g, CurveGraph.from_polynomial([0.0], -half, half, origin=p), 8)
    assert tr.strictly_decreasing(8) == (True, True)
    assert tr.at(0) == pytest.approx(2 * half)


def test_nonwandering_classifier(cat):
    tags = nonwandering_classifier(cat, [[0.0, 0.0], [0.37, 0.81]], 0.05, 30)
    assert tags[0] == "recurrent-like"
    assert set(tags) <= {"recurrent-like", "wandering"}
