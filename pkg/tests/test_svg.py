import numpy as np
import pytest

from nexpansive.svg import Figure, family_figure, inversion_figure, render


def test_render_is_deterministic():
    a = render(inversion_figure())
    b = render(inversion_figure())
    assert a == b
    assert 'width="800" height="800"' in a
    assert "stroke-dasharray" in a      # dotted stable leaves
    assert "http://" in a.splitlines()[0] and "href" not in a


def test_family_figure_has_both_foliations():
    text = render(family_figure("cubic"))
    assert text.count("<polyline") > 20
    assert '<circle cx="400.00"' in text   # highlighted tangency at x = 0


def test_empty_figure_rejected():
    with pytest.raises(ValueError):
        render(Figure())


def test_clipping_drops_points_outside_bounds():
    fig = Figure(bounds=(0, 1, 0, 1), annulus=False)
    fig.unstable.append(np.array([[0.1, 0.1], [0.5, 0.5], [5.0, 5.0], [0.6, 0.6], [0.7, 0.7]]))
    text = render(fig)
    assert text.count("<polyline") == 2
