import math
import re

import numpy as np
import pytest

from lienard.integrate import Trajectory
from lienard.svg import PlotSpec, plot_window, render_phase_svg


def circle(n=2001):
    t = np.linspace(0, 2 * math.pi, n)
    # states are (u', u)
    return Trajectory(t, np.column_stack((np.sin(t), -np.cos(t))))


def viewbox(svg):
    return [float(v) for v in re.search(r'viewBox="([^"]+)"', svg).group(1).split()]


def test_unit_circle_window():
    x, y, w, h = viewbox(render_phase_svg(circle()))
    assert x == pytest.approx(-1.2, abs=1e-6) and y == pytest.approx(-1.2, abs=1e-6)
    assert w == pytest.approx(2.4, abs=1e-6) and h == pytest.approx(2.4, abs=1e-6)


def test_zoom_shrinks_about_centre():
    traj = circle()
    full = plot_window(traj.states[:, 1], traj.states[:, 0], PlotSpec())
    zoom = plot_window(traj.states[:, 1], traj.states[:, 0], PlotSpec(zoom=20))
    assert (zoom[1] - zoom[0]) == pytest.approx((full[1] - full[0]) / 20)
    assert 0.5 * (zoom[0] + zoom[1]) == pytest.approx(0.0, abs=1e-3)
    anchored = plot_window(traj.states[:, 1], traj.states[:, 0],
                           PlotSpec(zoom=20, center=(-1.0, 0.0)))
    assert anchored[0] == pytest.approx(-1.0 - 0.06) and anchored[1] == pytest.approx(-1.0 + 0.06)


def test_zoomed_render_clips_to_window():
    svg = render_phase_svg(circle(), PlotSpec(zoom=20, center=(-1.0, 0.0)))
    pts = re.findall(r'points="([^"]+)"', svg)
    assert pts
    xs = [float(p.split(",")[0]) for seg in pts for p in seg.split()]
    assert min(xs) > -1.2 and max(xs) < -0.8


def test_explicit_ranges():
    x, y, w, h = viewbox(render_phase_svg(circle(), PlotSpec(x_range=(-2, 1), y_range=(-1, 3))))
    assert (x, y, w, h) == (-2.0, -3.0, 3.0, 4.0)


def test_two_points():
    traj = Trajectory(np.array([0.0, 1.0]), np.array([[0.0, 0.0], [1.0, 1.0]]))
    svg = render_phase_svg(traj)
    (pts,) = re.findall(r'points="([^"]+)"', svg)
    assert len(pts.split()) == 2


def test_degenerate_inputs():
    with pytest.raises(ValueError):
        render_phase_svg(Trajectory(np.array([0.0]), np.array([[0.0, 1.0]])))
    with pytest.raises(ValueError):
        render_phase_svg(Trajectory(np.array([0.0, 1.0]), np.array([[0.0, 1.0], [0.0, 1.0]])))


@pytest.mark.parametrize("kw", [dict(zoom=0.0), dict(zoom=-1.0), dict(x_range=(1.0, 1.0)),
                                dict(y_range=(0.0, math.nan))])
def test_plot_spec_validation(kw):
    with pytest.raises(ValueError):
        PlotSpec(**kw)


def test_deterministic_and_thinned():
    a = render_phase_svg(circle(50001), PlotSpec(max_points=500, title="a < b"))
    b = render_phase_svg(circle(50001), PlotSpec(max_points=500, title="a < b"))
    assert a == b
    assert "<title>a &lt; b</title>" in a
    (pts,) = re.findall(r'points="([^"]+)"', a)
    assert len(pts.split()) <= 502
