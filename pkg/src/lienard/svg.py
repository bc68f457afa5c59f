"""Deterministic SVG phase portraits (u horizontal, u' vertical)."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .integrate import Trajectory

__all__ = ["PlotSpec", "render_phase_svg", "plot_window"]


@dataclass(frozen=True)
class PlotSpec:
    x_range: Optional[Tuple[float, float]] = None
    y_range: Optional[Tuple[float, float]] = None
    zoom: float = 1.0
    center: Optional[Tuple[float, float]] = None  # (u, u'); centroid when None
    width_px: int = 600
    height_px: int = 600
    stroke: str = "#1f4e9c"
    stroke_width: float = 1.2
    max_points: int = 6000
    title: str = ""
    margin: float = 0.2

    def __post_init__(self):
        if not (self.zoom > 0 and math.isfinite(self.zoom)):
            raise ValueError("zoom must be positive and finite")
        for rng in (self.x_range, self.y_range):
            if rng is not None and not (
                all(math.isfinite(v) for v in rng) and rng[0] < rng[1]
            ):
                raise ValueError(f"bad plot range {rng}")


def plot_window(u: np.ndarray, v: np.ndarray, spec: PlotSpec):
    """``(xmin, xmax, ymin, ymax)`` in data coordinates.

    At zoom 1 the window is the explicit range or the bounding box padded by
    ``margin`` of its half-extent.  A zoom ``z`` shrinks both half-widths by
    ``z`` about ``spec.center`` (default: the point centroid).
    """
    def axis(vals, rng):
        if rng is not None:
            return 0.5 * (rng[0] + rng[1]), 0.5 * (rng[1] - rng[0])
        lo, hi = float(vals.min()), float(vals.max())
        half = 0.5 * (hi - lo) * (1 + spec.margin)
        if half == 0:
            half = 1.0
        return 0.5 * (lo + hi), half

    cx, hx = axis(u, spec.x_range)
    cy, hy = axis(v, spec.y_range)
    if spec.zoom != 1.0 or spec.center is not None:
        if spec.center is not None:
            cx, cy = spec.center
        elif spec.zoom != 1.0:
            cx, cy = float(u.mean()), float(v.mean())
        hx /= spec.zoom
        hy /= spec.zoom
    return cx - hx, cx + hx, cy - hy, cy + hy


def _segments(u, v, win):
    # runs of consecutive samples inside the window, padded by one neighbour
    xmin, xmax, ymin, ymax = win
    inside = (u >= xmin) & (u <= xmax) & (v >= ymin) & (v <= ymax)
    if inside.all():
        return [np.arange(u.size)]
    keep = inside.copy()
    keep[1:] |= inside[:-1]
    keep[:-1] |= inside[1:]
    idx = np.flatnonzero(keep)
    if idx.size == 0:
        return []
    breaks = np.flatnonzero(np.diff(idx) > 1) + 1
    return [s for s in np.split(idx, breaks) if s.size >= 2]


def _thin(seg, budget):
    if seg.size <= budget:
        return seg
    stride = math.ceil(seg.size / budget)
    out = seg[::stride]
    if out[-1] != seg[-1]:
        out = np.append(out, seg[-1])
    return out


def render_phase_svg(traj: Trajectory, spec: PlotSpec = PlotSpec()) -> str:
    """Phase portrait of ``traj`` as an SVG document string.

    The viewBox is in data units with ``u'`` negated so that up is positive.
    Coordinates are printed with 6 decimals; output depends only on the inputs.
    """
    if len(traj) < 2:
        raise ValueError("need at least two trajectory points to draw a phase portrait")
    v = np.asarray(traj.states[:, 0], dtype=float)
    u = np.asarray(traj.states[:, 1], dtype=float)
    if np.ptp(u) == 0 and np.ptp(v) == 0:
        raise ValueError("degenerate trajectory: all points coincide")
    xmin, xmax, ymin, ymax = win = plot_window(u, v, spec)
    w, h = xmax - xmin, ymax - ymin

    segs = _segments(u, v, win)
    total = sum(s.size for s in segs) or 1
    lines = []
    for s in segs:
        s = _thin(s, max(2, spec.max_points * s.size // total))
        pts = " ".join(f"{a:.6f},{-b:.6f}" for a, b in zip(u[s], v[s]))
        lines.append(
            f'  <polyline points="{pts}" fill="none" stroke="{spec.stroke}" '
            f'stroke-width="{spec.stroke_width:g}" vector-effect="non-scaling-stroke"/>'
        )

    axes = []
    if xmin < 0 < xmax:
        axes.append(f'  <line x1="0" y1="{-ymax:.6f}" x2="0" y2="{-ymin:.6f}"/>')
    if ymin < 0 < ymax:
        axes.append(f'  <line x1="{xmin:.6f}" y1="0" x2="{xmax:.6f}" y2="0"/>')

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{spec.width_px}" height="{spec.height_px}" '
        f'viewBox="{xmin:.6f} {-ymax:.6f} {w:.6f} {h:.6f}" preserveAspectRatio="none">',
    ]
    if spec.title:
        title = spec.title.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
        out.append(f"  <title>{title}</title>")
    out.append(f'  <rect x="{xmin:.6f}" y="{-ymax:.6f}" width="{w:.6f}" height="{h:.6f}" fill="white"/>')
    if axes:
        out.append('  <g stroke="#999999" stroke-width="0.5" vector-effect="non-scaling-stroke">')
        out += ["  " + a.replace("/>", ' vector-effect="non-scaling-stroke"/>') for a in axes]
        out.append("  </g>")
    out += lines
    out.append("</svg>")
    return "\n".join(out) + "\n"
