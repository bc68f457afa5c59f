"""Grid checks of the Levinson-Smith and De Castro hypotheses.

Nothing here proves anything: each hypothesis is sampled on a finite grid and
failures are reported with a witness point instead of raised.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .systems import GeneralizedLienard

__all__ = [
    "Grid",
    "CLSReport",
    "DeCastroReport",
    "check_cls",
    "check_de_castro",
    "cls_example_bound",
    "example_h_integral",
    "example_h_lower_bound",
    "decreasing_family",
]


@dataclass(frozen=True)
class Grid:
    x_range: tuple = (-6.0, 6.0)
    y_range: tuple = (-6.0, 6.0)
    resolution: float = 1e-2

    def __post_init__(self):
        vals = (*self.x_range, *self.y_range, self.resolution)
        if not all(math.isfinite(v) for v in vals):
            raise ValueError("grid bounds must be finite")
        if not (self.x_range[0] < self.x_range[1] and self.y_range[0] < self.y_range[1]):
            raise ValueError("grid ranges must be nondegenerate")
        if not self.resolution > 0:
            raise ValueError("resolution must be positive")

    def axis(self, lo, hi):
        # integer multiples of the resolution so that e.g. 1.0 lands exactly
        k0 = math.ceil(lo / self.resolution - 1e-9)
        k1 = math.floor(hi / self.resolution + 1e-9)
        return np.arange(k0, k1 + 1) * self.resolution

    @property
    def xs(self):
        return self.axis(*self.x_range)

    @property
    def ys(self):
        return self.axis(*self.y_range)

    def refined(self, factor=2):
        return Grid(self.x_range, self.y_range, self.resolution / factor)


def _eval2(f, u, v):
    return np.broadcast_to(np.asarray(f(u, v), dtype=float), np.broadcast(u, v).shape)


def _eval1(f, u):
    return np.broadcast_to(np.asarray(f(u), dtype=float), np.shape(u))


@dataclass
class CLSReport:
    psi_sign_ok: bool
    psi_primitive_divergence_ok: bool
    phi00: float
    x0: Optional[float]
    M: Optional[float]
    x1: Optional[float]
    integral_bound_ok: bool
    witnesses: list = field(default_factory=list)
    grid: Optional[Grid] = None

    @property
    def phi00_negative(self) -> bool:
        return self.phi00 < 0

    @property
    def all_ok(self) -> bool:
        return (
            self.psi_sign_ok
            and self.psi_primitive_divergence_ok
            and self.phi00_negative
            and self.x0 is not None
            and self.x0 > 0
            and self.integral_bound_ok
        )

    def to_text(self) -> str:
        def num(v):
            return "none" if v is None else f"{v:.7g}"

        lines = [
            f"psi_sign_ok: {self.psi_sign_ok}",
            f"psi_primitive_divergence_ok: {self.psi_primitive_divergence_ok}",
            f"phi00: {self.phi00:.7g}",
            f"phi00_negative: {self.phi00_negative}",
            f"x0: {num(self.x0)}",
            f"M: {num(self.M)}",
            f"x1: {num(self.x1)}",
            f"integral_bound_ok: {self.integral_bound_ok}",
            f"cls_ok: {self.all_ok}",
        ]
        lines += [f"witness[{name}]: {w}" for name, w in self.witnesses if w is not None]
        return "\n".join(lines) + "\n"


@dataclass
class DeCastroReport:
    psi_is_identity: bool
    phi_monotone_ok: bool
    violations: list = field(default_factory=list)
    # informational: pairs violating the coordinatewise reading
    coordinatewise_violations: list = field(default_factory=list)

    @property
    def all_ok(self) -> bool:
        return self.psi_is_identity and self.phi_monotone_ok

    def to_text(self) -> str:
        lines = [
            f"psi_is_identity: {self.psi_is_identity}",
            f"phi_monotone_ok: {self.phi_monotone_ok}",
            f"de_castro_ok: {self.all_ok}",
            f"coordinatewise_monotone: {not self.coordinatewise_violations}",
        ]
        lines += [f"violation: {v}" for v in self.violations[:5]]
        lines += [f"coordinatewise_violation: {v}" for v in self.coordinatewise_violations[:5]]
        return "\n".join(lines) + "\n"


def decreasing_family(x0: float, x_end: float, y_max: float, n_levels: int = 13):
    """Positive non-increasing test functions ``y(x)`` on ``[x0, x_end]``.

    Constants, linear decays that halve over the interval, and exponential
    decays with rates 0.5, 1 and 2, each started at levels spanning
    ``(0, y_max]``.  A stand-in for "every decreasing positive function".
    """
    levels = np.unique(np.concatenate(([1e-3, 1e-2, 0.1], np.linspace(0, y_max, n_levels)[1:])))
    span = max(x_end - x0, 1e-12)
    family = []
    for c in levels:
        family.append((f"const c={c:g}", lambda x, c=c: np.full_like(x, c)))
        family.append((f"linear c={c:g}", lambda x, c=c: c * (1 - 0.5 * (x - x0) / span)))
        for k in (0.5, 1.0, 2.0):
            family.append((f"exp c={c:g} k={k:g}", lambda x, c=c, k=k: c * np.exp(-k * (x - x0))))
    return family


def check_cls(
    sys: GeneralizedLienard,
    grid: Grid = Grid(),
    family: Optional[Sequence] = None,
    growth_ratio: float = 10.0,
) -> CLSReport:
    """Sample the Levinson-Smith conditions on ``grid``.

    ``x0`` is the smallest nonnegative grid value from which ``phi >= 0``
    holds for every sampled ``|x| >= x0``; ``M`` is the depth of ``phi``
    below zero on ``|x| <= x0``; ``x1`` is the first grid value beyond
    ``x0`` at which the integral of ``phi(x, y(x))`` from ``x0`` reaches
    ``10 M x0`` for every function of the test family.  Divergence of the
    primitive of ``psi`` is judged by ``Psi(edge) >= growth_ratio * Psi(edge/10)``
    together with monotone growth on ``[0, edge]``.
    """
    witnesses = []
    xs, ys = grid.xs, grid.ys

    # (i) x psi(x) > 0 away from the origin
    xnz = xs[xs != 0]
    prod = xnz * _eval1(sys.psi, xnz)
    bad = np.flatnonzero(~(prod > 0))
    psi_sign_ok = bad.size == 0
    witnesses.append(("psi_sign", None if psi_sign_ok else {"x": float(xnz[bad[0]])}))

    # (ii) Psi(x) -> +inf, by proxy
    edge = max(grid.x_range[1], 0.0)
    if edge > 0:
        fine = np.linspace(0.0, edge, 10001)
        Psi = cumulative_trapezoid(_eval1(sys.psi, fine), fine, initial=0.0)
        tenth = np.interp(edge / 10, fine, Psi)
        increasing = bool(np.all(np.diff(Psi[1:]) > 0))
        div_ok = increasing and Psi[-1] > 0 and Psi[-1] >= growth_ratio * tenth
        witnesses.append(
            ("psi_primitive", None if div_ok else {"Psi_edge": float(Psi[-1]), "Psi_tenth": float(tenth)})
        )
    else:
        div_ok = False
        witnesses.append(("psi_primitive", {"reason": "x_range has no positive part"}))

    # (iii)
    phi00 = float(_eval2(sys.phi, 0.0, 0.0))
    witnesses.append(("phi00", None if phi00 < 0 else {"phi00": phi00}))

    # (iv) x0 from the row minima of phi over y
    U, V = np.meshgrid(xs, ys, indexing="ij")
    rowmin = _eval2(sys.phi, U, V).min(axis=1)
    r_max = min(abs(xs[0]), abs(xs[-1]))
    radii = grid.axis(0.0, r_max)
    res = grid.resolution

    def idx(x):
        return int(round((x - xs[0]) / res))

    ok_at = np.array([rowmin[idx(r)] >= 0 and rowmin[idx(-r)] >= 0 for r in radii])
    # suffix-all: condition must hold for every radius >= x0
    suffix = np.logical_and.accumulate(ok_at[::-1])[::-1]
    valid = np.flatnonzero(suffix)
    x0 = float(radii[valid[0]]) if valid.size else None
    if x0 is None:
        witnesses.append(("x0", {"reason": "phi < 0 at the grid edge"}))
        return CLSReport(psi_sign_ok, div_ok, phi00, None, None, None, False, witnesses, grid)
    witnesses.append(("x0", None if x0 > 0 else {"reason": "phi >= 0 everywhere, x0 = 0"}))

    # (v)
    inner = np.abs(xs) <= x0 + 1e-12
    M = max(0.0, -float(rowmin[inner].min()))

    # (vi) scan x1
    x_end = grid.x_range[1]
    target = 10.0 * M * x0
    xg = grid.axis(x0, x_end)
    x1 = None
    worst_name = None
    if xg.size >= 2:
        y_max = max(grid.y_range[1], res)
        fam = family if family is not None else decreasing_family(x0, x_end, y_max)
        sub = 10
        xf = np.linspace(x0, xg[-1], (xg.size - 1) * sub + 1)
        worst = np.full(xg.size, np.inf)
        for name, yfun in fam:
            I = cumulative_trapezoid(_eval2(sys.phi, xf, yfun(xf)), xf, initial=0.0)[::sub]
            lower = I < worst
            worst = np.where(lower, I, worst)
            if lower[-1]:
                worst_name = name
        hit = np.flatnonzero((worst >= target) & (xg > x0))
        if hit.size:
            x1 = float(xg[hit[0]])
    bound_ok = x1 is not None
    witnesses.append(("integral_bound", None if bound_ok else {"worst_test_function": worst_name}))
    return CLSReport(psi_sign_ok, div_ok, phi00, x0, M, x1, bound_ok, witnesses, grid)


def check_de_castro(
    sys: GeneralizedLienard,
    grid: Grid = Grid(),
    atol: float = 1e-12,
    n_rays: int = 24,
) -> DeCastroReport:
    """Sample ``psi(x) = x`` and monotone growth of ``phi`` away from the origin.

    Monotonicity is tested along rays from the origin: on each of ``n_rays``
    directions per quadrant, ``phi(r cos a, r sin a)`` must be nondecreasing
    in ``r``.  Along these rays both ``|x|`` and ``|y|`` grow together.  The
    stronger coordinatewise reading (growth in ``|x|`` at fixed ``y`` and in
    ``|y|`` at fixed ``x``) is checked too and its violations are reported
    for information only.
    """
    xs = grid.xs
    psi_ok = bool(np.all(np.abs(_eval1(sys.psi, xs) - xs) <= atol))

    R = min(max(abs(v) for v in grid.x_range), max(abs(v) for v in grid.y_range))
    r = grid.axis(0.0, R)
    violations = []
    angles = np.linspace(0.0, 2 * np.pi, 4 * n_rays, endpoint=False)
    for ang in angles:
        cx, cy = math.cos(ang), math.sin(ang)
        f = _eval2(sys.phi, r * cx, r * cy)
        drop = np.diff(f) < -atol * np.maximum(1.0, np.abs(f[1:]))
        if drop.any():
            j = int(np.flatnonzero(drop)[0])
            violations.append(
                ((float(r[j] * cx), float(r[j] * cy)), (float(r[j + 1] * cx), float(r[j + 1] * cy)))
            )

    coordwise = []
    mags_x = grid.axis(0.0, max(abs(v) for v in grid.x_range))
    mags_y = grid.axis(0.0, max(abs(v) for v in grid.y_range))
    for sx in (1.0, -1.0):
        for sy in (1.0, -1.0):
            X, Y = np.meshgrid(sx * mags_x, sy * mags_y, indexing="ij")
            F = _eval2(sys.phi, X, Y)
            for axis in (0, 1):
                d = np.diff(F, axis=axis)
                bad = np.argwhere(d < -atol * np.maximum(1.0, np.abs(F).max()))
                if bad.size:
                    i, j = bad[0]
                    i2, j2 = (i + 1, j) if axis == 0 else (i, j + 1)
                    coordwise.append(
                        ((float(X[i, j]), float(Y[i, j])), (float(X[i2, j2]), float(Y[i2, j2])))
                    )
    return DeCastroReport(psi_ok, not violations, violations, coordwise)


def cls_example_bound() -> float:
    """``1 + 60**(1/3)``: where ``(x1 - 1)^3 / 6`` reaches ``10 M x0 = 10``."""
    return 1.0 + 60.0 ** (1.0 / 3.0)


def example_h_integral(x1: float, y: float) -> float:
    """Closed form of the integral of ``phi(x, y)`` over ``[1, x1]`` for the example equation."""

    def prim(x):
        return 2.0 * x**3 / 3.0 + x * x * y + x * (y * y - 1.0)

    return prim(x1) - prim(1.0)


def example_h_lower_bound(x1: float) -> float:
    return (x1 - 1.0) ** 3 / 6.0
