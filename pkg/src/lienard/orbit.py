"""Periodic orbits of the unperturbed system via a Poincare return map.

The section is ``{u' = 0, u < 0}`` crossed with ``u'`` increasing, so orbits
are anchored at ``(u', u) = (0, a)`` with ``a < 0``.
"""

from __future__ import annotations

import csv
import dataclasses
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ConvergenceError, NoReturnError
from .integrate import StepperConfig, Trajectory, find_crossing, integrate
from .systems import GeneralizedLienard, vector_field

__all__ = [
    "PoincareSection",
    "SECTION",
    "PeriodicOrbit",
    "return_map",
    "find_periodic_orbit",
    "period",
    "section_returns",
    "write_orbit_csv",
    "read_orbit_csv",
]


@dataclass(frozen=True)
class PoincareSection:
    """The half-line ``x1 = 0, x2 < 0`` crossed in the rising-``x1`` direction."""

    direction: str = "rising"

    @staticmethod
    def guard(x):
        return x[0]

    @staticmethod
    def contains(x) -> bool:
        return x[0] == 0.0 and x[1] < 0.0

    @staticmethod
    def anchor(a: float) -> np.ndarray:
        return np.array((0.0, float(a)))

    @staticmethod
    def crossed(x_prev, x) -> bool:
        return x_prev[0] < 0.0 <= x[0]


SECTION = PoincareSection()


@dataclass(frozen=True)
class PeriodicOrbit:
    a: float
    tau0: float
    trajectory: Trajectory
    residual: float = 0.0  # |return_map(a) - a| at the accepted anchor
    iterations: int = 0

    @property
    def closure_error(self) -> float:
        return float(np.linalg.norm(self.trajectory.final - self.trajectory.states[0]))


def section_returns(rhs, x0, t0, n_returns, cfg, horizon=None):
    """Integrate until ``n_returns`` same-direction section crossings occur.

    Returns ``(trajectory, events)``.  Raises :class:`NoReturnError` if the
    horizon (default ``n_returns * cfg.t_max``) passes first.
    """
    horizon = horizon if horizon is not None else n_returns * cfg.t_max
    count = 0

    def stop(tp, xp, t, x):
        nonlocal count
        if SECTION.crossed(xp, x):
            count += 1
        return count >= n_returns

    traj = integrate(rhs, x0, t0, t0 + horizon, cfg, stop=stop)
    events = []
    start = 0
    while len(events) < n_returns:
        ev = find_crossing(rhs, traj, SECTION.guard, "rising", start_index=start)
        if ev is None:
            break
        events.append(ev)
        start = ev.index + 1
    if len(events) < n_returns:
        raise NoReturnError(
            f"only {len(events)} of {n_returns} section returns before t={t0 + horizon:g}"
        )
    return traj, events


def _first_return(rhs, a, cfg):
    if not a < 0:
        raise ValueError(f"section anchor must be negative, got {a}")
    traj, (ev,) = section_returns(rhs, SECTION.anchor(a), 0.0, 1, cfg, horizon=cfg.t_max)
    return traj, ev


def return_map(sys: GeneralizedLienard, a: float, cfg: Optional[StepperConfig] = None):
    """First return of ``(0, a)`` to the section: ``(a_next, t_return)``."""
    _, ev = _first_return(vector_field(sys), a, cfg or StepperConfig())
    return float(ev.state[1]), float(ev.t)


def find_periodic_orbit(
    sys: GeneralizedLienard,
    a_guess: float,
    tol: float = 1e-10,
    max_iter: int = 50,
    cfg: Optional[StepperConfig] = None,
    orbit_tol: float = 1e-8,
) -> PeriodicOrbit:
    """Secant iteration on ``g(a) = return_map(a) - a``.

    The second secant point is one plain return-map iterate, which already
    lands close to an attracting cycle.  Iterates that leave ``a < 0`` fall
    back to the plain iterate.  After each return the horizon is reset to
    ten times the latest return time.
    """
    cfg = cfg or StepperConfig()
    if not a_guess < 0:
        raise ValueError(f"a_guess must be negative, got {a_guess}")

    rhs = vector_field(sys)
    best = None

    def g(a):
        nonlocal cfg, best
        traj, ev = _first_return(rhs, a, cfg)
        cfg = dataclasses.replace(cfg, t_max=10.0 * ev.t)
        resid = float(ev.state[1]) - a
        if best is None or abs(resid) < abs(best[0]):
            best = (resid, a, traj, ev)
        return resid, float(ev.state[1])

    a0 = float(a_guess)
    g0, a1 = g(a0)
    it = 1
    while abs(best[0]) > tol:
        if it >= max_iter:
            raise ConvergenceError(
                f"return map did not converge in {max_iter} iterations (|g|={abs(best[0]):.3e})"
            )
        g1, nxt1 = g(a1)
        it += 1
        if abs(g1) <= tol:
            break
        denom = g1 - g0
        a2 = a1 - g1 * (a1 - a0) / denom if denom != 0 else nxt1
        if not (math.isfinite(a2) and a2 < 0):
            a2 = nxt1
        a0, g0, a1 = a1, g1, a2

    resid, a_star, traj, ev = best
    if abs(a_star) < 1e-6 * (1.0 + abs(a_guess)):
        raise ConvergenceError(f"iteration collapsed onto the equilibrium (a = {a_star:.3e})")
    # the return integration already covers one period; cut it at the event
    k = ev.index
    times = np.append(traj.times[: k + 1], ev.t)
    states = np.vstack((traj.states[: k + 1], ev.state))
    orbit = PeriodicOrbit(
        a_star, float(ev.t), Trajectory(times, states, traj.method), abs(resid), it
    )
    if orbit.closure_error > orbit_tol:
        raise ConvergenceError(
            f"orbit does not close: |x(tau0) - x(0)| = {orbit.closure_error:.3e} > {orbit_tol:g}"
        )
    return orbit


def period(orbit: PeriodicOrbit) -> float:
    return orbit.tau0


def write_orbit_csv(traj: Trajectory, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "u", "u_prime"])
        for t, (v, u) in zip(traj.times, traj.states[:, :2]):
            w.writerow([f"{t:.12g}", f"{u:.12g}", f"{v:.12g}"])


def read_orbit_csv(path) -> Trajectory:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return Trajectory(data[:, 0].copy(), np.column_stack((data[:, 2], data[:, 1])))
