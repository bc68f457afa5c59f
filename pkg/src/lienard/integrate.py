"""Runge-Kutta time stepping with dense recording and section-crossing events."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import DivergenceError, EvaluationDomainError

__all__ = [
    "StepperConfig",
    "Trajectory",
    "Event",
    "integrate",
    "find_crossing",
    "rk4_step",
    "dopri_step",
    "BLOWUP_NORM",
]

BLOWUP_NORM = 1e8
METHODS = ("rk4-fixed", "rk45-adaptive")

Rhs = Callable[[float, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class StepperConfig:
    method: str = "rk4-fixed"
    step: float = 1e-4
    rtol: float = 1e-9
    atol: float = 1e-12
    t_max: float = 50.0

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}, got {self.method!r}")
        if not (self.step > 0 and math.isfinite(self.step)):
            raise ValueError("step must be positive and finite")
        for name in ("rtol", "atol"):
            val = getattr(self, name)
            if not 0 < val < 1:
                raise ValueError(f"{name} must lie in (0, 1)")
        if not (self.t_max > 0 and math.isfinite(self.t_max)):
            raise ValueError("t_max must be positive and finite")


@dataclass(frozen=True)
class Trajectory:
    """Sampled solution: ``times`` has shape (n,), ``states`` shape (n, d)."""

    times: np.ndarray
    states: np.ndarray
    method: str = "rk4-fixed"

    def __len__(self):
        return len(self.times)

    @property
    def t_final(self) -> float:
        return float(self.times[-1])

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]


@dataclass(frozen=True)
class Event:
    t: float
    state: np.ndarray
    direction: int  # +1 rising, -1 falling
    index: int  # left end of the bracketing step


def rk4_step(rhs: Rhs, t: float, x: np.ndarray, h: float) -> np.ndarray:
    hh = 0.5 * h
    k1 = rhs(t, x)
    k2 = rhs(t + hh, x + hh * k1)
    k3 = rhs(t + hh, x + hh * k2)
    k4 = rhs(t + h, x + h * k3)
    return x + (h / 6.0) * (k1 + k4 + 2.0 * (k2 + k3))


# Dormand-Prince 5(4) tableau
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B5 = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
_B4 = (5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40)
_E = tuple(b5 - b4 for b5, b4 in zip(_B5, _B4))


def dopri_step(rhs: Rhs, t: float, x: np.ndarray, h: float):
    """One Dormand-Prince step.  Returns the 5th-order update and the error vector."""
    ks = []
    for i in range(7):
        xi = x
        for a, k in zip(_A[i], ks):
            if a:
                xi = xi + (h * a) * k
        ks.append(rhs(t + _C[i] * h, xi))
    x5 = x
    err = 0.0
    for b, e, k in zip(_B5, _E, ks):
        if b:
            x5 = x5 + (h * b) * k
        err = err + (h * e) * k
    return x5, err


def _check(t, x, t_prev, x_prev):
    # the error carries the last state that passed the check
    n2 = float(x @ x)
    if n2 < BLOWUP_NORM * BLOWUP_NORM:
        return
    if not np.all(np.isfinite(x)):
        raise EvaluationDomainError(f"state became non-finite at t={t}", state=x_prev, t=t_prev)
    raise DivergenceError(f"state norm exceeded {BLOWUP_NORM:g} at t={t}", t_prev, x_prev)


def integrate(
    rhs: Rhs,
    x0,
    t0: float,
    t1: float,
    cfg: Optional[StepperConfig] = None,
    stop: Optional[Callable[[float, np.ndarray, float, np.ndarray], bool]] = None,
) -> Trajectory:
    """Integrate ``x' = rhs(t, x)`` from ``t0`` to ``t1`` and record every step.

    In ``rk4-fixed`` mode the interval is covered by ``ceil((t1-t0)/step)``
    uniform steps, the last one shortened to land on ``t1``.  In
    ``rk45-adaptive`` mode a Dormand-Prince pair controls the local error.

    ``stop(t_prev, x_prev, t, x)`` is called after each accepted step; a true
    return ends the integration early with that step included.

    Raises
    ------
    DivergenceError
        The state norm exceeded ``BLOWUP_NORM``; carries the last valid time.
    EvaluationDomainError
        The state or vector field became non-finite.
    """
    cfg = cfg or StepperConfig()
    if not t1 > t0:
        raise ValueError("t1 must exceed t0")
    x = np.array(x0, dtype=float).reshape(-1)
    if not np.all(np.isfinite(x)):
        raise EvaluationDomainError("initial state is not finite", state=x, t=t0)
    if cfg.method == "rk4-fixed":
        return _integrate_fixed(rhs, x, float(t0), float(t1), cfg.step, stop)
    return _integrate_adaptive(rhs, x, float(t0), float(t1), cfg, stop)


def _integrate_fixed(rhs, x, t0, t1, step, stop):
    span = t1 - t0
    n = max(1, math.ceil(span / step * (1 - 1e-12)))
    times = t0 + step * np.arange(n + 1, dtype=float)
    times[-1] = t1
    states = np.empty((n + 1, x.size))
    states[0] = x
    tl = times.tolist()
    t = t0
    last = n
    for i in range(n):
        tn = tl[i + 1]
        xn = rk4_step(rhs, t, x, tn - t)
        _check(tn, xn, t, x)
        states[i + 1] = xn
        if stop is not None and stop(t, x, tn, xn):
            last = i + 1
            break
        t, x = tn, xn
    return Trajectory(times[: last + 1], states[: last + 1], "rk4-fixed")


def _integrate_adaptive(rhs, x, t0, t1, cfg, stop):
    times = [t0]
    states = [x]
    t = t0
    h = min(cfg.step, t1 - t0)
    h_min = 1e-14 * max(1.0, abs(t1))
    while t < t1:
        h = min(h, t1 - t)
        xn, err = dopri_step(rhs, t, x, h)
        scale = cfg.atol + cfg.rtol * np.maximum(np.abs(x), np.abs(xn))
        enorm = float(np.sqrt(np.mean((err / scale) ** 2)))
        if not math.isfinite(enorm):
            _check(t + h, xn, t, x)
            enorm = 1e10
        if enorm <= 1.0:
            tn = t1 if t + h >= t1 else t + h
            _check(tn, xn, t, x)
            times.append(tn)
            states.append(xn)
            done = stop is not None and stop(t, x, tn, xn)
            t, x = tn, xn
            if done:
                break
        fac = 5.0 if enorm == 0 else min(5.0, max(0.2, 0.9 * enorm ** -0.2))
        h *= fac
        if h < h_min:
            raise DivergenceError(f"step size underflow at t={t}", t, x)
    return Trajectory(np.array(times), np.array(states), "rk45-adaptive")


def _single_step(method):
    if method == "rk45-adaptive":
        return lambda rhs, t, x, h: dopri_step(rhs, t, x, h)[0]
    return rk4_step


def _guard_values(guard, states):
    # try a vectorized call on the component rows first
    try:
        g = np.asarray(guard(states.T), dtype=float)
        if g.shape == (len(states),):
            return g
    except Exception:
        pass
    return np.array([guard(s) for s in states], dtype=float)


def find_crossing(
    rhs: Rhs,
    traj: Trajectory,
    guard: Callable[[np.ndarray], float],
    direction: str = "any",
    start_index: int = 0,
    tol: float = 1e-12,
    max_iter: int = 100,
) -> Optional[Event]:
    """First sign change of ``guard`` after ``start_index``, refined by bisection.

    A rising crossing is a step with ``g_k < 0 <= g_{k+1}``; falling is the
    mirror image.  The bracketing step is re-integrated from its left
    endpoint with a single step of the trajectory's own method, and the
    sub-step length is bisected until ``|guard| <= tol`` or the bracket
    collapses to floating-point resolution.  Returns ``None`` when there is
    no crossing before the end of the trajectory.
    """
    if direction not in ("rising", "falling", "any"):
        raise ValueError(f"bad direction {direction!r}")
    if len(traj) - start_index < 2:
        return None
    g = _guard_values(guard, traj.states[start_index:])
    g0, g1 = g[:-1], g[1:]
    rising = (g0 < 0) & (g1 >= 0)
    falling = (g0 > 0) & (g1 <= 0)
    mask = rising if direction == "rising" else falling if direction == "falling" else rising | falling
    hits = np.flatnonzero(mask)
    if hits.size == 0:
        return None
    j = int(hits[0])
    k = start_index + j
    sign = 1 if rising[j] else -1
    t_k = float(traj.times[k])
    x_k = traj.states[k]
    if g1[j] == 0.0:
        return Event(float(traj.times[k + 1]), traj.states[k + 1].copy(), sign, k)

    step = _single_step(traj.method)
    lo, hi = 0.0, float(traj.times[k + 1]) - t_k
    g_lo = g0[j]
    best_s, best_x, best_g = hi, traj.states[k + 1], g1[j]
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        xm = step(rhs, t_k, x_k, mid)
        gm = float(guard(xm))
        if abs(gm) < abs(best_g):
            best_s, best_x, best_g = mid, xm, gm
        if abs(gm) <= tol:
            break
        if (gm < 0) == (g_lo < 0):
            lo, g_lo = mid, gm
        else:
            hi = mid
    return Event(t_k + best_s, np.array(best_x, dtype=float), sign, k)
