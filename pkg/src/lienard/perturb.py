"""Periodically forced equations, period estimates and epsilon sweeps.

The forced equation is ``u'' + phi(u,u')u' + psi(u) = eps * omega(t, u, u')``.
A trajectory is started on the unperturbed anchor ``(0, a*)`` at ``t = 0``
and followed through successive rising crossings of ``u' = 0``.  The first
return time is the period estimate; the worst distance of the returns from the
starting state is the drift used to decide periodicity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .errors import EvaluationDomainError, LienardError
from .integrate import StepperConfig, Trajectory
from .orbit import SECTION, PeriodicOrbit, find_periodic_orbit, section_returns
from .systems import GeneralizedLienard, as_state

__all__ = [
    "Perturbation",
    "RecurrenceResult",
    "SweepRow",
    "LossThreshold",
    "forced_rhs",
    "sin2t_perturbation",
    "estimate_recurrence",
    "sweep_epsilon",
    "detect_periodicity_loss",
    "TABLE_EPSILONS",
    "write_sweep_csv",
]

# default forcing amplitudes for the period sweep
TABLE_EPSILONS = (0.0, 1 / 1000, 1 / 900, 1 / 800, 1 / 700, 1 / 600, 1 / 500, 1 / 400, 1 / 300, 1 / 200)


@dataclass(frozen=True)
class Perturbation:
    omega: Callable[[float, float, float], float]
    epsilon: float
    label: str = "custom"
    forcing_period: Optional[float] = None
    time_scale: Optional[float] = None  # omega sees t / time_scale when set

    def __post_init__(self):
        if not (math.isfinite(self.epsilon) and abs(self.epsilon) < 1):
            raise ValueError(f"|epsilon| must be < 1, got {self.epsilon}")
        if self.time_scale is not None and not self.time_scale > 0:
            raise ValueError("time_scale must be positive")

    def forcing(self, t, u, v):
        s = t / self.time_scale if self.time_scale else t
        return self.epsilon * self.omega(s, u, v)

    def rescaled(self, tau: float) -> "Perturbation":
        """Variant whose omega receives ``t / tau`` instead of absolute time."""
        return Perturbation(self.omega, self.epsilon, self.label, self.forcing_period, tau)


def forced_rhs(sys: GeneralizedLienard, pert: Perturbation):
    """``rhs(t, x) = (-phi(x2,x1) x1 - psi(x2) + eps*omega(t, x2, x1), x1)``."""
    phi, psi = sys.phi, sys.psi
    eps, omega = pert.epsilon, pert.omega
    scale = pert.time_scale

    def rhs(t, x):
        v = float(x[0])
        u = float(x[1])
        dv = -phi(u, v) * v - psi(u)
        # eps == 0 keeps the autonomous arithmetic, so the paths agree exactly
        if eps:
            dv += eps * omega(t / scale if scale else t, u, v)
        if not math.isfinite(dv):
            raise EvaluationDomainError(f"forced field is not finite at t={t}", state=x, t=t)
        return np.array((dv, v))

    return rhs


def _sin2t(t, u, v):
    return math.sin(2.0 * t) * v


def sin2t_perturbation(epsilon: float) -> Perturbation:
    """``eps * sin(2t) * u'``; forcing period pi."""
    return Perturbation(_sin2t, float(epsilon), "sin2t", forcing_period=math.pi)


@dataclass(frozen=True)
class RecurrenceResult:
    tau_estimate: float
    drift: float
    periodic: bool
    n_returns: int
    mean_interval: float = math.nan
    return_times: tuple = ()
    distances: tuple = ()
    trajectory: Optional[Trajectory] = field(default=None, repr=False, compare=False)


def estimate_recurrence(
    rhs,
    x0,
    t0: float = 0.0,
    cfg: Optional[StepperConfig] = None,
    periodicity_tol: float = 1e-3,
    n_returns: int = 10,
    keep_trajectory: bool = False,
) -> RecurrenceResult:
    """Follow ``x0`` through ``n_returns`` same-direction section crossings.

    ``tau_estimate`` is the time to the first return.  ``drift`` is the
    largest full-state distance between a return and ``x0``; the response
    counts as periodic when ``drift <= periodicity_tol``.  The mean
    crossing interval is kept as ``mean_interval`` for comparison.
    """
    cfg = cfg or StepperConfig()
    x0 = as_state(x0)
    if not (x0[0] == 0.0 and x0[1] < 0.0):
        raise ValueError(f"x0 must lie on the section u'=0, u<0; got {x0}")
    if n_returns < 1:
        raise ValueError("n_returns must be at least 1")
    traj, events = section_returns(rhs, x0, t0, n_returns, cfg)
    times = np.array([t0] + [e.t for e in events])
    dists = np.array([np.linalg.norm(e.state - x0) for e in events])
    drift = float(dists.max())
    return RecurrenceResult(
        tau_estimate=float(times[1] - times[0]),
        drift=drift,
        periodic=drift <= periodicity_tol,
        n_returns=n_returns,
        mean_interval=float(np.mean(np.diff(times))),
        return_times=tuple(float(t) for t in times[1:]),
        distances=tuple(float(d) for d in dists),
        trajectory=traj if keep_trajectory else None,
    )


@dataclass(frozen=True)
class SweepRow:
    epsilon: float
    tau: Optional[float]
    drift: float
    periodic: bool
    error: Optional[str] = None
    result: Optional[RecurrenceResult] = field(default=None, repr=False, compare=False)


def sweep_epsilon(
    sys: GeneralizedLienard,
    omega_family: Callable[[float], Perturbation],
    eps_list: Iterable[float],
    cfg: Optional[StepperConfig] = None,
    orbit: Optional[PeriodicOrbit] = None,
    a_guess: float = -0.5,
    periodicity_tol: float = 1e-3,
    n_returns: int = 10,
    settle: int = 0,
    keep_trajectories: bool = False,
) -> list:
    """Estimate the forced response for each epsilon, sorted by epsilon.

    Every row starts from the unperturbed anchor ``(0, a*)`` at ``t = 0``.
    With ``settle > 0`` that many returns are discarded first and the next
    row starts from the last discarded return instead.  A failing row records
    its error message and the sweep carries on.
    """
    cfg = cfg or StepperConfig()
    eps_sorted = sorted(float(e) for e in eps_list)
    if orbit is None:
        orbit = find_periodic_orbit(sys, a_guess, cfg=cfg)
    anchor = SECTION.anchor(orbit.a)
    rows = []
    for eps in eps_sorted:
        try:
            pert = omega_family(eps)
            rhs = forced_rhs(sys, pert)
            x0, t0 = anchor, 0.0
            if settle:
                _, evs = section_returns(rhs, anchor, 0.0, settle, cfg)
                t0 = evs[-1].t
                x0 = np.array((0.0, evs[-1].state[1]))
            res = estimate_recurrence(
                rhs, x0, t0, cfg, periodicity_tol, n_returns, keep_trajectories
            )
            rows.append(SweepRow(eps, res.tau_estimate, res.drift, res.periodic, None, res))
        except (LienardError, ValueError) as exc:
            rows.append(SweepRow(eps, None, math.inf, False, f"{type(exc).__name__}: {exc}"))
    return rows


@dataclass(frozen=True)
class LossThreshold:
    epsilon: float
    note: str = ""


def detect_periodicity_loss(rows: Sequence[SweepRow]) -> Optional[LossThreshold]:
    """Smallest epsilon whose row is non-periodic, or ``None``.

    If a periodic row follows the first loss the note says so.
    """
    rows = sorted(rows, key=lambda r: r.epsilon)
    for i, row in enumerate(rows):
        if not row.periodic:
            later = [r.epsilon for r in rows[i + 1:] if r.periodic]
            note = ""
            if later:
                note = "non-monotone: periodic again at eps=" + ", ".join(f"{e:g}" for e in later)
            return LossThreshold(row.epsilon, note)
    return None


def write_sweep_csv(rows: Sequence[SweepRow], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("epsilon,tau,drift,periodic\n")
        for r in rows:
            tau = "" if r.tau is None else f"{r.tau:.4f}"
            drift = "inf" if math.isinf(r.drift) else f"{r.drift:.3e}"
            fh.write(f"{r.epsilon:.10g},{tau},{drift},{'true' if r.periodic else 'false'}\n")
