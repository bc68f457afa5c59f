"""Variational equations, monodromy matrix and characteristic multipliers.

Along a periodic orbit ``q(t)`` the fundamental matrix ``Phi(t)`` of
``y' = f_x(q(t)) y`` is obtained by integrating the state together with the
2x2 matrix.  ``Phi(tau0)`` always carries the trivial multiplier 1 (the
direction ``q'(0)``); the other multiplier decides orbital stability and
equals ``exp`` of the integrated trace.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.integrate import simpson

from .errors import EvaluationDomainError
from .integrate import StepperConfig, Trajectory, integrate
from .orbit import PeriodicOrbit
from .systems import GeneralizedLienard, PolynomialLienard, jacobian_field, vector_field

__all__ = [
    "Monodromy",
    "StabilityReport",
    "JacobianJ",
    "variational_flow",
    "multipliers",
    "monodromy",
    "orbit_integral",
    "rho2_via_liouville",
    "rho2_via_integral",
    "criterion_generalized",
    "criterion_polynomial",
    "criterion_example",
    "jacobian_J",
    "stability_report",
]


@dataclass(frozen=True)
class Monodromy:
    phi_tau0: np.ndarray
    rho1: float
    rho2: float
    complex_pair: bool = False

    @property
    def unit_residual(self) -> float:
        return abs(self.rho1 - 1.0)

    @property
    def det(self) -> float:
        return float(np.linalg.det(self.phi_tau0))


@dataclass(frozen=True)
class JacobianJ:
    matrix: np.ndarray
    det: float
    nondegenerate: bool
    pi_tau0: Optional[float] = None


@dataclass(frozen=True)
class StabilityReport:
    rho1: float
    rho2_det: float
    rho2_liouville: float
    rho2_integral: float
    criterion_value: float
    criterion_polynomial: Optional[float] = None
    criterion_example: Optional[float] = None
    det_J: Optional[float] = None
    degenerate: bool = False
    a: float = math.nan
    tau0: float = math.nan
    extra: dict = field(default_factory=dict)

    @property
    def stable(self) -> bool:
        return self.criterion_value > 0

    def max_route_discrepancy(self) -> float:
        """Largest pairwise relative disagreement between the three rho2 routes."""
        vals = (self.rho2_det, self.rho2_liouville, self.rho2_integral)
        worst = 0.0
        for i in range(3):
            for j in range(i + 1, 3):
                scale = max(abs(vals[i]), abs(vals[j]))
                if scale:
                    worst = max(worst, abs(vals[i] - vals[j]) / scale)
        return worst

    CSV_FIELDS = (
        "a", "tau0", "rho1", "rho2_det", "rho2_liouville", "rho2_integral",
        "criterion_generalized", "criterion_polynomial", "criterion_example",
        "det_J", "stable", "degenerate",
    )

    def as_row(self) -> dict:
        def fmt(v):
            if v is None:
                return ""
            if isinstance(v, bool):
                return "true" if v else "false"
            return f"{v:.10g}"

        vals = {
            "a": self.a, "tau0": self.tau0, "rho1": self.rho1,
            "rho2_det": self.rho2_det, "rho2_liouville": self.rho2_liouville,
            "rho2_integral": self.rho2_integral,
            "criterion_generalized": self.criterion_value,
            "criterion_polynomial": self.criterion_polynomial,
            "criterion_example": self.criterion_example,
            "det_J": self.det_J, "stable": self.stable, "degenerate": self.degenerate,
        }
        return {k: fmt(vals[k]) for k in self.CSV_FIELDS}

    def to_text(self) -> str:
        row = self.as_row()
        lines = [f"{k}: {row[k]}" for k in self.CSV_FIELDS if row[k] != ""]
        lines.append(f"route_discrepancy: {self.max_route_discrepancy():.3e}")
        return "\n".join(lines) + "\n"


def variational_flow(
    rhs: Callable,
    jac: Callable,
    x0,
    t0: float,
    t1: float,
    cfg: Optional[StepperConfig] = None,
):
    """Integrate ``x' = rhs(t,x)`` jointly with ``Y' = jac(t,x) Y``, ``Y(t0) = I``.

    Returns ``(trajectory, Phi)`` where the trajectory holds the augmented
    ``2 + 4`` component states and ``Phi = Y(t1)``.
    """
    x0 = np.asarray(x0, dtype=float)
    d = x0.size

    def aug(t, z):
        x = z[:d]
        Y = z[d:].reshape(d, d)
        return np.concatenate((rhs(t, x), (jac(t, x) @ Y).ravel()))

    z0 = np.concatenate((x0, np.eye(d).ravel()))
    traj = integrate(aug, z0, t0, t1, cfg)
    return traj, traj.final[d:].reshape(d, d).copy()


def multipliers(Phi: np.ndarray):
    """Eigenvalues of a 2x2 matrix as ``(rho1, rho2, complex_pair)``.

    ``rho1`` is the eigenvalue nearest 1.  The smaller root is taken from
    ``det / larger`` to avoid cancellation.  A complex pair is reported by its
    common modulus.
    """
    tr = float(Phi[0, 0] + Phi[1, 1])
    det = float(Phi[0, 0] * Phi[1, 1] - Phi[0, 1] * Phi[1, 0])
    disc = tr * tr - 4.0 * det
    if disc < 0:
        mod = math.sqrt(det)
        return mod, mod, True
    big = 0.5 * (tr + math.copysign(math.sqrt(disc), tr))
    small = det / big if big != 0 else 0.0
    if abs(big - 1.0) <= abs(small - 1.0):
        return big, small, False
    return small, big, False


def monodromy(
    sys: GeneralizedLienard, orbit: PeriodicOrbit, cfg: Optional[StepperConfig] = None
) -> Monodromy:
    """Monodromy matrix ``Phi(tau0)`` by direct variational integration."""
    x0 = orbit.trajectory.states[0, :2]
    _, Phi = variational_flow(
        vector_field(sys), jacobian_field(sys), x0, 0.0, orbit.tau0, cfg
    )
    if not np.all(np.isfinite(Phi)):
        raise EvaluationDomainError("monodromy matrix is not finite", state=x0)
    rho1, rho2, cplx = multipliers(Phi)
    return Monodromy(Phi, rho1, rho2, cplx)


def orbit_integral(orbit_or_traj, integrand: Callable) -> float:
    """Quadrature of ``integrand(u, v)`` over the stored samples.

    ``integrand`` receives position and velocity arrays.  Composite Simpson
    (scipy) on the sample times, which copes with the shortened last step.
    """
    traj = getattr(orbit_or_traj, "trajectory", orbit_or_traj)
    v = traj.states[:, 0]
    u = traj.states[:, 1]
    vals = np.broadcast_to(np.asarray(integrand(u, v), dtype=float), u.shape)
    return float(simpson(vals, x=traj.times))


def criterion_generalized(sys: GeneralizedLienard, orbit) -> float:
    """Integral of ``phi_v(u0,u0') u0' + phi(u0,u0')`` over one period.

    Positive means the nontrivial multiplier is below 1.
    """
    return orbit_integral(orbit, lambda u, v: sys.phi_v(u, v) * v + sys.phi(u, v))


def criterion_polynomial(p: PolynomialLienard, orbit) -> float:
    """Integral of ``sum_{k>=1} k p_k(u0) u0'^(k-1)`` over one period."""

    def integrand(u, v):
        total = 0.0
        for k in range(p.n, 0, -1):  # Horner in v
            total = total * v + k * p.p(k, u)
        return total

    return orbit_integral(orbit, integrand)


def criterion_example(orbit) -> float:
    """Integral of ``2u^2 + 4uu' + 3u'^2 - 1`` (example equation only)."""
    return orbit_integral(orbit, lambda u, v: 2 * u * u + 4 * u * v + 3 * v * v - 1)


def rho2_via_liouville(sys: GeneralizedLienard, orbit) -> float:
    """``exp`` of the integrated trace of the Jacobian along the orbit."""
    jac = jacobian_field(sys)
    traj = getattr(orbit, "trajectory", orbit)
    trace = np.array([jac(0.0, x).trace() for x in traj.states[:, :2]])
    return math.exp(float(simpson(trace, x=traj.times)))


def rho2_via_integral(sys: GeneralizedLienard, orbit) -> float:
    return math.exp(-criterion_generalized(sys, orbit))


def jacobian_J(mono: Monodromy, psi_a: float, threshold: float = 1e-8) -> JacobianJ:
    """``J = -I + diag(-psi(a), 0) + Phi(tau0)`` and its nondegeneracy."""
    J = -np.eye(2) + np.array(((-psi_a, 0.0), (0.0, 0.0))) + mono.phi_tau0
    det = float(J[0, 0] * J[1, 1] - J[0, 1] * J[1, 0])
    pi_tau0 = float(mono.phi_tau0[0, 1] / psi_a**2) if psi_a else None
    return JacobianJ(J, det, abs(det) > threshold, pi_tau0)


def stability_report(
    sys: GeneralizedLienard,
    orbit: PeriodicOrbit,
    cfg: Optional[StepperConfig] = None,
    poly: Optional[PolynomialLienard] = None,
    example: bool = False,
) -> StabilityReport:
    mono = monodromy(sys, orbit, cfg)
    jj = jacobian_J(mono, float(sys.psi(orbit.a)))
    q = criterion_generalized(sys, orbit)
    return StabilityReport(
        rho1=mono.rho1,
        rho2_det=mono.det,
        rho2_liouville=rho2_via_liouville(sys, orbit),
        rho2_integral=math.exp(-q),
        criterion_value=q,
        criterion_polynomial=criterion_polynomial(poly, orbit) if poly is not None else None,
        criterion_example=criterion_example(orbit) if example else None,
        det_J=jj.det,
        degenerate=not jj.nondegenerate,
        a=orbit.a,
        tau0=orbit.tau0,
        extra={"phi_tau0": mono.phi_tau0, "J": jj.matrix, "pi_tau0": jj.pi_tau0,
               "complex_pair": mono.complex_pair},
    )
