"""Generalized and polynomial Lienard systems in planar first-order form.

The state ordering is fixed throughout the package: ``x = (x1, x2) = (u', u)``.
Velocity comes first.  A state is a length-2 float array.

A generalized Lienard equation reads::

    u'' + phi(u, u') u' + psi(u) = 0

and its planar form is ``x1' = -phi(x2, x1) x1 - psi(x2)``, ``x2' = x1``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import EvaluationDomainError

__all__ = [
    "GeneralizedLienard",
    "PolynomialLienard",
    "EvenDegreeWarning",
    "as_state",
    "eval_rhs",
    "jacobian",
    "vector_field",
    "jacobian_field",
    "poly_to_generalized",
    "example_equation",
    "example_generalized",
    "harmonic",
    "van_der_pol",
    "free_particle",
    "check_derivatives",
]

Func2 = Callable[[float, float], float]
Func1 = Callable[[float], float]


def _fd_step(z):
    return max(1e-6, 1e-8 * abs(z))


def as_state(x) -> np.ndarray:
    """Coerce ``x`` into a finite ``(x1, x2)`` float array."""
    arr = np.asarray(x, dtype=float).reshape(-1)
    if arr.shape != (2,):
        raise ValueError(f"a state has exactly two components, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise EvaluationDomainError("non-finite state", state=arr)
    return arr


@dataclass(frozen=True)
class GeneralizedLienard:
    """Coefficient functions of ``u'' + phi(u,u')u' + psi(u) = 0``.

    ``phi(u, v)`` takes position first and velocity second.  Derivatives left
    as ``None`` are replaced by central finite differences with step
    ``max(1e-6, 1e-8*|arg|)``.  Callables should accept numpy arrays as well
    as floats; the condition checks evaluate them on whole grids.
    """

    phi: Func2
    psi: Func1
    dphi_dv: Optional[Func2] = None
    dphi_du: Optional[Func2] = None
    dpsi_du: Optional[Func1] = None
    name: str = "custom"

    @property
    def derivative_mode(self) -> str:
        if None in (self.dphi_dv, self.dphi_du, self.dpsi_du):
            return "finite-difference"
        return "analytic"

    def phi_v(self, u, v):
        """Partial derivative of phi with respect to the velocity ``u'``."""
        if self.dphi_dv is not None:
            return self.dphi_dv(u, v)
        h = _fd_step(v)
        return (self.phi(u, v + h) - self.phi(u, v - h)) / (2 * h)

    def phi_u(self, u, v):
        """Partial derivative of phi with respect to the position ``u``."""
        if self.dphi_du is not None:
            return self.dphi_du(u, v)
        h = _fd_step(u)
        return (self.phi(u + h, v) - self.phi(u - h, v)) / (2 * h)

    def psi_u(self, u):
        if self.dpsi_du is not None:
            return self.dpsi_du(u)
        h = _fd_step(u)
        return (self.psi(u + h) - self.psi(u - h)) / (2 * h)


def _horner(coeffs, x):
    # ascending coefficients; works for floats and arrays alike
    r = 0.0
    for c in reversed(coeffs):
        r = r * x + c
    return r


def _poly_derivative(coeffs):
    return tuple(k * c for k, c in enumerate(coeffs))[1:] or (0.0,)


class EvenDegreeWarning(UserWarning):
    """The last nonzero velocity term has an even index."""


@dataclass(frozen=True)
class PolynomialLienard:
    """``u'' + sum_k p_k(u) u'^k = 0`` with ``p_k`` given as ascending coefficients.

    ``coeffs[k]`` holds the coefficients of ``p_k`` in increasing powers of
    ``u``, so ``coeffs[0]`` is the restoring force ``psi``.
    """

    coeffs: tuple = field()
    name: str = "polynomial"

    def __post_init__(self):
        cs = tuple(tuple(float(c) for c in np.atleast_1d(p)) for p in self.coeffs)
        if len(cs) < 2:
            raise ValueError("need at least p_0 and p_1 (n >= 1)")
        for k, p in enumerate(cs):
            if not p or not all(math.isfinite(c) for c in p):
                raise ValueError(f"p_{k} must be a non-empty finite coefficient list")
        if not any(cs[-1]):
            raise ValueError("leading polynomial p_n is identically zero")
        object.__setattr__(self, "coeffs", cs)
        if self.n % 2 == 0:
            warnings.warn(
                f"highest velocity power n={self.n} is even; existence results "
                "assume the last nonzero term has an odd index",
                EvenDegreeWarning,
                stacklevel=3,
            )

    @property
    def n(self) -> int:
        return len(self.coeffs) - 1

    def p(self, k, u):
        """Evaluate ``p_k(u)``."""
        return _horner(self.coeffs[k], u)

    def rhs(self, x) -> np.ndarray:
        """Planar field evaluated straight from the polynomial form."""
        v, u = float(x[0]), float(x[1])
        total = 0.0
        for k in range(self.n + 1):
            total += self.p(k, u) * v**k
        return np.array((-total, v))


def poly_to_generalized(p: PolynomialLienard) -> GeneralizedLienard:
    """Rewrite ``sum p_k u'^k`` as ``phi(u,u')u' + psi(u)`` with exact derivatives.

    ``psi = p_0`` and ``phi(u, v) = sum_{k>=1} p_k(u) v^(k-1)``.
    """
    cs = p.coeffs
    upper = cs[1:]  # p_1 .. p_n
    dupper = tuple(_poly_derivative(c) for c in upper)
    p0, dp0 = cs[0], _poly_derivative(cs[0])

    def phi(u, v):
        r = 0.0
        for c in reversed(upper):
            r = r * v + _horner(c, u)
        return r

    def dphi_dv(u, v):
        r = 0.0
        for j in range(len(upper) - 1, 0, -1):
            r = r * v + j * _horner(upper[j], u)
        return r

    def dphi_du(u, v):
        r = 0.0
        for c in reversed(dupper):
            r = r * v + _horner(c, u)
        return r

    return GeneralizedLienard(
        phi=phi,
        psi=lambda u: _horner(p0, u),
        dphi_dv=dphi_dv,
        dphi_du=dphi_du,
        dpsi_du=lambda u: _horner(dp0, u) + 0.0 * u,
        name=p.name,
    )


def example_equation() -> PolynomialLienard:
    """``u'' + [u^2 + (u+u')^2 - 1]u' + u = 0`` in polynomial form."""
    return PolynomialLienard(
        coeffs=((0.0, 1.0), (-1.0, 0.0, 2.0), (0.0, 2.0), (1.0,)),
        name="example6",
    )


def example_generalized() -> GeneralizedLienard:
    """The same equation written directly with ``phi = u^2 + (u+v)^2 - 1``."""
    return GeneralizedLienard(
        phi=lambda u, v: u * u + (u + v) ** 2 - 1.0,
        psi=lambda u: u,
        dphi_dv=lambda u, v: 2.0 * (u + v),
        dphi_du=lambda u, v: 2.0 * u + 2.0 * (u + v),
        dpsi_du=lambda u: 1.0 + 0.0 * u,
        name="example6",
    )


def harmonic() -> GeneralizedLienard:
    return GeneralizedLienard(
        phi=lambda u, v: 0.0 * u,
        psi=lambda u: u,
        dphi_dv=lambda u, v: 0.0 * u,
        dphi_du=lambda u, v: 0.0 * u,
        dpsi_du=lambda u: 1.0 + 0.0 * u,
        name="harmonic",
    )


def van_der_pol(mu: float = 1.0) -> GeneralizedLienard:
    mu = float(mu)
    return GeneralizedLienard(
        phi=lambda u, v: mu * (u * u - 1.0),
        psi=lambda u: u,
        dphi_dv=lambda u, v: 0.0 * u,
        dphi_du=lambda u, v: 2.0 * mu * u,
        dpsi_du=lambda u: 1.0 + 0.0 * u,
        name=f"vanderpol mu={mu:g}",
    )


def free_particle() -> GeneralizedLienard:
    """``u'' = 0``."""
    zero2 = lambda u, v: 0.0 * u  # noqa: E731
    return GeneralizedLienard(
        phi=zero2, psi=lambda u: 0.0 * u, dphi_dv=zero2, dphi_du=zero2,
        dpsi_du=lambda u: 0.0 * u, name="free",
    )


def eval_rhs(sys: GeneralizedLienard, x) -> np.ndarray:
    """Planar vector field ``(-phi(x2,x1) x1 - psi(x2), x1)``."""
    x = as_state(x)
    v, u = x[0], x[1]
    dv = float(-sys.phi(u, v) * v - sys.psi(u))
    if not math.isfinite(dv):
        raise EvaluationDomainError(f"vector field is not finite at {x}", state=x)
    return np.array((dv, v))


def jacobian(sys: GeneralizedLienard, x) -> np.ndarray:
    """Jacobian of the planar field with respect to ``(x1, x2)``."""
    x = as_state(x)
    v, u = x[0], x[1]
    j11 = -sys.phi_v(u, v) * v - sys.phi(u, v)
    j12 = -sys.phi_u(u, v) * v - sys.psi_u(u)
    out = np.array(((j11, j12), (1.0, 0.0)), dtype=float)
    if not np.all(np.isfinite(out)):
        raise EvaluationDomainError(f"jacobian is not finite at {x}", state=x)
    return out


def vector_field(sys: GeneralizedLienard) -> Callable[[float, np.ndarray], np.ndarray]:
    """Return ``f(t, x)`` for the integrators.  Time is ignored."""
    phi, psi = sys.phi, sys.psi

    def f(t, x):
        v = float(x[0])
        u = float(x[1])
        dv = -phi(u, v) * v - psi(u)
        if not math.isfinite(dv):
            raise EvaluationDomainError(f"vector field is not finite at {x}", state=x, t=t)
        return np.array((dv, v))

    return f


def jacobian_field(sys: GeneralizedLienard) -> Callable[[float, np.ndarray], np.ndarray]:
    """Return ``J(t, x)``, the state Jacobian along a trajectory."""
    phi, phi_v, phi_u, psi_u = sys.phi, sys.phi_v, sys.phi_u, sys.psi_u

    def jac(t, x):
        v = float(x[0])
        u = float(x[1])
        return np.array(
            ((-phi_v(u, v) * v - phi(u, v), -phi_u(u, v) * v - psi_u(u)), (1.0, 0.0))
        )

    return jac


def check_derivatives(
    sys: GeneralizedLienard,
    n_points: int = 50,
    box: float = 3.0,
    rtol: float = 1e-4,
    seed: int = 0,
) -> list:
    """Compare analytic derivatives against central differences.

    Returns a list of ``(name, u, v, analytic, numeric)`` mismatches, empty
    when every supplied derivative agrees within ``rtol`` (relative to
    ``max(1, |numeric|)``).
    """
    rng = np.random.default_rng(seed)
    h = 1e-6
    bad = []
    for u, v in rng.uniform(-box, box, size=(n_points, 2)):
        checks = []
        if sys.dphi_dv is not None:
            num = (sys.phi(u, v + h) - sys.phi(u, v - h)) / (2 * h)
            checks.append(("dphi_dv", sys.dphi_dv(u, v), num))
        if sys.dphi_du is not None:
            num = (sys.phi(u + h, v) - sys.phi(u - h, v)) / (2 * h)
            checks.append(("dphi_du", sys.dphi_du(u, v), num))
        if sys.dpsi_du is not None:
            num = (sys.psi(u + h) - sys.psi(u - h)) / (2 * h)
            checks.append(("dpsi_du", sys.dpsi_du(u), num))
        for name, ana, num in checks:
            if abs(ana - num) > rtol * max(1.0, abs(num)):
                bad.append((name, u, v, float(ana), float(num)))
    return bad


def builtin_system(spec: str) -> GeneralizedLienard:
    """Look up a builtin by name: ``example6``, ``harmonic``, ``vanderpol mu=<v>``."""
    parts = spec.split()
    if not parts:
        raise ValueError("empty system name")
    name, opts = parts[0].lower(), parts[1:]
    kv = {}
    for o in opts:
        key, sep, val = o.partition("=")
        if not sep:
            raise ValueError(f"malformed system option {o!r}")
        kv[key] = val
    if name == "example6" and not kv:
        return poly_to_generalized(example_equation())
    if name == "harmonic" and not kv:
        return harmonic()
    if name == "vanderpol" and set(kv) <= {"mu"}:
        return van_der_pol(float(kv.get("mu", 1.0)))
    raise ValueError(f"unknown builtin system {spec!r}")


def polynomial_from_lists(coeffs: Sequence[Sequence[float]], name="polynomial"):
    return PolynomialLienard(coeffs=tuple(tuple(c) for c in coeffs), name=name)
