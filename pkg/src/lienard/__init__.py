"""Periodic solutions of generalized Lienard equations and their forced variants."""

from .conditions import check_cls, check_de_castro, cls_example_bound
from .errors import (
    ConfigError,
    ConvergenceError,
    DivergenceError,
    EvaluationDomainError,
    LienardError,
    NoReturnError,
)
from .floquet import (
    criterion_example,
    criterion_generalized,
    criterion_polynomial,
    jacobian_J,
    monodromy,
    rho2_via_integral,
    rho2_via_liouville,
    stability_report,
)
from .integrate import StepperConfig, Trajectory, find_crossing, integrate
from .orbit import PeriodicOrbit, find_periodic_orbit, period, return_map
from .perturb import (
    detect_periodicity_loss,
    estimate_recurrence,
    forced_rhs,
    sin2t_perturbation,
    sweep_epsilon,
)
from .systems import (
    GeneralizedLienard,
    PolynomialLienard,
    eval_rhs,
    example_equation,
    harmonic,
    jacobian,
    poly_to_generalized,
    van_der_pol,
)

__version__ = "0.1.0"
