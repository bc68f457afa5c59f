"""Acceptance criteria, each at its stated tolerance.

One PASS/FAIL line per criterion is printed in the terminal summary under
"acceptance criteria".
"""

import math
import time

import numpy as np
import pytest

from lienard import (
    StepperConfig,
    check_cls,
    check_de_castro,
    cls_example_bound,
    criterion_example,
    criterion_generalized,
    criterion_polynomial,
    find_periodic_orbit,
    harmonic,
    jacobian_J,
    monodromy,
    rho2_via_integral,
    rho2_via_liouville,
    sin2t_perturbation,
    sweep_epsilon,
)
from lienard.floquet import variational_flow
from lienard.integrate import integrate
from lienard.systems import eval_rhs, example_equation, poly_to_generalized, vector_field

CFG = StepperConfig(method="rk4-fixed", step=1e-4)
TABLE = {
    1 / 1000: 5.4287, 1 / 900: 5.4286, 1 / 800: 5.4285, 1 / 700: 5.4283, 1 / 600: 5.4281,
    1 / 500: 5.4278, 1 / 400: 5.4274, 1 / 300: 5.4267, 1 / 200: 5.4252,
}
PERIODICITY_TOL = 1e-3


@pytest.fixture(scope="module")
def timed_orbit(example_sys):
    start = time.perf_counter()
    orbit = find_periodic_orbit(example_sys, -0.5, cfg=CFG)
    return orbit, time.perf_counter() - start


@pytest.fixture(scope="module")
def sweep(example_sys, timed_orbit):
    orbit, _ = timed_orbit
    start = time.perf_counter()
    rows = sweep_epsilon(example_sys, sin2t_perturbation, list(TABLE) + [0.01], CFG,
                         orbit=orbit, periodicity_tol=PERIODICITY_TOL, n_returns=10)
    return {r.epsilon: r for r in rows}, time.perf_counter() - start


@pytest.fixture(scope="module")
def mono(example_sys, timed_orbit):
    return monodromy(example_sys, timed_orbit[0], CFG)


def test_criterion_01_unperturbed_period(criterion, timed_orbit):
    with criterion(1, "unperturbed period") as note:
        orbit, elapsed = timed_orbit
        note(f"tau0={orbit.tau0:.7f} (target 5.4296 +- 1e-3), {elapsed:.1f} s")
        assert abs(orbit.tau0 - 5.4296) <= 1e-3
        assert elapsed < 10.0


def test_criterion_02_anchor(criterion, timed_orbit):
    with criterion(2, "section anchor") as note:
        orbit, _ = timed_orbit
        note(f"a*={orbit.a:.7f} (target -0.7548829 +- 1e-3)")
        assert abs(orbit.a + 0.7548829) <= 1e-3


def test_criterion_03_sweep_table(criterion, sweep):
    with criterion(3, "forced-period table") as note:
        rows, elapsed = sweep
        worst = max(abs(rows[e].tau - tau) for e, tau in TABLE.items())
        note(f"max |tau - table|={worst:.2e}, all periodic="
             f"{all(rows[e].periodic for e in TABLE)}, sweep {elapsed:.0f} s")
        for eps, tau in TABLE.items():
            assert rows[eps].error is None
            assert abs(rows[eps].tau - tau) <= 1e-3, eps
            assert rows[eps].periodic, eps
        assert elapsed < 300.0


def test_criterion_04_periodicity_loss(criterion, sweep):
    with criterion(4, "periodicity loss at eps=0.01") as note:
        rows, _ = sweep
        table_max = max(rows[e].drift for e in TABLE)
        note(f"drift(0.01)={rows[0.01].drift:.3e}, max table drift={table_max:.3e}, "
             f"tol={PERIODICITY_TOL:g}")
        assert rows[0.01].drift > PERIODICITY_TOL and not rows[0.01].periodic
        assert all(rows[e].periodic for e in TABLE)


def test_criterion_05_multiplier_consistency(criterion, example_sys, timed_orbit, mono):
    with criterion(5, "three routes to rho2") as note:
        orbit, _ = timed_orbit
        routes = (mono.det, rho2_via_liouville(example_sys, orbit),
                  rho2_via_integral(example_sys, orbit))
        worst = max(abs(a - b) / max(abs(a), abs(b)) for a in routes for b in routes)
        note(f"rho2={routes[0]:.10g}, max rel diff={worst:.1e}, |rho1-1|={abs(mono.rho1 - 1):.1e}")
        assert worst <= 1e-5
        assert routes[0] < 1
        assert abs(mono.rho1 - 1) <= 1e-4


def test_criterion_06_criterion_equivalence(criterion, example_sys, example_poly, timed_orbit, mono):
    with criterion(6, "criterion integrals agree") as note:
        orbit, _ = timed_orbit
        q_gen = criterion_generalized(example_sys, orbit)
        q_poly = criterion_polynomial(example_poly, orbit)
        q_ex = criterion_example(orbit)
        spread = max(q_gen, q_poly, q_ex) - min(q_gen, q_poly, q_ex)
        note(f"Q={q_gen:.12g}, spread={spread:.1e}, 1-rho2={1 - mono.rho2:.6f}")
        assert spread <= 1e-10
        assert q_gen > 0 and q_poly > 0 and q_ex > 0
        assert (1 - mono.det) > 0


def test_criterion_07_monodromy_structure(criterion, example_sys, timed_orbit, mono):
    with criterion(7, "monodromy fixes the flow direction") as note:
        orbit, _ = timed_orbit
        col = mono.phi_tau0[:, 0]
        jj = jacobian_J(mono, float(example_sys.psi(orbit.a)))
        note(f"Phi e1=({col[0]:.6f}, {col[1]:.1e}), det J={jj.det:.6f}")
        assert abs(col[0] - 1) <= 1e-4 and abs(col[1]) <= 1e-4
        assert abs(jj.det) > 1e-8


def test_criterion_08_cls(criterion, example_sys):
    with criterion(8, "Levinson-Smith conditions") as note:
        rep = check_cls(example_sys)
        bound = cls_example_bound()
        note(f"x0={rep.x0:g}, M={rep.M:g}, x1={rep.x1:g} <= {bound:.5f}")
        assert rep.psi_sign_ok and rep.psi_primitive_divergence_ok and rep.phi00_negative
        assert rep.integral_bound_ok and rep.all_ok
        assert rep.x0 == 1.0 and rep.M == 1.0
        assert rep.x1 <= bound
        assert abs(bound - (1 + 60 ** (1 / 3))) <= 4 * np.finfo(float).eps * bound


def test_criterion_09_uniqueness(criterion, example_sys):
    with criterion(9, "De Castro conditions and seed uniqueness") as note:
        rep = check_de_castro(example_sys)
        anchors = [find_periodic_orbit(example_sys, s, cfg=CFG).a for s in (-0.3, -0.5, -1.0, -2.0)]
        spread = max(anchors) - min(anchors)
        note(f"de_castro_ok={rep.all_ok}, anchor spread={spread:.1e}")
        assert rep.psi_is_identity and rep.phi_monotone_ok
        assert spread <= 1e-5


def _rk4_ratio():
    f = vector_field(harmonic())
    T = 2 * math.pi

    def err(n):
        traj = integrate(f, (0.0, 1.0), 0.0, T, StepperConfig(step=T / n))
        return np.linalg.norm(traj.final - [0.0, 1.0])

    return err(50) / err(100)


def test_criterion_10_property_suite(criterion, example_sys, example_poly, timed_orbit):
    with criterion(10, "property suite") as note:
        rng = np.random.default_rng(2024)
        liouville = 0.0
        for _ in range(20):
            A = rng.uniform(-1, 1, size=(2, 2))
            T = rng.uniform(0.5, 3.0)
            _, Phi = variational_flow(lambda t, x: A @ x, lambda t, x: A, rng.normal(size=2),
                                      0.0, T, StepperConfig(step=1e-3))
            exact = math.exp(np.trace(A) * T)
            liouville = max(liouville, abs(np.linalg.det(Phi) - exact) / exact)

        h_orbit = find_periodic_orbit(harmonic(), -1.0, cfg=StepperConfig(step=1e-3))
        h_mono = monodromy(harmonic(), h_orbit, StepperConfig(step=1e-3))
        identity = float(np.max(np.abs(h_mono.phi_tau0 - np.eye(2))))

        ratio = _rk4_ratio()

        pts = rng.uniform(-3, 3, size=(500, 2))
        poly_gap = max(float(np.max(np.abs(example_poly.rhs(x) - eval_rhs(example_sys, x))))
                       for x in pts)

        orbit, _ = timed_orbit
        u = orbit.trajectory.states[:, 1]
        v = orbit.trajectory.states[:, 0]
        gen = example_sys.phi_v(u, v) * v + example_sys.phi(u, v)
        poly = sum(k * example_poly.p(k, u) * v ** (k - 1) for k in range(1, example_poly.n + 1))
        integrand_gap = float(np.max(np.abs(gen - poly)))

        note(f"liouville={liouville:.1e}, harmonic Phi-I={identity:.1e}, rk4 ratio={ratio:.2f}, "
             f"poly gap={poly_gap:.1e}, integrand gap={integrand_gap:.1e}")
        assert liouville <= 1e-8
        assert identity <= 1e-8
        assert abs(ratio - 16) <= 1.6
        assert poly_gap <= 1e-12
        assert integrand_gap <= 1e-12
