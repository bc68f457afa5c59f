import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lienard.errors import DivergenceError, EvaluationDomainError
from lienard.integrate import (
    StepperConfig,
    dopri_step,
    find_crossing,
    integrate,
    rk4_step,
)
from lienard.systems import free_particle, harmonic, vector_field

OSC = vector_field(harmonic())


def test_harmonic_full_period():
    traj = integrate(OSC, (0.0, 1.0), 0.0, 2 * math.pi, StepperConfig(step=1e-3))
    assert np.max(np.abs(traj.final - [0.0, 1.0])) <= 1e-8
    assert traj.t_final == 2 * math.pi


def test_free_particle_is_exact():
    traj = integrate(vector_field(free_particle()), (1.0, 0.0), 0.0, 1.0, StepperConfig(step=0.1))
    assert np.allclose(traj.final, [1.0, 1.0], atol=1e-14)


def test_fixed_grid_shortens_last_step():
    traj = integrate(OSC, (0.0, 1.0), 0.0, 1.0, StepperConfig(step=0.3))
    assert len(traj) == 5
    assert np.allclose(np.diff(traj.times), [0.3, 0.3, 0.3, 0.1])
    exact = integrate(OSC, (0.0, 1.0), 0.0, 1.0, StepperConfig(step=0.25))
    assert len(exact) == 5


def rk4_error(n):
    T = 2 * math.pi
    traj = integrate(OSC, (0.0, 1.0), 0.0, T, StepperConfig(step=T / n))
    assert len(traj) == n + 1
    return np.linalg.norm(traj.final - [0.0, 1.0])


def test_rk4_fourth_order():
    ratio = rk4_error(50) / rk4_error(100)
    assert abs(ratio - 16) <= 1.6


def test_rk4_step_on_linear_field():
    # one RK4 step reproduces the 4th-order Taylor polynomial of exp(h)
    h = 0.1
    x = rk4_step(lambda t, x: x, 0.0, np.array([1.0]), h)
    assert x[0] == pytest.approx(1 + h + h**2 / 2 + h**3 / 6 + h**4 / 24, abs=1e-15)


def test_dopri_error_estimate_small_for_smooth_field():
    x5, err = dopri_step(OSC, 0.0, np.array([0.0, 1.0]), 0.1)
    assert np.allclose(x5, [-math.sin(0.1), math.cos(0.1)], atol=1e-8)
    assert np.max(np.abs(err)) < 1e-6


def test_deterministic():
    cfg = StepperConfig(step=1e-2)
    a = integrate(OSC, (0.3, -0.2), 0.0, 3.0, cfg)
    b = integrate(OSC, (0.3, -0.2), 0.0, 3.0, cfg)
    assert np.array_equal(a.states, b.states) and np.array_equal(a.times, b.times)


def test_time_reversal():
    cfg = StepperConfig(step=1e-3)
    fwd = integrate(OSC, (0.4, -0.9), 0.0, 5.0, cfg)
    back = integrate(lambda t, x: -OSC(-t, x), fwd.final, 0.0, 5.0, cfg)
    assert np.max(np.abs(back.final - [0.4, -0.9])) <= 1e-7


def test_adaptive_mode():
    cfg = StepperConfig(method="rk45-adaptive", step=0.1, rtol=1e-10, atol=1e-12)
    traj = integrate(OSC, (0.0, 1.0), 0.0, 2 * math.pi, cfg)
    assert traj.method == "rk45-adaptive"
    assert traj.t_final == 2 * math.pi
    assert np.max(np.abs(traj.final - [0.0, 1.0])) <= 1e-7
    assert len(traj) < 2000


def test_stop_callback_ends_early():
    traj = integrate(OSC, (0.0, 1.0), 0.0, 10.0, StepperConfig(step=1e-2),
                     stop=lambda tp, xp, t, x: t >= 1.0)
    assert 1.0 <= traj.t_final < 1.0 + 1e-2 + 1e-12


def test_blow_up_reports_last_time():
    with pytest.raises(DivergenceError) as info:
        integrate(lambda t, x: x * x, (1.0,), 0.0, 2.0, StepperConfig(step=1e-3))
    # exact blow-up at t = 1; the discrete solution overshoots slightly
    assert 0.99 < info.value.t_last < 1.01
    assert np.linalg.norm(info.value.state_last) < 1e8


def test_nan_field_raises():
    with pytest.raises(EvaluationDomainError):
        integrate(lambda t, x: x * math.nan, (1.0,), 0.0, 1.0, StepperConfig(step=0.1))
    with pytest.raises(EvaluationDomainError):
        integrate(OSC, (math.nan, 0.0), 0.0, 1.0)


@pytest.mark.parametrize(
    "kw",
    [dict(method="euler"), dict(step=0.0), dict(step=-1e-3), dict(rtol=0.0),
     dict(t_max=math.inf)],
)
def test_stepper_config_validation(kw):
    with pytest.raises(ValueError):
        StepperConfig(**kw)


def test_crossing_of_cosine():
    # x1 = cos t, x2 = sin t; guard x1 falls through zero at pi/2
    traj = integrate(OSC, (1.0, 0.0), 0.0, 3.0, StepperConfig(step=1e-3))
    ev = find_crossing(OSC, traj, lambda x: x[0], "falling")
    assert ev.t == pytest.approx(math.pi / 2, abs=1e-9)
    assert ev.direction == -1
    assert abs(ev.state[0]) <= 1e-12
    assert find_crossing(OSC, traj, lambda x: x[0], "rising") is None


def test_constant_guard_has_no_crossing():
    traj = integrate(OSC, (1.0, 0.0), 0.0, 3.0, StepperConfig(step=1e-2))
    assert find_crossing(OSC, traj, lambda x: 1.0, "any") is None


def test_scalar_only_guard():
    traj = integrate(OSC, (1.0, 0.0), 0.0, 3.0, StepperConfig(step=1e-3))

    def guard(x):
        return float(x[0])  # fails on the vectorized call

    ev = find_crossing(OSC, traj, guard, "falling")
    assert ev.t == pytest.approx(math.pi / 2, abs=1e-9)


def test_crossing_on_example_orbit(example_sys):
    rhs = vector_field(example_sys)
    traj = integrate(rhs, (0.0, -0.7548829), 0.0, 6.0, StepperConfig(step=1e-3))
    ev = find_crossing(rhs, traj, lambda x: x[0], "rising", start_index=1)
    assert ev.t == pytest.approx(5.4296, abs=1e-3)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.1, 3.0), st.floats(0.2, 2.0))
def test_event_lies_in_its_bracket(phase, amp):
    x0 = (amp * math.cos(phase), amp * math.sin(phase))
    traj = integrate(OSC, x0, 0.0, 8.0, StepperConfig(step=0.05))
    ev = find_crossing(OSC, traj, lambda x: x[1], "any")
    assert ev is not None
    assert traj.times[ev.index] <= ev.t <= traj.times[ev.index + 1]
    assert abs(ev.state[1]) <= 1e-12
