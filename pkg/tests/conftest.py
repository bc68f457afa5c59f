import pytest

from lienard import StepperConfig, find_periodic_orbit, harmonic, van_der_pol
from lienard.systems import example_equation, poly_to_generalized

# independent oracle values (scipy DOP853, rtol = atol = 1e-13)
EXAMPLE_A = -0.7548829771455614
EXAMPLE_TAU0 = 5.429544952101712
EXAMPLE_RHO2 = 0.00931116337850
EXAMPLE_Q = 4.676541235402442
EXAMPLE_PHI12 = 0.164253702
VDP_TAU0 = 6.66328686
VDP_A = -2.00861986

_acceptance_lines = []


@pytest.fixture(scope="session")
def example_poly():
    return example_equation()


@pytest.fixture(scope="session")
def example_sys(example_poly):
    return poly_to_generalized(example_poly)


@pytest.fixture(scope="session")
def example_orbit(example_sys):
    return find_periodic_orbit(example_sys, -0.5, cfg=StepperConfig(step=1e-4))


@pytest.fixture(scope="session")
def harmonic_orbit():
    return find_periodic_orbit(harmonic(), -1.0, cfg=StepperConfig(step=1e-3))


@pytest.fixture(scope="session")
def vdp_orbit():
    return find_periodic_orbit(van_der_pol(1.0), -2.0, cfg=StepperConfig(step=1e-4))


@pytest.fixture
def criterion():
    """Record a PASS/FAIL line for an acceptance criterion.

    Usage: ``with criterion(3, "sweep table") as note: ...; note("detail")``.
    """
    import contextlib

    @contextlib.contextmanager
    def record(number, title):
        details = []
        try:
            yield details.append
        except BaseException:
            _acceptance_lines.append(f"FAIL criterion {number:2d}: {title} {'; '.join(details)}")
            raise
        _acceptance_lines.append(f"PASS criterion {number:2d}: {title} {'; '.join(details)}")

    return record


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_acceptance_lines, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
