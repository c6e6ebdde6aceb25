import math

import pytest

from udb.certfile import bundled_certificate
from udb.geometry import spindle_graph
from udb.lp_search import fixed_point_delta

SPINDLE_PARAMS = ((0.4, 5.4), (0.6, 5.4), (0.8, 5.4))


@pytest.fixture(scope="session")
def bundled_cert():
    return bundled_certificate()


@pytest.fixture(scope="session")
def spindles():
    return [spindle_graph(t, th) for t, th in SPINDLE_PARAMS]


@pytest.fixture(scope="session")
def three_spindle(spindles):
    """(delta, solution) of the three-spindle LP at L=200, eps=0.01."""
    return fixed_point_delta(spindles, [])


@pytest.fixture(scope="session")
def bundled_verified(bundled_cert):
    from udb.certificate import verify
    return verify(bundled_cert, L=780.0, epsilon=1e-4)


def mp_series(order, x, dps=40):
    """Power series for J_order summed in high precision (independent oracle)."""
    import mpmath as mp
    with mp.workdps(dps):
        x = mp.mpf(x)
        total, k = mp.mpf(0), 0
        term = (x / 2) ** order / mp.factorial(order)
        while True:
            total += term
            k += 1
            term *= -(x / 2) ** 2 / (k * (k + order))
            if abs(term) < mp.mpf(10) ** (-dps + 5) and k > x:
                break
        return float(total)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
