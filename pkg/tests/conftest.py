import time

import pytest

from ptmdm.analysis import ANALYTIC_TOLERANCES, TABLE_TOLERANCES, Tolerances, spectrum_report
from ptmdm.fd import GridSpec, fd_levels
from ptmdm.potentials import AhmedCubicPT, ExpPT, Harmonic, ShiftedHO

# Expensive runs at the published basis sizes are shared across modules.


@pytest.fixture(scope="session")
def timed_table1():
    t0 = time.perf_counter()
    report = spectrum_report(AhmedCubicPT(2.0), 700, 900, TABLE_TOLERANCES)
    return report, time.perf_counter() - t0


@pytest.fixture(scope="session")
def table1_report(timed_table1):
    return timed_table1[0]


@pytest.fixture(scope="session")
def table2_report():
    return spectrum_report(ExpPT(), 700, 900, Tolerances(max_energy=12.0), parity=True)


@pytest.fixture(scope="session")
def harmonic_report():
    return spectrum_report(Harmonic(0.25), 150, 200, ANALYTIC_TOLERANCES)


@pytest.fixture(scope="session")
def shifted_report():
    return spectrum_report(ShiftedHO(), 100, 150, ANALYTIC_TOLERANCES)


@pytest.fixture(scope="session")
def oracle_grid():
    return GridSpec(12.0, 3000)


@pytest.fixture(scope="session")
def fd_ahmed(oracle_grid):
    return fd_levels(AhmedCubicPT(2.0), oracle_grid)


@pytest.fixture(scope="session")
def fd_exp(oracle_grid):
    return fd_levels(ExpPT(), oracle_grid)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(RESULTS):
        terminalreporter.write_line(RESULTS[key])
