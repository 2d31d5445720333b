import math

import numpy as np
import pytest

from ptmdm.analysis import ANALYTIC_TOLERANCES, Tolerances, spectrum_report
from ptmdm.fd import GridSpec, OracleMatch, fd_levels, fd_matrix, oracle_compare
from ptmdm.potentials import AhmedCubicPT, CustomPT, ExpPT, Harmonic, ShiftedHO

FREE = CustomPT(lambda x: np.zeros_like(x), lambda x: np.zeros_like(x))
TABLE2_EVEN = [0.8818, 2.7360, 4.6094, 6.5142, 8.4815, 10.5107]


def stencil_shift(n, h, omega=1.0):
    """Leading 3-point-stencil error for oscillator level n of p^2 + omega^2 x^2."""
    return -(h**2) * omega**2 * (2 * n * n + 2 * n + 1) / 16


def test_grid_geometry():
    g = GridSpec(1.0, 199)
    assert g.spacing == pytest.approx(0.01)
    assert g.x[0] == pytest.approx(-0.99) and g.x[-1] == pytest.approx(0.99)
    assert np.allclose(g.x, -g.x[::-1], atol=1e-15)
    with pytest.raises(ValueError):
        GridSpec(12.0, 99)
    with pytest.raises(ValueError):
        GridSpec(0.0, 200)


def test_matrix_is_complex_symmetric_tridiagonal():
    g = GridSpec(5.0, 120)
    m = fd_matrix(AhmedCubicPT(2.0), g)
    assert m.shape == (120, 120)
    assert np.array_equal(m, m.T)
    assert not np.any(np.triu(m, 2))
    assert m[0, 1] == -1 / g.spacing**2


@pytest.fixture(scope="module")
def unit_oscillator_2000():
    return fd_levels(Harmonic(1.0), GridSpec(12.0, 2000))


def test_oscillator_ground_level(unit_oscillator_2000):
    assert abs(unit_oscillator_2000[0] - 1.0) <= 1e-5


def test_oscillator_levels_follow_stencil_error(unit_oscillator_2000):
    h = GridSpec(12.0, 2000).spacing
    for n in range(6):
        expected = 2 * n + 1 + stencil_shift(n, h)
        assert abs(unit_oscillator_2000[n] - expected) <= 1e-7


@pytest.mark.xfail(strict=True, reason="stencil error h^2 (2n^2+2n+1)/16 is 4.5e-5 and 1.2e-4 for n = 1, 2")
def test_oscillator_three_levels_within_1e5(unit_oscillator_2000):
    assert np.max(np.abs(unit_oscillator_2000[:3] - [1, 3, 5])) <= 1e-5


def test_particle_in_box():
    g = GridSpec(math.pi / 2, 400)
    lv = fd_levels(FREE, g)
    k = np.arange(1, 11)
    # exact eigenvalues of the discrete Laplacian
    discrete = 4 / g.spacing**2 * np.sin(k * math.pi / (2 * (g.points + 1))) ** 2
    assert np.allclose(lv[:10], discrete, rtol=1e-12)
    continuum = (k * math.pi / (2 * g.half_width)) ** 2
    assert np.all(np.abs(lv[:10] - continuum) <= continuum**2 * g.spacing**2 / 12 * 1.01)


def test_second_order_convergence():
    errors = [abs(fd_levels(Harmonic(1.0), GridSpec(12.0, p))[0] - 1.0) for p in (100, 200, 400, 800)]
    ratios = [a / b for a, b in zip(errors, errors[1:])]
    assert all(abs(r - 4.0) <= 0.3 for r in ratios), ratios


def test_ahmed_ground_level():
    lv = fd_levels(AhmedCubicPT(2.0), GridSpec(10.0, 3000))
    assert abs(lv[0] - 1.720857958) <= 1e-4


def test_oracle_quarter_oscillator_low_levels(harmonic_report, oracle_grid):
    fd = fd_levels(Harmonic(0.25), oracle_grid)
    matches = oracle_compare(Harmonic(0.25), harmonic_report, fd_real=fd)
    assert len(matches) == len(harmonic_report.real_levels)
    assert all(m.gap <= 1e-5 for m in matches[:2])
    for n, m in enumerate(matches[:20]):
        assert abs(m.gap - abs(stencil_shift(n, oracle_grid.spacing, 0.5))) <= 1e-7


def test_oracle_coarse_grid_gap_shrinks_fourfold(harmonic_report):
    coarse = oracle_compare(Harmonic(0.25), harmonic_report, GridSpec(12.0, 200))
    fine = oracle_compare(Harmonic(0.25), harmonic_report, GridSpec(12.0, 400))
    for n in range(4):
        assert coarse[n].gap == pytest.approx(4 * fine[n].gap, rel=0.05)


def test_oracle_shifted_oscillator():
    rep = spectrum_report(ShiftedHO(), 100, 150, Tolerances(delta=1e-6, max_energy=12.0))
    matches = oracle_compare(ShiftedHO(), rep, GridSpec(10.0, 2000))
    assert len(matches) == 6
    assert all(m.gap <= max(1e-3, 10 * rep.delta) for m in matches)


def test_method_agreement_ahmed(table1_report, fd_ahmed):
    matches = oracle_compare(AhmedCubicPT(2.0), table1_report, fd_real=fd_ahmed)
    limit = max(1e-3, 10 * max(lv.cross_size_delta for lv in table1_report.real_levels))
    assert all(m.gap <= limit and not m.flagged for m in matches)


def test_method_agreement_exp(table2_report, fd_exp):
    matches = oracle_compare(ExpPT(), table2_report, fd_real=fd_exp)
    assert all(m.gap <= 1e-3 and not m.flagged for m in matches)


def test_exp_even_levels_against_published_digits(table2_report, fd_exp):
    even = [lv.energy for lv in table2_report.even_levels()][:6]
    fd = [fd_exp[np.argmin(np.abs(fd_exp - e))] for e in even]
    gaps = np.abs(np.array(fd) - TABLE2_EVEN)
    assert np.all(gaps[:5] <= 1e-3)


@pytest.mark.xfail(strict=True, reason="FD and MDM both converge to 10.5142 for the sixth even level")
def test_exp_sixth_even_level_matches_published_digits(table2_report, fd_exp):
    e = table2_report.even_levels()[5].energy
    assert abs(fd_exp[np.argmin(np.abs(fd_exp - e))] - TABLE2_EVEN[5]) <= 1e-3


def test_flagging():
    rep = spectrum_report(Harmonic(1.0), 20, 30, ANALYTIC_TOLERANCES)
    fd = np.array([1.0, 3.0, 5.2])
    out = oracle_compare(Harmonic(1.0), rep, fd_real=fd)
    assert out[0] == OracleMatch(1.0, 1.0, pytest.approx(0.0, abs=1e-12), False)
    assert out[2].flagged and out[2].energy_fd == 5.2
    assert all(m.flagged for m in out[3:])


def test_empty_report_rejected():
    rep = spectrum_report(Harmonic(1.0), 20, 30, Tolerances(delta=1e-6, max_energy=0.5))
    with pytest.raises(ValueError):
        oracle_compare(Harmonic(1.0), rep, fd_real=[1.0])
