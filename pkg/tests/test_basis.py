import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ptmdm.basis import (
    BasisSpec,
    default_support,
    eval_phi,
    phi_table,
    x2_element,
    x2_matrix,
    x_element,
    x_matrix,
)
from ptmdm.quadrature import QuadratureSpec, nodes_weights

# mpmath at 40 digits: H_m(x) exp(-x^2/2) / sqrt(2^m m! sqrt(pi))
PHI_7_AT_1_3 = 0.40609866425190537779
PHI_30_AT_2_5 = -0.27662955450847443396


def test_ground_state_at_origin():
    assert eval_phi(0, 0.0) == pytest.approx(math.pi ** -0.25, abs=1e-15)
    assert eval_phi(0, 0.0) == pytest.approx(0.75112554, abs=1e-8)


def test_odd_function_vanishes_at_origin():
    assert eval_phi(1, 0.0) == 0.0


@pytest.mark.parametrize("m, x, expected", [(7, 1.3, PHI_7_AT_1_3), (30, 2.5, PHI_30_AT_2_5)])
def test_against_extended_precision(m, x, expected):
    assert eval_phi(m, x) == pytest.approx(expected, abs=1e-12)


def test_extended_precision_oracle_live():
    mp = pytest.importorskip("mpmath")
    mp.mp.dps = 30
    for m, x in [(3, 0.7), (7, 1.3), (12, -2.2)]:
        ref = mp.hermite(m, x) * mp.e ** (-mp.mpf(x) ** 2 / 2) / mp.sqrt(
            2**m * mp.factorial(m) * mp.sqrt(mp.pi)
        )
        assert eval_phi(m, x) == pytest.approx(float(ref), abs=1e-12)


def test_high_index_no_overflow():
    x = np.linspace(-50, 50, 2001)
    vals = phi_table(900, x)
    assert np.all(np.isfinite(vals))
    # sizeable deep inside the classically allowed region, where a plain
    # exp(-x^2/2) seed would have underflowed
    assert np.max(np.abs(vals[899][np.abs(x - 40) < 0.5])) > 1e-3
    assert eval_phi(9999, 3.0) == pytest.approx(phi_table(10_000, [3.0])[9999, 0])


def test_index_out_of_range():
    with pytest.raises(ValueError):
        eval_phi(10_000, 0.0)
    with pytest.raises(ValueError):
        eval_phi(-1, 0.0)


def test_recurrence_consistency():
    spec = BasisSpec(202)
    x = np.linspace(-spec.x_support, spec.x_support, 801)
    t = phi_table(202, x)
    for m in range(1, 201):
        lhs = t[m + 1] * math.sqrt((m + 1) / 2)
        rhs = x * t[m] - math.sqrt(m / 2) * t[m - 1]
        scale = np.abs(x * t[m]) + math.sqrt(m / 2) * np.abs(t[m - 1])
        assert np.all(np.abs(lhs - rhs) <= 1e-12 * scale + 1e-300)


def test_orthonormality_by_quadrature():
    spec = BasisSpec(51)
    quad = QuadratureSpec(64, 32, spec.x_support)
    x, w = nodes_weights(quad)
    t = phi_table(51, x)
    half = (t * w) @ t.T
    idx = np.arange(51)
    even = (idx[:, None] + idx[None, :]) % 2 == 0
    gram = np.where(even, 2 * half, 0.0)
    assert np.max(np.abs(gram - np.eye(51))) < 1e-10


def test_eigenfunction_property():
    # <phi_m| -d^2/dx^2 + x^2 |phi_m> with a Richardson-extrapolated second difference
    quad = QuadratureSpec(64, 32, default_support(21))
    x, w = nodes_weights(quad)
    h = 1e-3
    for m in range(21):
        f = lambda s: eval_phi(m, s)
        d2 = lambda hh: (f(x + hh) - 2 * f(x) + f(x - hh)) / hh**2
        second = (4 * d2(h / 2) - d2(h)) / 3
        phi = f(x)
        energy = 2 * np.sum(w * phi * (-second + x * x * phi))
        assert energy == pytest.approx(2 * m + 1, abs=1e-6)


def test_decay_at_support():
    for n in (10, 100, 900):
        spec = BasisSpec(n)
        vals = phi_table(n, [spec.x_support, -spec.x_support])
        assert np.max(np.abs(vals)) < 1e-14


def test_basis_spec_validation():
    with pytest.raises(ValueError):
        BasisSpec(0)
    with pytest.raises(ValueError):
        BasisSpec(100, x_support=10.0)
    assert BasisSpec(100).x_support == pytest.approx(math.sqrt(201) + 6)


@pytest.mark.parametrize("m, n, expected", [
    (0, 1, math.sqrt(0.5)), (3, 3, 0.0), (5, 4, math.sqrt(2.5)), (1, 0, math.sqrt(0.5)), (2, 5, 0.0),
])
def test_x_element(m, n, expected):
    assert x_element(m, n) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("m, n, expected", [
    (0, 0, 0.5), (0, 2, math.sqrt(2) / 2), (4, 1, 0.0), (5, 3, math.sqrt(20) / 2), (7, 7, 7.5),
])
def test_x2_element(m, n, expected):
    assert x2_element(m, n) == pytest.approx(expected, abs=1e-15)


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 40))
def test_x2_is_square_of_x(n):
    # (X X)_{mn} is exact except in the last row/column, which sees the truncation
    x = x_matrix(n + 1)
    assert np.allclose((x @ x)[:n - 1, :n - 1], x2_matrix(n + 1)[:n - 1, :n - 1], atol=1e-13)


def test_matrices_match_elements():
    n = 12
    x, x2 = x_matrix(n), x2_matrix(n)
    for m in range(n):
        for k in range(n):
            assert x[m, k] == x_element(m, k)
            assert x2[m, k] == pytest.approx(x2_element(m, k), abs=1e-15)
