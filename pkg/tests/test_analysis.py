import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ptmdm import analysis
from ptmdm.analysis import (
    ANALYTIC_TOLERANCES,
    TABLE_TOLERANCES,
    BracketError,
    SpectrumError,
    SpectrumReport,
    Tolerances,
    bracket_exceptional_point,
    conjugate_closure,
    filter_real,
    match_across_sizes,
    scan_g,
    spectrum_report,
)
from ptmdm.eigen import ConvergenceError
from ptmdm.potentials import AhmedCubicPT, Harmonic, ShiftedHO

# ---------------------------------------------------------------------------
# filter_real


def test_filter_clear_cut():
    real, cplx = filter_real([1.72 + 1e-13j, 3 + 0.9j, 3 - 0.9j], 1e-8, 1e-10)
    assert real.tolist() == [1.72]
    assert cplx.tolist() == [3 + 0.9j]


def test_filter_all_real():
    real, cplx = filter_real([3.0, 1.0, 2.0], 1e-8, 0.0)
    assert real.tolist() == [1.0, 2.0, 3.0]
    assert cplx.size == 0


def test_filter_boundary_inclusive():
    real, _ = filter_real([2 + 1e-8j], 1e-8, 0.0)
    assert real.tolist() == [2.0]


def test_filter_relative_part():
    real, _ = filter_real([1000 + 5e-6j], 1e-6, 1e-8)
    assert real.tolist() == [1000.0]
    real, _ = filter_real([1 + 5e-6j], 1e-6, 1e-8)
    assert real.size == 0


def test_filter_rejects_negative():
    with pytest.raises(ValueError):
        filter_real([1.0], -1e-8, 0.0)


@settings(max_examples=100, deadline=None)
@given(
    st.lists(st.complex_numbers(max_magnitude=100, allow_nan=False, allow_infinity=False), max_size=30),
    st.floats(0, 1), st.floats(0, 1),
)
def test_filter_monotone_in_tol_abs(eigs, a, b):
    lo, hi = sorted((a, b))
    small, _ = filter_real(eigs, lo, 1e-8)
    large, _ = filter_real(eigs, hi, 1e-8)
    assert set(small.tolist()) <= set(large.tolist())
    assert small.size <= large.size


# ---------------------------------------------------------------------------
# matching


def test_match_table_digits():
    out = match_across_sizes([1.7201, 6.58], [1.7208, 6.579], 1e-2)
    assert [e for e, _ in out] == [1.7208, 6.579]
    assert [d for _, d in out] == pytest.approx([7e-4, 1e-3])


def test_match_no_convergence():
    assert match_across_sizes([5.0], [9.0], 0.1) == []


def test_match_identity():
    levels = [1.0, 2.5, 4.0]
    assert match_across_sizes(levels, levels, 1e-6) == [(1.0, 0.0), (2.5, 0.0), (4.0, 0.0)]


def test_match_drops_artifacts():
    out = match_across_sizes([1.0, 2.0, 3.3], [1.0001, 2.0001, 2.9, 7.0], 1e-3)
    assert [e for e, _ in out] == [1.0001, 2.0001]


def test_match_each_target_used_once():
    out = match_across_sizes([1.0, 1.0005], [1.0002], 1e-3)
    assert len(out) == 1


def test_closure():
    assert conjugate_closure([1 + 2j, 1 - 2j, 3.0]) == 0.0
    assert conjugate_closure([1 + 2j, 1 - 2.1j]) == pytest.approx(0.1)


# ---------------------------------------------------------------------------
# reports


def test_quarter_oscillator_levels():
    rep = spectrum_report(Harmonic(0.25), 100, 150, ANALYTIC_TOLERANCES)
    e = rep.energies()
    assert e.size > 21
    assert np.max(np.abs(e[:21] - (np.arange(21) + 0.5))) <= 1e-9


def test_shifted_oscillator_levels(shifted_report):
    e = shifted_report.energies()
    assert np.max(np.abs(e[:11] - (2 * np.arange(11) + 1.25))) <= 1e-8


def test_hermitian_completeness(harmonic_report):
    assert harmonic_report.complex_levels == []
    assert harmonic_report.converged_cutoff > 20


def test_report_invariants(table1_report):
    rep = table1_report
    assert [lv.quantum_number for lv in rep.real_levels] == list(range(len(rep.real_levels)))
    e = rep.energies()
    assert np.all(np.diff(e) > 0)
    assert all(lv.cross_size_delta <= rep.delta for lv in rep.real_levels)
    assert rep.closure_error <= 1e-8
    assert all(z.imag > 0 and z.real <= rep.converged_cutoff for z in rep.complex_levels)


def test_ahmed_published_levels(table1_report):
    assert table1_report.energies() == pytest.approx([1.720857958, 6.579362154, 7.398126125], abs=1e-4)


def test_label_stability(table1_report):
    small = spectrum_report(AhmedCubicPT(2.0), 400, 500, TABLE_TOLERANCES)
    assert len(small.real_levels) >= 1
    big = {lv.quantum_number: lv.energy for lv in table1_report.real_levels}
    for lv in small.real_levels:
        assert big[lv.quantum_number] == pytest.approx(lv.energy, abs=small.delta)


def test_parity_weights(table2_report):
    for lv in table2_report.real_levels:
        assert 0.0 <= lv.parity_weight <= 1.0
    assert table2_report.real_levels[0].parity == "even"
    assert len(table2_report.even_levels()) + len(table2_report.odd_levels()) == len(table2_report.real_levels)


def test_max_energy_window():
    rep = spectrum_report(Harmonic(1.0), 30, 40, Tolerances(delta=1e-6, max_energy=9.5))
    assert rep.energies().tolist() == pytest.approx([1, 3, 5, 7, 9], abs=1e-12)


def test_sizes_must_increase():
    with pytest.raises(ValueError):
        spectrum_report(Harmonic(1.0), 50, 50)


def test_numerical_errors_carry_context(monkeypatch):
    def boom(*_a, **_k):
        raise ConvergenceError(3, 40)

    monkeypatch.setattr(analysis, "eigenvalues", boom)
    with pytest.raises(SpectrumError, match=r"ahmed_cubic.*N=20"):
        spectrum_report(AhmedCubicPT(2.0), 20, 30)


def test_json_round_trip(shifted_report):
    text = json.dumps(shifted_report.to_dict())
    back = SpectrumReport.from_dict(json.loads(text))
    assert back == shifted_report


def test_csv_layout(shifted_report):
    lines = shifted_report.to_csv().splitlines()
    assert lines[0] == ",".join(analysis.CSV_COLUMNS)
    assert len(lines) == 1 + len(shifted_report.real_levels)
    first = lines[1].split(",")
    assert first[0] == "0" and float(first[1]) == shifted_report.real_levels[0].energy
    assert first[3] == "real"


# ---------------------------------------------------------------------------
# g-scan and bracketing


def test_scan_interior_window_has_three():
    res = scan_g([0.5, 1.0, 1.5, 2.0], 400, 500)
    assert res.real_counts == [3, 3, 3, 3]
    assert res.merge_brackets == [] and res.failures == {}


def test_scan_hermitian_limit():
    res = scan_g([0.0], 100, 150)
    rep = spectrum_report(AhmedCubicPT(0.0), 100, 150)
    assert res.real_counts == [len(rep.real_levels)]
    assert res.real_counts[0] > 10 and rep.complex_levels == []


def test_scan_finds_merge():
    res = scan_g([2.2, 2.3, 2.4, 2.5], 400, 500)
    assert res.real_counts[0] == 3 and res.real_counts[-1] == 1
    assert len(res.merge_brackets) == 1
    lo, hi = res.merge_brackets[0]
    assert 2.2 <= lo < hi <= 2.5


def test_scan_validates_grid():
    with pytest.raises(ValueError):
        scan_g([1.0, 1.0], 10, 20)
    with pytest.raises(ValueError):
        scan_g([-0.1], 10, 20)


def test_scan_marks_failures_and_continues(monkeypatch):
    real = analysis.real_count

    def flaky(g, *a, **k):
        if g == 1.0:
            raise SpectrumError("forced")
        return real(g, *a, **k)

    monkeypatch.setattr(analysis, "real_count", flaky)
    res = scan_g([0.5, 1.0, 1.5], 100, 150)
    assert res.real_counts[1] is None
    assert res.real_counts[0] is not None and res.real_counts[2] is not None
    assert "forced" in res.failures[1.0]


def test_bracket_narrows():
    lo, hi = bracket_exceptional_point(2.3, 2.35, (400, 500), tol_g=0.01)
    assert hi - lo <= 0.01
    assert 2.3 <= lo < hi <= 2.35
    assert analysis.real_count(lo, 400, 500) == 3
    assert analysis.real_count(hi, 400, 500) == 1


def test_bracket_no_op_when_already_narrow(monkeypatch):
    monkeypatch.setattr(analysis, "real_count", lambda g, *a: 3 if g < 2.32 else 1)
    assert bracket_exceptional_point(2.3, 2.35, tol_g=0.1) == (2.3, 2.35)


def test_bracket_precondition(monkeypatch):
    monkeypatch.setattr(analysis, "real_count", lambda g, *a: 3)
    with pytest.raises(ValueError, match="differ by 2"):
        bracket_exceptional_point(1.0, 2.0)


def test_bracket_anomaly(monkeypatch):
    monkeypatch.setattr(analysis, "real_count", lambda g, *a: {1.0: 3, 2.0: 1}.get(g, 5))
    with pytest.raises(BracketError) as err:
        bracket_exceptional_point(1.0, 2.0, tol_g=0.1)
    assert err.value.g == 1.5 and err.value.count == 5


def test_bracket_synthetic_location(monkeypatch):
    monkeypatch.setattr(analysis, "real_count", lambda g, *a: 3 if g < math.pi / 1.3 else 1)
    lo, hi = bracket_exceptional_point(2.0, 3.0, tol_g=1e-6)
    assert lo < math.pi / 1.3 <= hi and hi - lo <= 1e-6
