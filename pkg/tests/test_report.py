import csv
import io
import json
import math

import pytest

from relaycoop import report as rp
from relaycoop.rayleigh import FadingMode

import oracle_values as ov


def _rows_by_d(rows):
    return {round(r["d"], 10): r for r in rows}


def test_sweep_spec_validation():
    with pytest.raises(ValueError):
        rp.SweepSpec(d_min=1.0, d_max=0.5)
    with pytest.raises(ValueError):
        rp.SweepSpec(points=1)
    assert len(rp.SweepSpec(spacing=rp.Spacing.LOG).distances()) == 131


def test_case1_sweep_row():
    rows = rp.run_sweep(rp.SweepSpec(rp.Scenario.CASE1))
    assert len(rows) == 131
    assert [r["d"] for r in rows] == sorted(r["d"] for r in rows)
    row = _rows_by_d(rows)[0.5]
    assert row["g"] == pytest.approx(4.0)
    assert row["ct"] == pytest.approx(ov.CT1_G4, abs=1e-9)
    assert row["rt"] == pytest.approx(ov.RT1_G4, abs=1e-9)
    assert row["rprime"] == pytest.approx(ov.RPRIME_G4, abs=1e-9)
    assert row["cn"] == pytest.approx(ov.C1, abs=1e-12)
    # R'r is absent once g <= 2
    assert _rows_by_d(rows)[1.0]["rprime"] is None
    # DF rate does not increase with distance up to d = 1
    rts = [r["rt"] for r in rows if r["d"] <= 1.0]
    assert all(b <= a + 1e-12 for a, b in zip(rts, rts[1:]))


def test_case4_boundary_row():
    row = rp.sweep_row(rp.SweepSpec(rp.Scenario.CASE4), 0.70710678)
    assert row["rt"] == pytest.approx(ov.C1, abs=1e-7)
    assert "rprime" not in row


def test_rayleigh_equal_row():
    spec = rp.SweepSpec(rp.Scenario.RAYLEIGH_EQUAL, mc_n=20_000)
    row = rp.sweep_row(spec, 0.5)
    assert row["ct"] == pytest.approx(ov.TX_TERM2_HISNR, abs=1e-9)
    assert row["cn"] == pytest.approx(ov.CNBAR_HISNR, abs=1e-12)
    assert row["rr_stderr"] > 0


def test_rayleigh_exact_row_has_all_columns():
    spec = rp.SweepSpec(rp.Scenario.RAYLEIGH_OPTIMAL, mc_n=5_000, fading_mode=FadingMode.EXACT)
    row = rp.sweep_row(spec, 0.2)
    assert set(spec.columns) == set(row)
    assert all(row[c] is not None for c in spec.columns)
    assert row["rr"] < row["cr"]


def test_out_of_domain_cells_are_empty():
    # R'r exists only for g > 2; beyond d = 1/sqrt(2) its cell is empty
    rows = rp.run_sweep(rp.SweepSpec(rp.Scenario.CASE3, d_min=0.5, d_max=1.5, points=5))
    assert rows[0]["rprime"] is not None and rows[-1]["rprime"] is None


def test_csv_format():
    rows = [{"d": 0.5, "g": 4.0, "ct": 5.101538026462062, "rprime": None}]
    text = rp.rows_to_csv(rows, ("d", "g", "ct", "rprime"))
    assert text == "d,g,ct,rprime\n0.5,4,5.10153803,\n"
    parsed = list(csv.reader(io.StringIO(text)))
    assert parsed[1][3] == ""


def test_sweep_identical_across_jobs():
    spec = rp.SweepSpec(rp.Scenario.RAYLEIGH_EQUAL, points=4, mc_n=5_000, mc_seed=17)
    a = rp.rows_to_csv(rp.run_sweep(spec, jobs=1), spec.columns)
    b = rp.rows_to_csv(rp.run_sweep(spec, jobs=3), spec.columns)
    assert a == b


def test_verify_quick_passes():
    report = rp.verify_all(rp.VerifyRanges.quick())
    failed = [c.to_dict() for c in report.checks if not c.passed]
    assert report.passed, failed
    data = json.loads(report.to_json())
    assert data["pass"] is True
    assert {"name", "pass", "worst_deviation", "location"} <= set(data["checks"][0])
    assert report["closed_form_vs_evaluator"].worst_deviation <= 1e-6


def test_fault_injection_names_row_pair():
    fault = {"Ct1,Cr1": lambda cfg: cfg.c(1.999 * (cfg.gain_g + 1.0) / (cfg.gain_g + 2.0))}
    check = rp.check_ordering(rp.VerifyRanges(), overrides=fault)
    assert not check.passed
    assert "Ct1,Cr1 < Rt1,Ct2,Cr3" in check.location


def test_failing_step_is_recorded_not_raised():
    fault = {"Rt2": lambda cfg: 1 / 0}
    report = rp.verify_all(rp.VerifyRanges.quick(), faults=fault)
    assert not report.passed
    assert any("ZeroDivisionError" in c.detail for c in report.checks)


def test_thresholds_located():
    found = {b.name: rp.locate_boundary(b) for b in rp.branch_boundaries()}
    for b in rp.branch_boundaries():
        assert abs(found[b.name] - b.expected) < 1e-6, b.name
    assert any(abs(b.expected - math.e) < 1e-12 for b in rp.branch_boundaries())


def test_boundary_without_crossing():
    b = rp.BranchBoundary("none", 1.0, (3.0, 4.0), lambda g: g, lambda g: 0.0)
    assert rp.locate_boundary(b) is None
