import numpy as np
import pytest

from steersim.errors import NoCrossing
from steersim.search import (
    SweepSpec,
    four_party_region,
    max_method_gap,
    sweep,
    threshold_scan,
    two_way_sharing_window,
    worker_count,
)
from steersim.states import StateParams
from steersim.steering import analytic_radius


def test_threshold_scan_basic():
    fn = lambda w: analytic_radius(1, "AB", StateParams(w, np.pi / 4))
    w_star = threshold_scan(fn, (0.0, 1.0), tol=1e-10)
    assert abs(w_star - 1 / np.sqrt(2)) < 1e-8


def test_threshold_scan_no_crossing():
    fn = lambda w: analytic_radius(2, "BA", StateParams(w, np.pi / 8))
    with pytest.raises(NoCrossing):
        threshold_scan(fn, (0.0, 1.0))


def test_threshold_scan_rejects_non_monotone():
    with pytest.raises(ValueError):
        threshold_scan(lambda x: 1.0 + np.sin(8 * x), (0.0, 3.0))


def test_sweep_linear_rows():
    spec = SweepSpec("W", 0.0, 1.0, 11, theta=np.pi / 4, case=1)
    rows = sweep(spec)
    assert len(rows) == 11
    assert [r["param_value"] for r in rows] == sorted(r["param_value"] for r in rows)
    for row in rows:
        assert row["status"] == "ok"
        assert abs(row["R_AB"] - np.sqrt(2) * row["param_value"]) < 1e-9
        assert row["class_AB"] in ("two_way", "no_way")


def test_sweep_both_methods_agree():
    # six grid points so the threaded evaluation path is exercised
    spec = SweepSpec("p", 0.05, 0.4, 6, W=0.9955, theta=np.pi / 4,
                     mix_pair=(1, 3), method="both")
    rows = sweep(spec)
    assert len(rows) == 12
    gaps = max_method_gap(rows)
    assert max(gaps.values()) < 1e-5


def test_sweep_flags_failed_rows():
    # theta is neither fixed nor swept: every row fails but the sweep survives
    spec = SweepSpec("W", 0.1, 0.9, 3, case=1)
    rows = sweep(spec)
    assert len(rows) == 3
    assert all(r["status"].startswith("failed") for r in rows)
    assert all(np.isnan(r["R_AB"]) for r in rows)


def test_sweep_spec_validation():
    with pytest.raises(ValueError):
        SweepSpec("x", 0, 1, 5, case=1)
    with pytest.raises(ValueError):
        SweepSpec("W", 1, 0, 5, case=1)
    with pytest.raises(ValueError):
        SweepSpec("W", 0, 1, 1, case=1)
    with pytest.raises(ValueError):
        SweepSpec("p", 0, 1, 5, theta=0.5)
    with pytest.raises(ValueError):
        SweepSpec("W", 0, 1, 5, theta=0.5, case=1, mix_pair=(1, 3))


def test_window_symmetric_state():
    window = two_way_sharing_window(StateParams(1.0, np.pi / 4), (1, 3))
    assert window is not None
    lo, hi = window
    assert abs(lo) < 1e-5
    assert abs(hi - (2 - np.sqrt(3))) < 1e-5


def test_window_asymmetric_state():
    window = two_way_sharing_window(StateParams(1.0, np.pi / 8), (1, 3))
    assert window is not None
    lo, hi = window
    assert abs(lo) < 1e-5
    assert abs(hi - (2 - np.sqrt(7 / 2))) < 1e-5


def test_window_midpoint_is_two_way():
    from steersim.steering import classify, mixture_radius

    params = StateParams(1.0, np.pi / 4)
    lo, hi = two_way_sharing_window(params, (1, 3))
    mid = 0.5 * (lo + hi)
    r_ab = analytic_radius(1, "AB", params)
    r_ba = mixture_radius("BA", mid, 0.0, params)
    r_ac = mixture_radius("AC", mid, 0.0, params)
    r_ca = mixture_radius("CA", mid, 0.0, params)
    assert classify(r_ab, r_ba).value == "two_way"
    assert classify(r_ac, r_ca).value == "two_way"


def test_windows_empty_for_other_pairs():
    for pair in ((1, 2), (2, 3)):
        assert two_way_sharing_window(StateParams(1.0, np.pi / 4), pair) is None
        assert two_way_sharing_window(StateParams(1.0, np.pi / 8), pair) is None


def test_four_party_region_undisclosed():
    region = four_party_region(False, verify_witness=True)
    assert abs(region.p1_max - 0.000978) < 1e-5
    assert region.witness["margin"] >= 1e-7
    assert region.witness["numeric_all_steerable"]
    np.testing.assert_allclose(region.witness["numeric_radii"],
                               region.witness["radii"], atol=1e-6)
    for p1, lo, hi in region.samples:
        assert 0 < p1 < region.p1_max
        assert lo < hi


def test_four_party_region_disclosed():
    region = four_party_region(True, verify_witness=False)
    assert abs(region.p1_max - 0.0122) < 1e-4


def test_four_party_sample_interval_contains_reference_point():
    from steersim.search import _p2_window

    window = _p2_window(0.000097, False)
    assert window is not None
    assert window[0] < 0.045 < window[1]


def test_worker_count_env(monkeypatch):
    monkeypatch.setenv("STEER_THREADS", "3")
    assert worker_count() == 3
    monkeypatch.delenv("STEER_THREADS")
    assert worker_count() >= 1
