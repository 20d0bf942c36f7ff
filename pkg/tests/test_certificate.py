import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from phtwist.certificate import (UnreachableThresholdError, check_transversality, cs_plane,
                                 cu_plane, deficit_slope, find_n0, limit_margin, n0_search,
                                 signed_margins, ss_convergence_angle, ss_line, sweep, uu_line,
                                 worst_case_margins)
from phtwist.foliations import ModelFoliations
from phtwist.twist import DEFAULT_TWIST, TwistProfile

FOL = ModelFoliations()


def oracle_margins(t, x, c, n):
    """Both margins written out component by component."""
    ts, tu = FOL.s_direction(x), FOL.u_direction(x)
    rp = DEFAULT_TWIST.rho_prime(t)
    e = c / n
    uu = np.array([e, np.cos(tu), np.sin(tu) + rp * e])
    n_cs = np.array([0.0, -np.sin(ts), np.cos(ts)])
    a = abs(uu @ n_cs) / np.linalg.norm(uu)
    ss = np.array([e, np.cos(ts), np.sin(ts)])
    # pushed cu plane: span{(1, 0, rp), (0, cos tu, sin tu)}
    n_cu = np.cross([1.0, 0.0, rp], [0.0, np.cos(tu), np.sin(tu)])
    b = abs(ss @ n_cu) / (np.linalg.norm(ss) * np.linalg.norm(n_cu))
    return a, b


@settings(max_examples=200, deadline=None)
@given(st.floats(0, 1), st.floats(0, 1, exclude_max=True), st.floats(-3, 3), st.floats(1, 1e4))
def test_margins_match_explicit_vectors(t, x, c, n):
    a, b = signed_margins(t, x, c, n)
    oa, ob = oracle_margins(t, x, c, n)
    assert abs(abs(a) - oa) < 1e-12 and abs(abs(b) - ob) < 1e-12


@settings(max_examples=60, deadline=None)
@given(st.floats(0, 1), st.floats(0, 1, exclude_max=True), st.floats(0, 4), st.floats(0.5, 50))
def test_worst_case_matches_dense_tilt_scan(t, x, c_max, n):
    cs = np.linspace(-c_max, c_max, 2001)
    dense = np.abs(np.array(signed_margins(t, x, cs, n))).min(axis=1)
    exact = np.array(worst_case_margins(t, x, c_max, n))
    assert np.all(exact <= dense + 1e-12)
    # the scan brackets the true minimum; its grid error is O(spacing)
    assert np.all(dense - exact < 4 * c_max / 2000 / n + 1e-12)


def test_strong_lines_inside_center_planes():
    x = np.arange(4096) / 4096
    for n in (1.0, 5.4, 100.0, np.inf):
        for c in (-2.0, 0.0, 2.0):
            assert np.max(cs_plane(x).contains(ss_line(x, c, n).vec)) < 1e-12
            assert np.max(cu_plane(x).contains(uu_line(x, c, n).vec)) < 1e-12


def test_center_planes_independent_of_n():
    x = np.linspace(0, 1, 33)
    a = cs_plane(x).normal
    b = cs_plane(x, ModelFoliations()).normal
    assert np.array_equal(a, b)


@pytest.mark.parametrize("n", [1.0, 3.0, 17.0, 1e3])
def test_ss_convergence_bound(n):
    x = np.arange(4096) / 4096
    assert ss_convergence_angle(x, 2.0, n) <= np.arctan(2.0 / n) + 1e-15


def test_lines_reject_bad_n():
    with pytest.raises(ValueError):
        ss_line(0.1, 1.0, 0.0)
    with pytest.raises(ValueError):
        check_transversality(-1.0)
    with pytest.raises(ValueError):
        check_transversality(10.0, x_res=16)


def test_model_grid_all_positive():
    rep = check_transversality(1e12, c_max=2.0, threshold=0.0)
    t = np.linspace(0, 1, 64)
    x = np.arange(256) / 256
    tt, xx = np.meshgrid(t, x, indexing="ij")
    a, b = worst_case_margins(tt, xx, 0.0, 1.0)
    assert np.all(a > 0) and np.all(b > 0)
    assert rep.passed


def test_report_pass_flag_consistent():
    for thr in (0.0, 0.2, 0.25, 0.3):
        rep = check_transversality(40.0, threshold=thr)
        assert rep.passed == (rep.margin_cs_uu >= thr and rep.margin_cu_ss >= thr)


def test_n0_search_default():
    res = n0_search()
    assert np.isfinite(res.n0) and res.monotone
    assert res.n0 == pytest.approx(5.42, rel=5e-3)  # regression value for the default profile
    for n in (res.n0, 2 * res.n0, 10 * res.n0):
        assert check_transversality(n).passed
    assert not check_transversality(res.n0 * (1 - 2e-3)).passed


def test_n0_floor_without_tilt():
    assert find_n0(c_max=0.0) == 1.0


def test_unreachable_threshold():
    with pytest.raises(UnreachableThresholdError):
        find_n0(threshold=0.999)
    with pytest.raises(UnreachableThresholdError):
        find_n0(threshold=limit_margin() + 1e-9)


def test_limit_margin_regression():
    assert limit_margin() == pytest.approx(0.28854, abs=1e-4)


def test_sweep_monotone_and_deficit_slope():
    ns = [16 * 2**k for k in range(9)]
    reps = sweep(ns)
    margins = [r.margin for r in reps]
    assert all(b >= a for a, b in zip(margins, margins[1:]))
    assert deficit_slope(reps, limit_margin()) == pytest.approx(-1.0, abs=0.15)
    single = sweep([ns[3]])[0]
    assert single == check_transversality(ns[3])
    with pytest.raises(ValueError):
        sweep([])


def test_twist_disabled_has_larger_limit():
    off = TwistProfile(enabled=False)
    assert limit_margin(twist=off) >= limit_margin() - 1e-12
    # without the shear the margin is the sine of the foliation angle
    assert limit_margin(twist=off) == pytest.approx(np.sin(FOL.pair_margin()[0]), abs=1e-12)
