"""Acceptance suite: one check per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v``; the lines are repeated in
the terminal summary.
"""
import json
import subprocess
import sys
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from phtwist.center import (center_cocycle_bound, compact_leaf_band, displacement_field,
                            fixed_leaf_candidates, integrate_arc, integrate_arcs)
from phtwist.certificate import (check_transversality, cs_plane, cu_plane, deficit_slope,
                                 limit_margin, n0_search, ss_convergence_angle, ss_line, sweep,
                                 uu_line, worst_case_margins)
from phtwist.foliations import ModelFoliations
from phtwist.homology import (crossing_number, gamma2_path, is_isotopy_obstructed, matmul,
                              twist_action)
from phtwist.torus import (DAMap, LinearModel, SuspensionPoint, angle_distance,
                           finite_time_stable_direction, fixed_points, ftle, stable_angle)
from phtwist.twist import DEFAULT_TWIST, TwistProfile

FOL = ModelFoliations()
DA = DAMap()


def record(number, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


@pytest.fixture(scope="module")
def field128():
    return displacement_field(128)


def test_criterion_01_foliation_transversality():
    t0 = time.perf_counter()
    a, arg = FOL.pair_margin(4096)
    elapsed = time.perf_counter() - t0
    b, _ = FOL.pair_margin(8192)
    xs = np.arange(1_000_000) / 1_000_000
    dense = float(np.min(angle_distance(FOL.s_direction(xs), FOL.u_direction(xs))))
    ok = a > 0 and f"{a:.3g}" == f"{b:.3g}" and abs(a - dense) < 1e-6 and elapsed < 5
    record(1, ok, f"minAngle={a:.10f} at x={arg:.6f}, doubled={b:.10f}, "
                  f"dense scan={dense:.10f}, {elapsed:.3f}s")


def test_criterion_02_model_twist_transversality():
    t = np.linspace(0, 1, 64)
    x = np.arange(256) / 256
    tt, xx = np.meshgrid(t, x, indexing="ij")
    a, b = worst_case_margins(tt, xx, 0.0, 1.0)
    failures = int(np.count_nonzero(a <= 0) + np.count_nonzero(b <= 0))
    record(2, failures == 0, f"64x256 nodes, min cs/uu={a.min():.6f}, min cu/ss={b.min():.6f}, "
                             f"failures={failures}")


def test_criterion_03_n0_and_convergence():
    t0 = time.perf_counter()
    res = n0_search(threshold=0.05, c_max=2.0)
    at_n0 = check_transversality(res.n0)
    at_2n0 = check_transversality(2 * res.n0)
    reps = sweep([16 * 2**k for k in range(9)])
    slope = deficit_slope(reps, limit_margin())
    elapsed = time.perf_counter() - t0
    ok = (np.isfinite(res.n0) and at_n0.passed and at_2n0.passed and abs(slope + 1) <= 0.15
          and elapsed < 60)
    record(3, ok, f"N0={res.n0:.6g}, margin(N0)={at_n0.margin:.6f}, "
                  f"margin(2N0)={at_2n0.margin:.6f}, deficit slope={slope:.4f}, {elapsed:.2f}s")


def test_criterion_04_bundle_containment_and_limit():
    x = np.arange(4096) / 4096
    worst_res = 0.0
    worst_gap = -np.inf
    for n in (1.0, 5.421875, 10.0, 100.0, 4096.0):
        for c in (-2.0, -1.0, 0.0, 1.0, 2.0):
            worst_res = max(worst_res, float(np.max(cs_plane(x).contains(ss_line(x, c, n).vec))),
                            float(np.max(cu_plane(x).contains(uu_line(x, c, n).vec))))
        worst_gap = max(worst_gap, ss_convergence_angle(x, 2.0, n) - np.arctan(2.0 / n))
    ok = worst_res < 1e-12 and worst_gap <= 1e-15
    record(4, ok, f"containment residual={worst_res:.2e}, "
                  f"max(angle - arctan(cMax/N))={worst_gap:.2e}")


def test_criterion_05_da_structure():
    fp = fixed_points(LinearModel().m)
    eig = min(float(np.min(np.abs(np.linalg.eigvals(DA.derivative(s))))) for s in DA.sources)
    pts = DA.sample_bump_avoiding(100, 60, np.random.default_rng(0))
    err = float(np.max(angle_distance(finite_time_stable_direction(DA, pts, 60),
                                      stable_angle(DA))))
    ok = len(fp) == 2 and eig > 1 and err < 1e-6
    record(5, ok, f"fixed points={len(fp)}, min source |eigenvalue|={eig:.4f}, "
                  f"stable direction error={err:.2e}")


def test_criterion_06_suspension_exponents():
    rng = np.random.default_rng(0)
    basin = DA.iterate(rng.random((50, 2)), 20)
    ex = np.array([ftle(DA, SuspensionPoint(p, 0.0), 50.0) for p in basin])
    clean = DA.sample_bump_avoiding(50, 51, rng)
    top = np.array([ftle(DA, SuspensionPoint(p, 0.0), 50.0)[2] for p in clean])
    target = np.log(2 + np.sqrt(3))
    ok = (np.all(ex[:, 0] < -0.1) and np.all(ex[:, 1] == 0.0) and np.all(ex[:, 2] > 0.1)
          and np.all(np.abs(top - target) <= 0.05))
    record(6, ok, f"max lambda_ss={ex[:, 0].max():.4f}, lambda_c=0 exact: "
                  f"{bool(np.all(ex[:, 1] == 0))}, min lambda_uu={ex[:, 2].min():.4f}, "
                  f"off-bump lambda_uu in [{top.min():.5f}, {top.max():.5f}] vs {target:.5f}")


def test_criterion_07_center_arcs(field128):
    fine = displacement_field(128, atol=1e-10 / 16, h_max=0.025)
    change = float(max(np.max(np.abs(field128.d - fine.d)),
                       np.max(np.abs(field128.arc_length - fine.arc_length))))
    flat = 0.0
    for x in np.arange(0, 1, 1 / 128):
        s = integrate_arc((x, 0.0)).samples
        for part in (s[s[:, 0] <= DEFAULT_TWIST.flat_lo], s[s[:, 0] >= DEFAULT_TWIST.flat_hi]):
            flat = max(flat, float(np.max(np.abs(part[:, 1:] - part[0, 1:]))))
    max_len = float(np.max(field128.arc_length))
    ok = field128.failed == 0 and np.isfinite(max_len) and change < 1e-6 and flat < 1e-12
    record(7, ok, f"failed arcs={field128.failed}, max arcLength={max_len:.6f}, "
                  f"step-halving change={change:.2e}, flat-region residual={flat:.2e}")


def _fold(x):
    r = x % 0.5
    return min(r, 0.5 - r)


def _criterion_8(field, leaves):
    rows = {}
    for x0 in (0.0, 0.5):
        i = int(round(x0 * 128))
        rows[x0] = float(np.max(np.abs(field.d[i] - np.array([0.0, 1.0]))))
    compact_ok = max(rows.values()) < 1e-8

    band = compact_leaf_band(field.x0, 0.02, leaves)
    off = np.where(band, np.inf, field.dist_to_lattice)
    i_min = np.unravel_index(np.argmin(off), off.shape)
    min_off = float(off[i_min])
    x_min = float(field.x0[i_min])

    # 10x resolution oracle on x (arcs do not depend on y)
    xs = np.arange(1280) / 1280
    x1, y1, _, _, _ = integrate_arcs(xs, 0.0)
    d = np.stack([x1 - xs, y1], -1)
    dist = np.linalg.norm(d - np.round(d), axis=-1)
    dist = np.where(compact_leaf_band(xs, 0.02, leaves), np.inf, dist)
    x_oracle = float(xs[np.argmin(dist)])
    # the field is symmetric under x -> x + 1/2 and x -> -x, so compare
    # minimum locations in the fundamental interval [0, 1/4]
    located = abs(_fold(x_oracle) - _fold(x_min)) <= 1 / 128

    outside = []
    for k in (1, -1, 2, -2, 5, -5):
        cand = fixed_leaf_candidates(k)
        bad = cand[~compact_leaf_band(cand[:, 0], 0.02, leaves)]
        if len(bad):
            outside.append((k, sorted(set(np.round(bad[:, 0], 4).tolist()))))
    ok = compact_ok and min_off > 0 and located and not outside
    detail = (f"compact rows max|D-(0,1)|={max(rows.values()):.2e}, "
              f"min distToLattice off bands={min_off:.3e} at x0={x_min:.4f} "
              f"(10x oracle x0={x_oracle:.4f}), fixed candidates outside bands: "
              f"{outside if outside else 'none'}")
    return ok, detail


def test_criterion_08_non_fixed_center_leaves(field128):
    """Bands around x0 in {0, 1/2} only, as the criterion is worded.

    Expected to fail: the compact u-leaves x0 = 1/4, 3/4 are horizontal
    center arcs with D = (0, 0), hence fixed.
    """
    ok, detail = _criterion_8(field128, (0.0, 0.5))
    record(8, ok, "bands {0, 1/2}: " + detail)


def test_criterion_08b_non_fixed_center_leaves_all_compact_leaves(field128):
    ok, detail = _criterion_8(field128, (0.0, 0.25, 0.5, 0.75))
    record("8b", ok, "bands {0, 1/4, 1/2, 3/4}: " + detail)


def test_criterion_09_center_cocycle_bound():
    k = center_cocycle_bound()
    ceiling = np.sqrt(1 + DEFAULT_TWIST.max_rho_prime**2) * 1.01
    k_off = center_cocycle_bound(twist=TwistProfile(enabled=False))
    record(9, k <= ceiling and k_off == 1.0,
           f"K={k:.6f} <= {ceiling:.6f}, K without twist={k_off}")


def test_criterion_10_homology():
    rng = np.random.default_rng(0)
    pairs = rng.integers(-10**6, 10**6, (10_000, 2))
    law = all(matmul(twist_action(int(j)), twist_action(int(k))) == twist_action(int(j + k))
              for j, k in pairs)
    ks = np.concatenate([rng.integers(-10**6, 10**6 + 1, 10_000), [-10**6, -1, 0, 1, 10**6]])
    obstruction = all(is_isotopy_obstructed(int(k)) == (k != 0) for k in ks)
    x1, y1, _, _, _ = integrate_arcs(0.0, 0.0)
    winding = int(round(float(y1[0])))
    shift = twist_action(1)[1][0] * crossing_number(gamma2_path())
    ok = law and obstruction and winding == shift == 1
    record(10, ok, f"group law on 1e4 pairs={law}, obstruction iff k!=0={obstruction}, "
                   f"compact-leaf winding={winding} vs homology shift={shift}")


def test_criterion_11_end_to_end(tmp_path):
    t0 = time.perf_counter()
    proc = subprocess.run([sys.executable, "-m", "phtwist", "all", "--out-dir", str(tmp_path)],
                          capture_output=True, text=True)
    elapsed = time.perf_counter() - t0
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    need = {"foliations.svg", "sweep.csv", "displacement.csv", "displacement.svg",
            "certificate.json"}
    listed = need <= set(manifest["files"]) and all((tmp_path / f).exists() for f in need)
    ok = proc.returncode == 0 and elapsed < 180 and listed
    record(11, ok, f"exit={proc.returncode}, {elapsed:.1f}s, required files listed={listed}"
                   + (f", stderr={proc.stderr.strip()}" if proc.stderr.strip() else ""))
