"""Report builders shared by the CLI, the demos and the acceptance tests.

Each builder returns a JSON-ready dict with a ``passed`` flag.
"""
from __future__ import annotations

import numpy as np

from . import center, certificate, homology
from .config import Config
from .torus import (SuspensionPoint, angle_distance, finite_time_stable_direction, fixed_points,
                    ftle, stable_angle)

SCHEMA_VERSION = 1
TRAP_FRACTION = 0.1  # trapping circles at this fraction of the bump radius
STABLE_TOL = 1e-6
FTLE_GAP = 0.1
FTLE_TOL = 0.05
BAND_WIDTH = 0.02


def da_verify(cfg: Config) -> dict:
    da = cfg.da_map()
    rng = np.random.default_rng(cfg.seed)
    checks = {}

    fp = fixed_points(da.params.model.m)
    checks["fixedPoints"] = {"count": len(fp), "points": fp.tolist(), "passed": len(fp) == 2}

    src = []
    for s in da.sources:
        dphi = da.derivative(s)
        eig = np.abs(np.linalg.eigvals(dphi))
        sv = np.linalg.svd(dphi, compute_uv=False)
        src.append({"point": s.tolist(), "eigenvalueModuli": sorted(eig.tolist()),
                    "singularValues": sorted(sv.tolist()),
                    "passed": bool(eig.min() > 1 and sv.min() > 1)})
    checks["sourceRepulsion"] = {"sources": src, "passed": all(s["passed"] for s in src)}

    ratio = da.trap_ratio(TRAP_FRACTION * da.radius)
    checks["trapping"] = {"radius": TRAP_FRACTION * da.radius, "minImageRatio": ratio,
                          "passed": ratio > 1.0}

    pts = da.sample_bump_avoiding(cfg.da_samples, cfg.da_iterates, rng)
    ang = finite_time_stable_direction(da, pts, cfg.da_iterates)
    err = float(np.max(angle_distance(ang, stable_angle(da))))
    checks["stableDirection"] = {"samples": len(pts), "iterates": cfg.da_iterates,
                                 "maxAngleError": err, "passed": err < STABLE_TOL}

    t = cfg.ftle_time
    basin = da.iterate(rng.random((cfg.ftle_samples, 2)), 20)
    ex = np.array([ftle(da, SuspensionPoint(p, 0.0), t) for p in basin])
    clean = da.sample_bump_avoiding(cfg.ftle_samples, int(np.ceil(t)) + 1, rng)
    top = np.array([ftle(da, SuspensionPoint(p, 0.0), t)[2] for p in clean])
    target = float(np.log(da.lam_u))
    ordering = bool(np.all(ex[:, 0] < -FTLE_GAP) and np.all(ex[:, 1] == 0.0)
                    and np.all(ex[:, 2] > FTLE_GAP))
    close = bool(np.all(np.abs(top - target) <= FTLE_TOL))
    checks["ftle"] = {"time": t, "samples": len(basin), "maxSs": float(ex[:, 0].max()),
                      "minUu": float(ex[:, 2].min()), "center": float(np.abs(ex[:, 1]).max()),
                      "uuAwayFromBumps": [float(top.min()), float(top.max())],
                      "closedForm": target, "passed": ordering and close}

    return {"schemaVersion": SCHEMA_VERSION, "checks": checks,
            "passed": all(c["passed"] for c in checks.values())}


def certificate_report(cfg: Config) -> dict:
    fol, tw = cfg.foliations(), cfg.twist()
    kw = dict(x_res=cfg.n_grid, t_res=cfg.t_grid, fol=fol, twist=tw)
    search = certificate.n0_search(cfg.threshold, cfg.c_max, **kw)
    reps = [certificate.check_transversality(n, c_max=cfg.c_max, threshold=cfg.threshold, **kw)
            for n in (search.n0, 2.0 * search.n0)]
    return {"schemaVersion": SCHEMA_VERSION, "n0": search.n0, "threshold": cfg.threshold,
            "cMax": cfg.c_max, "limitMargin": search.limit, "monotone": search.monotone,
            "evaluations": len(search.evaluations),
            "reports": [r.to_dict() for r in reps],
            "passed": all(r.passed for r in reps)}


def sweep_rows(cfg: Config):
    reps = certificate.sweep(cfg.sweep_n, cfg.n_grid, cfg.c_max, cfg.threshold, cfg.t_grid,
                             cfg.foliations(), cfg.twist())
    return reps


def center_report(cfg: Config):
    """Displacement field plus the summary checks on it."""
    fol, tw = cfg.foliations(), cfg.twist()
    field = center.displacement_field(cfg.center_grid, fol, tw, cfg.integrator_atol,
                                      cfg.integrator_h_max)
    xs = field.x0[:, 0]
    band = center.compact_leaf_band(field.x0, BAND_WIDTH)
    off = field.dist_to_lattice[~band]
    k = center.center_cocycle_bound(cfg.cocycle_samples, cfg.cocycle_n_range, cfg.seed, fol, tw)
    bound = float(np.sqrt(1.0 + tw.max_rho_prime**2))
    compact = {}
    for x0 in (0.0, 0.5):
        i = np.flatnonzero(np.isclose(xs, x0))
        if i.size:
            compact[str(x0)] = field.d[i[0], 0].tolist()
    summary = {
        "schemaVersion": SCHEMA_VERSION,
        "gridRes": cfg.center_grid,
        "failedArcs": field.failed,
        "maxArcLength": float(np.max(field.arc_length)),
        "compactLeafDisplacement": compact,
        "bandWidth": BAND_WIDTH,
        "minDistOffBands": float(np.min(off)) if off.size else None,
        "cocycleBound": k,
        "cocycleBoundCeiling": bound,
        "twistEnabled": tw.enabled,
    }
    ok = field.failed == 0 and k <= 1.01 * bound
    if tw.enabled:
        ok = ok and summary["minDistOffBands"] is not None and summary["minDistOffBands"] > 0
    summary["passed"] = bool(ok)
    return field, summary


def homology_report(k: int = 1) -> dict:
    rep = homology.report(k)
    rep["passed"] = rep["obstructed"] == (k != 0)
    return rep
