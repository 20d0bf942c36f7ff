"""Transversality certificate for ``f = G o X_N`` on the fundamental domain.

The center-stable and center-unstable planes of the flow are saturated by
flow lines, so in model coordinates they are ``span{e_t, v}`` with ``v``
the leaf direction of the boundary foliation, independent of t and N.
The strong lines carry an unknown bounded tilt ``c(x, y)`` along the flow
in absolute time; after compressing t by 1/N the tilt becomes ``c/N``.
The certificate quantifies over every tilt with ``|c| <= c_max``.
"""
from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field

import numpy as np

from .foliations import ModelFoliations
from .twist import (DEFAULT_TWIST, E_T, LineField3, PlaneField3, TwistProfile,
                    model_point, pushforward_line, pushforward_plane, unit)

log = logging.getLogger(__name__)

DEFAULT_THRESHOLD = 0.05
DEFAULT_C_MAX = 2.0
DEFAULT_X_RES = 256
DEFAULT_T_RES = 64
N_FLOOR = 1.0


class UnreachableThresholdError(ValueError):
    pass


def _embed(v2):
    """Torus direction (dx, dy) -> model 3-vector (0, dx, dy)."""
    v2 = np.asarray(v2, dtype=float)
    return np.concatenate([np.zeros(v2.shape[:-1] + (1,)), v2], axis=-1)


def _tilt(c, n):
    return 0.0 if np.isinf(n) else np.asarray(c, dtype=float) / n


def cs_plane(x, fol: ModelFoliations = ModelFoliations()) -> PlaneField3:
    """``span{e_t, v_s(x)}``; takes no t or N argument on purpose."""
    v = _embed(fol.s_vector(x))
    return PlaneField3.span(np.broadcast_to(E_T, v.shape), v)


def cu_plane(x, fol: ModelFoliations = ModelFoliations()) -> PlaneField3:
    v = _embed(fol.u_vector(x))
    return PlaneField3.span(np.broadcast_to(E_T, v.shape), v)


def ss_line(x, c, n, fol: ModelFoliations = ModelFoliations()) -> LineField3:
    """Strong stable line with flow tilt ``c``, rescaled to the model."""
    if not n > 0:
        raise ValueError("N must be positive")
    v = _embed(fol.s_vector(x))
    tilt = np.asarray(_tilt(c, n))[..., None]
    return LineField3.through(tilt * E_T + v)


def uu_line(x, c, n, fol: ModelFoliations = ModelFoliations()) -> LineField3:
    if not n > 0:
        raise ValueError("N must be positive")
    v = _embed(fol.u_vector(x))
    tilt = np.asarray(_tilt(c, n))[..., None]
    return LineField3.through(tilt * E_T + v)


@dataclass
class MarginReport:
    n: float
    margin_cs_uu: float
    margin_cu_ss: float
    argmin_cs_uu: tuple[float, float]
    argmin_cu_ss: tuple[float, float]
    grid_resolution: tuple[int, int]
    c_max: float
    threshold: float
    passed: bool

    @property
    def margin(self) -> float:
        return min(self.margin_cs_uu, self.margin_cu_ss)

    def to_dict(self):
        d = asdict(self)
        d["argmin_cs_uu"] = {"t": self.argmin_cs_uu[0], "x": self.argmin_cs_uu[1]}
        d["argmin_cu_ss"] = {"t": self.argmin_cu_ss[0], "x": self.argmin_cu_ss[1]}
        d["grid_resolution"] = {"t": self.grid_resolution[0], "x": self.grid_resolution[1]}
        d["n"] = None if np.isinf(self.n) else self.n
        return d


def _grid(t_res: int, x_res: int):
    ts = np.linspace(0.0, 1.0, t_res)
    xs = np.arange(x_res) / x_res
    return ts, xs


def signed_margins(t, x, c, n, fol: ModelFoliations = ModelFoliations(),
                   twist: TwistProfile = DEFAULT_TWIST):
    """Signed ``<line, normal>`` for both transversality pairs at (t, x).

    Returns ``(cs_uu, cu_ss)``: the pushed strong-unstable line against the
    center-stable plane, and the strong-stable line against the pushed
    center-unstable plane.  Inputs broadcast.
    """
    t, x, c = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (t, x, c)))
    at = model_point(t, x, 0.0)
    uu = pushforward_line(uu_line(x, c, n, fol), at, twist)
    cs = cs_plane(x, fol)
    cu = pushforward_plane(cu_plane(x, fol), at, twist)
    ss = ss_line(x, c, n, fol)
    return (np.einsum("...i,...i->...", uu.vec, cs.normal),
            np.einsum("...i,...i->...", ss.vec, cu.normal))


def worst_case_margins(t, x, c_max, n, fol: ModelFoliations = ModelFoliations(),
                       twist: TwistProfile = DEFAULT_TWIST):
    """Exact minimum over ``|c| <= c_max`` of both margins.

    For fixed (t, x) the line direction sweeps a great-circle arc as c
    varies, along which the signed margin is ``R cos(phi - phi0)``; its
    absolute value is minimised at an endpoint unless it changes sign.
    """
    lo = signed_margins(t, x, -c_max, n, fol, twist)
    hi = signed_margins(t, x, c_max, n, fol, twist)
    out = []
    for a, b in zip(lo, hi):
        crossing = np.sign(a) * np.sign(b) < 0
        out.append(np.where(crossing, 0.0, np.minimum(np.abs(a), np.abs(b))))
    return tuple(out)


def check_transversality(n: float, x_res: int = DEFAULT_X_RES, c_max: float = DEFAULT_C_MAX,
                         threshold: float = DEFAULT_THRESHOLD, t_res: int = DEFAULT_T_RES,
                         fol: ModelFoliations = ModelFoliations(),
                         twist: TwistProfile = DEFAULT_TWIST) -> MarginReport:
    """Minimum margins over a (t, x) grid of the fundamental domain.

    y is not sampled: every field involved is invariant under y-translation.
    Ties in the argmin resolve to the smallest (t, x) lexicographically.
    """
    if not n > 0:
        raise ValueError("N must be positive")
    if x_res < 32 or t_res < 2:
        raise ValueError("grid too coarse: need x_res >= 32 and t_res >= 2")
    ts, xs = _grid(t_res, x_res)
    tt, xx = np.meshgrid(ts, xs, indexing="ij")
    m_csuu, m_cuss = worst_case_margins(tt, xx, c_max, n, fol, twist)
    i1 = np.unravel_index(np.argmin(m_csuu), m_csuu.shape)
    i2 = np.unravel_index(np.argmin(m_cuss), m_cuss.shape)
    a, b = float(m_csuu[i1]), float(m_cuss[i2])
    return MarginReport(
        n=float(n), margin_cs_uu=a, margin_cu_ss=b,
        argmin_cs_uu=(float(ts[i1[0]]), float(xs[i1[1]])),
        argmin_cu_ss=(float(ts[i2[0]]), float(xs[i2[1]])),
        grid_resolution=(t_res, x_res), c_max=float(c_max), threshold=float(threshold),
        passed=bool(a >= threshold and b >= threshold))


def limit_margin(x_res: int = DEFAULT_X_RES, t_res: int = DEFAULT_T_RES,
                 fol: ModelFoliations = ModelFoliations(),
                 twist: TwistProfile = DEFAULT_TWIST) -> float:
    """Tilt-free margin, the value every finite-N margin approaches."""
    return check_transversality(N_FLOOR, x_res, 0.0, 0.0, t_res, fol, twist).margin


@dataclass
class N0Search:
    n0: float
    threshold: float
    c_max: float
    limit: float
    evaluations: list = field(default_factory=list)
    monotone: bool = True


def n0_search(threshold: float = DEFAULT_THRESHOLD, c_max: float = DEFAULT_C_MAX,
              x_res: int = DEFAULT_X_RES, t_res: int = DEFAULT_T_RES, rel_tol: float = 1e-3,
              fol: ModelFoliations = ModelFoliations(), twist: TwistProfile = DEFAULT_TWIST,
              max_doublings: int = 60) -> N0Search:
    """Smallest N (to relative precision ``rel_tol``) at which both margins
    reach ``threshold``: doubling from N = 1, then bisection."""
    limit = limit_margin(x_res, t_res, fol, twist)
    if threshold >= limit:
        raise UnreachableThresholdError(
            f"threshold {threshold} is not below the limiting margin {limit:.6g}; no N works")
    res = N0Search(n0=np.nan, threshold=threshold, c_max=c_max, limit=limit)

    def passes(n):
        rep = check_transversality(n, x_res, c_max, threshold, t_res, fol, twist)
        res.evaluations.append(rep)
        return rep.passed

    def check_monotone():
        ordered = sorted(res.evaluations, key=lambda r: r.n)
        for a, b in zip(ordered, ordered[1:]):
            if b.margin < a.margin - 1e-12:
                if res.monotone:
                    log.warning("margins not monotone in N between %g and %g", a.n, b.n)
                res.monotone = False

    n = N_FLOOR
    if passes(n):
        res.n0 = n
        return res
    for _ in range(max_doublings):
        lo, n = n, 2.0 * n
        if passes(n):
            break
    else:
        raise UnreachableThresholdError("doubling search exhausted")
    hi = n
    while (hi - lo) / hi > rel_tol:
        mid = 0.5 * (lo + hi)
        if passes(mid):
            hi = mid
        else:
            lo = mid
    check_monotone()
    res.n0 = hi
    return res


def find_n0(threshold: float = DEFAULT_THRESHOLD, c_max: float = DEFAULT_C_MAX,
            x_res: int = DEFAULT_X_RES, **kw) -> float:
    return n0_search(threshold, c_max, x_res, **kw).n0


def sweep(ns, x_res: int = DEFAULT_X_RES, c_max: float = DEFAULT_C_MAX,
          threshold: float = DEFAULT_THRESHOLD, t_res: int = DEFAULT_T_RES,
          fol: ModelFoliations = ModelFoliations(),
          twist: TwistProfile = DEFAULT_TWIST) -> list[MarginReport]:
    ns = list(ns)
    if not ns:
        raise ValueError("N list is empty")
    return [check_transversality(n, x_res, c_max, threshold, t_res, fol, twist) for n in ns]


def deficit_slope(reports: list[MarginReport], limit: float) -> float:
    """Log-log slope of ``limit - margin`` against N."""
    ns = np.array([r.n for r in reports])
    deficit = limit - np.array([r.margin for r in reports])
    return float(np.polyfit(np.log(ns), np.log(deficit), 1)[0])


def ss_convergence_angle(xs, c_max: float, n: float, fol: ModelFoliations = ModelFoliations()):
    """Max over ``xs`` of the angle between the tilted and model ss-lines."""
    a = ss_line(xs, c_max, n, fol).vec
    b = ss_line(xs, 0.0, np.inf, fol).vec
    cosang = np.clip(np.abs(np.einsum("...i,...i->...", a, b)), 0.0, 1.0)
    return float(np.max(np.arctan2(np.linalg.norm(np.cross(a, b), axis=-1), cosang)))


__all__ = [
    "MarginReport", "N0Search", "UnreachableThresholdError", "check_transversality",
    "cs_plane", "cu_plane", "deficit_slope", "find_n0", "limit_margin", "n0_search",
    "signed_margins", "ss_convergence_angle", "ss_line", "sweep", "unit", "uu_line",
    "worst_case_margins",
]
