"""Center direction, center arcs across the fundamental domain, and the
displacement that keeps center leaves from being fixed.

Inside the fundamental domain the center line of ``f`` is the intersection
of the flow's center-stable plane with the G-image of its center-unstable
plane.  Both planes contain a t-transverse direction, so center arcs are
graphs over t and run from T1 (t = 0) to its image (t = 1).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .certificate import cs_plane, cu_plane
from .foliations import ModelFoliations
from .twist import DEFAULT_TWIST, TwistProfile, g_derivative, model_point, pushforward_plane
from .torus import wrap01

ATOL = 1e-10
H_MAX = 0.05
H_MIN = 1e-12
MAX_STEPS = 10**6


class CenterDegeneracyError(ArithmeticError):
    pass


class StepUnderflowError(RuntimeError):
    pass


def _rows(*arrays):
    return np.broadcast_arrays(*(np.asarray(a, dtype=float) for a in arrays))


def center_direction(p, fol: ModelFoliations = ModelFoliations(),
                     twist: TwistProfile = DEFAULT_TWIST, tol: float = 1e-12):
    """Unit vector along ``E^cs(p) & G_*E^cu(p)`` with positive t-component."""
    p = np.asarray(p, dtype=float)
    x = p[..., 1]
    n1 = cs_plane(x, fol).normal
    n2 = pushforward_plane(cu_plane(x, fol), p, twist).normal
    v = np.cross(n1, n2)
    size = np.linalg.norm(v, axis=-1, keepdims=True)
    if np.any(size < tol):
        raise CenterDegeneracyError("center-stable and pushed center-unstable planes coincide")
    v = v / size
    return v * np.where(v[..., :1] < 0, -1.0, 1.0)


def center_slopes(t, x, fol: ModelFoliations = ModelFoliations(),
                  twist: TwistProfile = DEFAULT_TWIST):
    """``(dx/dt, dy/dt)`` of the center line at (t, x)."""
    v = center_direction(model_point(*_rows(t, x, 0.0)), fol, twist)
    return v[..., 1] / v[..., 0], v[..., 2] / v[..., 0]


@dataclass
class CenterArc:
    entry: tuple[float, float]
    exit: tuple[float, float]
    samples: np.ndarray  # (k, 3) rows (t, x, y), x and y unwrapped
    arc_length: float

    @property
    def displacement(self):
        return self.samples[-1, 1:] - self.samples[0, 1:]


def _rhs(t, state, fol, twist):
    dx, dy = center_slopes(t, wrap01(state[:, 0]), fol, twist)
    return np.stack([dx, dy, np.sqrt(1.0 + dx * dx + dy * dy)], axis=-1)


def _rk4(t, state, h, fol, twist):
    hh = h[:, None]
    k1 = _rhs(t, state, fol, twist)
    k2 = _rhs(t + 0.5 * h, state + 0.5 * hh * k1, fol, twist)
    k3 = _rhs(t + 0.5 * h, state + 0.5 * hh * k2, fol, twist)
    k4 = _rhs(t + h, state + hh * k3, fol, twist)
    return state + hh / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)


def integrate_arcs(x0, y0, fol: ModelFoliations = ModelFoliations(),
                   twist: TwistProfile = DEFAULT_TWIST, atol: float = ATOL,
                   h_max: float = H_MAX, max_steps: int = MAX_STEPS, backward: bool = False,
                   record: bool = False, raise_on_failure: bool = True):
    """Integrate center arcs for many entries at once.

    Adaptive classical RK4 with step doubling (and local extrapolation),
    one step size per arc.  Step
    boundaries are forced at the edges of the twist support so the flat
    regions are crossed without error.  ``backward=True`` runs from t = 1
    down to t = 0 (entries are then points of the t = 1 torus).

    Returns ``(x1, y1, length, ok, samples)``; ``samples`` is a per-arc list
    of ``(t, x, y)`` rows when ``record`` is set.
    """
    x0, y0 = (np.ravel(a) for a in _rows(x0, y0))
    n = x0.size
    state = np.stack([x0, y0, np.zeros(n)], axis=-1)
    tau = np.zeros(n)  # elapsed parameter in [0, 1]
    h = np.full(n, min(h_max, 0.01))
    ok = np.ones(n, dtype=bool)
    sign = -1.0 if backward else 1.0
    start = 1.0 if backward else 0.0
    bps = np.sort({True: [1.0 - twist.flat_hi, 1.0 - twist.flat_lo],
                   False: [twist.flat_lo, twist.flat_hi]}[backward] + [1.0])
    samples = [[(start, x0[i], y0[i])] for i in range(n)] if record else None
    active = np.arange(n)
    steps = 0
    while active.size:
        steps += 1
        if steps > max_steps:
            raise StepUnderflowError(f"center arc integration exceeded {max_steps} steps")
        ta = tau[active]
        nxt = bps[np.searchsorted(bps, ta + 1e-14, side="right")]
        step = np.minimum(h[active], nxt - ta)
        s = state[active]
        t_abs = start + sign * ta
        full = _rk4(t_abs, s, sign * step, fol, twist)
        half = _rk4(t_abs, s, 0.5 * sign * step, fol, twist)
        half = _rk4(t_abs + 0.5 * sign * step, half, 0.5 * sign * step, fol, twist)
        err = np.max(np.abs(half - full), axis=-1) / 15.0
        accept = err <= atol
        acc = active[accept]
        # local extrapolation: the step-doubling pair gives a 5th-order update
        state[acc] = half[accept] + (half[accept] - full[accept]) / 15.0
        tau[acc] = np.where(np.abs(nxt[accept] - (ta[accept] + step[accept])) < 1e-14,
                            nxt[accept], ta[accept] + step[accept])
        if record:
            for i in acc:
                samples[i].append((start + sign * tau[i], state[i, 0], state[i, 1]))
        with np.errstate(divide="ignore"):
            factor = np.clip(0.9 * (atol / np.maximum(err, 1e-300)) ** 0.2, 0.2, 5.0)
        h[active] = np.minimum(step * factor, h_max)
        under = h[active] < H_MIN
        if np.any(under):
            bad = active[under]
            if raise_on_failure:
                i = bad[0]
                raise StepUnderflowError(
                    f"step size underflow at t={start + sign * tau[i]:.6g}, "
                    f"x={wrap01(state[i, 0]):.6g}, y={wrap01(state[i, 1]):.6g}")
            ok[bad] = False
        done = (tau[active] >= 1.0) | ~ok[active]
        active = active[~done]
    x1, y1, length = state[:, 0], state[:, 1], state[:, 2]
    out = (x1, y1, length, ok)
    if record:
        return out + ([np.array(rows) for rows in samples],)
    return out + (None,)


def integrate_arc(entry, fol: ModelFoliations = ModelFoliations(),
                  twist: TwistProfile = DEFAULT_TWIST, atol: float = ATOL,
                  h_max: float = H_MAX) -> CenterArc:
    x0, y0 = entry
    x1, y1, length, _, samples = integrate_arcs(x0, y0, fol, twist, atol, h_max, record=True)
    return CenterArc(entry=(float(x0), float(y0)), exit=(float(wrap01(x1[0])), float(wrap01(y1[0]))),
                     samples=samples[0], arc_length=float(length[0]))


def dist_to_lattice(d):
    d = np.asarray(d, dtype=float)
    return np.linalg.norm(d - np.round(d), axis=-1)


@dataclass
class DisplacementField:
    x0: np.ndarray
    y0: np.ndarray
    d: np.ndarray           # (..., 2), not reduced mod 1
    dist_to_lattice: np.ndarray
    arc_length: np.ndarray
    ok: np.ndarray

    @property
    def failed(self) -> int:
        return int(np.count_nonzero(~self.ok))

    def rows(self):
        """Flattened rows ``(x0, y0, Dx, Dy, dist, status)``."""
        for x0, y0, d, dist, ok in zip(self.x0.ravel(), self.y0.ravel(), self.d.reshape(-1, 2),
                                       self.dist_to_lattice.ravel(), self.ok.ravel()):
            yield float(x0), float(y0), float(d[0]), float(d[1]), float(dist), "ok" if ok else "failed"


def _unique_x_integrate(xs, ys, fol, twist, atol, h_max, backward=False):
    """Exit points for many entries, integrating once per distinct x.

    Center arcs do not depend on y (every field is y-translation
    invariant), so the y displacement is shared by all entries with the
    same x.
    """
    ux, inv = np.unique(xs, return_inverse=True)
    x1, y1, length, ok, _ = integrate_arcs(ux, np.zeros_like(ux), fol, twist, atol, h_max,
                                           backward=backward, raise_on_failure=False)
    return (x1 - ux)[inv], y1[inv], length[inv], ok[inv]


def displacement_field(grid_res: int = 128, fol: ModelFoliations = ModelFoliations(),
                       twist: TwistProfile = DEFAULT_TWIST, atol: float = ATOL,
                       h_max: float = H_MAX, exploit_y_invariance: bool = True) -> DisplacementField:
    xs = np.arange(grid_res) / grid_res
    xx, yy = np.meshgrid(xs, xs, indexing="ij")
    if exploit_y_invariance:
        dx, dy, length, ok = _unique_x_integrate(xx.ravel(), yy.ravel(), fol, twist, atol, h_max)
    else:
        x1, y1, length, ok, _ = integrate_arcs(xx, yy, fol, twist, atol, h_max,
                                               raise_on_failure=False)
        dx, dy = x1 - xx.ravel(), y1 - yy.ravel()
    d = np.stack([dx, dy], axis=-1).reshape(grid_res, grid_res, 2)
    ok = ok.reshape(grid_res, grid_res)
    d = np.where(ok[..., None], d, np.nan)
    return DisplacementField(x0=xx, y0=yy, d=d, dist_to_lattice=dist_to_lattice(d),
                             arc_length=length.reshape(grid_res, grid_res), ok=ok)


def k_fold_displacement(x0, y0, k: int, fol: ModelFoliations = ModelFoliations(),
                        twist: TwistProfile = DEFAULT_TWIST, atol: float = ATOL,
                        h_max: float = H_MAX):
    """Total displacement of ``k`` successive center arcs starting at the
    entries; negative ``k`` runs the arcs backward."""
    x = np.ravel(np.asarray(x0, dtype=float)).copy()
    y = np.ravel(np.asarray(y0, dtype=float)).copy()
    total = np.zeros(x.shape + (2,))
    for _ in range(abs(k)):
        dx, dy_abs, _, ok = _unique_x_integrate(wrap01(x), y, fol, twist, atol, h_max,
                                                backward=k < 0)
        dy = dy_abs  # integrated from y = 0
        total[:, 0] += dx
        total[:, 1] += dy
        total[~ok] = np.nan
        x = x + dx
        y = y + dy
    return total


def fixed_leaf_candidates(k: int, tol: float = 1e-6, grid_res: int = 128,
                          fol: ModelFoliations = ModelFoliations(),
                          twist: TwistProfile = DEFAULT_TWIST):
    """Entries whose center leaf could be fixed by ``f^k``: the k-fold
    displacement is within ``tol`` of an integer vector.  Returns an
    ``(m, 2)`` array of entry points."""
    if k == 0:
        raise ValueError("k must be nonzero")
    xs = np.arange(grid_res) / grid_res
    xx, yy = np.meshgrid(xs, xs, indexing="ij")
    d = k_fold_displacement(xx, yy, k, fol, twist)
    hit = dist_to_lattice(d) < tol
    return np.stack([xx.ravel()[hit], yy.ravel()[hit]], axis=-1)


def compact_leaf_band(x, width: float, leaves=(0.0, 0.25, 0.5, 0.75)):
    """True where x lies within ``width`` (on the circle) of a listed leaf."""
    x = np.asarray(x, dtype=float)
    out = np.zeros(x.shape, dtype=bool)
    for c in leaves:
        d = np.abs(x - c) % 1.0
        out |= np.minimum(d, 1.0 - d) < width
    return out


def center_cocycle_bound(orbit_samples: int = 512, n_range: int = 4, seed: int = 0,
                         fol: ModelFoliations = ModelFoliations(),
                         twist: TwistProfile = DEFAULT_TWIST, extra_points=None) -> float:
    """Model-level bound K with ``1/K <= |Df^n v| <= K`` for unit center v.

    Orbits are followed copy by copy through translates of the fundamental
    domain: the flow part of ``f`` is the identity in model coordinates and
    the twist contributes ``DG`` on the single step that lands in the
    domain.  Base points are drawn in copies -1, 0 and 1.
    """
    rng = np.random.default_rng(seed)
    t = rng.uniform(0.0, 1.0, orbit_samples)
    x = rng.uniform(0.0, 1.0, orbit_samples)
    copy = rng.integers(-1, 2, orbit_samples)
    if extra_points is not None:
        extra = np.atleast_2d(np.asarray(extra_points, dtype=float))
        t = np.concatenate([t, extra[:, 0]])
        x = np.concatenate([x, extra[:, 1]])
        copy = np.concatenate([copy, np.zeros(len(extra), dtype=int)])
    p = model_point(t, x, 0.0)
    c = center_direction(p, fol, twist)
    g = g_derivative(p, twist)
    g_inv = np.linalg.inv(g)
    # unit center vector at the base point in its copy
    pulled = np.einsum("...ij,...j->...i", g_inv, c)
    v0 = np.where((copy < 0)[:, None], pulled / np.linalg.norm(pulled, axis=-1, keepdims=True), c)
    worst = np.ones(len(t))
    for direction in (1, -1):
        v = v0.copy()
        here = copy.copy()
        for _ in range(n_range):
            if direction > 0:
                crossing = here + 1 == 0
                v = np.where(crossing[:, None], np.einsum("...ij,...j->...i", g, v), v)
                here = here + 1
            else:
                crossing = here == 0
                v = np.where(crossing[:, None], np.einsum("...ij,...j->...i", g_inv, v), v)
                here = here - 1
            norm = np.linalg.norm(v, axis=-1)
            worst = np.maximum(worst, np.maximum(norm, 1.0 / norm))
    return float(np.max(worst))
