"""Two-source DA diffeomorphism of the 2-torus and its suspension flow.

Points on the torus are numpy arrays whose last axis has length 2
(``x, y`` taken mod 1).  Every map here is vectorised over leading axes.

The DA map is ``phi = m o B`` where ``m`` is a hyperbolic integer matrix
with exactly two fixed points and ``B`` is the time-one map of a push
field supported in small disks around those fixed points.  Inside a disk
the field is ``k * a * beta(|w|^2) * e_s`` with ``w`` the offset from the
source, ``a = <w, e_s>`` and ``e_s`` the stable eigenvector of ``m``; it
only moves points along ``e_s`` so the time-one map reduces to a scalar
ODE per point.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import NamedTuple

import numpy as np

RENORM_EVERY = 10
SEED_ANGLE = 1.0  # generic seed direction for backward cocycle products


class NonConvergenceError(RuntimeError):
    pass


def wrap01(p):
    """Canonical representative in [0, 1)."""
    r = np.mod(p, 1.0)
    return np.where(r >= 1.0, 0.0, r)


def wrap_centered(d):
    """Representative of ``d`` mod 1 in [-1/2, 1/2)."""
    return d - np.floor(d + 0.5)


def torus_distance(p, q):
    return np.linalg.norm(wrap_centered(np.asarray(p) - np.asarray(q)), axis=-1)


def canonical_angle(ang):
    """Reduce a line angle to [0, pi); values within rounding of pi map to 0."""
    ang = np.mod(ang, np.pi)
    return np.where(np.pi - ang <= 4 * np.finfo(float).eps, 0.0, ang)


def line_angle(v):
    """Angle of the line spanned by ``v`` in [0, pi)."""
    return canonical_angle(np.arctan2(v[..., 1], v[..., 0]))


def angle_distance(a, b):
    """Distance between two line angles, taken mod pi."""
    d = np.mod(np.asarray(a) - np.asarray(b), np.pi)
    return np.minimum(d, np.pi - d)


@dataclass(frozen=True)
class LinearModel:
    """Hyperbolic automorphism of the torus given by an integer matrix."""

    m: tuple[tuple[int, int], tuple[int, int]] = ((3, 1), (2, 1))

    def __post_init__(self):
        arr = np.array(self.m)
        if arr.shape != (2, 2) or not np.issubdtype(arr.dtype, np.integer):
            raise ValueError(f"linear model must be a 2x2 integer matrix, got {self.m!r}")
        object.__setattr__(self, "m", tuple(tuple(int(v) for v in row) for row in self.m))
        if self.det != 1:
            raise ValueError(f"linear model must have det 1, got {self.det}")
        if abs(self.trace) <= 2:
            raise ValueError(f"linear model is not hyperbolic (trace {self.trace})")

    @property
    def array(self) -> np.ndarray:
        return np.array(self.m, dtype=float)

    @property
    def det(self) -> int:
        (a, b), (c, d) = self.m
        return a * d - b * c

    @property
    def trace(self) -> int:
        return self.m[0][0] + self.m[1][1]

    @property
    def inverse_array(self) -> np.ndarray:
        (a, b), (c, d) = self.m
        return np.array([[d, -b], [-c, a]], dtype=float)

    def eigen(self):
        """Return ``(lam_s, e_s, lam_u, e_u)`` with unit eigenvectors."""
        w, v = np.linalg.eig(self.array)
        order = np.argsort(np.abs(w))
        w, v = w[order].real, v[:, order].real
        es = v[:, 0] / np.linalg.norm(v[:, 0])
        eu = v[:, 1] / np.linalg.norm(v[:, 1])
        return w[0], es, w[1], eu


def fixed_points(m) -> np.ndarray:
    """All solutions of ``(m - I) p in Z^2`` with ``p`` in [0, 1)^2.

    Computed exactly: ``p = adj(m - I) v / det(m - I)`` for lattice vectors
    ``v`` in the image of the unit square.
    """
    (a, b), (c, d) = (tuple(int(v) for v in row) for row in np.asarray(m).tolist())
    a, d = a - 1, d - 1
    det = a * d - b * c
    if det == 0:
        raise ValueError("m - I is singular: fixed points are not isolated")
    corners = [(a * x + b * y, c * x + d * y) for x, y in product((0, 1), repeat=2)]
    lo = [min(cr[i] for cr in corners) for i in range(2)]
    hi = [max(cr[i] for cr in corners) for i in range(2)]
    found = set()
    for v0 in range(lo[0], hi[0] + 1):
        for v1 in range(lo[1], hi[1] + 1):
            px = Fraction(d * v0 - b * v1, det)
            py = Fraction(-c * v0 + a * v1, det)
            if 0 <= px < 1 and 0 <= py < 1:
                found.add((px, py))
    pts = sorted(found)
    if len(pts) != abs(det):
        raise AssertionError(f"found {len(pts)} fixed points, expected {abs(det)}")
    return np.array([[float(x), float(y)] for x, y in pts])


@dataclass(frozen=True)
class DaParams:
    """Parameters of the DA surgery.

    ``bump_strength`` is the log of the extra stretching applied along the
    stable direction at each source, so the stable eigenvalue of ``m``
    becomes ``lam_s * exp(bump_strength)`` there.
    """

    model: LinearModel = field(default_factory=LinearModel)
    bump_radius: float = 0.08
    bump_strength: float = 1.75
    push_steps: int = 200

    def __post_init__(self):
        if not self.bump_radius > 0:
            raise ValueError("bump_radius must be positive")
        if not self.bump_strength > 0:
            raise ValueError("bump_strength must be positive")
        if self.push_steps < 1:
            raise ValueError("push_steps must be >= 1")
        (a, b), (c, d) = self.model.m
        n_fixed = abs((a - 1) * (d - 1) - b * c)
        if n_fixed != 2:
            raise ValueError(f"linear model must have exactly 2 fixed points, has {n_fixed}")
        src = fixed_points(self.model.m)
        gap = torus_distance(src[0], src[1])
        if gap <= 2 * self.bump_radius:
            raise ValueError(
                f"bump disks overlap: source distance {gap:.4f} <= 2*bump_radius")
        lam_s = self.model.eigen()[0]
        if abs(lam_s) * np.exp(self.bump_strength) <= 1.0:
            raise ValueError("bump_strength too small: sources would not repel")


class DAMap:
    """The two-source DA diffeomorphism ``phi``."""

    def __init__(self, params: DaParams | None = None):
        self.params = params or DaParams()
        self.m = self.params.model.array
        self.m_inv = self.params.model.inverse_array
        self.lam_s, self.e_s, self.lam_u, self.e_u = self.params.model.eigen()
        self.e_perp = np.array([-self.e_s[1], self.e_s[0]])
        self.sources = fixed_points(self.params.model.m)
        self.radius = self.params.bump_radius
        self.strength = self.params.bump_strength

    # -- push field --------------------------------------------------------
    def _beta(self, r2):
        u = np.clip(1.0 - r2 / self.radius**2, 0.0, None)
        return u**3, -3.0 * u**2 / self.radius**2

    def _push_rhs(self, a, c, ja, jc):
        beta, dbeta = self._beta(a * a + c * c)
        k = self.strength
        fa = k * (beta + 2.0 * a * a * dbeta)
        fc = k * a * dbeta * 2.0 * c
        return k * a * beta, fa * ja, fa * jc + fc

    def _push_scalar(self, a, c):
        """Time-one map of the scalar push ODE with its exact RK4 Jacobian.

        Returns ``(A, dA/da, dA/dc)``.
        """
        h = 1.0 / self.params.push_steps
        ja = np.ones_like(a)
        jc = np.zeros_like(a)
        for _ in range(self.params.push_steps):
            k1 = self._push_rhs(a, c, ja, jc)
            k2 = self._push_rhs(a + 0.5 * h * k1[0], c, ja + 0.5 * h * k1[1], jc + 0.5 * h * k1[2])
            k3 = self._push_rhs(a + 0.5 * h * k2[0], c, ja + 0.5 * h * k2[1], jc + 0.5 * h * k2[2])
            k4 = self._push_rhs(a + h * k3[0], c, ja + h * k3[1], jc + h * k3[2])
            a = a + h / 6.0 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
            ja = ja + h / 6.0 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
            jc = jc + h / 6.0 * (k1[2] + 2 * k2[2] + 2 * k3[2] + k4[2])
        return a, ja, jc

    def _local(self, p):
        """Offsets of ``p`` in (e_s, e_perp) coordinates from each source."""
        for src in self.sources:
            w = wrap_centered(p - src)
            yield w @ self.e_s, w @ self.e_perp

    def push(self, p):
        """Apply the time-one map ``B`` of the push field."""
        p = wrap01(np.asarray(p, dtype=float))
        flat = p.reshape(-1, 2).copy()
        for a, c in self._local(flat):
            inside = a * a + c * c < self.radius**2
            if np.any(inside):
                A, _, _ = self._push_scalar(a[inside], c[inside])
                flat[inside] += (A - a[inside])[:, None] * self.e_s
        return wrap01(flat).reshape(p.shape)

    # -- the map -----------------------------------------------------------
    def apply(self, p):
        return wrap01(self.push(p) @ self.m.T)

    def derivative(self, p):
        p = wrap01(np.asarray(p, dtype=float))
        flat = p.reshape(-1, 2)
        dB = np.tile(np.eye(2), (flat.shape[0], 1, 1))
        es, ep = self.e_s, self.e_perp
        for a, c in self._local(flat):
            inside = a * a + c * c < self.radius**2
            if np.any(inside):
                _, ja, jc = self._push_scalar(a[inside], c[inside])
                row = (ja - 1.0)[:, None] * es + jc[:, None] * ep
                dB[inside] += es[:, None] * row[:, None, :]
        return (self.m @ dB).reshape(p.shape[:-1] + (2, 2))

    def inverse(self, p, tol: float = 1e-12, max_iter: int = 50):
        """Invert ``phi``: ``m^-1`` exactly, then a safeguarded Newton solve
        of the scalar push equation seeded at the ``m^-1`` image."""
        p = wrap01(np.asarray(p, dtype=float))
        w = wrap01(p.reshape(-1, 2) @ self.m_inv.T)
        out = w.copy()
        for a_t, c in self._local(w):
            inside = a_t * a_t + c * c < self.radius**2
            if not np.any(inside):
                continue
            at, cc = a_t[inside], c[inside]
            # the push moves points outward along e_s, so the preimage lies
            # between 0 and the target
            lo = np.minimum(at, 0.0)
            hi = np.maximum(at, 0.0)
            a = at.copy()
            for _ in range(max_iter):
                A, ja, _ = self._push_scalar(a, cc)
                g = A - at
                done = np.abs(g) < tol
                if np.all(done):
                    break
                lo = np.where(g < 0, a, lo)
                hi = np.where(g > 0, a, hi)
                a_new = a - g / ja
                bad = (a_new <= lo) | (a_new >= hi) | ~np.isfinite(a_new)
                a_new = np.where(bad, 0.5 * (lo + hi), a_new)
                a = np.where(done, a, a_new)
            else:
                worst = float(np.max(np.abs(self._push_scalar(a, cc)[0] - at)))
                raise NonConvergenceError(
                    f"DA inverse did not converge in {max_iter} iterations (residual {worst:.3e})")
            out[inside] += (a - at)[:, None] * self.e_s
        return wrap01(out).reshape(p.shape)

    def trap_ratio(self, radius: float | None = None, samples: int = 720) -> float:
        """Smallest ``|phi(p) - source| / radius`` over the circles of the
        given radius around both sources.

        A value above 1 means the closed complement of those disks is
        mapped into itself.
        """
        r = self.radius if radius is None else float(radius)
        th = 2.0 * np.pi * np.arange(samples) / samples
        circle = r * np.stack([np.cos(th), np.sin(th)], axis=-1)
        worst = np.inf
        for src in self.sources:
            img = self.apply(wrap01(src + circle))
            worst = min(worst, float(np.min(torus_distance(img, src))) / r)
        return worst

    def iterate(self, p, n: int):
        for _ in range(n):
            p = self.apply(p)
        return p

    def avoids_bumps(self, p, n: int, margin: float = 0.0):
        """True where the points ``p, phi(p), ..., phi^(n-1)(p)`` all stay
        outside the closed bump disks (inflated by ``margin``)."""
        p = np.atleast_2d(p)
        ok = np.ones(p.shape[0], dtype=bool)
        for _ in range(n):
            for src in self.sources:
                ok &= torus_distance(p, src) > self.radius + margin
            p = self.apply(p)
        return ok

    def sample_bump_avoiding(self, count: int, n: int, rng, burn_in: int = 0,
                             batch: int = 4096, margin: float = 0.0):
        """Random points (optionally pushed ``burn_in`` steps toward the
        attractor) whose next ``n`` iterates avoid the bump disks."""
        found = []
        total = 0
        while total < count:
            cand = self.iterate(rng.random((batch, 2)), burn_in)
            keep = cand[self.avoids_bumps(cand, n, margin)]
            found.append(keep)
            total += len(keep)
        return np.concatenate(found)[:count]


class Cocycle(NamedTuple):
    """Derivative cocycle of the DA map along an orbit segment.

    The 2x2 product is stored as ``exp(log_scale) * matrix`` with ``matrix``
    of unit spectral norm; ``log_abs_det`` is accumulated separately so the
    smallest singular value is recovered without cancellation.  The
    suspension cocycle is ``blockdiag(product, 1)``.
    """

    matrix: np.ndarray
    log_scale: float
    log_abs_det: float

    @classmethod
    def identity(cls):
        return cls(np.eye(2), 0.0, 0.0)

    def then(self, step: np.ndarray) -> "Cocycle":
        """Compose with one more derivative applied after this segment."""
        mat = step @ self.matrix
        return Cocycle(mat, self.log_scale, self.log_abs_det + np.log(abs(np.linalg.det(step))))

    def __matmul__(self, earlier: "Cocycle") -> "Cocycle":
        mat = self.matrix @ earlier.matrix
        return Cocycle(mat, self.log_scale + earlier.log_scale,
                       self.log_abs_det + earlier.log_abs_det).renormalized()

    def renormalized(self) -> "Cocycle":
        s = np.linalg.norm(self.matrix, 2)
        return Cocycle(self.matrix / s, self.log_scale + np.log(s), self.log_abs_det)

    def log_singular_values(self):
        """``(log s_min, log s_max)`` of the 2x2 product."""
        top = self.log_scale + np.log(np.linalg.norm(self.matrix, 2))
        return self.log_abs_det - top, top

    def as_array(self, dim: int = 3) -> np.ndarray:
        out = np.exp(self.log_scale) * self.matrix
        if dim == 2:
            return out
        full = np.eye(3)
        full[:2, :2] = out
        return full


def orbit_cocycle(da: DAMap, p, n: int) -> tuple[Cocycle, np.ndarray]:
    """Cocycle of ``phi^n`` at a single point (``n`` may be negative).

    Returns the cocycle and the endpoint ``phi^n(p)``.
    """
    p = wrap01(np.asarray(p, dtype=float))
    coc = Cocycle.identity()
    for j in range(abs(n)):
        if n > 0:
            step = da.derivative(p)
            p = da.apply(p)
        else:
            p = da.inverse(p)
            step = np.linalg.inv(da.derivative(p))
        coc = coc.then(step)
        if (j + 1) % RENORM_EVERY == 0:
            coc = coc.renormalized()
    coc = coc.renormalized()
    if not np.all(np.isfinite(coc.matrix)):
        raise FloatingPointError("cocycle product lost conditioning")
    return coc, p


def finite_time_stable_direction(da: DAMap, p, n: int, seed_angle: float = SEED_ANGLE):
    """Angle in [0, pi) of ``(D phi^n(p))^-1`` applied to a generic vector.

    Vectorised over leading axes of ``p``.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    p = wrap01(np.asarray(p, dtype=float))
    orbit = [p]
    for _ in range(n):
        orbit.append(da.apply(orbit[-1]))
    v = np.broadcast_to(np.array([np.cos(seed_angle), np.sin(seed_angle)]), p.shape).copy()
    for j in range(n - 1, -1, -1):
        v = np.linalg.solve(da.derivative(orbit[j]), v[..., None])[..., 0]
        if (n - j) % RENORM_EVERY == 0:
            v = v / np.linalg.norm(v, axis=-1, keepdims=True)
        if not np.all(np.isfinite(v)):
            raise FloatingPointError("backward cocycle overflowed")
    return line_angle(v)


def stable_angle(da: DAMap) -> float:
    return float(line_angle(da.e_s))


# -- suspension -------------------------------------------------------------
class SuspensionPoint(NamedTuple):
    base: np.ndarray
    s: np.ndarray


def suspension_flow(da: DAMap, q: SuspensionPoint, t) -> SuspensionPoint:
    """Unit-speed vertical flow on the mapping torus of ``phi``."""
    base = wrap01(np.asarray(q.base, dtype=float))
    total = np.asarray(q.s, dtype=float) + t
    k = np.floor(total)
    s = total - k
    k = k.astype(int)
    if base.ndim == 1:
        for _ in range(abs(int(k))):
            base = da.apply(base) if k > 0 else da.inverse(base)
        return SuspensionPoint(base, s)
    base = base.copy()
    for j in range(int(np.max(np.abs(k), initial=0))):
        fwd = k > j
        bwd = k < -j
        if np.any(fwd):
            base[fwd] = da.apply(base[fwd])
        if np.any(bwd):
            base[bwd] = da.inverse(base[bwd])
    return SuspensionPoint(base, s)


def suspension_cocycle(da: DAMap, q: SuspensionPoint, t: float) -> Cocycle:
    """Cocycle of the flow from ``q`` for time ``t`` (single point)."""
    n = int(np.floor(float(q.s) + t))
    coc, _ = orbit_cocycle(da, q.base, n)
    return coc


def ftle(da: DAMap, q: SuspensionPoint, t: float) -> np.ndarray:
    """Finite-time Lyapunov exponents of the suspension flow, ascending.

    The middle (flow) exponent is exactly zero: the flow direction is a
    unit block of the cocycle.
    """
    if t == 0:
        raise ValueError("t must be nonzero")
    lo, hi = suspension_cocycle(da, q, t).log_singular_values()
    return np.sort(np.array([lo / abs(t), 0.0, hi / abs(t)]))
