"""The model space [0, 1] x T^2 and the Dehn-twist shear on it.

Coordinates are ordered ``(t, x, y)``: t runs across the fundamental
domain from T1 (t = 0) to its image (t = 1) and the flow is ``d/dt``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .torus import wrap01

E_T = np.array([1.0, 0.0, 0.0])


@dataclass(frozen=True)
class TwistProfile:
    """Monotone ``rho: [0, 1] -> [0, 1]``, zero on [0, flat_lo] and one on
    [flat_hi, 1], joined by the quintic smoothstep ``6u^5 - 15u^4 + 10u^3``.

    ``enabled=False`` gives ``rho == 0`` (no twist).
    """

    flat_lo: float = 0.1
    flat_hi: float = 0.9
    enabled: bool = True

    def __post_init__(self):
        if not 0.0 < self.flat_lo < self.flat_hi < 1.0:
            raise ValueError(
                f"need 0 < flat_lo < flat_hi < 1, got flat_lo={self.flat_lo}, flat_hi={self.flat_hi}")

    @property
    def max_rho_prime(self) -> float:
        # smoothstep derivative 30u^2(1-u)^2 peaks at u = 1/2 with value 15/8
        return 15.0 / 8.0 / (self.flat_hi - self.flat_lo) if self.enabled else 0.0

    def _u(self, t):
        t = np.asarray(t, dtype=float)
        if np.any((t < 0.0) | (t > 1.0)):
            raise ValueError("rho is defined on [0, 1]")
        return np.clip((t - self.flat_lo) / (self.flat_hi - self.flat_lo), 0.0, 1.0)

    def rho(self, t):
        u = self._u(t)
        if not self.enabled:
            return np.zeros_like(u)
        return u**3 * (10.0 - 15.0 * u + 6.0 * u * u)

    def rho_prime(self, t):
        u = self._u(t)
        if not self.enabled:
            return np.zeros_like(u)
        return 30.0 * u * u * (1.0 - u) ** 2 / (self.flat_hi - self.flat_lo)


DEFAULT_TWIST = TwistProfile()


def model_point(t, x, y) -> np.ndarray:
    t, x, y = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (t, x, y)))
    return np.stack([t, wrap01(x), wrap01(y)], axis=-1)


def g_apply(p, profile: TwistProfile = DEFAULT_TWIST):
    p = np.asarray(p, dtype=float)
    out = p.copy()
    out[..., 2] = wrap01(p[..., 2] + profile.rho(p[..., 0]))
    return out


def g_inverse(p, profile: TwistProfile = DEFAULT_TWIST):
    p = np.asarray(p, dtype=float)
    out = p.copy()
    out[..., 2] = wrap01(p[..., 2] - profile.rho(p[..., 0]))
    return out


def g_derivative(p, profile: TwistProfile = DEFAULT_TWIST):
    """Unit lower-triangular shear with ``rho'(t)`` in the (y, t) slot."""
    p = np.asarray(p, dtype=float)
    out = np.broadcast_to(np.eye(3), p.shape[:-1] + (3, 3)).copy()
    out[..., 2, 0] = profile.rho_prime(p[..., 0])
    return out


def h_n(t_abs, p, n: float):
    """Rescale absolute flow time in [0, N] to the model interval [0, 1].

    The torus chart is the identity: the model foliations are defined in
    the T1 coordinates directly.
    """
    if not n > 0:
        raise ValueError("N must be positive")
    t_abs = np.asarray(t_abs, dtype=float)
    if np.any((t_abs < 0) | (t_abs > n)):
        raise ValueError("absolute time must lie in [0, N]")
    p = np.asarray(p, dtype=float)
    return model_point(t_abs / n, p[..., 0], p[..., 1])


def h_n_inverse(q, n: float):
    if not n > 0:
        raise ValueError("N must be positive")
    q = np.asarray(q, dtype=float)
    return q[..., 0] * n, q[..., 1:].copy()


def h_n_derivative(n: float) -> np.ndarray:
    return np.diag([1.0 / n, 1.0, 1.0])


def unit(v):
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


@dataclass(frozen=True)
class LineField3:
    """Unit 3-vectors, one per sample point (leading axes)."""

    vec: np.ndarray

    @classmethod
    def through(cls, v):
        return cls(unit(v))


class DegenerateSpanError(ArithmeticError):
    pass


@dataclass(frozen=True)
class PlaneField3:
    """Ordered pair of unit spanning vectors plus the cached unit normal."""

    a: np.ndarray
    b: np.ndarray
    normal: np.ndarray

    @classmethod
    def span(cls, a, b, tol: float = 1e-14):
        a, b = unit(a), unit(b)
        n = np.cross(a, b)
        size = np.linalg.norm(n, axis=-1, keepdims=True)
        if np.any(size < tol):
            raise DegenerateSpanError("spanning vectors are parallel")
        return cls(a, b, n / size)

    def contains(self, v):
        """Residual ``|<v, n>|`` of unit ``v`` against the plane."""
        return np.abs(np.einsum("...i,...i->...", unit(v), self.normal))


def line_plane_margin(line: np.ndarray, normal: np.ndarray):
    """Sine of the angle between a line and a plane (unit inputs)."""
    return np.abs(np.einsum("...i,...i->...", line, normal))


def pushforward_line(line: LineField3, at, profile: TwistProfile = DEFAULT_TWIST) -> LineField3:
    """Image under DG of the line sitting at ``G^-1(at)``."""
    d = g_derivative(g_inverse(at, profile), profile)
    return LineField3.through(np.einsum("...ij,...j->...i", d, line.vec))


def pushforward_plane(plane: PlaneField3, at, profile: TwistProfile = DEFAULT_TWIST) -> PlaneField3:
    d = g_derivative(g_inverse(at, profile), profile)
    a = np.einsum("...ij,...j->...i", d, plane.a)
    b = np.einsum("...ij,...j->...i", d, plane.b)
    try:
        return PlaneField3.span(a, b)
    except DegenerateSpanError as exc:  # a shear is invertible
        raise AssertionError("pushforward by G collapsed a plane") from exc
