"""Model foliations of the boundary torus T1 and their transversality.

The s-foliation has compact leaves at x = 0 and x = 1/2 and, on each
half, leaves that are graphs ``y = alpha(x) + c`` (resp. ``alpha(x - 1/2)``)
of a convex profile blowing up at both ends.  The u-foliation is its
translate by 1/4 in x.  Both are invariant under translations in y, so
every direction below is a function of x alone.

Directions are line angles in [0, pi); slopes are never materialised
because they blow up on compact leaves.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .torus import angle_distance, canonical_angle, wrap01

GOLDEN_TOL = 1e-10


class AlphaProfile:
    """Convex profile on (0, 1/2) tending to +inf at both ends with
    ``alpha'(1/4) = 0``.

    Subclasses provide ``alpha``, ``alpha_prime``, ``alpha_second`` and
    ``tangent``, a (not necessarily unit) leaf tangent ``(dx, dy)`` that is
    finite on all of [0, 1/2], vertical at both ends.
    """

    name = "abstract"

    def _check_domain(self, x):
        x = np.asarray(x, dtype=float)
        if np.any((x <= 0) | (x >= 0.5)):
            raise ValueError("alpha is defined on the open interval (0, 1/2)")
        return x

    def alpha(self, x):
        raise NotImplementedError

    def alpha_prime(self, x):
        raise NotImplementedError

    def alpha_second(self, x):
        raise NotImplementedError

    def tangent(self, x):
        raise NotImplementedError


class LogSineProfile(AlphaProfile):
    """``alpha(x) = -ln sin(2 pi x)``."""

    name = "logsine"

    def alpha(self, x):
        x = self._check_domain(x)
        return -np.log(np.sin(2 * np.pi * x))

    def alpha_prime(self, x):
        x = self._check_domain(x)
        return -2 * np.pi / np.tan(2 * np.pi * x)

    def alpha_second(self, x):
        x = self._check_domain(x)
        return 4 * np.pi**2 / np.sin(2 * np.pi * x) ** 2

    def tangent(self, x):
        # (1, alpha') scaled by sin(2 pi x); valid on both halves since the
        # second half shifts the argument by pi and flips both signs
        u = 2 * np.pi * np.asarray(x, dtype=float)
        return np.sin(u), -2 * np.pi * np.cos(u)


class ReciprocalProfile(AlphaProfile):
    """``alpha(x) = 1/x + 1/(1/2 - x) - 8``; an alternative admissible profile."""

    name = "reciprocal"

    def alpha(self, x):
        x = self._check_domain(x)
        return 1 / x + 1 / (0.5 - x) - 8.0

    def alpha_prime(self, x):
        x = self._check_domain(x)
        return -1 / x**2 + 1 / (0.5 - x) ** 2

    def alpha_second(self, x):
        x = self._check_domain(x)
        return 2 / x**3 + 2 / (0.5 - x) ** 3

    def tangent(self, x):
        z = np.mod(np.asarray(x, dtype=float), 0.5)
        w = 0.5 - z
        return z * z * w * w, z * z - w * w


PROFILES = {"logsine": LogSineProfile, "reciprocal": ReciprocalProfile}


def make_profile(name: str) -> AlphaProfile:
    try:
        return PROFILES[name]()
    except KeyError:
        raise ValueError(f"unknown alpha profile {name!r}; choose from {sorted(PROFILES)}") from None


DEFAULT_PROFILE = LogSineProfile()


@dataclass(frozen=True)
class ModelFoliations:
    """The pair (F^s, F^u) on T1 for a given profile."""

    profile: AlphaProfile = DEFAULT_PROFILE

    def s_direction(self, x):
        dx, dy = self.profile.tangent(wrap01(np.asarray(x, dtype=float)))
        return canonical_angle(np.arctan2(dy, dx))

    def u_direction(self, x):
        return self.s_direction(wrap01(np.asarray(x, dtype=float) - 0.25))

    def s_direction_at(self, x, y):
        """Direction at a point of T1; leaves are y-translation invariant."""
        return self.s_direction(x) + 0.0 * np.asarray(y, dtype=float)

    def u_direction_at(self, x, y):
        return self.u_direction(x) + 0.0 * np.asarray(y, dtype=float)

    def s_vector(self, x):
        th = self.s_direction(x)
        return np.stack([np.cos(th), np.sin(th)], axis=-1)

    def u_vector(self, x):
        th = self.u_direction(x)
        return np.stack([np.cos(th), np.sin(th)], axis=-1)

    def margin(self, x):
        """Angle between the s- and u-leaves through x, mod pi."""
        return angle_distance(self.s_direction(x), self.u_direction(x))

    def pair_margin(self, resolution: int = 4096):
        """Minimum angle between F^s and F^u over x in [0, 1).

        Coarse scan on ``resolution`` nodes, then golden-section refinement
        in a three-cell window around the coarse argmin.  Returns
        ``(min_angle, argmin_x)``.
        """
        if resolution < 16:
            raise ValueError("resolution must be >= 16")
        xs = np.arange(resolution) / resolution
        vals = self.margin(xs)
        if np.min(vals) < 1e-12:
            bad = xs[np.argmin(vals)]
            raise ArithmeticError(f"foliations are tangent near x = {bad:.6g}: profile bug")
        i = int(np.argmin(vals))
        h = 1.0 / resolution
        x_best, v_best = golden_section(lambda x: float(self.margin(x)), xs[i] - 1.5 * h,
                                        xs[i] + 1.5 * h, GOLDEN_TOL)
        if v_best > vals[i]:
            x_best, v_best = xs[i], float(vals[i])
        return v_best, float(wrap01(x_best))


def golden_section(f, a: float, b: float, tol: float = 1e-10, max_iter: int = 200):
    """Minimise a unimodal ``f`` on [a, b]; returns ``(x, f(x))``."""
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if b - a < tol:
            break
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def logsine_min_angle() -> float:
    """Closed-form minimum angle for the log-sine profile.

    The slopes are ``-2 pi cot u`` and ``2 pi tan u`` (u = 2 pi x), whose
    product is ``-4 pi^2``; the acute angle between them is smallest where
    ``|sin 2u| = 1``.
    """
    return float(np.arctan(4 * np.pi / (4 * np.pi**2 - 1)))
