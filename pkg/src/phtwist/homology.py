"""Action of the twist on the rank-2 sublattice <[g2], [g1]> of H_1(M).

``g1`` is a loop parallel to the source periodic orbits that misses T1;
``g2`` crosses T1 exactly once.  Classes are integer pairs ``(a, b)``
meaning ``a[g2] + b[g1]``.  All arithmetic is on Python ints, so nothing
overflows.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

Matrix = tuple[tuple[int, int], tuple[int, int]]


@dataclass(frozen=True)
class HomologyClass:
    a: int  # coefficient of [g2]
    b: int  # coefficient of [g1]

    def __add__(self, other: "HomologyClass") -> "HomologyClass":
        return HomologyClass(self.a + other.a, self.b + other.b)

    def __neg__(self) -> "HomologyClass":
        return HomologyClass(-self.a, -self.b)


GAMMA_1 = HomologyClass(0, 1)
GAMMA_2 = HomologyClass(1, 0)


def twist_action(k: int) -> Matrix:
    """Matrix of ``G_*^k`` (and of ``f^k``, since X_N is isotopic to the
    identity): ``(a, b) -> (a, b + k a)``."""
    k = int(k)
    return ((1, 0), (k, 1))


def matmul(p: Matrix, q: Matrix) -> Matrix:
    return tuple(tuple(sum(p[i][m] * q[m][j] for m in range(2)) for j in range(2))
                 for i in range(2))


def act(mat: Matrix, cls: HomologyClass) -> HomologyClass:
    return HomologyClass(mat[0][0] * cls.a + mat[0][1] * cls.b,
                         mat[1][0] * cls.a + mat[1][1] * cls.b)


IDENTITY: Matrix = ((1, 0), (0, 1))


def is_isotopy_obstructed(k: int) -> bool:
    """True when ``f^k`` acts non-trivially on homology."""
    return twist_action(k) != IDENTITY


class Side(Enum):
    ATTRACTOR = "M+"
    REPELLER = "M-"

    def other(self) -> "Side":
        return Side.REPELLER if self is Side.ATTRACTOR else Side.ATTRACTOR


@dataclass(frozen=True)
class Segment:
    """Piece of a loop from one side of the separating tori to another.

    ``crossings`` lists signed crossings in order, e.g. ``(("T1", +1),)``;
    +1 means crossing from M- into M+ (the direction of the flow).
    """

    start: Side
    end: Side
    crossings: tuple[tuple[str, int], ...] = ()

    def __post_init__(self):
        side = self.start
        for torus, sign in self.crossings:
            if torus not in ("T1", "T2") or sign not in (1, -1):
                raise ValueError(f"bad crossing tag {(torus, sign)!r}")
            expected = Side.REPELLER if sign > 0 else Side.ATTRACTOR
            if side is not expected:
                raise ValueError(f"crossing {(torus, sign)!r} starts on the wrong side {side.value}")
            side = side.other()
        if side is not self.end:
            raise ValueError("crossing tags inconsistent with segment endpoints")


@dataclass(frozen=True)
class CrossingPath:
    segments: tuple[Segment, ...]

    def __post_init__(self):
        segs = self.segments
        for s, t in zip(segs, segs[1:]):
            if s.end is not t.start:
                raise ValueError("consecutive segments do not connect")

    @property
    def closed(self) -> bool:
        return bool(self.segments) and self.segments[-1].end is self.segments[0].start

    def __add__(self, other: "CrossingPath") -> "CrossingPath":
        return CrossingPath(self.segments + other.segments)

    def refine(self) -> "CrossingPath":
        """Split every segment at each of its crossings; crossings unchanged."""
        out = []
        for seg in self.segments:
            side = seg.start
            if not seg.crossings:
                out.append(Segment(side, side))
                out.append(Segment(side, side))
                continue
            for tag in seg.crossings:
                out.append(Segment(side, side.other(), (tag,)))
                side = side.other()
                out.append(Segment(side, side))
        return CrossingPath(tuple(out))


def crossing_number(path: CrossingPath, torus: str = "T1") -> int:
    """Signed count of crossings of ``torus``: the integral along the loop
    of a closed 1-form supported near that torus with total mass one."""
    if not path.closed:
        raise ValueError("crossing number is defined for closed paths only")
    return sum(sign for seg in path.segments for name, sign in seg.crossings if name == torus)


def gamma1_path() -> CrossingPath:
    """Loop pushed off T1, running along a source orbit inside M-."""
    return CrossingPath((Segment(Side.REPELLER, Side.REPELLER),))


def gamma2_path() -> CrossingPath:
    """Loop entering M+ through T1 and coming back through T2."""
    return CrossingPath((Segment(Side.REPELLER, Side.ATTRACTOR, (("T1", 1),)),
                         Segment(Side.ATTRACTOR, Side.REPELLER, (("T2", -1),))))


def bump_form_integral(thetas: Sequence[float]) -> float:
    """Integral of ``f(theta) d theta`` along a polyline in the collar
    coordinate ``theta`` of ``U ~ T1 x [-1, 1]``.

    ``f = (15/16)(1 - theta^2)^2`` on (-1, 1), zero outside, normalised to
    total mass one; the form is exact on the collar so only the endpoints of
    each piece matter.
    """
    def antiderivative(th):
        th = max(-1.0, min(1.0, float(th)))
        return (15.0 / 16.0) * (th - 2.0 * th**3 / 3.0 + th**5 / 5.0) + 0.5

    return sum(antiderivative(b) - antiderivative(a) for a, b in zip(thetas, thetas[1:]))


def report(k: int) -> dict:
    return {"schemaVersion": 1, "k": int(k), "matrix": [list(r) for r in twist_action(k)],
            "obstructed": is_isotopy_obstructed(k)}
