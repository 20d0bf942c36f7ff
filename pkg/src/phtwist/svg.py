"""Minimal SVG writers for the foliation figure and the displacement heat map."""
from __future__ import annotations

import numpy as np

from .foliations import ModelFoliations

SIZE = 600
PAD = 20


def _xy(x, y):
    return PAD + x * SIZE, PAD + (1.0 - y) * SIZE


def _polyline(pts, cls):
    coords = " ".join(f"{a:.2f},{b:.2f}" for a, b in (_xy(x, y) for x, y in pts))
    return f'<polyline class="{cls}" points="{coords}"/>'


def integral_curve(direction, x0: float, y0: float, length: float = 2.5, step: float = 2e-3,
                   heading: float = 1.0):
    """Integral curve of a line field given as an angle function of x.

    RK4 in arclength with orientation continuity (the field is a line
    field, so each stage is flipped to agree with the running heading).
    Returns a list of polylines, split where the curve wraps around the
    torus.
    """
    def vec(x, prev):
        th = float(direction(x % 1.0))
        v = np.array([np.cos(th), np.sin(th)])
        return v if v @ prev >= 0 else -v

    p = np.array([x0, y0], dtype=float)
    prev = heading * np.array([1.0, 0.0])
    if abs(vec(x0, prev) @ prev) < 1e-12:
        prev = np.array([0.0, heading])
    prev = vec(x0, prev)
    pieces, cur = [], [tuple(p)]
    for _ in range(int(length / step)):
        k1 = vec(p[0], prev)
        k2 = vec(p[0] + 0.5 * step * k1[0], k1)
        k3 = vec(p[0] + 0.5 * step * k2[0], k2)
        k4 = vec(p[0] + step * k3[0], k3)
        d = (k1 + 2 * k2 + 2 * k3 + k4) / 6.0
        prev = d / np.linalg.norm(d)
        q = p + step * d
        wrapped = np.floor(q)
        if np.any(wrapped != 0):
            # finish the piece at the edge, restart on the opposite side
            cur.append(tuple(q))
            pieces.append(cur)
            q = q - wrapped
            cur = [tuple(q - step * d)]
        cur.append(tuple(q))
        p = q
    pieces.append(cur)
    return pieces


def _clip(pieces):
    return [[(min(max(x, 0.0), 1.0), min(max(y, 0.0), 1.0)) for x, y in pc] for pc in pieces]


def foliation_curves(fol: ModelFoliations, n_seeds: int = 12, length: float = 2.5,
                     step: float = 2e-3):
    """Integral curves of both foliations from seeds on y = 1/2.

    u-curves are seeded at the s-seeds shifted by 1/4 in x.
    """
    seeds = (np.arange(n_seeds) + 0.5) / n_seeds
    out = {"s": [], "u": []}
    for x0 in seeds:
        for heading in (1.0, -1.0):
            out["s"].extend(integral_curve(fol.s_direction, x0, 0.5, length, step, heading))
            out["u"].extend(integral_curve(fol.u_direction, (x0 + 0.25) % 1.0, 0.5, length,
                                           step, heading))
    return out


def foliations_svg(fol: ModelFoliations, n_seeds: int = 12, step: float = 2e-3) -> str:
    curves = foliation_curves(fol, n_seeds, step=step)
    w = SIZE + 2 * PAD
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{w}" viewBox="0 0 {w} {w}">',
        "<style>polyline{fill:none;stroke-width:1}"
        ".s-leaf{stroke:#1f5fbf}.u-leaf{stroke:#c8402a}"
        ".compact-leaf{stroke-width:3}</style>",
        f'<rect x="{PAD}" y="{PAD}" width="{SIZE}" height="{SIZE}" fill="white" stroke="black"/>',
        '<g id="s-foliation">',
        *(_polyline(pc, "s-leaf") for pc in _clip(curves["s"]) if len(pc) > 1),
        "</g>",
        '<g id="u-foliation">',
        *(_polyline(pc, "u-leaf") for pc in _clip(curves["u"]) if len(pc) > 1),
        "</g>",
        '<g id="compact-leaves">',
    ]
    for x, kind in ((0.0, "s"), (0.5, "s"), (0.25, "u"), (0.75, "u")):
        x0, y0 = _xy(x, 0.0)
        x1, y1 = _xy(x, 1.0)
        parts.append(f'<line class="compact-leaf {kind}-leaf" data-x="{x}" '
                     f'x1="{x0:.2f}" y1="{y0:.2f}" x2="{x1:.2f}" y2="{y1:.2f}" '
                     f'stroke="{"#1f5fbf" if kind == "s" else "#c8402a"}" stroke-width="3"/>')
    parts += ["</g>", "</svg>", ""]
    return "\n".join(parts)


def heatmap_svg(values: np.ndarray, title: str = "") -> str:
    """Heat map of a 2-D array indexed ``[i_x, i_y]`` over the unit square."""
    values = np.asarray(values, dtype=float)
    nx, ny = values.shape
    finite = values[np.isfinite(values)]
    vmax = float(finite.max()) if finite.size and finite.max() > 0 else 1.0
    w = SIZE + 2 * PAD
    cw, ch = SIZE / nx, SIZE / ny
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{w + 20}" '
             f'viewBox="0 0 {w} {w + 20}">',
             f'<text x="{PAD}" y="{w + 12}" font-size="12">{title} (max {vmax:.4g})</text>']
    for i in range(nx):
        for j in range(ny):
            v = values[i, j]
            if not np.isfinite(v):
                color = "#888888"
            else:
                level = int(round(255 * (1.0 - v / vmax)))
                color = f"#ff{level:02x}{level:02x}"
            x, y = _xy(i / nx, (j + 1) / ny)
            parts.append(f'<rect x="{x:.2f}" y="{y:.2f}" width="{cw:.2f}" height="{ch:.2f}" '
                         f'fill="{color}"/>')
    parts += ["</svg>", ""]
    return "\n".join(parts)
