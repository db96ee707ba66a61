"""Static SVG renderings: ribbon projections and direction-sphere diagrams."""

from __future__ import annotations

from xml.sax.saxutils import quoteattr

import numpy as np

from .crossings import CrossingReport, projection_basis
from .geometry import ClosedCurve, Ribbon
from .framing import TwistSemicircle, bisecting_phase, chord_fan, reference_normal

SIZE = 600
MARGIN = 40

_STYLE = """
.edge-a { fill: none; stroke: #1f5fbf; stroke-width: 1.5; }
.edge-b { fill: none; stroke: #d0432b; stroke-width: 1.5; }
.crossing { stroke: black; stroke-width: 0.8; }
.crossing.local { fill: #f2c200; }
.crossing.nonlocal { fill: #3aa655; }
.crossing.edge_self { fill: #999999; }
.label { font: 11px sans-serif; }
.sphere { fill: none; stroke: #bbbbbb; stroke-width: 1; }
.indicatrix-plus { fill: none; stroke: #1f5fbf; stroke-width: 1.2; }
.indicatrix-minus { fill: none; stroke: #7fa7e0; stroke-width: 1.2; }
.fan { fill: none; stroke: #d0432b; stroke-width: 1.5; }
.semicircle { fill: none; stroke: #e06fb0; stroke-width: 2; }
.back { stroke-dasharray: 3 3; opacity: 0.5; }
"""


def _document(body: list[str], title: str) -> str:
    head = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" '
        f'viewBox="0 0 {SIZE} {SIZE}">',
        f"<title>{title}</title>",
        f"<style>{_STYLE}</style>",
    ]
    return "\n".join(head + body + ["</svg>", ""])


class _Viewport:
    """Maps a 2D bounding box onto the square canvas, preserving aspect ratio, y up."""

    def __init__(self, xy: np.ndarray):
        lo = xy.min(axis=0)
        hi = xy.max(axis=0)
        span = float(max(hi[0] - lo[0], hi[1] - lo[1], 1e-12))
        self.scale = (SIZE - 2 * MARGIN) / span
        self.centre = (lo + hi) / 2

    def __call__(self, p) -> tuple[float, float]:
        x = SIZE / 2 + (p[0] - self.centre[0]) * self.scale
        y = SIZE / 2 - (p[1] - self.centre[1]) * self.scale
        return round(float(x), 3), round(float(y), 3)


def _path(points, view: _Viewport, cls: str, closed: bool) -> str:
    coords = [view(p) for p in points]
    d = "M " + " L ".join(f"{x} {y}" for x, y in coords) + (" Z" if closed else "")
    return f'<path class={quoteattr(cls)} d="{d}"/>'


def projection_svg(ribbon: Ribbon, report: CrossingReport) -> str:
    """Both ribbon edges projected along ``report.direction`` plus marked crossings.

    Each marker carries ``data-sign``, ``data-kind``, ``data-s`` and
    ``data-s-prime`` attributes.
    """
    o, e1, e2 = projection_basis(report.direction)
    a = np.stack([ribbon.axis.points @ e1, ribbon.axis.points @ e2], axis=1)
    b = np.stack([ribbon.edge.points @ e1, ribbon.edge.points @ e2], axis=1)
    view = _Viewport(np.vstack([a, b]))
    body = [_path(a, view, "edge-a", True), _path(b, view, "edge-b", True)]
    for c in report.crossings:
        x, y = view(c.position)
        label = "+" if c.sign > 0 else "−"
        body.append(
            f'<circle class="crossing {c.kind}" cx="{x}" cy="{y}" r="5" '
            f'data-sign="{c.sign}" data-kind="{c.kind}" data-curves="{c.curves}" '
            f'data-s="{c.params[0]:.6f}" data-s-prime="{c.params[1]:.6f}"/>'
        )
        if c.curves == "ab":
            body.append(f'<text class="label" x="{x + 7}" y="{y - 7}">{label} {c.kind}</text>')
    title = "projection along ({:.4f}, {:.4f}, {:.4f})".format(*o)
    return _document(body, title)


def _sphere_runs(points: np.ndarray, o, e1, e2):
    # split a spherical polyline into maximal runs on the near / far hemisphere
    depth = points @ o
    xy = np.stack([points @ e1, points @ e2], axis=1)
    runs = []
    start = 0
    for k in range(1, len(points) + 1):
        if k == len(points) or (depth[k] >= 0) != (depth[start] >= 0):
            stop = min(k + 1, len(points))
            runs.append((xy[start:stop], bool(depth[start] >= 0)))
            start = k
    return runs


def sphere_svg(curve: ClosedCurve, index: int = 0, view=(1.0, 0.6, 0.8)) -> str:
    """Orthographic view of the direction sphere.

    Shows the tangent indicatrix +t and -t, the chord fan at sample ``index``
    and the semicircle that bisects it. Far-side arcs are dashed.
    """
    o, e1, e2 = projection_basis(view)
    fan = chord_fan(curve, index)
    t = fan.tangent
    semi = TwistSemicircle(fan.base_index, bisecting_phase(fan), t, reference_normal(t))
    box = _Viewport(np.array([[-1.0, -1.0], [1.0, 1.0]]))
    cx, cy = box((0.0, 0.0))
    body = [f'<circle class="sphere" cx="{cx}" cy="{cy}" r="{round(box.scale, 3)}"/>']
    loops = (
        (np.vstack([curve.tangents, curve.tangents[:1]]), "indicatrix-plus"),
        (np.vstack([-curve.tangents, -curve.tangents[:1]]), "indicatrix-minus"),
        (fan.fan.points, "fan"),
        (semi.points(max(32, curve.n // 4)), "semicircle"),
    )
    for pts, cls in loops:
        for xy, front in _sphere_runs(pts, o, e1, e2):
            if len(xy) > 1:
                body.append(_path(xy, box, cls if front else f"{cls} back", False))
    return _document(body, f"direction sphere, chord fan at sample {fan.base_index}")
