"""Signed crossings in planar projections and their average over the direction sphere.

A crossing's sign is +1 when (tangent of the over strand) x (tangent of the
under strand) points toward the viewer, who sits at +infinity along o. Over
any generic direction the signed crossings between the two ribbon edges sum
to 2 Lk; the signed self-crossings of the axis average to Wr, and the local
edge-edge crossings average to 2 Tw.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import _kernels
from .errors import DegenerateDirection, TooManyRetries, ValidationError
from .geometry import ClosedCurve, Ribbon, _fibonacci_sphere

SEGMENT_TOL = 1e-12
TANGENT_ANGLE_TOL = 1e-6
MAX_REDRAW_FRACTION = 0.01


@dataclass(frozen=True)
class Crossing:
    kind: str  # "local", "nonlocal", "edge_self" or "unclassified" (a-b, before classify)
    sign: int
    params: tuple[float, float]
    position: tuple[float, float]
    curves: str  # "ab", "aa" or "bb"

    def to_json(self) -> dict:
        return {"kind": self.kind, "sign": self.sign, "s": self.params[0], "s_prime": self.params[1],
                "position": list(self.position), "curves": self.curves}


@dataclass
class CrossingReport:
    direction: np.ndarray
    crossings: list[Crossing]
    totals: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.totals:
            self.totals = _totals(self.crossings)

    def of_kind(self, kind: str) -> list[Crossing]:
        return [c for c in self.crossings if c.kind == kind]

    def to_json(self) -> dict:
        return {"direction": [float(x) for x in self.direction],
                "totals": self.totals,
                "crossings": [c.to_json() for c in self.crossings]}


def _totals(crossings) -> dict:
    out = {"local": 0, "nonlocal": 0, "unclassified": 0, "ab": 0, "aa": 0, "bb": 0}
    for c in crossings:
        out[c.curves] += c.sign
        if c.curves == "ab":
            out[c.kind] += c.sign
    out["edge_self"] = out["aa"] + out["bb"]
    return out


@dataclass(frozen=True)
class SphereAverage:
    estimate: float
    std_error: Optional[float]
    m: int
    seed: int
    redraws: int = 0

    def to_json(self) -> dict:
        return {"estimate": self.estimate, "std_error": self.std_error, "m": self.m,
                "seed": self.seed, "redraws": self.redraws}


def projection_basis(o) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Unit o and an orthonormal pair (e1, e2) with e1 x e2 = o."""
    o = np.asarray(o, dtype=float)
    norm = np.linalg.norm(o)
    if not norm > 0:
        raise ValidationError("projection direction must be nonzero")
    o = o / norm
    # screen x follows world x when looking down z
    ref = np.array([0.0, 1.0, 0.0]) if abs(o[1]) < 0.9 else np.array([0.0, 0.0, 1.0])
    e1 = np.cross(ref, o)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(o, e1)
    return o, e1, e2


def _project(points, o, e1, e2):
    return np.ascontiguousarray(np.stack([points @ e1, points @ e2], axis=1)), np.ascontiguousarray(points @ o)


def _check_view(curve: ClosedCurve, o: np.ndarray) -> None:
    cos_tol = np.cos(TANGENT_ANGLE_TOL)
    seg = curve.segments / np.linalg.norm(curve.segments, axis=1)[:, None]
    if np.max(np.abs(curve.tangents @ o)) > cos_tol or np.max(np.abs(seg @ o)) > cos_tol:
        raise DegenerateDirection("projection direction is (nearly) tangent to the curve")


def _raw(pa, za, pb, zb, same):
    degenerate, i, j, tp, tq, sg = _kernels.segment_crossings(pa, za, pb, zb, same, SEGMENT_TOL)
    if degenerate:
        raise DegenerateDirection("projected segments touch at an endpoint or overlap")
    return (np.asarray(i, dtype=np.int64), np.asarray(j, dtype=np.int64),
            np.asarray(tp, dtype=float), np.asarray(tq, dtype=float), np.asarray(sg, dtype=np.int64))


def _projected_crossings(curves, o):
    o, e1, e2 = projection_basis(o)
    for c in curves:
        _check_view(c, o)
    return o, [_project(c.points, o, e1, e2) for c in curves]


def project_and_count(a: ClosedCurve, b: ClosedCurve, o) -> CrossingReport:
    """All transversal crossings of the projections of ``a`` and ``b`` along ``o``."""
    o, ((pa, za), (pb, zb)) = _projected_crossings((a, b), o)
    crossings = []
    for label, (p, z, n), (q, w, m), same in (
        ("ab", (pa, za, a.n), (pb, zb, b.n), False),
        ("aa", (pa, za, a.n), (pa, za, a.n), True),
        ("bb", (pb, zb, b.n), (pb, zb, b.n), True),
    ):
        i, j, tp, tq, sg = _raw(p, z, q, w, same)
        for k in range(len(i)):
            pos = p[i[k]] + tp[k] * (p[(i[k] + 1) % n] - p[i[k]])
            crossings.append(Crossing(
                kind="unclassified" if label == "ab" else "edge_self",
                sign=int(sg[k]),
                params=(float((i[k] + tp[k]) / n), float((j[k] + tq[k]) / m)),
                position=(float(pos[0]), float(pos[1])),
                curves=label,
            ))
    return CrossingReport(o, crossings)


def _circ(x, y):
    d = np.abs(np.asarray(x) - np.asarray(y)) % 1.0
    return np.minimum(d, 1.0 - d)


def _nonlocal_mask(ab_s, ab_sp, aa_s1, aa_s2, delta):
    # an edge-edge crossing is nonlocal when it shadows an axis self-crossing
    if len(ab_s) == 0 or len(aa_s1) == 0:
        return np.zeros(len(ab_s), dtype=bool)
    s = np.asarray(ab_s)[:, None]
    sp = np.asarray(ab_sp)[:, None]
    s1 = np.asarray(aa_s1)[None, :]
    s2 = np.asarray(aa_s2)[None, :]
    direct = (_circ(s, s1) <= delta) & (_circ(sp, s2) <= delta)
    swapped = (_circ(s, s2) <= delta) & (_circ(sp, s1) <= delta)
    return np.any(direct | swapped, axis=1)


def classify(report: CrossingReport, ribbon: Ribbon) -> CrossingReport:
    """Label each edge-edge crossing local (ribbon edge-on) or nonlocal (ribbon over itself).

    A crossing at parameters (s, s') is nonlocal when some self-crossing of the
    axis at (s1, s2) lies within ``ribbon.delta_local`` of it in both
    parameters (either order); every other edge-edge crossing is local.
    """
    ab = [c for c in report.crossings if c.curves == "ab"]
    aa = [c for c in report.crossings if c.curves == "aa"]
    mask = _nonlocal_mask([c.params[0] for c in ab], [c.params[1] for c in ab],
                          [c.params[0] for c in aa], [c.params[1] for c in aa], ribbon.delta_local)
    labels = iter(np.where(mask, "nonlocal", "local"))
    out = [Crossing(str(next(labels)), c.sign, c.params, c.position, c.curves) if c.curves == "ab" else c
           for c in report.crossings]
    return CrossingReport(report.direction, out)


def ribbon_crossings(ribbon: Ribbon, o) -> CrossingReport:
    return classify(project_and_count(ribbon.axis, ribbon.edge, o), ribbon)


# ---------------------------------------------------------------------------
# fast per-direction counters used by the Monte Carlo averages


def self_crossing_sum(curve: ClosedCurve, o) -> int:
    """Signed number of self-crossings of ``curve`` seen along ``o``."""
    o, ((p, z),) = _projected_crossings((curve,), o)
    return int(np.sum(_raw(p, z, p, z, True)[4]))


def edge_crossing_sum(ribbon: Ribbon, o) -> int:
    """Signed number of crossings between the two ribbon edges seen along ``o`` (= 2 Lk)."""
    o, ((pa, za), (pb, zb)) = _projected_crossings((ribbon.axis, ribbon.edge), o)
    return int(np.sum(_raw(pa, za, pb, zb, False)[4]))


def local_crossing_sum(ribbon: Ribbon, o) -> int:
    """Signed number of local edge-edge crossings seen along ``o``."""
    a, b = ribbon.axis, ribbon.edge
    o, ((pa, za), (pb, zb)) = _projected_crossings((a, b), o)
    i, j, tp, tq, sg = _raw(pa, za, pb, zb, False)
    si, sj, stp, stq, _ = _raw(pa, za, pa, za, True)
    mask = _nonlocal_mask((i + tp) / a.n, (j + tq) / b.n, (si + stp) / a.n, (sj + stq) / a.n,
                          ribbon.delta_local)
    return int(np.sum(sg[~mask]))


def random_directions(rng: np.random.Generator, k: int) -> np.ndarray:
    v = rng.standard_normal((k, 3))
    return v / np.linalg.norm(v, axis=1)[:, None]


def sphere_average(counter: Callable[[np.ndarray], float], m: int, seed: int = 0,
                   mode: str = "random") -> SphereAverage:
    """Average ``counter`` over m directions on the unit sphere.

    ``mode="random"`` draws i.i.d. uniform directions from a generator seeded
    with ``seed``; degenerate directions are replaced by fresh draws. The
    ``"fibonacci"`` mode sweeps a deterministic lattice and reports no
    standard error.
    """
    if m < 100:
        raise ValidationError(f"need m >= 100 directions, got {m}")
    rng = np.random.default_rng(seed)
    limit = int(MAX_REDRAW_FRACTION * m)
    if mode == "random":
        directions = random_directions(rng, m)
    elif mode == "fibonacci":
        directions = _fibonacci_sphere(m)
    else:
        raise ValueError(f"unknown sampling mode {mode!r}")
    values = np.empty(m)
    redraws = 0
    for k in range(m):
        o = directions[k]
        while True:
            try:
                values[k] = counter(o)
                break
            except DegenerateDirection:
                redraws += 1
                if redraws > limit:
                    raise TooManyRetries(f"{redraws} degenerate directions out of {m}") from None
                if mode == "random":
                    o = random_directions(rng, 1)[0]
                else:
                    o = o + 1e-4 * random_directions(rng, 1)[0]
                    o /= np.linalg.norm(o)
    estimate = float(np.sum(values) / m)
    se = float(np.std(values, ddof=1) / np.sqrt(m)) if mode == "random" else None
    return SphereAverage(estimate, se, m, seed, redraws)


def twist_mc(ribbon: Ribbon, m: int, seed: int = 0) -> SphereAverage:
    """Half the direction-averaged signed local crossing number."""
    avg = sphere_average(lambda o: local_crossing_sum(ribbon, o), m, seed)
    return SphereAverage(avg.estimate / 2, avg.std_error / 2, m, seed, avg.redraws)


def writhe_mc(curve: ClosedCurve, m: int, seed: int = 0) -> SphereAverage:
    """Direction-averaged signed self-crossing number of the curve."""
    return sphere_average(lambda o: self_crossing_sum(curve, o), m, seed)
