"""Closed curves, framings, ribbons and direction-sphere utilities.

Curves are sampled uniformly in an arbitrary parameter s in [0, 1); sample N
wraps to sample 0. Derivatives with respect to s use the periodic fourth-order
central stencil [1, -8, 0, 8, -1] / 12h.
"""

from __future__ import annotations

import contextlib
import dataclasses
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Optional, Sequence

import numpy as np

from . import _kernels
from .errors import (
    AntipodalEdge,
    BadParameter,
    ClosureGap,
    DegenerateSegment,
    DiscontinuousFraming,
    ParallelToTangent,
    SelfIntersecting,
    TooFewSamples,
    UndefinedNormal,
    UnknownFamily,
    ValidationError,
    ZeroDerivative,
)

MIN_SAMPLES = 16


@dataclass(frozen=True)
class Tolerances:
    unit_norm: float = 1e-12
    perpendicular: float = 1e-10
    self_intersection: float = 1e-9
    zero_derivative: float = 1e-12
    undefined_normal: float = 1e-8
    antipodal: float = 1e-12
    # closure gap allowed relative to the median spacing
    closure_gap_factor: float = 4.0


TOLERANCES = Tolerances()


@contextlib.contextmanager
def override_tolerances(**changes):
    """Temporarily replace library tolerances, e.g. ``override_tolerances(perpendicular=1e-8)``."""
    global TOLERANCES
    saved = TOLERANCES
    TOLERANCES = dataclasses.replace(saved, **changes)
    try:
        yield TOLERANCES
    finally:
        TOLERANCES = saved


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float, copy=True)
    a.setflags(write=False)
    return a


def periodic_derivative(values: np.ndarray) -> np.ndarray:
    """d/ds of samples on the periodic grid s_i = i/N (fourth-order central differences)."""
    v = np.asarray(values, dtype=float)
    n = v.shape[0]
    h = 1.0 / n
    return (np.roll(v, 2, axis=0) - 8.0 * np.roll(v, 1, axis=0)
            + 8.0 * np.roll(v, -1, axis=0) - np.roll(v, -2, axis=0)) / (12.0 * h)


def _unit(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


@dataclass(frozen=True, eq=False)
class ClosedCurve:
    """N points of a closed space curve; use :func:`from_samples` for validated construction."""

    points: np.ndarray
    name: str = "curve"

    def __post_init__(self):
        pts = _readonly(self.points)
        if pts.ndim != 2 or pts.shape[1] != 3:
            raise ValidationError(f"expected (N, 3) samples, got shape {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise ValidationError("samples must be finite")
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def s(self) -> np.ndarray:
        return np.arange(self.n) / self.n

    @cached_property
    def velocity(self) -> np.ndarray:
        """da/ds at the samples."""
        return _readonly(periodic_derivative(self.points))

    @cached_property
    def speed(self) -> np.ndarray:
        return _readonly(np.linalg.norm(self.velocity, axis=1))

    @cached_property
    def tangents(self) -> np.ndarray:
        sp = self.speed
        bad = np.flatnonzero(sp < TOLERANCES.zero_derivative)
        if bad.size:
            raise ZeroDerivative(f"|da/ds| vanishes at samples {bad[:5].tolist()}")
        return _readonly(self.velocity / sp[:, None])

    @cached_property
    def segments(self) -> np.ndarray:
        return _readonly(np.roll(self.points, -1, axis=0) - self.points)

    @cached_property
    def min_nonadjacent_distance(self) -> float:
        return float(_kernels.min_nonadjacent_distance(np.ascontiguousarray(self.points)))

    def reversed(self) -> "ClosedCurve":
        return ClosedCurve(self.points[::-1], self.name + "_reversed")

    def transformed(self, rotation=None, translation=None, name=None) -> "ClosedCurve":
        pts = self.points
        if rotation is not None:
            pts = pts @ np.asarray(rotation, dtype=float).T
        if translation is not None:
            pts = pts + np.asarray(translation, dtype=float)
        return ClosedCurve(pts, name or self.name)

    def mirrored(self, axis: int = 2) -> "ClosedCurve":
        pts = self.points.copy()
        pts[:, axis] *= -1.0
        return ClosedCurve(pts, self.name + "_mirror")

    def subsampled(self, step: int = 2) -> "ClosedCurve":
        return ClosedCurve(self.points[::step], self.name)

    def to_json(self) -> dict:
        return {"name": self.name, "samples": self.points.tolist()}


def from_samples(points: Sequence[Sequence[float]], name: str = "curve") -> ClosedCurve:
    """Validate raw samples into a :class:`ClosedCurve`.

    The seam point must not be repeated: samples[0] is joined to samples[-1]
    implicitly.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 3:
        raise ValidationError(f"expected a list of 3-vectors, got shape {pts.shape}")
    if pts.shape[0] < MIN_SAMPLES:
        raise TooFewSamples(f"need at least {MIN_SAMPLES} samples, got {pts.shape[0]}")
    curve = ClosedCurve(pts, name)
    lengths = np.linalg.norm(curve.segments, axis=1)
    tiny = np.flatnonzero(lengths <= TOLERANCES.self_intersection)
    if tiny.size:
        if tiny[-1] == curve.n - 1:
            raise DegenerateSegment("last sample repeats the first; do not duplicate the seam point")
        raise DegenerateSegment(f"consecutive samples coincide at {tiny[:5].tolist()}")
    median = float(np.median(lengths[:-1]))
    if lengths[-1] > TOLERANCES.closure_gap_factor * median:
        raise ClosureGap(f"gap between last and first sample ({lengths[-1]:.3g}) "
                         f"far exceeds median spacing ({median:.3g})")
    if curve.min_nonadjacent_distance < TOLERANCES.self_intersection:
        raise SelfIntersecting(f"non-adjacent segments closer than {TOLERANCES.self_intersection}")
    return curve


# ---------------------------------------------------------------------------
# built-in parametric families, all evaluated at t = 2*pi*s

def _circle(t, radius=1.0):
    if radius <= 0:
        raise BadParameter("radius must be positive")
    return np.stack([radius * np.cos(t), radius * np.sin(t), np.zeros_like(t)], axis=1)


def _paper_fig2(t, amplitude=0.3):
    # torus curve (-a cos 2t, cos t (1 + a sin 2t), sin t (1 + a sin 2t))
    if not 0 < amplitude < 1:
        raise BadParameter("amplitude must lie in (0, 1)")
    r = 1.0 + amplitude * np.sin(2 * t)
    return np.stack([-amplitude * np.cos(2 * t), np.cos(t) * r, np.sin(t) * r], axis=1)


def _torus_knot(t, p=2, q=3, major=2.0, minor=1.0):
    if int(p) != p or int(q) != q or p == 0 or q == 0:
        raise BadParameter("p and q must be nonzero integers")
    p, q = int(p), int(q)
    if math.gcd(p, q) != 1:
        raise BadParameter(f"gcd(p, q) must be 1, got p={p}, q={q}")
    if not 0 < minor < major:
        raise BadParameter("need 0 < minor < major")
    r = major + minor * np.cos(q * t)
    return np.stack([r * np.cos(p * t), r * np.sin(p * t), minor * np.sin(q * t)], axis=1)


def _figure_eight(t, height=0.3, phase=0.0):
    # planar lemniscate-like shadow with one self-crossing, lifted apart in z
    if height == 0:
        raise BadParameter("height must be nonzero")
    t = t + phase
    return np.stack([np.cos(t), 0.5 * np.sin(2 * t), height * np.sin(t)], axis=1)


FAMILIES: dict[str, Callable[..., np.ndarray]] = {
    "circle": _circle,
    "paper_fig2": _paper_fig2,
    "torus_knot": _torus_knot,
    "figure_eight": _figure_eight,
}


def from_parametric(family: str, n: int, **params) -> ClosedCurve:
    """Sample a built-in family uniformly in its parameter."""
    try:
        fn = FAMILIES[family]
    except KeyError:
        raise UnknownFamily(f"unknown family {family!r}; known: {sorted(FAMILIES)}") from None
    if int(n) != n or n < MIN_SAMPLES:
        raise TooFewSamples(f"need n >= {MIN_SAMPLES}, got {n}")
    t = 2 * np.pi * np.arange(int(n)) / int(n)
    try:
        pts = fn(t, **params)
    except TypeError as exc:
        raise BadParameter(str(exc)) from None
    label = family if not params else family + "(" + ",".join(f"{k}={v}" for k, v in sorted(params.items())) + ")"
    return from_samples(pts, name=label)


def resample_arclength(curve: ClosedCurve, n: int) -> ClosedCurve:
    """Resample to ``n`` points equally spaced in arc length (periodic cubic spline)."""
    from scipy.interpolate import CubicSpline

    pts = np.vstack([curve.points, curve.points[:1]])
    knots = np.concatenate([[0.0], np.cumsum(np.linalg.norm(curve.segments, axis=1))])
    spline = CubicSpline(knots, pts, bc_type="periodic")
    # refine the length estimate on the spline itself
    fine = np.linspace(0.0, knots[-1], 16 * len(knots) + 1)
    seg = np.linalg.norm(np.diff(spline(fine), axis=0), axis=1)
    arclen = np.concatenate([[0.0], np.cumsum(seg)])
    target = np.arange(n) * arclen[-1] / n
    return from_samples(spline(np.interp(target, arclen, fine)), name=curve.name)


def tangent_field(curve: ClosedCurve) -> np.ndarray:
    """Unit tangents t_i = a'(s_i) / |a'(s_i)|."""
    return np.array(curve.tangents)


# ---------------------------------------------------------------------------
# framings and ribbons


@dataclass(frozen=True, eq=False)
class Framing:
    """Unit normal field u_i, one vector per curve sample."""

    vectors: np.ndarray

    def __post_init__(self):
        v = _readonly(self.vectors)
        if v.ndim != 2 or v.shape[1] != 3:
            raise ValidationError(f"expected (N, 3) framing vectors, got shape {v.shape}")
        object.__setattr__(self, "vectors", v)

    @property
    def n(self) -> int:
        return self.vectors.shape[0]

    def check(self, curve: ClosedCurve) -> None:
        """Raise unless this framing is unit, perpendicular and continuous along ``curve``."""
        u = self.vectors
        if u.shape[0] != curve.n:
            raise ValidationError(f"framing has {u.shape[0]} vectors for a curve of {curve.n} samples")
        if np.max(np.abs(np.linalg.norm(u, axis=1) - 1.0)) > TOLERANCES.unit_norm:
            raise ValidationError("framing vectors are not unit length")
        if np.max(np.abs(np.einsum("ij,ij->i", u, curve.tangents))) > TOLERANCES.perpendicular:
            raise ValidationError("framing vectors are not perpendicular to the tangent")
        _check_continuity(u)

    def to_json(self, name: str = "framing") -> dict:
        return {"name": name, "u0": self.vectors.tolist()}


def _check_continuity(u: np.ndarray) -> None:
    dots = np.einsum("ij,ij->i", u, np.roll(u, -1, axis=0))
    flips = np.flatnonzero(dots <= 0.0)
    if flips.size:
        raise DiscontinuousFraming(flips.tolist())


def normalize_framing(curve: ClosedCurve, raw) -> Framing:
    """Project raw vectors onto the normal planes and scale them to unit length."""
    raw = np.asarray(raw, dtype=float)
    if raw.shape != (curve.n, 3):
        raise ValidationError(f"expected ({curve.n}, 3) raw vectors, got {raw.shape}")
    t = curve.tangents
    perp = raw - np.einsum("ij,ij->i", raw, t)[:, None] * t
    norms = np.linalg.norm(perp, axis=1)
    scale = np.maximum(np.linalg.norm(raw, axis=1), 1e-300)
    bad = np.flatnonzero(norms <= 1e-9 * scale)
    if bad.size:
        raise ParallelToTangent(f"raw framing vector parallel to tangent at {bad[:5].tolist()}")
    u = perp / norms[:, None]
    # one Gram-Schmidt pass leaves ~1e-16 residue; a second pass pins it down
    u = u - np.einsum("ij,ij->i", u, t)[:, None] * t
    u /= np.linalg.norm(u, axis=1)[:, None]
    _check_continuity(u)
    return Framing(u)


def frenet_framing(curve: ClosedCurve) -> Framing:
    """Principal normal direction of dt/ds; fails where the curvature vanishes."""
    tdot = periodic_derivative(curve.tangents)
    mag = np.linalg.norm(tdot, axis=1)
    bad = np.flatnonzero(mag < TOLERANCES.undefined_normal)
    if bad.size:
        raise UndefinedNormal(bad)
    return normalize_framing(curve, tdot)


def turned_framing(curve: ClosedCurve, base: Framing, turns: float) -> Framing:
    """Rotate ``base`` right-handedly about the tangent by 2*pi*turns*s."""
    t = curve.tangents
    n = base.vectors
    alpha = 2 * np.pi * turns * curve.s
    b = np.cross(t, n)
    return normalize_framing(curve, np.cos(alpha)[:, None] * n + np.sin(alpha)[:, None] * b)


def view_twist_framing(curve: ClosedCurve, view=(0.0, 0.0, 1.0), amplitude: float = 1.0,
                       phase: float = 0.0) -> Framing:
    """Framing that turns edge-on to ``view`` exactly twice, with opposite handedness.

    u = cos(g) m + sin(g) w, where w is the normal-plane component of ``view``,
    m = t x w, and g(s) = pi/2 + amplitude * sin(2 pi s + phase). Used to build the
    two-local-crossing ribbon fixture.
    """
    if not 0 < abs(amplitude) < np.pi:
        raise BadParameter("amplitude must lie in (0, pi) in absolute value")
    t = curve.tangents
    o = np.asarray(view, dtype=float)
    o = o / np.linalg.norm(o)
    w = o - (t @ o)[:, None] * t
    wn = np.linalg.norm(w, axis=1)
    if np.min(wn) < 1e-6:
        raise BadParameter("view direction is tangent to the curve somewhere")
    w /= wn[:, None]
    m = np.cross(t, w)
    g = np.pi / 2 + amplitude * np.sin(2 * np.pi * curve.s + phase)
    return normalize_framing(curve, np.cos(g)[:, None] * m + np.sin(g)[:, None] * w)


def offset_curve(curve: ClosedCurve, framing: Framing, epsilon: float) -> ClosedCurve:
    """Samples a_i + epsilon u_i (no validation; epsilon = 0 returns the axis)."""
    return ClosedCurve(curve.points + epsilon * framing.vectors, curve.name + "_edge")


@dataclass(frozen=True, eq=False)
class Ribbon:
    """Axis curve plus framing; the second edge is axis + epsilon * framing."""

    axis: ClosedCurve
    framing: Framing
    epsilon: Optional[float] = None
    delta_local: float = field(init=False)

    def __post_init__(self):
        self.framing.check(self.axis)
        dmin = self.axis.min_nonadjacent_distance
        eps = 1e-3 * dmin if self.epsilon is None else float(self.epsilon)
        if not eps > 0:
            raise ValidationError("ribbon epsilon must be positive")
        if eps >= 0.1 * dmin:
            raise ValidationError(f"epsilon {eps:.3g} must be below 0.1 x minimum segment distance ({dmin:.3g})")
        object.__setattr__(self, "epsilon", eps)
        # parameter window pairing nonlocal edge crossings with axis self-crossings
        delta = max(10.0 * eps / float(np.min(self.axis.speed)), 0.5 / self.axis.n)
        object.__setattr__(self, "delta_local", delta)

    @cached_property
    def edge(self) -> ClosedCurve:
        return edge_curve(self)

    def with_epsilon(self, epsilon: float) -> "Ribbon":
        return Ribbon(self.axis, self.framing, epsilon)

    def mirrored(self, axis: int = 2) -> "Ribbon":
        u = self.framing.vectors.copy()
        u[:, axis] *= -1.0
        return Ribbon(self.axis.mirrored(axis), Framing(u), self.epsilon)

    def reversed(self) -> "Ribbon":
        return Ribbon(self.axis.reversed(), Framing(self.framing.vectors[::-1]), self.epsilon)


def edge_curve(ribbon: Ribbon) -> ClosedCurve:
    """The second ribbon edge b_i = a_i + epsilon u_i."""
    return offset_curve(ribbon.axis, ribbon.framing, ribbon.epsilon)


# ---------------------------------------------------------------------------
# direction sphere


@dataclass(frozen=True, eq=False)
class SphericalPolyline:
    points: np.ndarray
    closed: bool = True

    def __post_init__(self):
        p = _readonly(self.points)
        if p.ndim != 2 or p.shape[1] != 3:
            raise ValidationError(f"expected (K, 3) unit vectors, got shape {p.shape}")
        if np.max(np.abs(np.linalg.norm(p, axis=1) - 1.0)) > 1e-12:
            raise ValidationError("spherical polyline points must be unit vectors")
        object.__setattr__(self, "points", p)


def triangle_solid_angle(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Signed solid angle of geodesic triangles (a, b, c) of unit vectors, via atan2."""
    num = np.einsum("...i,...i->...", a, np.cross(b, c))
    den = 1.0 + np.einsum("...i,...i->...", a, b) + np.einsum("...i,...i->...", b, c) \
        + np.einsum("...i,...i->...", c, a)
    return 2.0 * np.arctan2(num, den)


def reduce_area(area: float) -> float:
    """Reduce modulo 4*pi into (-2*pi, 2*pi]."""
    r = 2 * np.pi - np.mod(2 * np.pi - area, 4 * np.pi)
    if r <= -2 * np.pi + 1e-9:
        r += 4 * np.pi
    return float(r)


def _fibonacci_sphere(k: int) -> np.ndarray:
    i = np.arange(k) + 0.5
    z = 1 - 2 * i / k
    phi = np.pi * (1 + 5 ** 0.5) * i
    r = np.sqrt(1 - z * z)
    return np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=1)


_APEX_CANDIDATES = np.vstack([np.eye(3), -np.eye(3), _fibonacci_sphere(40)])


def _choose_apexes(loops: np.ndarray) -> np.ndarray:
    # a fan apex must stay away from the antipode of every loop vertex;
    # |c + p|^2 = 2 + 2 c.p, so the best candidate has the largest min_k c.p_k
    first = loops[:, 0, :]
    worst = np.min(np.einsum("bkj,bj->bk", loops, first), axis=1)
    apex = first.copy()
    bad = np.flatnonzero(worst < -0.96875)  # |c + p| < 0.25
    if bad.size:
        scores = np.min(loops[bad] @ _APEX_CANDIDATES.T, axis=1)
        apex[bad] = _APEX_CANDIDATES[np.argmax(scores, axis=1)]
    return apex


def spherical_loop_areas(loops, apexes: Optional[np.ndarray] = None) -> np.ndarray:
    """Vectorized :func:`spherical_loop_area` over a (B, K, 3) stack of closed loops."""
    p = np.asarray(loops, dtype=float)
    q = np.roll(p, -1, axis=1)
    if np.any(np.einsum("bij,bij->bi", p, q) < -1.0 + TOLERANCES.antipodal):
        raise AntipodalEdge("consecutive loop points are antipodal")
    c = _choose_apexes(p) if apexes is None else np.asarray(apexes, dtype=float)
    total = np.sum(triangle_solid_angle(np.broadcast_to(c[:, None, :], p.shape), p, q), axis=1)
    return np.array([reduce_area(a) for a in total])


def spherical_loop_area(loop, apex: Optional[np.ndarray] = None) -> float:
    """Signed solid angle enclosed by a closed spherical polyline, in (-2*pi, 2*pi].

    Counterclockwise seen from outside the sphere is positive. The loop is
    triangulated as a fan from its first point, or from a well-conditioned
    apex when the first point is close to the antipode of some vertex.
    """
    if isinstance(loop, SphericalPolyline):
        if not loop.closed:
            raise ValidationError("spherical_loop_area needs a closed loop")
        p = loop.points
    else:
        p = np.asarray(loop, dtype=float)
    return float(spherical_loop_areas(p[None], None if apex is None else np.asarray(apex)[None])[0])
