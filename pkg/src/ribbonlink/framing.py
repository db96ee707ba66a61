"""The writhe framing: the zero-linking framing read off from chord fans.

At each sample the chord fan (directions from a(s) to every other point of the
curve) runs from +t to -t on the direction sphere. Closing it with a great
semicircle from -t back to +t through a normal vector u encloses an area that
drops by exactly 2 dphi when the phase advances by dphi, so the
zero-area closure, and with it u0, is read off from a single area evaluation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DiscontinuousFraming, UnwrapAmbiguity, VerificationFailed
from .geometry import (
    ClosedCurve,
    Framing,
    Ribbon,
    SphericalPolyline,
    normalize_framing,
    reduce_area,
    spherical_loop_area,
    spherical_loop_areas,
)
from .invariants import InvariantReport, analyze

BISECTION_TOL = 1e-6
# d(area)/d(phase) for the closing semicircle; the phase turns about -t
LUNE_RATE = -2.0


@dataclass(frozen=True, eq=False)
class ChordFan:
    base_index: int
    fan: SphericalPolyline
    n: int

    @property
    def tangent(self) -> np.ndarray:
        return self.fan.points[0]


@dataclass(frozen=True)
class TwistSemicircle:
    base_index: int
    phase: float
    tangent: np.ndarray
    reference: np.ndarray

    @property
    def midpoint(self) -> np.ndarray:
        return semicircle_midpoint(self.tangent, self.reference, self.phase)

    def points(self, k: int) -> np.ndarray:
        """k + 2 points from +t through the midpoint to -t."""
        theta = np.linspace(0.0, np.pi, k + 2)
        return np.cos(theta)[:, None] * self.tangent + np.sin(theta)[:, None] * self.midpoint


def reference_normal(t: np.ndarray) -> np.ndarray:
    """Zero of the phase angle: z x t, or x x t when t is nearly vertical."""
    for axis in (np.array([0.0, 0.0, 1.0]), np.array([1.0, 0.0, 0.0])):
        r = np.cross(axis, t)
        norm = np.linalg.norm(r)
        if norm > 1e-6:
            return r / norm
    raise AssertionError("unreachable: t cannot be parallel to both z and x")


def semicircle_midpoint(t: np.ndarray, reference: np.ndarray, phase: float) -> np.ndarray:
    return math.cos(phase) * reference + math.sin(phase) * np.cross(reference, t)


def chord_fan(curve: ClosedCurve, i: int) -> ChordFan:
    """Directions from sample i to samples i+1, ..., i-1, bracketed by +t_i and -t_i."""
    n = curve.n
    i = int(i) % n
    others = curve.points[(i + np.arange(1, n)) % n]
    chords = others - curve.points[i]
    chords /= np.linalg.norm(chords, axis=1)[:, None]
    t = curve.tangents[i]
    pts = np.vstack([t, chords, -t])
    return ChordFan(i, SphericalPolyline(pts / np.linalg.norm(pts, axis=1)[:, None], closed=False), n)


def _closing_points(fan: ChordFan, phase: float) -> np.ndarray:
    t = fan.tangent
    r = reference_normal(t)
    k = math.ceil(fan.n / 2)
    # interior points only, traversed from -t back to +t
    theta = np.pi - np.pi * np.arange(1, k + 1) / (k + 1)
    mid = semicircle_midpoint(t, r, phase)
    return np.cos(theta)[:, None] * t + np.sin(theta)[:, None] * mid


def closure_loop(fan: ChordFan, phase: float) -> SphericalPolyline:
    pts = np.vstack([fan.fan.points, _closing_points(fan, phase)])
    return SphericalPolyline(pts / np.linalg.norm(pts, axis=1)[:, None], closed=True)


def closure_area(fan: ChordFan, phase: float) -> float:
    """Signed area (mod 4 pi, in (-2 pi, 2 pi]) of the fan closed by the phase-``phase`` semicircle."""
    return spherical_loop_area(closure_loop(fan, phase))


def bisecting_phase(fan: ChordFan) -> float:
    """The phase in [0, 2 pi) whose semicircle closes the fan with zero area."""
    a0 = closure_area(fan, 0.0)
    phase = float(np.mod(-a0 / LUNE_RATE, 2 * np.pi))
    check = closure_area(fan, phase)
    if abs(check) > BISECTION_TOL:
        raise VerificationFailed(f"closure area {check:.3g} at the bisecting phase of fan {fan.base_index}")
    return phase


@dataclass(frozen=True, eq=False)
class WritheFramingResult:
    framing: Framing
    phases: np.ndarray  # unwrapped along the curve
    closure_areas: np.ndarray  # area at the chosen phase, per sample


def _all_fans(curve: ClosedCurve) -> np.ndarray:
    n = curve.n
    idx = (np.arange(n)[:, None] + np.arange(1, n)[None, :]) % n
    chords = curve.points[idx] - curve.points[:, None, :]
    chords /= np.linalg.norm(chords, axis=2)[:, :, None]
    t = curve.tangents
    return np.concatenate([t[:, None, :], chords, -t[:, None, :]], axis=1)


def _all_references(t: np.ndarray) -> np.ndarray:
    return np.array([reference_normal(x) for x in t])


def _midpoints(t, refs, phases):
    return np.cos(phases)[:, None] * refs + np.sin(phases)[:, None] * np.cross(refs, t)


def _closure_areas(fans: np.ndarray, t: np.ndarray, refs: np.ndarray, phases: np.ndarray) -> np.ndarray:
    n = fans.shape[0]
    k = math.ceil((fans.shape[1] - 1) / 2)
    theta = np.pi - np.pi * np.arange(1, k + 1) / (k + 1)
    mid = _midpoints(t, refs, phases)
    arcs = np.cos(theta)[None, :, None] * t[:, None, :] + np.sin(theta)[None, :, None] * mid[:, None, :]
    out = np.empty(n)
    for start in range(0, n, 128):
        sl = slice(start, start + 128)
        loops = np.concatenate([fans[sl], arcs[sl]], axis=1)
        out[sl] = spherical_loop_areas(loops / np.linalg.norm(loops, axis=2)[:, :, None])
    return out


def writhe_framing_details(curve: ClosedCurve) -> WritheFramingResult:
    t = curve.tangents
    fans = _all_fans(curve)
    refs = _all_references(t)
    a0 = _closure_areas(fans, t, refs, np.zeros(curve.n))
    phases = np.mod(-a0 / LUNE_RATE, 2 * np.pi)
    areas = _closure_areas(fans, t, refs, phases)
    bad = np.flatnonzero(np.abs(areas) > BISECTION_TOL)
    if bad.size:
        raise VerificationFailed(f"closure area {areas[bad[0]]:.3g} at the bisecting phase of fan {bad[0]}")
    u0 = _midpoints(t, refs, phases)
    dots = np.einsum("ij,ij->i", u0, np.roll(u0, -1, axis=0))
    flips = np.flatnonzero(dots <= 0.0)
    if flips.size:
        raise DiscontinuousFraming(flips.tolist(), "writhe framing flips between samples "
                                   f"{flips[:5].tolist()}; increase the sample count")
    return WritheFramingResult(normalize_framing(curve, u0), np.unwrap(phases), areas)


def writhe_framing(curve: ClosedCurve) -> Framing:
    """The canonical framing u0 with zero linking number."""
    return writhe_framing_details(curve).framing


def fan_closure_areas(curve: ClosedCurve, phases) -> np.ndarray:
    """closure_area(chord_fan(curve, i), phases[i]) for every sample i at once."""
    t = curve.tangents
    phases = np.broadcast_to(np.asarray(phases, dtype=float), (curve.n,))
    return _closure_areas(_all_fans(curve), t, _all_references(t), phases)


def framing_closure_areas(curve: ClosedCurve, framing: Framing) -> np.ndarray:
    """Area of each chord fan closed by the semicircle through the framing vector."""
    t = curve.tangents
    refs = _all_references(t)
    u = framing.vectors
    phases = np.arctan2(np.einsum("ij,ij->i", np.cross(u, refs), t), np.einsum("ij,ij->i", refs, u))
    return _closure_areas(_all_fans(curve), t, refs, phases)


def swept_area_increments(curve: ClosedCurve, framing: Framing) -> np.ndarray:
    """Change of closure area between consecutive samples, each wrapped into (-2 pi, 2 pi]."""
    areas = framing_closure_areas(curve, framing)
    return np.array([reduce_area(d) for d in np.roll(areas, -1) - areas])


def verify_zero_link(curve: ClosedCurve, epsilon: float | None = None) -> InvariantReport:
    """Analyze the writhe-framed ribbon on ``curve``; its linking number must be 0."""
    ribbon = Ribbon(curve, writhe_framing(curve), epsilon)
    report = analyze(ribbon)
    if report.lk_rounded != 0:
        raise VerificationFailed(f"writhe framing ribbon has Lk = {report.lk_gauss:.6g}")
    return report


def relative_winding(curve: ClosedCurve, u: Framing, u0: Framing) -> float:
    """Turns made by ``u`` about the tangent relative to ``u0`` once around the curve."""
    t = curve.tangents
    a = u0.vectors
    b = u.vectors
    angle = np.arctan2(np.einsum("ij,ij->i", np.cross(a, b), t), np.einsum("ij,ij->i", a, b))
    steps = np.angle(np.exp(1j * (np.roll(angle, -1) - angle)))
    if np.max(np.abs(steps)) > np.pi / 2:
        raise UnwrapAmbiguity("relative angle jumps by more than pi/2 between samples")
    return float(np.sum(steps) / (2 * np.pi))


def relative_link(curve: ClosedCurve, u: Framing, u0: Framing) -> int:
    """Linking number of ``u`` measured against the zero-link reference ``u0``.

    The wrapped per-step angles of a closed loop sum to a whole number of
    turns, so rounding only removes floating-point residue.
    """
    return int(round(relative_winding(curve, u, u0)))
