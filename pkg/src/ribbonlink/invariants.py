"""Twist, writhe and Gauss linking number by quadrature, and the Lk = Tw + Wr check."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import simpson

from . import _kernels
from .errors import CurvesTooClose, RibbonError, ValidationError
from .geometry import (
    MIN_SAMPLES,
    ClosedCurve,
    Framing,
    Ribbon,
    edge_curve,
    normalize_framing,
    periodic_derivative,
)

FLAG_THRESHOLD = 0.01
_ROW_CHUNK = 256


def twist_density(curve: ClosedCurve, framing: Framing) -> np.ndarray:
    """(t x u) . du/ds / 2pi at each sample."""
    t = curve.tangents
    u = framing.vectors
    return np.einsum("ij,ij->i", np.cross(t, u), periodic_derivative(u)) / (2 * np.pi)


def twist(curve: ClosedCurve, framing: Framing) -> float:
    """Total rotation of the framing about the tangent, in turns (trapezoid rule)."""
    return float(np.sum(twist_density(curve, framing)) / curve.n)


def _check_n_theta(n_theta: int) -> None:
    if n_theta < 16 or n_theta % 2:
        raise ValidationError(f"n_theta must be an even number of Simpson intervals >= 16, got {n_theta}")


def _local_form_density(t, tdot, u, udot, n_theta):
    # theta-integral of (d_theta v x d_s v) . v / 4pi with v = t cos + u sin
    theta = np.linspace(0.0, np.pi, n_theta + 1)
    c = np.cos(theta)[None, :, None]
    s = np.sin(theta)[None, :, None]
    t, tdot, u, udot = (x[:, None, :] for x in (t, tdot, u, udot))
    v = t * c + u * s
    dv_theta = -t * s + u * c
    dv_s = tdot * c + udot * s
    integrand = np.einsum("ikj,ikj->ik", np.cross(dv_theta, dv_s), v)
    return simpson(integrand, x=theta, axis=1) / (4 * np.pi)


def twist_local_form(curve: ClosedCurve, framing: Framing, n_theta: int = 128) -> float:
    """Twist as the double integral over (s, theta) of the swept twist-semicircle area."""
    _check_n_theta(n_theta)
    t = curve.tangents
    u = framing.vectors
    dens = _local_form_density(t, periodic_derivative(t), u, periodic_derivative(u), n_theta)
    return float(np.sum(dens) / curve.n)


def twist_integrand_pair(curve: ClosedCurve, framing: Framing, i, n_theta: int = 128):
    """(theta-integrated local-form density, direct twist density) at sample(s) ``i``."""
    _check_n_theta(n_theta)
    idx = np.atleast_1d(np.asarray(i))
    if np.any((idx < 0) | (idx >= curve.n)):
        raise IndexError(f"sample index out of range for N={curve.n}")
    t = curve.tangents
    u = framing.vectors
    tdot = periodic_derivative(t)
    udot = periodic_derivative(u)
    lhs = _local_form_density(t[idx], tdot[idx], u[idx], udot[idx], n_theta)
    rhs = np.einsum("ij,ij->i", np.cross(t[idx], u[idx]), udot[idx]) / (2 * np.pi)
    if np.ndim(i) == 0:
        return float(lhs[0]), float(rhs[0])
    return lhs, rhs


def _gauss_rows(pa, va, pb, vb, exclude_diagonal):
    n = pa.shape[0]
    rows = np.empty(n)
    for start in range(0, n, _ROW_CHUNK):
        stop = min(start + _ROW_CHUNK, n)
        d = pa[start:stop, None, :] - pb[None, :, :]
        r3 = np.linalg.norm(d, axis=2) ** 3
        cr = np.cross(va[start:stop, None, :], vb[None, :, :])
        if exclude_diagonal:
            k = np.arange(start, stop)
            r3[k - start, k] = np.inf
        rows[start:stop] = np.sum(np.einsum("ijk,ijk->ij", cr, d) / r3, axis=1)
    return rows


def writhe(curve: ClosedCurve) -> float:
    """Double trapezoid sum of the writhe integrand with the diagonal set to zero."""
    p = curve.points
    v = curve.velocity
    rows = _gauss_rows(p, v, p, v, exclude_diagonal=True)
    return float(np.sum(rows) / (4 * np.pi * curve.n * curve.n))


def writhe_integrand(curve: ClosedCurve, i: int, j: int) -> float:
    """The writhe integrand at the sample pair (i, j), i != j."""
    d = curve.points[i] - curve.points[j]
    return float(np.dot(np.cross(curve.velocity[i], curve.velocity[j]), d) / np.linalg.norm(d) ** 3 / (4 * np.pi))


def _segment_linking(pa, pb):
    # exact Gauss integral for two closed polygons: signed solid angles of the
    # quadrilaterals spanned by each segment pair, split into two triangles
    total = 0.0
    na = pa.shape[0]
    pa1 = np.roll(pa, -1, axis=0)
    pb1 = np.roll(pb, -1, axis=0)
    for start in range(0, na, _ROW_CHUNK):
        stop = min(start + _ROW_CHUNK, na)
        a0 = pa[start:stop, None, :]
        a1 = pa1[start:stop, None, :]
        w = a0 - pb[None, :, :]
        x = a0 - pb1[None, :, :]
        y = a1 - pb1[None, :, :]
        z = a1 - pb[None, :, :]
        nw, nx, ny, nz = (np.linalg.norm(q, axis=2) for q in (w, x, y, z))
        trip = np.einsum("ijk,ijk->ij", w, np.cross(x, y))
        dot = lambda p, q: np.einsum("ijk,ijk->ij", p, q)
        d1 = nw * nx * ny + dot(w, x) * ny + dot(x, y) * nw + dot(y, w) * nx
        d2 = nw * nz * ny + dot(w, z) * ny + dot(z, y) * nw + dot(y, w) * nz
        total += float(np.sum(np.sum(np.arctan2(trip, d1) + np.arctan2(trip, d2), axis=1)))
    return total / (2 * np.pi)


def gauss_linking(curve_a: ClosedCurve, curve_b: ClosedCurve, method: str = "segment") -> float:
    """Gauss linking integral of two disjoint closed curves.

    ``method="segment"`` integrates the Gauss form exactly over the two
    polygons (robust when the curves are closer than the sample spacing);
    ``method="trapezoid"`` is the double trapezoid rule on the samples.
    """
    dmin = float(_kernels.min_curve_distance(np.ascontiguousarray(curve_a.points),
                                             np.ascontiguousarray(curve_b.points)))
    if dmin < 1e-9:
        raise CurvesTooClose(f"curves come within {dmin:.3g} of each other")
    if method == "segment":
        return _segment_linking(curve_a.points, curve_b.points)
    if method == "trapezoid":
        rows = _gauss_rows(curve_a.points, curve_a.velocity, curve_b.points, curve_b.velocity, False)
        return float(np.sum(rows) / (4 * np.pi * curve_a.n * curve_b.n))
    raise ValueError(f"unknown method {method!r}")


@dataclass
class InvariantReport:
    lk_gauss: float
    lk_rounded: int
    tw: float
    wr: float
    residual: float
    n: int
    diagnostics: dict = field(default_factory=dict)

    @property
    def lk_error(self) -> float:
        return abs(self.lk_gauss - self.lk_rounded)

    @property
    def flags(self) -> list[str]:
        out = []
        if self.lk_error > FLAG_THRESHOLD:
            out.append("lk_not_integer")
        if abs(self.residual) > FLAG_THRESHOLD:
            out.append("residual")
        return out

    def to_json(self) -> dict:
        return {
            "lk_gauss": self.lk_gauss,
            "lk_rounded": self.lk_rounded,
            "tw": self.tw,
            "wr": self.wr,
            "residual": self.residual,
            "n": self.n,
            "diagnostics": dict(self.diagnostics, flags=self.flags, lk_error=self.lk_error),
        }


def _terms(ribbon: Ribbon):
    lk = gauss_linking(ribbon.axis, edge_curve(ribbon))
    return lk, twist(ribbon.axis, ribbon.framing), writhe(ribbon.axis)


def analyze(ribbon: Ribbon, convergence: bool = True) -> InvariantReport:
    """Lk, Tw, Wr and the residual Lk - Tw - Wr, with a half-resolution rerun."""
    lk, tw, wr = _terms(ribbon)
    diagnostics = {"epsilon": ribbon.epsilon}
    if convergence and ribbon.axis.n // 2 >= MIN_SAMPLES and ribbon.axis.n % 2 == 0:
        half_axis = ribbon.axis.subsampled(2)
        try:
            half = Ribbon(half_axis, normalize_framing(half_axis, ribbon.framing.vectors[::2]), ribbon.epsilon)
            lk2, tw2, wr2 = _terms(half)
        except RibbonError as exc:
            # too coarse to rerun; the full-resolution result still stands
            diagnostics["half_resolution"] = {"n": half_axis.n, "error": f"{type(exc).__name__}: {exc}"}
        else:
            diagnostics["half_resolution"] = {
                "n": half_axis.n, "lk_gauss": lk2, "tw": tw2, "wr": wr2, "residual": lk2 - tw2 - wr2,
            }
            diagnostics["tw_change"] = tw - tw2
            diagnostics["wr_change"] = wr - wr2
    return InvariantReport(
        lk_gauss=lk,
        lk_rounded=int(round(lk)),
        tw=tw,
        wr=wr,
        residual=lk - tw - wr,
        n=ribbon.axis.n,
        diagnostics=diagnostics,
    )
