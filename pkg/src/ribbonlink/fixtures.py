"""Reference geometries used by the tests, the acceptance suite and the CLI."""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from .geometry import (
    ClosedCurve,
    Ribbon,
    from_parametric,
    frenet_framing,
    turned_framing,
    view_twist_framing,
)

FIG1_VIEW = (0.0, 0.0, 1.0)


def hopf_pair(n: int = 512) -> tuple[ClosedCurve, ClosedCurve]:
    """Unit circle in the xy-plane and unit circle in the xz-plane centred at (1, 0, 0)."""
    t = 2 * np.pi * np.arange(n) / n
    a = np.stack([np.cos(t), np.sin(t), np.zeros(n)], axis=1)
    b = np.stack([1.0 + np.cos(t), np.zeros(n), np.sin(t)], axis=1)
    return ClosedCurve(a, "hopf_a"), ClosedCurve(b, "hopf_b")


def fig1_ribbon(n: int = 128) -> Ribbon:
    """A figure-eight ribbon that, seen from +z, shows one crossing of each hand plus
    a self-overlap: local crossings +1 and -1, nonlocal +1 and +1, Lk = +1.

    Both the curve and the framing are shifted by half a sample so that no
    sample sits exactly on the crossing point or on an edge-on point.
    """
    phase = math.pi / n
    curve = from_parametric("figure_eight", n, phase=phase)
    framing = view_twist_framing(curve, FIG1_VIEW, amplitude=-1.0, phase=phase)
    return Ribbon(curve, framing, 0.05 * curve.min_nonadjacent_distance)


def circle_turns(k: int, n: int = 1024) -> Ribbon:
    curve = from_parametric("circle", n)
    return Ribbon(curve, turned_framing(curve, frenet_framing(curve), k))


def frenet_ribbon(family: str, n: int = 1024, **params) -> Ribbon:
    curve = from_parametric(family, n, **params)
    return Ribbon(curve, frenet_framing(curve))


def suite(n: int = 1024) -> dict[str, Callable[[], Ribbon]]:
    """Named constructors for the standard set of test ribbons (built lazily)."""
    out: dict[str, Callable[[], Ribbon]] = {
        f"circle_turns_{k}": (lambda k=k: circle_turns(k, n)) for k in (0, 1, 3, -2)
    }
    out["paper_fig2_frenet"] = lambda: frenet_ribbon("paper_fig2", n)
    out["torus_knot_2_3_frenet"] = lambda: frenet_ribbon("torus_knot", n, p=2, q=3)
    return out


SUITE_CURVES = (("circle", {}), ("paper_fig2", {}), ("torus_knot", {"p": 2, "q": 3}))
