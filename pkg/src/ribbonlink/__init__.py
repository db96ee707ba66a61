"""Linking number, twist and writhe of closed ribbons in 3-space."""

from .crossings import (
    Crossing,
    CrossingReport,
    SphereAverage,
    classify,
    project_and_count,
    ribbon_crossings,
    sphere_average,
    twist_mc,
    writhe_mc,
)
from .errors import *  # noqa: F401,F403
from .fixtures import fig1_ribbon, hopf_pair
from .framing import (
    ChordFan,
    TwistSemicircle,
    bisecting_phase,
    chord_fan,
    closure_area,
    relative_link,
    verify_zero_link,
    writhe_framing,
)
from .geometry import (
    ClosedCurve,
    Framing,
    Ribbon,
    SphericalPolyline,
    edge_curve,
    from_parametric,
    from_samples,
    frenet_framing,
    normalize_framing,
    spherical_loop_area,
    tangent_field,
    turned_framing,
)
from .invariants import (
    InvariantReport,
    analyze,
    gauss_linking,
    twist,
    twist_integrand_pair,
    twist_local_form,
    writhe,
)

__version__ = "0.1.0"
