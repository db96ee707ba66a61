"""Batch command line: analyze, mc, frame, project and export."""

from __future__ import annotations

import functools
import json
import sys
from pathlib import Path
from typing import Optional

import click
import numpy as np

from .crossings import ribbon_crossings, twist_mc, writhe_mc
from .errors import (
    DegenerateDirection,
    DiscontinuousFraming,
    RibbonError,
    TooManyRetries,
    UnwrapAmbiguity,
    VerificationFailed,
)
from .fixtures import fig1_ribbon
from .framing import writhe_framing_details
from .geometry import (
    ClosedCurve,
    Framing,
    Ribbon,
    from_parametric,
    from_samples,
    frenet_framing,
    normalize_framing,
    turned_framing,
)
from .invariants import analyze, twist, twist_local_form, writhe

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_FLAGGED = 3
EXIT_RETRIES = 4
EXIT_FRAMING = 5
EXIT_PROJECTION = 6


class Fail(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _exit_code(exc: Exception) -> int:
    if isinstance(exc, TooManyRetries):
        return EXIT_RETRIES
    if isinstance(exc, (DiscontinuousFraming, UnwrapAmbiguity)):
        return EXIT_FRAMING
    if isinstance(exc, DegenerateDirection):
        return EXIT_PROJECTION
    if isinstance(exc, VerificationFailed):
        return EXIT_FLAGGED
    return EXIT_VALIDATION


def _guarded(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            code = fn(*args, **kwargs)
        except Fail as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(exc.code)
        except (RibbonError, ValueError, OSError) as exc:
            click.echo(f"error: {type(exc).__name__}: {exc}", err=True)
            sys.exit(_exit_code(exc))
        sys.exit(code or EXIT_OK)

    return wrapper


def _dump(payload: dict, out: Optional[str]) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        click.echo(text, nl=False)


def _parse_value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def _parse_params(pairs) -> dict:
    params = {}
    for item in pairs:
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise Fail(EXIT_VALIDATION, f"--param expects key=value, got {item!r}")
        params[key] = _parse_value(value)
    return params


def _parse_direction(text: str) -> np.ndarray:
    try:
        v = np.array([float(x) for x in text.split(",")])
    except ValueError:
        v = np.zeros(0)
    if v.shape != (3,) or not np.linalg.norm(v) > 0:
        raise Fail(EXIT_VALIDATION, f"--direction expects three comma-separated numbers, got {text!r}")
    return v / np.linalg.norm(v)


def load_curve(path: str, n: Optional[int] = None) -> ClosedCurve:
    """Read a curve document holding either "samples" or a "parametric" block."""
    doc = json.loads(Path(path).read_text())
    name = doc.get("name", Path(path).stem)
    if "samples" in doc:
        return from_samples(doc["samples"], name)
    if "parametric" in doc:
        spec = doc["parametric"]
        curve = from_parametric(spec["family"], int(n or spec["n"]), **spec.get("params", {}))
        return ClosedCurve(curve.points, name)
    raise Fail(EXIT_VALIDATION, f"{path}: curve JSON needs 'samples' or 'parametric'")


def load_framing(path: str, curve: ClosedCurve) -> Framing:
    doc = json.loads(Path(path).read_text())
    vectors = doc.get("u0", doc.get("u"))
    if vectors is None:
        raise Fail(EXIT_VALIDATION, f"{path}: framing JSON needs 'u0' or 'u'")
    return normalize_framing(curve, vectors)


def _curve(opts) -> ClosedCurve:
    if opts["input"] and opts["family"]:
        raise Fail(EXIT_VALIDATION, "give either --family or --input, not both")
    if opts["input"]:
        return load_curve(opts["input"], opts["n"])
    return from_parametric(opts["family"] or "circle", opts["n"] or 1024, **_parse_params(opts["param"]))


def _framing(spec: str, curve: ClosedCurve) -> Framing:
    if spec == "frenet":
        return frenet_framing(curve)
    if spec == "writhe":
        return writhe_framing_details(curve).framing
    if spec.startswith("turns:"):
        try:
            k = int(spec.split(":", 1)[1])
        except ValueError:
            raise Fail(EXIT_VALIDATION, f"turns:k needs an integer k, got {spec!r}") from None
        return turned_framing(curve, frenet_framing(curve), k)
    if spec.startswith("file:"):
        return load_framing(spec.split(":", 1)[1], curve)
    raise Fail(EXIT_VALIDATION, f"unknown framing {spec!r}")


def _ribbon(opts) -> Ribbon:
    if opts.get("fixture") == "fig1":
        r = fig1_ribbon(opts["n"] or 128)
        return r if opts["epsilon"] is None else r.with_epsilon(opts["epsilon"])
    curve = _curve(opts)
    return Ribbon(curve, _framing(opts["framing"], curve), opts["epsilon"])


def curve_options(fn):
    decorators = [
        click.option("--family", help="Built-in curve family (circle, paper_fig2, torus_knot, figure_eight)."),
        click.option("--param", multiple=True, metavar="KEY=VALUE", help="Family parameter; repeatable."),
        click.option("--input", type=click.Path(exists=True, dir_okay=False), help="Curve JSON file."),
        click.option("--n", type=int, default=None, help="Sample count (default 1024)."),
        click.option("--out", type=click.Path(dir_okay=False), help="Write JSON here instead of stdout."),
    ]
    for d in reversed(decorators):
        fn = d(fn)
    return fn


def ribbon_options(fn):
    decorators = [
        click.option("--framing", default="frenet", show_default=True,
                     help="frenet | turns:k | writhe | file:PATH"),
        click.option("--epsilon", type=float, default=None, help="Ribbon width (default 1e-3 x min segment distance)."),
        click.option("--fixture", type=click.Choice(["fig1"]), default=None,
                     help="Use a built-in ribbon instead of --family/--framing."),
    ]
    for d in reversed(decorators):
        fn = d(fn)
    return fn


@click.group()
def main():
    """Linking number, twist and writhe of closed ribbons."""


@main.command("analyze")
@curve_options
@ribbon_options
@click.option("--n-theta", type=int, default=128, show_default=True, help="Simpson intervals for the local twist form.")
@_guarded
def cmd_analyze(n_theta, **opts):
    """Lk, Tw, Wr and the residual Lk - Tw - Wr."""
    ribbon = _ribbon(opts)
    report = analyze(ribbon)
    report.diagnostics["tw_local_form"] = twist_local_form(ribbon.axis, ribbon.framing, n_theta)
    payload = report.to_json()
    payload["curve"] = ribbon.axis.name
    payload["framing"] = opts["fixture"] or opts["framing"]
    _dump(payload, opts["out"])
    return EXIT_FLAGGED if report.flags else EXIT_OK


def _z(estimate: float, reference: float, se: Optional[float]):
    if not se:
        return None
    return (estimate - reference) / se


@main.command("mc")
@curve_options
@ribbon_options
@click.option("--m", type=int, default=20000, show_default=True, help="Number of random directions.")
@click.option("--seed", type=int, default=0, show_default=True)
@_guarded
def cmd_mc(m, seed, **opts):
    """Projection-crossing averages of twist and writhe against quadrature."""
    ribbon = _ribbon(opts)
    tw_avg = twist_mc(ribbon, m, seed)
    wr_avg = writhe_mc(ribbon.axis, m, seed)
    tw = twist(ribbon.axis, ribbon.framing)
    wr = writhe(ribbon.axis)
    _dump({
        "curve": ribbon.axis.name,
        "framing": opts["fixture"] or opts["framing"],
        "n": ribbon.axis.n,
        "twist": tw,
        "writhe": wr,
        "twist_mc": tw_avg.to_json(),
        "writhe_mc": wr_avg.to_json(),
        "z_twist": _z(tw_avg.estimate, tw, tw_avg.std_error),
        "z_writhe": _z(wr_avg.estimate, wr, wr_avg.std_error),
    }, opts["out"])
    return EXIT_OK


@main.command("frame")
@curve_options
@click.option("--epsilon", type=float, default=None, help="Ribbon width used to verify Lk = 0.")
@click.option("--svg", "svg_path", type=click.Path(dir_okay=False), help="Direction-sphere SVG output.")
@click.option("--fan-index", type=int, default=0, show_default=True, help="Sample whose chord fan is drawn.")
@_guarded
def cmd_frame(epsilon, svg_path, fan_index, **opts):
    """Build the zero-linking writhe framing and verify it."""
    curve = _curve(opts)
    details = writhe_framing_details(curve)
    report = analyze(Ribbon(curve, details.framing, epsilon))
    payload = details.framing.to_json(curve.name)
    payload["report"] = report.to_json()
    _dump(payload, opts["out"])
    if svg_path:
        from .svg import sphere_svg

        Path(svg_path).write_text(sphere_svg(curve, fan_index))
    if report.lk_rounded != 0 or report.flags:
        click.echo(f"error: writhe framing ribbon has Lk = {report.lk_gauss:.6g}", err=True)
        return EXIT_FLAGGED
    return EXIT_OK


@main.command("project")
@curve_options
@ribbon_options
@click.option("--direction", default="0,0,1", show_default=True, help="Viewing direction x,y,z.")
@click.option("--svg", "svg_path", type=click.Path(dir_okay=False), help="Projection SVG output.")
@_guarded
def cmd_project(direction, svg_path, **opts):
    """Signed, classified crossings of the two ribbon edges in one projection."""
    ribbon = _ribbon(opts)
    report = ribbon_crossings(ribbon, _parse_direction(direction))
    payload = report.to_json()
    payload["curve"] = ribbon.axis.name
    payload["lk_from_crossings"] = report.totals["ab"] / 2
    _dump(payload, opts["out"])
    if svg_path:
        from .svg import projection_svg

        Path(svg_path).write_text(projection_svg(ribbon, report))
    return EXIT_OK


@main.command("export")
@curve_options
@_guarded
def cmd_export(**opts):
    """Write the sampled curve as a samples JSON document."""
    _dump(_curve(opts).to_json(), opts["out"])
    return EXIT_OK


if __name__ == "__main__":
    main()
