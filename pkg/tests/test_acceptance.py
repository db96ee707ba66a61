"""The nine acceptance criteria, at their stated tolerances.

Each test records a one-line PASS/FAIL summary, printed immediately (visible
with ``-s``) and repeated in the terminal summary at the end of the run.
"""

import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_RESULTS
from ribbonlink.crossings import edge_crossing_sum, project_and_count, random_directions, ribbon_crossings, \
    sphere_average, twist_mc, writhe_mc
from ribbonlink.errors import DegenerateDirection
from ribbonlink.fixtures import SUITE_CURVES, fig1_ribbon, hopf_pair, suite
from ribbonlink.framing import fan_closure_areas, verify_zero_link
from ribbonlink.geometry import from_parametric, reduce_area
from ribbonlink.invariants import analyze, gauss_linking, twist, twist_integrand_pair, writhe

N = 1024


def record(name: str, ok: bool, detail: str) -> None:
    ACCEPTANCE_RESULTS.append((name, bool(ok), detail))
    print(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
    assert ok, detail


@pytest.fixture(scope="module")
def ribbons():
    return {name: make() for name, make in suite(N).items()}


def test_criterion_1_hopf_link():
    a, b = hopf_pair(512)
    gauss_linking(*hopf_pair(16))  # compile the distance kernel outside the timed region
    start = time.perf_counter()
    lk = gauss_linking(a, b)
    elapsed = time.perf_counter() - start
    signs = {project_and_count(a, b, o).totals["ab"] for o in random_directions(np.random.default_rng(0), 5)}
    ok = abs(abs(lk) - 1) < 1e-3 and elapsed < 1.0 and signs == {2 * round(lk)}
    record("1 Hopf link", ok, f"lk={lk:.9f}, {elapsed:.3f}s, projected a-b totals {sorted(signs)}")


def test_criterion_2_calugareanu(ribbons):
    worst = []
    ok = True
    for name, make in suite(N).items():
        start = time.perf_counter()
        rep = analyze(make())
        elapsed = time.perf_counter() - start
        good = abs(rep.residual) < 1e-3 and rep.lk_error < 1e-3 and elapsed < 5.0
        ok &= good
        worst.append(f"{name}: lk={rep.lk_gauss:.6f} res={rep.residual:.1e} {elapsed:.2f}s")
    record("2 Lk = Tw + Wr", ok, "; ".join(worst))


def test_criterion_3_twist_forms(ribbons):
    errs = {}
    for name, r in ribbons.items():
        lhs, rhs = twist_integrand_pair(r.axis, r.framing, np.arange(r.axis.n), 128)
        errs[name] = float(np.max(np.abs(lhs - rhs)))
    record("3 twist-form equivalence", max(errs.values()) < 1e-6, f"max pointwise difference {max(errs.values()):.2e}")


def test_criterion_4_monte_carlo(ribbons):
    r = ribbons["paper_fig2_frenet"]
    start = time.perf_counter()
    tw_avg = twist_mc(r, 20000, seed=0)
    wr_avg = writhe_mc(r.axis, 20000, seed=0)
    elapsed = time.perf_counter() - start
    tw, wr = twist(r.axis, r.framing), writhe(r.axis)
    ok = (abs(tw_avg.estimate - tw) < 3 * tw_avg.std_error
          and abs(wr_avg.estimate - wr) < 3 * wr_avg.std_error and elapsed < 60)
    record("4 crossing averages", ok,
           f"twist {tw_avg.estimate:.4f}±{tw_avg.std_error:.4f} vs {tw:.4f}, "
           f"writhe {wr_avg.estimate:.4f}±{wr_avg.std_error:.4f} vs {wr:.4f}, {elapsed:.1f}s")


def test_criterion_5_projection_constancy(ribbons):
    details = []
    ok = True
    rng = np.random.default_rng(2024)
    for name, r in ribbons.items():
        lk = analyze(r, convergence=False).lk_rounded
        totals = []
        while len(totals) < 50:
            o = random_directions(rng, 1)[0]
            try:
                totals.append(edge_crossing_sum(r, o))
            except DegenerateDirection:
                continue
        good = set(totals) == {2 * lk} and (2 * lk) % 2 == 0
        ok &= good
        details.append(f"{name}: {sorted(set(totals))} (2Lk={2 * lk})")
    record("5 projection constancy and parity", ok, "; ".join(details))


def test_criterion_6_fig1_census():
    r = fig1_ribbon()
    rep = ribbon_crossings(r, [0.0, 0.0, 1.0])
    local = sorted(c.sign for c in rep.of_kind("local"))
    nonlocal_ = sorted(c.sign for c in rep.of_kind("nonlocal"))
    lk = analyze(r).lk_rounded
    ok = local == [-1, 1] and nonlocal_ == [1, 1] and lk == 1 and rep.totals["ab"] == 2 * lk
    record("6 figure-eight crossing census", ok, f"local {local}, nonlocal {nonlocal_}, Lk={lk}")


def test_criterion_7_writhe_framing():
    details = []
    ok = True
    for family, params in SUITE_CURVES:
        curve = from_parametric(family, N, **params)
        rep = verify_zero_link(curve)
        a0 = fan_closure_areas(curve, 0.0)
        lune = 0.0
        for phi in (0.5, 1.0, 2.0):
            delta = fan_closure_areas(curve, phi) - a0 + 2 * phi
            lune = max(lune, max(abs(reduce_area(d)) for d in delta))
        good = rep.lk_rounded == 0 and abs(rep.tw + rep.wr) < 1e-3 and lune < 1e-6
        ok &= good
        details.append(f"{family}: Lk={rep.lk_rounded} |tw+wr|={abs(rep.tw + rep.wr):.1e} lune={lune:.1e}")
    record("7 writhe framing", ok, "; ".join(details))


def test_criterion_8_symmetry(ribbons):
    worst_mirror = 0.0
    worst_reverse = 0.0
    for r in ribbons.values():
        base = analyze(r, convergence=False)
        mir = analyze(r.mirrored(), convergence=False)
        rev = analyze(r.reversed(), convergence=False)
        worst_mirror = max(worst_mirror, abs(mir.tw + base.tw), abs(mir.wr + base.wr),
                           abs(mir.lk_gauss + base.lk_gauss))
        worst_reverse = max(worst_reverse, abs(rev.lk_gauss - base.lk_gauss))
    record("8 mirror and reversal", worst_mirror < 1e-9 and worst_reverse < 1e-9,
           f"mirror {worst_mirror:.1e}, reversal {worst_reverse:.1e}")


def test_criterion_9_epsilon_stability(ribbons):
    worst = 0.0
    same = True
    for r in ribbons.values():
        a = analyze(r, convergence=False)
        b = analyze(r.with_epsilon(r.epsilon / 2), convergence=False)
        worst = max(worst, abs(a.tw - b.tw))
        same &= a.lk_rounded == b.lk_rounded
    record("9 epsilon stability", worst < 1e-4 and same, f"max tw change {worst:.1e}, lk unchanged: {same}")
