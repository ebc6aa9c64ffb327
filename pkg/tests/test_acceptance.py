"""Acceptance gate: one recorded PASS/FAIL line per criterion.

Tolerances: 0.15 percentage points against printed values, 1e-9 for
endpoints reachable on the oracle grid and for the threshold bisection,
1e-12 for exact algebraic reductions, 1e-3 for whole-population oracle
agreement when tau < 1.
"""

import numpy as np
import pytest

from diagbounds.bounds import (
    npv_established,
    npv_new,
    npv_new_perfect_reference,
    npv_new_unconditional,
    ppv_new,
    ppv_new_perfect_reference,
    prevalence_bounds,
)
from diagbounds.core import StudyConfig
from diagbounds.datasets import EMBEDDED, PUBLISHED, PUBLISHED_THRESHOLDS, published
from diagbounds.dilation import dilation_bound, is_dilation, who_screen
from diagbounds.oracle import DEFAULT_GRID, Measure, oracle_bounds, oracle_values
from diagbounds.report import run_report

PP = 0.15
EXACT = 1e-9
ALGEBRAIC = 1e-12
GRID = 1e-3
SIGMAS = (0.6, 0.85, 0.98)
TAUS = (1 / 20, 1 / 10, 1 / 2, 19 / 20, 1.0)

RESULTS: dict = {}


def _gate(number, passed, detail):
    RESULTS[number] = (bool(passed), detail)
    assert passed, f"criterion {number}: {detail}"


def _agrees(iv, lo, hi):
    return abs(100 * iv.lo - lo) <= PP and abs(100 * iv.hi - hi) <= PP


def _table(name):
    return EMBEDDED[name].table


def _threshold_ok(name):
    return abs(100 * dilation_bound(_table(name)) - PUBLISHED_THRESHOLDS[name]) <= PP


def _jumps(fn, table, s, eps=1e-10):
    """True when the step across ``s`` exceeds the steps just beside it, i.e. a jump."""
    ends = [fn(table, s + k * eps) for k in (-3, -1, 1, 3)]
    for attr in ("lo", "hi"):
        v = [getattr(iv, attr) for iv in ends]
        beside = max(abs(v[1] - v[0]), abs(v[3] - v[2]))
        if abs(v[2] - v[1]) > 2 * beside + ALGEBRAIC:
            return True
    return False


def test_criterion_01_dilation_table():
    t = _table("dilation")
    misses = []
    for sigma, chi in zip((0.6, 0.85, 0.98, 1.0), (98.8, 69.8, 60.5, 59.3)):
        if abs(100 * t.gamma / sigma - chi) > PP:
            misses.append(f"chi@{sigma}")
        for measure, fn in (("ppv_z", ppv_new), ("npv_z", npv_new)):
            cell = published("dilation", measure, sigma, 1.0)
            if not _agrees(fn(t, sigma), cell.lo, cell.hi):
                misses.append(f"{measure}@{sigma}")
    if not _threshold_ok("dilation"):
        misses.append("sigma*")
    _gate(1, not misses, "all cells within 0.15pp" if not misses else f"mismatch {misses}")


def test_criterion_02_stq_accuracy_table():
    t = _table("stq")
    misses = [f"ppv@{s}" for s in SIGMAS if not _agrees(ppv_new(t, s), 99.4, 100.0)]
    misses += [f"npv@{s}" for s, lo, hi in ((0.6, 58.6, 58.9), (0.85, 84.7, 85.0)) if not _agrees(npv_new(t, s), lo, hi)]
    if not _agrees(npv_new(t, 0.98), 93.1, 93.3):
        misses.append("npv@0.98 output")
    note = run_report("stq", (0.98,)).footnote_for("npv_z", 0.98, 1.0)
    if note is None or not note.known or note.published[1] != pytest.approx(94.1):
        misses.append("94.1 not flagged")
    if not _threshold_ok("stq"):
        misses.append("sigma*")
    _gate(2, not misses, "outputs [93.1, 93.3]% at 0.98, printed 94.1 flagged" if not misses else f"mismatch {misses}")


@pytest.mark.xfail(strict=True, reason="printed 35.7% at sigma=0.98, tau=19/20 is not tau*gamma/sigma = 35.0%")
def test_criterion_03_stq_prevalence_table():
    t = _table("stq")
    misses = []
    for tau in TAUS:
        for sigma in SIGMAS:
            cell = published("stq", "prevalence", sigma, tau)
            if not _agrees(prevalence_bounds(t, StudyConfig(sigma, tau)), cell.lo, cell.hi):
                misses.append((sigma, tau, cell.lo, cell.hi))
    _gate(3, not misses, f"{15 - len(misses)}/15 cells agree; disagreeing {misses}")


def test_criterion_04_stq_reference_npv_table():
    t = _table("stq")
    misses = []
    for tau in TAUS:
        for sigma in SIGMAS:
            cell = published("stq", "npv_y", sigma, tau)
            if not _agrees(npv_established(t, StudyConfig(sigma, tau)), cell.lo, cell.hi):
                misses.append((sigma, tau))
    _gate(4, not misses, f"{15 - len(misses)}/15 cells agree")


def test_criterion_05_bin_table():
    t = _table("bin")
    ok = _agrees(ppv_new(t, 0.98), 95.2, 97.5) and _agrees(npv_new(t, 0.98), 94.3, 94.9) and _threshold_ok("bin")
    _gate(5, ok, "PPV, NPV at 0.98 and sigma* within 0.15pp")


def test_criterion_06_stq_whole_population_npv():
    t = _table("stq")
    report = run_report("stq", SIGMAS, TAUS[:-1])
    misses = []
    for tau in TAUS[:-1]:
        for sigma in SIGMAS:
            cell = published("stq", "npv_z_unconditional", sigma, tau)
            iv = npv_new_unconditional(t, StudyConfig(sigma, tau))
            if abs(100 * iv.lo - cell.lo) > PP:
                misses.append(("lo", sigma, tau))
            if abs(100 * iv.hi - cell.hi) > PP:
                note = report.footnote_for("npv_z_unconditional", sigma, tau)
                if not cell.known_issue or note is None or not note.known:
                    misses.append(("hi", sigma, tau))
            elif tau == 19 / 20 and cell.known_issue:
                misses.append(("flag", sigma, tau))
    _gate(6, not misses, "tau=19/20 exact, lower ends reproduce, tau-less uppers flagged" if not misses else f"{misses}")


def test_criterion_07_ct_gietema_table():
    t = _table("ct-gietema")
    report = run_report("ct-gietema", (0.6,), TAUS)
    misses = []
    for tau in TAUS[:-1]:
        config = StudyConfig(0.6, tau)
        for measure, fn in (("prevalence", prevalence_bounds), ("npv_y", npv_established)):
            cell = published("ct-gietema", measure, 0.6, tau)
            if not _agrees(fn(t, config), cell.lo, cell.hi):
                misses.append((measure, tau))
        iv = npv_new_unconditional(t, config)
        note = report.footnote_for("npv_z_unconditional", 0.6, tau)
        if _agrees(iv, 23.4, 65.1) or note is None or not note.known:
            misses.append(("npv_z flag", tau))
    if not _agrees(npv_new_unconditional(t, StudyConfig(0.6, 1.0)), 23.4, 65.1):
        misses.append(("npv_z", 1.0))
    _gate(7, not misses, "columns reproduce, tau-dependent npv_z computed and flagged" if not misses else f"{misses}")


def test_criterion_08_dilation_thresholds():
    misses = []
    for name in PUBLISHED_THRESHOLDS:
        t = _table(name)
        raw = dilation_bound(t)
        if not _threshold_ok(name):
            misses.append((name, "value"))
        if t.gamma < raw - EXACT and raw + EXACT <= 1.0:
            if not (is_dilation(t, raw - EXACT) and not is_dilation(t, raw + EXACT)):
                misses.append((name, "flip"))
    _gate(8, not misses, "5 thresholds within 0.15pp, flip within 1e-9" if not misses else f"{misses}")


def test_criterion_09_yield_screen():
    fail_ok = not who_screen(_table("dilation"), 0.6, 0.8).passed
    pass_ok = all(who_screen(_table(n), float(s)).passed for n in ("stq", "bin") for s in np.linspace(0.6, 1.0, 41))
    _gate(9, fail_ok and pass_ok, "dilation fails at 0.6; StQ and BiN pass for sigma >= 0.6")


def test_criterion_10_oracle_sharpness():
    worst_exact, worst_grid, violations = 0.0, 0.0, 0
    for name in EMBEDDED:
        t = _table(name)
        for sigma in SIGMAS:
            config = StudyConfig(sigma)
            for measure, closed in ((Measure.PPVz, ppv_new(t, sigma)), (Measure.NPVz, npv_new(t, sigma))):
                values = oracle_values(t, config, measure, DEFAULT_GRID)
                got = oracle_bounds(t, config, measure, DEFAULT_GRID)
                worst_exact = max(worst_exact, abs(got.lo - closed.lo), abs(got.hi - closed.hi))
                violations += int(np.sum((values < closed.lo - ALGEBRAIC) | (values > closed.hi + ALGEBRAIC)))
            for tau in (0.5, 0.95):
                config = StudyConfig(sigma, tau)
                closed = npv_new_unconditional(t, config)
                values = oracle_values(t, config, Measure.NPVz_unconditional, (201, 2001))
                finite = values[~np.isnan(values)]
                worst_grid = max(worst_grid, abs(finite.min() - closed.lo), abs(finite.max() - closed.hi))
                violations += int(np.sum((finite < closed.lo - ALGEBRAIC) | (finite > closed.hi + ALGEBRAIC)))
    ok = worst_exact <= EXACT and worst_grid <= GRID and violations == 0
    _gate(10, ok, f"tau=1 max delta {worst_exact:.1e}, tau<1 max delta {worst_grid:.1e}, {violations} violations")


def test_criterion_11_perfect_reference_collapse():
    worst = 0.0
    for name in EMBEDDED:
        t = _table(name)
        ppv, npv = ppv_new(t, 1.0), npv_new(t, 1.0)
        worst = max(worst, ppv.width, npv.width)
        worst = max(worst, abs(ppv.lo - ppv_new_perfect_reference(t)), abs(npv.lo - npv_new_perfect_reference(t)))
    stq = _table("stq")
    printed = abs(100 * ppv_new(stq, 1.0).lo - 99.42) <= PP and abs(100 * npv_new(stq, 1.0).lo - 94.13) <= PP
    _gate(11, worst <= ALGEBRAIC and printed, f"max deviation {worst:.1e}; StQ {100 * ppv_new(stq, 1.0).lo:.2f}% / {100 * npv_new(stq, 1.0).lo:.2f}%")


def test_criterion_12_invariant_sweep():
    from diagbounds.bounds import established_posteriors, sensitivity_new_conditional
    from diagbounds.core import TestTable
    from diagbounds.frechet import extreme_pmfs

    rng = np.random.default_rng(12)
    tables = [_table(n) for n in EMBEDDED]
    tables += [TestTable.from_probs(*rng.dirichlet(np.ones(4))) for _ in range(200)]
    failures = []
    for i, t in enumerate(tables):
        if not (0.0 < t.gamma < 1.0) or t.zeta >= 1.0:
            continue
        sigma = float(t.gamma + rng.uniform(0.05, 1.0) * (1.0 - t.gamma))
        tau = float(rng.uniform(0.05, 1.0))
        config = StudyConfig(sigma, tau)
        # case-boundary continuity
        for s in (t.gamma / (t.p00 + t.gamma), t.gamma / (1 - t.p00) if t.p00 < 1 else 2.0):
            if t.gamma + 1e-9 < s <= 1 - 1e-9:
                for fn in (ppv_new, npv_new, sensitivity_new_conditional):
                    if _jumps(fn, t, s):
                        failures.append((i, "continuity"))
        # reference NPV falls as the prevalence rises
        alphas = np.linspace(tau * t.gamma, t.gamma, 25)
        if np.any(np.diff((sigma - alphas) / (sigma * (1 - alphas))) > 1e-15):
            failures.append((i, "monotone"))
        # width of the negative-result posterior
        width = established_posteriors(t, config).after_negative.width
        expected = (t.gamma / sigma) * (1 - tau) / (1 - tau * t.gamma) * (1 - sigma) / (1 - t.gamma)
        if abs(width - expected) > ALGEBRAIC:
            failures.append((i, "width"))
        # full representation collapses to the tested pool
        a, b = npv_new_unconditional(t, StudyConfig(sigma, 1.0)), npv_new(t, sigma)
        if abs(a.lo - b.lo) > ALGEBRAIC or abs(a.hi - b.hi) > ALGEBRAIC:
            failures.append((i, "collapse"))
        # extreme pmfs are valid across the gamma grid
        for g in np.linspace(tau * t.gamma, t.gamma, 11):
            for joint in extreme_pmfs(t, sigma, tau, float(g)):
                if np.any(joint.pmf < 0) or abs(joint.pmf.sum() - 1) > ALGEBRAIC:
                    failures.append((i, "pmf"))
    _gate(12, not failures, f"{len(failures)} failures over {len(tables)} tables")
