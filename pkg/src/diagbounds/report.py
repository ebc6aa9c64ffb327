"""Assemble bounds for a grid of ``(sigma, tau)`` and render them.

Three renderings are supported.  Markdown mirrors the layout of published
accuracy tables (percent, one decimal).  CSV has one line per
``(sigma, tau, measure)``.  JSON carries full binary64 precision.  All three
are byte-for-byte deterministic for fixed inputs.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional, Sequence, Union

from .bounds import (
    DEFAULT_SENSITIVITY_GRID,
    CaseLabel,
    CombinedPosteriors,
    Method,
    classify_case,
    classify_case_star,
    combined_posteriors,
    npv_established,
    npv_new,
    npv_new_unconditional,
    ppv_new,
    prevalence_bounds,
    sensitivity_new_conditional,
    sensitivity_new_unconditional,
)
from .core import (
    DegenerateYield,
    Interval,
    StudyConfig,
    TestTable,
    Undefined,
    validate_config,
)
from .datasets import EMBEDDED, FIGURE_EXTRAS, FIGURE_LABELS, PUBLISHED_THRESHOLDS, PUBLISHED_TOL_PP, published
from .dilation import (
    WHO_MIN_SENSITIVITY,
    DilationVerdict,
    ScreenResult,
    ThresholdResult,
    dilation_threshold,
    is_dilation,
    who_screen,
)
from .oracle import DEFAULT_GRID, Measure, oracle_bounds

CSV_HEADER = ("dataset", "sigma", "tau", "measure", "lo", "hi", "case", "flags")

#: oracle tolerance where the extremes sit on grid points
EXACT_TOL = 1e-9
#: oracle tolerance for whole-population measures swept over a Gamma grid
GRID_TOL = 1e-3

TESTED_MEASURES = ("ppv_z", "npv_z", "sens_z", "p_x0_given_y0z0", "p_x0_given_y0z1")
POPULATION_MEASURES = ("prevalence", "npv_y", "npv_z_unconditional", "sens_z_unconditional")
MEASURE_ORDER = (
    "prevalence",
    "npv_y",
    "ppv_z",
    "npv_z",
    "sens_z",
    "p_x0_given_y0z0",
    "p_x0_given_y0z1",
    "npv_z_unconditional",
    "sens_z_unconditional",
)
MEASURE_TITLES = {
    "prevalence": "Prevalence P(x=1)",
    "npv_y": "NPV of the reference test",
    "ppv_z": "PPV_z",
    "npv_z": "NPV_z",
    "sens_z": "Sensitivity_z",
    "p_x0_given_y0z0": "P(x=0 | y=0, z=0)",
    "p_x0_given_y0z1": "P(x=0 | y=0, z=1)",
    "npv_z_unconditional": "NPV_z, whole population",
    "sens_z_unconditional": "Sensitivity_z, whole population",
}
_ORACLE_MEASURES = {
    "ppv_z": Measure.PPVz,
    "npv_z": Measure.NPVz,
    "sens_z": Measure.SENSz,
    "p_x0_given_y0z0": Measure.P_x0_y0z0,
    "p_x0_given_y0z1": Measure.P_x0_y0z1,
    "npv_z_unconditional": Measure.NPVz_unconditional,
    "sens_z_unconditional": Measure.SENSz_unconditional,
}


# -- oracle cross-check -------------------------------------------------------


@dataclass(frozen=True)
class MeasureDelta:
    measure: str
    closed: Optional[Interval]
    oracle: Optional[Interval]
    delta: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.delta <= self.tolerance


@dataclass(frozen=True)
class OracleCheck:
    dataset: str
    sigma: float
    tau: float
    grid: tuple[int, int]
    deltas: tuple[MeasureDelta, ...]

    @property
    def passed(self) -> bool:
        return all(d.passed for d in self.deltas)

    @property
    def max_delta(self) -> float:
        return max((d.delta for d in self.deltas), default=0.0)


def _closed_forms(table: TestTable, config: StudyConfig, method: Method, sens_grid: int) -> dict:
    sigma = config.sigma
    combined = _maybe(lambda: combined_posteriors(table, sigma))
    return {
        "ppv_z": _maybe(lambda: ppv_new(table, sigma)),
        "npv_z": _maybe(lambda: npv_new(table, sigma)),
        "sens_z": _maybe(lambda: sensitivity_new_conditional(table, sigma)),
        "p_x0_given_y0z0": combined.p_x0_given_y0z0 if combined else None,
        "p_x0_given_y0z1": combined.p_x0_given_y0z1 if combined else None,
        "npv_z_unconditional": _maybe(lambda: npv_new_unconditional(table, config, method)),
        "sens_z_unconditional": _maybe(
            lambda: sensitivity_new_unconditional(table, config, sens_grid, method)
        ),
    }


def run_oracle_check(
    table: TestTable,
    config: StudyConfig,
    grids: tuple[int, int] = DEFAULT_GRID,
    *,
    method: Method = "sharp",
    closed: Optional[Mapping[str, Optional[Interval]]] = None,
) -> OracleCheck:
    """Largest endpoint gap between each closed form and the oracle sweep.

    Tested-pool measures have their extremes on the ``t`` grid and must agree
    to :data:`EXACT_TOL`; whole-population measures with ``tau < 1`` get
    :data:`GRID_TOL`.
    """
    validate_config(table, config).raise_if_invalid()
    if closed is None:
        closed = _closed_forms(table, config, method, DEFAULT_SENSITIVITY_GRID)
    deltas = []
    for name, measure in _ORACLE_MEASURES.items():
        tol = GRID_TOL if measure.population and config.tau < 1.0 else EXACT_TOL
        try:
            found = oracle_bounds(table, config, measure, grids)
        except Undefined:
            found = None
        expected = closed[name]
        if found is None and expected is None:
            continue
        if found is None or expected is None:
            delta = float("inf")
        else:
            delta = max(abs(found.lo - expected.lo), abs(found.hi - expected.hi))
        deltas.append(MeasureDelta(name, expected, found, delta, tol))
    return OracleCheck(table.name, config.sigma, config.tau, tuple(grids), tuple(deltas))


# -- the report ---------------------------------------------------------------


def _maybe(fn: Callable):
    """Run ``fn``; a zero-probability conditioning event yields ``None``."""
    try:
        return fn()
    except (DegenerateYield, Undefined):
        return None


@dataclass(frozen=True)
class ReportRow:
    sigma: float
    tau: float
    prevalence: Interval
    npv_y: Optional[Interval]
    case: CaseLabel
    case_star: CaseLabel
    ppv_z: Optional[Interval]
    npv_z: Optional[Interval]
    sens_z: Optional[Interval]
    combined: Optional[CombinedPosteriors]
    npv_z_unconditional: Optional[Interval]
    sens_z_unconditional: Optional[Interval]
    dilation: DilationVerdict
    screen: ScreenResult
    oracle: Optional[OracleCheck] = None

    def measure(self, name: str) -> Optional[Interval]:
        if name in ("p_x0_given_y0z0", "p_x0_given_y0z1"):
            return getattr(self.combined, name) if self.combined else None
        return getattr(self, name)

    def case_for(self, name: str) -> str:
        if name in TESTED_MEASURES:
            return self.case.label
        if name in ("npv_z_unconditional", "sens_z_unconditional"):
            return self.case_star.label
        return ""

    def boundary_for(self, name: str) -> bool:
        if name in TESTED_MEASURES:
            return self.case.boundary
        if name in ("npv_z_unconditional", "sens_z_unconditional"):
            return self.case_star.boundary
        return False


@dataclass(frozen=True)
class Discrepancy:
    """A computed value that disagrees with a published one by more than the tolerance."""

    number: int
    measure: str
    sigma: float
    tau: float
    computed: tuple[float, float]
    published: tuple[float, float]
    location: str
    explanation: str

    @property
    def known(self) -> bool:
        return bool(self.explanation)

    def text(self) -> str:
        what = MEASURE_TITLES.get(self.measure, self.measure)
        lo, hi = (100.0 * v for v in self.computed)
        plo, phi = self.published
        body = (
            f"{what} at sigma={_num(self.sigma)}, tau={_num(self.tau)}: computed "
            f"{_pct_pair(lo, hi)}, the {self.location} prints {_pct_pair(plo, phi)}."
        )
        if self.explanation:
            return f"{body} Known discrepancy: {self.explanation}."
        return f"{body} Unexpected difference beyond {PUBLISHED_TOL_PP} pp."


@dataclass(frozen=True)
class BoundsReport:
    dataset: str
    table: TestTable
    sigmas: tuple[float, ...]
    taus: tuple[float, ...]
    rows: tuple[ReportRow, ...]
    threshold: ThresholdResult
    sigma_min_threshold: float
    method: str
    discrepancies: tuple[Discrepancy, ...] = ()
    include_unconditional: bool = True
    notes: tuple[str, ...] = field(default=())

    def row(self, sigma: float, tau: float) -> ReportRow:
        for r in self.rows:
            if r.sigma == sigma and r.tau == tau:
                return r
        raise KeyError((sigma, tau))

    def footnote_for(self, measure: str, sigma: float, tau: float) -> Optional[Discrepancy]:
        for d in self.discrepancies:
            if d.measure == measure and d.sigma == sigma and d.tau == tau:
                return d
        return None

    @property
    def oracle_passed(self) -> bool:
        return all(r.oracle.passed for r in self.rows if r.oracle is not None)

    def to_markdown(self) -> str:
        return render_markdown(self)

    def to_csv(self) -> str:
        return render_csv(self)

    def to_json(self) -> str:
        return render_json(self)

    def render(self, fmt: str) -> str:
        renderers = {"md": render_markdown, "csv": render_csv, "json": render_json}
        if fmt not in renderers:
            raise ValueError(f"unknown format {fmt!r}; choose md, csv or json")
        return renderers[fmt](self)


def _dedupe(values: Sequence[float]) -> tuple[float, ...]:
    out: list[float] = []
    for v in values:
        v = float(v)
        if v not in out:
            out.append(v)
    return tuple(out)


def run_report(
    dataset: Union[str, TestTable],
    sigmas: Sequence[float],
    taus: Sequence[float] = (1.0,),
    *,
    oracle: bool = False,
    grids: tuple[int, int] = DEFAULT_GRID,
    sigma_min_threshold: float = WHO_MIN_SENSITIVITY,
    sensitivity_grid: int = DEFAULT_SENSITIVITY_GRID,
    method: Method = "sharp",
    include_unconditional: bool = True,
) -> BoundsReport:
    """Compute every bound for each ``(sigma, tau)``.

    Raises
    ------
    DiagBoundsError
        The first violation of the first invalid ``(sigma, tau)``, carrying
        every violation found across the grid in ``.violations``.
    """
    table = EMBEDDED[dataset].table if isinstance(dataset, str) else dataset
    name = table.name or (dataset if isinstance(dataset, str) else "table")
    sigmas, taus = _dedupe(sigmas), _dedupe(taus)
    if not sigmas or not taus:
        raise ValueError("at least one sigma and one tau are required")
    violations = []
    for s in sigmas:
        for t in taus:
            for v in validate_config(table, StudyConfig(s, t, sigma_min_threshold)).violations:
                if v not in violations:
                    violations.append(v)
    if violations:
        from .core import ValidationResult

        ValidationResult(tuple(violations)).raise_if_invalid()

    rows = []
    per_sigma: dict = {}
    for s in sigmas:
        # tested-pool quantities do not depend on tau
        per_sigma[s] = dict(
            case=classify_case(table, s),
            combined=_maybe(lambda: combined_posteriors(table, s)),
            ppv_z=_maybe(lambda: ppv_new(table, s)),
            npv_z=_maybe(lambda: npv_new(table, s)),
            sens_z=_maybe(lambda: sensitivity_new_conditional(table, s)),
            dilation=is_dilation(table, s),
            screen=who_screen(table, s, sigma_min_threshold),
        )
    for s in sigmas:
        for t in taus:
            config = StudyConfig(s, t, sigma_min_threshold)
            base = per_sigma[s]
            npv_u = _maybe(lambda: npv_new_unconditional(table, config, method))
            sens_u = _maybe(lambda: sensitivity_new_unconditional(table, config, sensitivity_grid, method))
            check = None
            if oracle:
                closed = {
                    "ppv_z": base["ppv_z"],
                    "npv_z": base["npv_z"],
                    "sens_z": base["sens_z"],
                    "p_x0_given_y0z0": base["combined"].p_x0_given_y0z0 if base["combined"] else None,
                    "p_x0_given_y0z1": base["combined"].p_x0_given_y0z1 if base["combined"] else None,
                    "npv_z_unconditional": npv_u,
                    "sens_z_unconditional": sens_u,
                }
                check = run_oracle_check(table, config, grids, method=method, closed=closed)
            rows.append(
                ReportRow(
                    sigma=s,
                    tau=t,
                    prevalence=prevalence_bounds(table, config),
                    npv_y=_maybe(lambda: npv_established(table, config)),
                    case=base["case"],
                    case_star=classify_case_star(table, config),
                    ppv_z=base["ppv_z"],
                    npv_z=base["npv_z"],
                    sens_z=base["sens_z"],
                    combined=base["combined"],
                    npv_z_unconditional=npv_u,
                    sens_z_unconditional=sens_u,
                    dilation=base["dilation"],
                    screen=base["screen"],
                    oracle=check,
                )
            )
    threshold = dilation_threshold(table)
    report = BoundsReport(
        dataset=name,
        table=table,
        sigmas=sigmas,
        taus=taus,
        rows=tuple(rows),
        threshold=threshold,
        sigma_min_threshold=sigma_min_threshold,
        method=method,
        include_unconditional=include_unconditional,
    )
    return _with_discrepancies(report)


def _with_discrepancies(report: BoundsReport) -> BoundsReport:
    found = []
    seen = set()
    for row in report.rows:
        for measure in MEASURE_ORDER:
            if measure in ("npv_z_unconditional", "sens_z_unconditional") and not report.include_unconditional:
                continue
            # tested-pool quantities are published once, in the tau=1 column
            tau = 1.0 if measure in TESTED_MEASURES else row.tau
            key = (measure, row.sigma, tau)
            if key in seen:
                continue
            seen.add(key)
            cell = published(report.dataset, measure, row.sigma, tau)
            value = row.measure(measure)
            if cell is None or value is None or cell.agrees(value.lo, value.hi):
                continue
            found.append(
                Discrepancy(
                    len(found) + 1,
                    measure,
                    row.sigma,
                    tau,
                    value.as_tuple(),
                    (cell.lo, cell.hi),
                    cell.location,
                    cell.known_issue,
                )
            )
    # number footnotes in the order the Markdown rendering shows their cells
    def order(d: Discrepancy):
        tested = d.measure in TESTED_MEASURES
        return (not tested, MEASURE_ORDER.index(d.measure), 0.0 if tested else d.tau, d.sigma)

    found = [
        Discrepancy(i, *[getattr(d, f) for f in ("measure", "sigma", "tau", "computed", "published", "location", "explanation")])
        for i, d in enumerate(sorted(found, key=order), start=1)
    ]
    ref = PUBLISHED_THRESHOLDS.get(report.dataset)
    notes = []
    if ref is not None and abs(100.0 * report.threshold.raw_threshold - ref) > PUBLISHED_TOL_PP:
        notes.append(
            f"Dilation threshold {100.0 * report.threshold.raw_threshold:.2f}% differs from the published {ref}%."
        )
    return BoundsReport(
        **{**report.__dict__, "discrepancies": tuple(found), "notes": tuple(notes)}
    )


# -- formatting helpers -------------------------------------------------------


def _num(v: float) -> str:
    """Short decimal for sigma/tau labels; fixed repr so output is locale-independent."""
    return format(float(v), ".12g")


def _full(v: float) -> str:
    return repr(float(v))


def _pct(v: float) -> str:
    return f"{100.0 * v:.1f}%"


def _pct_pair(lo: float, hi: float) -> str:
    return f"[{lo:.2f}%, {hi:.2f}%]"


def format_interval(iv: Optional[Interval]) -> str:
    if iv is None:
        return "n/a"
    if _pct(iv.lo) == _pct(iv.hi):
        return _pct(iv.lo)
    return f"[{_pct(iv.lo)}, {_pct(iv.hi)}]"


def _md_table(header: Sequence[str], rows: Sequence[Sequence[str]]) -> list[str]:
    lines = ["| " + " | ".join(header) + " |", "|" + "|".join("---" for _ in header) + "|"]
    lines += ["| " + " | ".join(r) + " |" for r in rows]
    return lines


def _cell(report: BoundsReport, row: ReportRow, measure: str) -> str:
    text = format_interval(row.measure(measure))
    if row.boundary_for(measure):
        text += " (b)"
    tau = 1.0 if measure in TESTED_MEASURES else row.tau
    note = report.footnote_for(measure, row.sigma, tau)
    if note is not None:
        text += f"[^{note.number}]"
    return text


def render_markdown(report: BoundsReport) -> str:
    t = report.table
    out = [f"# Bounds report: {report.dataset}", ""]
    if t.source:
        out += [f"Source: {t.source}", ""]
    out += _md_table(
        ["z \\ y", "y=0", "y=1", "Sum"],
        [
            ["z=0", _pct2(t.p00), _pct2(t.p10), _pct2(t.p00 + t.p10)],
            ["z=1", _pct2(t.p01), _pct2(t.p11), _pct2(t.zeta)],
            ["Sum", _pct2(1.0 - t.gamma), _pct2(t.gamma), ""],
        ],
    )
    out += ["", f"Bound method: {report.method}. Percentages are rounded to one decimal; (b) marks a case boundary.", ""]

    by_sigma = {s: report.row(s, report.taus[0]) for s in report.sigmas}
    header = ["sigma"] + [_num(s) for s in report.sigmas]
    tested_rows = [
        ["Prevalence in tested pool"] + [_pct(r.prevalence.hi) for r in by_sigma.values()],
        ["Case"] + [r.case.label + (" (b)" if r.case.boundary else "") for r in by_sigma.values()],
    ]
    for measure in TESTED_MEASURES:
        tested_rows.append([MEASURE_TITLES[measure]] + [_cell(report, r, measure) for r in by_sigma.values()])
    tested_rows.append(
        ["1 - NPV_z"] + [format_interval(r.npv_z.complement()) if r.npv_z else "n/a" for r in by_sigma.values()]
    )
    tested_rows.append(["Dilation"] + ["yes" if r.dilation.is_dilation else "no" for r in by_sigma.values()])
    out += ["## Tested pool", ""] + _md_table(header, tested_rows) + [""]

    th = report.threshold
    out += [
        f"Dilation threshold: sigma* = {100.0 * th.raw_threshold:.2f}% ({th.status.value}).",
        "",
    ]

    population = ["prevalence", "npv_y"]
    if report.include_unconditional:
        population += ["npv_z_unconditional", "sens_z_unconditional"]
    out += ["## Whole population", ""]
    tau_header = ["tau \\ sigma"] + [_num(s) for s in report.sigmas]
    for measure in population:
        rows = [
            [_num(tau)] + [_cell(report, report.row(s, tau), measure) for s in report.sigmas]
            for tau in report.taus
        ]
        out += [f"### {MEASURE_TITLES[measure]}", ""] + _md_table(tau_header, rows) + [""]
    if report.include_unconditional:
        rows = [
            [_num(tau)]
            + [
                (lambda c: c.label + (" (b)" if c.boundary else ""))(report.row(s, tau).case_star)
                for s in report.sigmas
            ]
            for tau in report.taus
        ]
        out += ["### Case, whole population", ""] + _md_table(tau_header, rows) + [""]

    out += [f"## Screening (minimum apparent sensitivity {_pct(report.sigma_min_threshold)})", ""]
    out += _md_table(
        ["sigma", "zeta", "sigma x minimum", "result"],
        [
            [_num(r.sigma), _pct(r.screen.zeta), _pct(r.screen.limit), "pass" if r.screen.passed else "fail"]
            for r in by_sigma.values()
        ],
    )
    out += [""]
    for r in by_sigma.values():
        out.append(f"- sigma={_num(r.sigma)}: {r.screen.explanation}")
    out.append("")

    checks = [r.oracle for r in report.rows if r.oracle is not None]
    if checks:
        out += ["## Oracle check", ""]
        rows = []
        for c in checks:
            for d in c.deltas:
                rows.append(
                    [
                        _num(c.sigma),
                        _num(c.tau),
                        d.measure,
                        f"{d.delta:.3e}",
                        f"{d.tolerance:.0e}",
                        "pass" if d.passed else "FAIL",
                    ]
                )
        out += _md_table(["sigma", "tau", "measure", "max delta", "tolerance", "result"], rows) + [""]

    if report.discrepancies or report.notes:
        out += ["## Notes", ""]
        out += list(report.notes)
        if report.notes:
            out.append("")
        out += [f"[^{d.number}]: {d.text()}" for d in report.discrepancies]
        out.append("")
    return "\n".join(out)


def _pct2(v: float) -> str:
    return f"{100.0 * v:.2f}%"


def _flags(report: BoundsReport, row: ReportRow, measure: str) -> str:
    flags = []
    if row.boundary_for(measure):
        flags.append("boundary")
    tau = 1.0 if measure in TESTED_MEASURES else row.tau
    note = report.footnote_for(measure, row.sigma, tau)
    if note is not None:
        flags.append("known-discrepancy" if note.known else "published-mismatch")
    if row.oracle is not None:
        for d in row.oracle.deltas:
            if d.measure == measure and not d.passed:
                flags.append("oracle-fail")
    return ";".join(flags)


def render_csv(report: BoundsReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    measures = [
        m
        for m in MEASURE_ORDER
        if report.include_unconditional or m not in ("npv_z_unconditional", "sens_z_unconditional")
    ]
    for row in report.rows:
        base = [report.dataset, _num(row.sigma), _num(row.tau)]
        for measure in measures:
            value = row.measure(measure)
            if value is None:
                writer.writerow(base + [measure, "", "", row.case_for(measure), "undefined"])
                continue
            writer.writerow(
                base + [measure, _full(value.lo), _full(value.hi), row.case_for(measure), _flags(report, row, measure)]
            )
        raw = _full(report.threshold.raw_threshold)
        writer.writerow(base + ["sigma_star", raw, raw, "", report.threshold.status.value])
        flag = "dilation" if row.dilation.is_dilation else ""
        d = "1.0" if row.dilation.is_dilation else "0.0"
        writer.writerow(base + ["dilation", d, d, row.case.label, ";".join(filter(None, [flag, row.dilation.binding_term]))])
        writer.writerow(
            base
            + [
                "who_screen",
                _full(row.screen.zeta),
                _full(row.screen.limit),
                "",
                "pass" if row.screen.passed else "fail",
            ]
        )
    return buf.getvalue()


def _iv(iv: Optional[Interval]):
    return None if iv is None else [iv.lo, iv.hi]


def report_to_dict(report: BoundsReport) -> dict:
    rows = []
    for r in report.rows:
        entry = {
            "sigma": r.sigma,
            "tau": r.tau,
            "case": {"label": r.case.label, "boundary": r.case.boundary},
            "case_star": {"label": r.case_star.label, "boundary": r.case_star.boundary},
            "measures": {
                m: _iv(r.measure(m))
                for m in MEASURE_ORDER
                if report.include_unconditional or m not in ("npv_z_unconditional", "sens_z_unconditional")
            },
            "dilation": {
                "is_dilation": r.dilation.is_dilation,
                "binding_term": r.dilation.binding_term,
                "raw_bound": r.dilation.raw_bound,
            },
            "who_screen": {
                "passed": r.screen.passed,
                "zeta": r.screen.zeta,
                "limit": r.screen.limit,
                "apparent_sensitivity": r.screen.apparent_sensitivity,
                "explanation": r.screen.explanation,
            },
        }
        if r.oracle is not None:
            entry["oracle"] = {
                "grid": list(r.oracle.grid),
                "passed": r.oracle.passed,
                "deltas": {
                    d.measure: {
                        "delta": d.delta,
                        "tolerance": d.tolerance,
                        "closed": _iv(d.closed),
                        "oracle": _iv(d.oracle),
                    }
                    for d in r.oracle.deltas
                },
            }
        rows.append(entry)
    return {
        "dataset": report.dataset,
        "source": report.table.source,
        "table": dict(zip(("y0z0", "y0z1", "y1z0", "y1z1"), report.table.cells)),
        "gamma": report.table.gamma,
        "zeta": report.table.zeta,
        "method": report.method,
        "sigma_min_threshold": report.sigma_min_threshold,
        "dilation_threshold": {
            "raw_threshold": report.threshold.raw_threshold,
            "status": report.threshold.status.value,
        },
        "rows": rows,
        "discrepancies": [
            {
                "measure": d.measure,
                "sigma": d.sigma,
                "tau": d.tau,
                "computed": list(d.computed),
                "published_percent": list(d.published),
                "known": d.known,
                "text": d.text(),
            }
            for d in report.discrepancies
        ],
        "notes": list(report.notes),
    }


def _json_safe(obj):
    """Replace infinities and NaN, which JSON cannot carry, with ``None``."""
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_json_safe(v) for v in obj]
    return obj


def render_json(report: BoundsReport) -> str:
    return json.dumps(_json_safe(report_to_dict(report)), indent=2, sort_keys=True, allow_nan=False) + "\n"


# -- case diagram -------------------------------------------------------------

FIGURE_DEFAULT = ("stq", "dilation", "bin", "ct-gietema", "uni", "anti")


def _figure_table(name: str) -> TestTable:
    if name in EMBEDDED:
        return EMBEDDED[name].table
    if name in FIGURE_EXTRAS:
        return FIGURE_EXTRAS[name]
    raise KeyError(name)


def emit_case_figure(
    datasets: Union[Sequence[str], Mapping[str, TestTable]] = FIGURE_DEFAULT, sigma: float = 0.75
) -> dict:
    """Coordinates for the diagram of the four cases at a given ``sigma``.

    Each table is the point ``(gamma, p00)``.  The feasible region
    ``gamma < sigma`` is split by the lines ``p00 = gamma(1-sigma)/sigma``
    from ``(0, 0)`` to ``(sigma, 1-sigma)`` and ``p00 = 1 - gamma/sigma``
    from ``(0, 1)`` to ``(sigma, 0)``, which cross at
    ``(sigma/(2-sigma), (1-sigma)/(2-sigma))``.
    """
    if not (0.0 < sigma < 1.0):
        raise ValueError(f"sigma must lie in (0, 1), got {sigma!r}")
    if isinstance(datasets, Mapping):
        tables = dict(datasets)
    else:
        tables = {name: _figure_table(name) for name in datasets}
    cross = [sigma / (2.0 - sigma), (1.0 - sigma) / (2.0 - sigma)]
    points = []
    for name, table in tables.items():
        case = None
        if 0.0 < table.gamma < sigma:
            case = classify_case(table, sigma).label
        points.append(
            {
                "name": name,
                "label": FIGURE_LABELS.get(name, name),
                "x": table.gamma,
                "y": table.p00,
                "case": case,
            }
        )
    return {
        "sigma": sigma,
        "axes": {"x": "P(y=1 | t=1)", "y": "P(y=0, z=0 | t=1)"},
        "points": points,
        "boundaries": {
            "frame": [[0.0, 0.0], [sigma, 0.0], [sigma, 1.0 - sigma], [0.0, 1.0], [0.0, 0.0]],
            "missed_infections": [[0.0, 0.0], [sigma, 1.0 - sigma]],
            "healthy_share": [[0.0, 1.0], [sigma, 0.0]],
        },
        "intersection": cross,
        "regions": {
            "C": [[0.0, 1.0], [sigma, 1.0 - sigma], cross],
            "I": [[0.0, 0.0], cross, [0.0, 1.0]],
            "U": [[sigma, 0.0], [sigma, 1.0 - sigma], cross],
            "X": [[0.0, 0.0], [sigma, 0.0], cross],
        },
    }
