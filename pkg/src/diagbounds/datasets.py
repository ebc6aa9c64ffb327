"""Embedded study tables, dataset files, and published reference values.

Dataset files are JSON objects::

    {"name": "stq",
     "probs": {"y0z0": 63.71, "y0z1": 0.19, "y1z0": 3.97, "y1z1": 32.14},
     "unit": "percent",
     "source": "Kaiser et al. (2020), p. 3"}

Exactly one of ``probs`` or ``counts`` must be present.  ``unit`` is optional
and only meaningful with ``probs``.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Union

from .core import CELL_KEYS, ParseError, TestTable, table_from_counts

#: tolerance on the cell sum of a dataset file before normalization
FILE_SUM_TOL = 1e-6
#: the printed tables round each cell to 0.01%, so four cells can miss 100% by a few of those
PRINTED_SUM_TOL = 5e-4
#: agreement tolerance against published percentages, in percentage points
PUBLISHED_TOL_PP = 0.15

_ALLOWED_KEYS = {"name", "probs", "counts", "source", "unit"}


@dataclass(frozen=True)
class EmbeddedDataset:
    name: str
    table: TestTable
    source: str
    description: str = ""
    #: cells as printed, in percent, ordered y0z0, y0z1, y1z0, y1z1
    printed_percent: tuple[float, float, float, float] = (0.0, 0.0, 0.0, 0.0)


def _embedded(name: str, cells_percent, source: str, description: str) -> EmbeddedDataset:
    cells = [c / 100.0 for c in cells_percent]
    table = TestTable.from_probs(*cells, atol=PRINTED_SUM_TOL, name=name, source=source)
    return EmbeddedDataset(name, table, source, description, tuple(cells_percent))


EMBEDDED: dict[str, EmbeddedDataset] = {
    d.name: d
    for d in (
        _embedded(
            "dilation",
            (39.5, 1.2, 11.5, 47.8),
            "illustrative dilation test",
            "constructed so that every result widens the set of infection probabilities at sigma=0.6",
        ),
        _embedded(
            "stq",
            (63.71, 0.19, 3.97, 32.14),
            "Kaiser et al. (2020), p. 3",
            "Standard Q rapid antigen test against PCR, Geneva",
        ),
        _embedded(
            "bin",
            (73.48, 1.09, 3.91, 21.52),
            "FDA (2020), BinaxNOW EUA, p. 20",
            "BinaxNOW home antigen test against PCR",
        ),
        _embedded(
            "ct-gietema",
            (38.86, 18.13, 4.66, 38.34),
            "Gietema et al. (2020), Table 2",
            "chest CT against PCR, Dutch emergency department",
        ),
        _embedded(
            "ct-ai",
            (10.36, 30.37, 2.07, 57.20),
            "Ai et al. (2020), Table 2",
            "chest CT against PCR, Wuhan",
        ),
    )
}

#: hypothetical tables that only appear as reference points in the case diagram
FIGURE_EXTRAS: dict[str, TestTable] = {
    "uni": TestTable(0.25, 0.25, 0.25, 0.25, name="uni", source="uniform P(y, z | t=1)"),
    "anti": TestTable(0.0, 0.5, 0.5, 0.0, name="anti", source="always contradicts the reference test"),
}

#: labels used in the case diagram
FIGURE_LABELS = {"stq": "StQ", "dilation": "Dil", "bin": "BiN", "ct-gietema": "CT", "uni": "Uni", "anti": "Anti"}


def embedded_names() -> list[str]:
    return list(EMBEDDED)


def _number(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ParseError(f"expected a number, got {value!r}", path)
    if math.isnan(value) or math.isinf(value):
        raise ParseError(f"expected a finite number, got {value!r}", path)
    if value < 0:
        raise ParseError(f"must be non-negative, got {value!r}", path)
    return float(value)


def _cells(block, path: str) -> dict:
    if not isinstance(block, Mapping):
        raise ParseError("expected an object with keys " + ", ".join(CELL_KEYS), path)
    for key in CELL_KEYS:
        if key not in block:
            raise ParseError("missing cell", f"{path}.{key}")
    extra = sorted(set(block) - set(CELL_KEYS))
    if extra:
        raise ParseError("unknown cell", f"{path}.{extra[0]}")
    return {key: block[key] for key in CELL_KEYS}


def table_from_dict(obj) -> TestTable:
    """Validate a decoded dataset object and build its table."""
    if not isinstance(obj, Mapping):
        raise ParseError("dataset must be a JSON object", "$")
    extra = sorted(set(obj) - _ALLOWED_KEYS)
    if extra:
        raise ParseError("unknown field", extra[0])
    name = obj.get("name")
    if not isinstance(name, str) or not name:
        raise ParseError("expected a non-empty string", "name")
    source = obj.get("source", "")
    if not isinstance(source, str):
        raise ParseError("expected a string", "source")
    has_probs, has_counts = "probs" in obj, "counts" in obj
    if has_probs == has_counts:
        raise ParseError("exactly one of 'probs' or 'counts' is required", "probs" if has_probs else "counts")
    unit = obj.get("unit")
    if unit not in (None, "percent", "probability"):
        raise ParseError(f"expected 'percent' or 'probability', got {unit!r}", "unit")
    if has_counts:
        if unit is not None:
            raise ParseError("'unit' does not apply to counts", "unit")
        raw = _cells(obj["counts"], "counts")
        for key, value in raw.items():
            if isinstance(value, bool) or not isinstance(value, int) or value < 0:
                raise ParseError(f"expected a non-negative integer, got {value!r}", f"counts.{key}")
        return table_from_counts(raw, name=name, source=source)
    raw = _cells(obj["probs"], "probs")
    scale = 100.0 if unit == "percent" else 1.0
    values = [_number(raw[key], f"probs.{key}") / scale for key in CELL_KEYS]
    total = math.fsum(values)
    if abs(total - 1.0) > FILE_SUM_TOL:
        raise ParseError(f"cells sum to {total!r}; expected 1 within {FILE_SUM_TOL:g}", "probs")
    return TestTable.from_probs(*values, atol=FILE_SUM_TOL, name=name, source=source)


def table_to_dict(table: TestTable) -> dict:
    """Inverse of :func:`table_from_dict`; counts are kept when known."""
    out: dict = {"name": table.name}
    if table.counts is not None:
        out["counts"] = dict(zip(CELL_KEYS, table.counts))
    else:
        out["probs"] = dict(zip(CELL_KEYS, table.cells))
    if table.source:
        out["source"] = table.source
    return out


def dumps_table(table: TestTable) -> str:
    return json.dumps(table_to_dict(table), indent=2, sort_keys=True)


def load_dataset(path_or_name: Union[str, os.PathLike]) -> TestTable:
    """Load an embedded dataset by name, or a dataset JSON file by path."""
    key = str(path_or_name)
    if key in EMBEDDED:
        return EMBEDDED[key].table
    if not os.path.exists(key):
        raise ParseError(
            f"no such file, and not an embedded dataset ({', '.join(EMBEDDED)})", key
        )
    try:
        with open(key, encoding="utf-8") as fh:
            obj = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg} at line {exc.lineno}", key) from exc
    return table_from_dict(obj)


# -- published values ---------------------------------------------------------

SIGMAS = (0.6, 0.85, 0.98)
TAUS = (Fraction(1, 20), Fraction(1, 10), Fraction(1, 2), Fraction(19, 20))


@dataclass(frozen=True)
class PublishedCell:
    """A printed interval in percent; ``known_issue`` explains an expected mismatch."""

    lo: float
    hi: float
    location: str
    known_issue: str = ""

    def agrees(self, lo: float, hi: float, tol_pp: float = PUBLISHED_TOL_PP) -> bool:
        return abs(100.0 * lo - self.lo) <= tol_pp and abs(100.0 * hi - self.hi) <= tol_pp


PublishedKey = tuple  # (dataset, measure, sigma, tau)

_STQ_NPV_UPPER = (
    "the printed upper end is 1 - P(y=1, z=0 | t=1)/(1 - tau*zeta); the envelope "
    "1 - tau*max{chi, 1 - p00} carries a factor tau on the tested-pool term"
)
_CT_CONSTANT = "the printed column repeats the tau=1 interval for every tau"
_STQ_NPV_098 = "the envelope min{1 - chi, p00}/(1 - zeta) gives 93.3%"


def _grid(dataset: str, measure: str, rows, location: str, issues: Optional[Mapping] = None) -> dict:
    out = {}
    for tau, cells in rows.items():
        for sigma, cell in zip(SIGMAS, cells):
            lo, hi = cell if isinstance(cell, tuple) else (cell, cell)
            note = (issues or {}).get((sigma, tau), "")
            out[(dataset, measure, sigma, float(tau))] = PublishedCell(lo, hi, location, note)
    return out


def _published() -> dict:
    out: dict = {}
    t4 = "dilation test statistics table"
    for sigma, chi, ppv, npv in (
        (0.6, 98.8, (97.6, 100.0), (0.0, 2.29)),
        (0.85, 69.8, (97.6, 100.0), (56.9, 59.3)),
        (0.98, 60.5, (97.6, 100.0), (75.1, 77.43)),
        (1.0, 59.3, (97.6, 97.6), (77.43, 77.43)),
    ):
        out[("dilation", "prevalence", sigma, 1.0)] = PublishedCell(chi, chi, t4)
        out[("dilation", "ppv_z", sigma, 1.0)] = PublishedCell(*ppv, t4)
        out[("dilation", "npv_z", sigma, 1.0)] = PublishedCell(*npv, t4)
    t6 = "StQ accuracy table"
    for sigma, npv in ((0.6, (58.6, 58.9)), (0.85, (84.7, 85.0)), (0.98, (93.1, 94.1))):
        out[("stq", "ppv_z", sigma, 1.0)] = PublishedCell(99.4, 100.0, t6)
        out[("stq", "npv_z", sigma, 1.0)] = PublishedCell(*npv, t6, _STQ_NPV_098 if sigma == 0.98 else "")
    out.update(
        _grid(
            "stq",
            "prevalence",
            {
                Fraction(1, 20): ((3.01, 60.2), (2.12, 42.5), (1.84, 36.8)),
                Fraction(1, 10): ((6.02, 60.2), (4.25, 42.5), (3.68, 36.8)),
                Fraction(1, 2): ((30.1, 60.2), (21.2, 42.5), (18.4, 36.8)),
                Fraction(19, 20): ((57.2, 60.2), (40.4, 42.5), (35.7, 36.8)),
                Fraction(1): (60.2, 42.5, 36.8),
            },
            "StQ prevalence table",
            {(0.98, Fraction(19, 20)): "tau*gamma/sigma = 0.95*0.3611/0.98 gives 35.0%"},
        )
    )
    out.update(
        _grid(
            "stq",
            "npv_y",
            {
                Fraction(1, 20): ((62.3, 98.8), (90.0, 99.7), (98.9, 100.0)),
                Fraction(1, 10): ((62.3, 97.5), (90.0, 99.3), (98.9, 99.9)),
                Fraction(1, 2): ((62.3, 85.3), (90.0, 96.1), (98.9, 99.6)),
                Fraction(19, 20): ((62.3, 65.2), (90.0, 90.8), (98.9, 98.9)),
                Fraction(1): (62.3, 90.0, 98.9),
            },
            "StQ reference-test NPV table",
        )
    )
    low_tau_uppers = {
        (s, t): _STQ_NPV_UPPER for s in SIGMAS for t in (Fraction(1, 20), Fraction(1, 10))
    }
    low_tau_uppers[(0.98, Fraction(1, 2))] = _STQ_NPV_UPPER
    out.update(
        _grid(
            "stq",
            "npv_z_unconditional",
            {
                Fraction(1, 20): ((40.5, 96.0), (58.5, 96.0), (64.2, 96.0)),
                Fraction(1, 10): ((41.1, 95.9), (59.4, 95.9), (65.3, 95.9)),
                Fraction(1, 2): ((47.4, 83.4), (68.5, 94.0), (75.2, 95.2)),
                Fraction(19, 20): ((57.2, 61.8), (82.8, 86.1), (90.9, 93.8)),
            },
            "StQ whole-population NPV table",
            low_tau_uppers,
        )
    )
    t10 = "BiN accuracy table"
    for sigma, ppv, npv in (
        (0.6, (95.2, 100.0), (73.0, 74.4)),
        (0.85, (95.2, 100.0), (89.1, 90.6)),
        (0.98, (95.2, 97.5), (94.3, 94.9)),
    ):
        out[("bin", "ppv_z", sigma, 1.0)] = PublishedCell(*ppv, t10)
        out[("bin", "npv_z", sigma, 1.0)] = PublishedCell(*npv, t10)
    t13 = "CT (Gietema) whole-population table"
    for tau, prev, npv_y in (
        (Fraction(1, 20), (3.58, 71.7), (49.7, 98.5)),
        (Fraction(1, 10), (7.17, 71.7), (49.7, 97.0)),
        (Fraction(1, 2), (35.8, 71.7), (49.7, 81.7)),
        (Fraction(19, 20), (68.1, 71.7), (49.7, 54.0)),
    ):
        out[("ct-gietema", "prevalence", 0.6, float(tau))] = PublishedCell(*prev, t13)
        out[("ct-gietema", "npv_y", 0.6, float(tau))] = PublishedCell(*npv_y, t13)
        out[("ct-gietema", "npv_z_unconditional", 0.6, float(tau))] = PublishedCell(23.4, 65.1, t13, _CT_CONSTANT)
    return out


PUBLISHED: dict = _published()

#: published dilation thresholds, in percent
PUBLISHED_THRESHOLDS = {
    "dilation": 60.79,
    "stq": 36.3,
    "bin": 26.7,
    "ct-gietema": 63.35,
    "ct-ai": 90.74,
}


def published(dataset: str, measure: str, sigma: float, tau: float) -> Optional[PublishedCell]:
    return PUBLISHED.get((dataset, measure, round(sigma, 12), round(tau, 12)))


def published_keys(dataset: Optional[str] = None) -> Iterable[PublishedKey]:
    return [k for k in PUBLISHED if dataset is None or k[0] == dataset]
