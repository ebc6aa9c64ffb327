"""Domain types and validation shared by every other module.

A :class:`TestTable` holds the joint distribution of the reference result
``y`` and the new-test result ``z`` among tested people; cell ``pab`` is
``P(y=a, z=b | t=1)``.  A :class:`StudyConfig` adds the reference test's
sensitivity ``sigma`` and the representativeness ``tau = P(t=1)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, NamedTuple, Optional, Sequence, Union

#: absolute tolerance for every comparison against a case threshold
TOL = 1e-12
#: distance from a threshold within which a boundary flag is raised
BOUNDARY_TOL = 1e-9

CELL_KEYS = ("y0z0", "y0z1", "y1z0", "y1z1")


class DiagBoundsError(ValueError):
    """Base class for all errors raised by this package."""


class EmptyData(DiagBoundsError):
    pass


class SigmaInconsistent(DiagBoundsError):
    """Reference sensitivity is not above the reference yield."""


class DegenerateYield(DiagBoundsError):
    """A yield is 0 or 1, so a conditional probability is undefined."""


class BadTau(DiagBoundsError):
    pass


class BadSigma(DiagBoundsError):
    pass


class InfeasibleGamma(DiagBoundsError):
    """``P(y=1)`` lies outside the range allowed by the data and assumptions."""


class InfeasiblePoint(DiagBoundsError):
    pass


class Undefined(DiagBoundsError):
    """The conditioning event has probability zero."""


class ParseError(DiagBoundsError):
    def __init__(self, message: str, path: str = ""):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class InternalConsistencyError(ArithmeticError):
    """A computed probability left [0, 1] by more than rounding noise."""


def clamp_probability(value: float, what: str = "probability") -> float:
    """Clamp rounding noise of at most ``TOL`` back into [0, 1]."""
    if value < -TOL or value > 1 + TOL or math.isnan(value):
        raise InternalConsistencyError(f"{what} = {value!r} is outside [0, 1]")
    return float(min(1.0, max(0.0, value)))


@dataclass(frozen=True)
class Interval:
    """Closed subinterval ``[lo, hi]`` of [0, 1]."""

    lo: float
    hi: float

    def __post_init__(self):
        if not (0.0 <= self.lo <= self.hi <= 1.0):
            raise InternalConsistencyError(f"invalid interval [{self.lo!r}, {self.hi!r}]")

    @classmethod
    def clamped(cls, lo: float, hi: float) -> "Interval":
        """Build an interval, absorbing rounding noise up to ``TOL``."""
        lo = clamp_probability(lo, "lower bound")
        hi = clamp_probability(hi, "upper bound")
        if lo > hi:
            if lo - hi > TOL:
                raise InternalConsistencyError(f"lower bound {lo!r} exceeds upper bound {hi!r}")
            lo = hi
        return cls(lo, hi)

    @classmethod
    def point(cls, value: float) -> "Interval":
        v = clamp_probability(value)
        return cls(v, v)

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def is_point(self) -> bool:
        return self.width <= TOL

    def contains(self, value: float, tol: float = TOL) -> bool:
        return self.lo - tol <= value <= self.hi + tol

    def contains_interval(self, other: "Interval", tol: float = TOL) -> bool:
        return self.lo - tol <= other.lo and other.hi <= self.hi + tol

    def complement(self) -> "Interval":
        """The interval of ``1 - v`` for ``v`` in this interval."""
        return Interval.clamped(1.0 - self.hi, 1.0 - self.lo)

    def as_tuple(self) -> tuple[float, float]:
        return (self.lo, self.hi)

    def __iter__(self):
        yield self.lo
        yield self.hi


@dataclass(frozen=True)
class TestTable:
    """Joint distribution ``P(y, z | t=1)`` of the two tests' results.

    Cells must be non-negative and sum to one within ``TOL``; use
    :meth:`from_probs` or :func:`table_from_counts` to normalize raw input.
    """

    __test__ = False  # not a pytest class

    p00: float
    p01: float
    p10: float
    p11: float
    name: str = ""
    source: str = ""
    counts: Optional[tuple[int, int, int, int]] = field(default=None, compare=False)

    def __post_init__(self):
        for key, value in zip(CELL_KEYS, self.cells):
            if not (0.0 <= value <= 1.0) or math.isnan(value):
                raise ParseError(f"cell must lie in [0, 1], got {value!r}", key)
        total = math.fsum(self.cells)
        if abs(total - 1.0) > TOL:
            raise ParseError(f"cells sum to {total!r}, expected 1")

    @classmethod
    def from_probs(
        cls,
        p00: float,
        p01: float,
        p10: float,
        p11: float,
        *,
        atol: float = 1e-6,
        name: str = "",
        source: str = "",
    ) -> "TestTable":
        """Normalize four probabilities whose sum is within ``atol`` of one."""
        cells = (float(p00), float(p01), float(p10), float(p11))
        for key, value in zip(CELL_KEYS, cells):
            if value < 0 or math.isnan(value) or math.isinf(value):
                raise ParseError(f"cell must be a non-negative number, got {value!r}", key)
        total = math.fsum(cells)
        if abs(total - 1.0) > atol:
            raise ParseError(f"cells sum to {total!r}, more than {atol:g} away from 1")
        return cls(*_renormalize(cells), name=name, source=source)

    @property
    def cells(self) -> tuple[float, float, float, float]:
        return (self.p00, self.p01, self.p10, self.p11)

    def cell(self, y: int, z: int) -> float:
        return self.cells[2 * y + z]

    @property
    def gamma(self) -> float:
        """Reference-test yield ``P(y=1 | t=1)``."""
        if self.counts is not None:
            c = self.counts
            return (c[2] + c[3]) / sum(c)
        return self.p10 + self.p11

    @property
    def zeta(self) -> float:
        """New-test yield ``P(z=1 | t=1)``."""
        if self.counts is not None:
            c = self.counts
            return (c[1] + c[3]) / sum(c)
        return self.p01 + self.p11

    @property
    def apparent_sensitivity(self) -> float:
        """``P(z=1 | y=1, t=1)``, the new test's sensitivity measured against the reference."""
        if self.gamma == 0:
            raise DegenerateYield("apparent sensitivity needs a positive reference yield")
        return self.p11 / self.gamma

    def to_dict(self) -> dict:
        out = {"name": self.name, "probs": dict(zip(CELL_KEYS, self.cells))}
        if self.source:
            out["source"] = self.source
        return out


def _renormalize(cells: Sequence[float]) -> tuple[float, ...]:
    total = math.fsum(cells)
    out = [c / total for c in cells]
    # push the residual into the largest cell so fsum(out) == 1 as closely as binary64 allows
    k = max(range(len(out)), key=out.__getitem__)
    out[k] = 1.0 - math.fsum(out[:k] + out[k + 1 :])
    return tuple(out)


CountsLike = Union[Mapping[str, int], Sequence[int]]


def table_from_counts(counts: CountsLike, *, name: str = "", source: str = "") -> TestTable:
    """Build a :class:`TestTable` from four non-negative counts.

    ``counts`` is either a mapping with keys ``y0z0, y0z1, y1z0, y1z1`` or a
    sequence in that order.
    """
    if isinstance(counts, Mapping):
        missing = [k for k in CELL_KEYS if k not in counts]
        if missing:
            raise ParseError("missing count", missing[0])
        raw = [counts[k] for k in CELL_KEYS]
    else:
        raw = list(counts)
        if len(raw) != 4:
            raise ParseError(f"expected 4 counts, got {len(raw)}")
    ints = []
    for key, value in zip(CELL_KEYS, raw):
        if isinstance(value, bool) or int(value) != value or value < 0:
            raise ParseError(f"count must be a non-negative integer, got {value!r}", key)
        ints.append(int(value))
    total = sum(ints)
    if total == 0:
        raise EmptyData("all counts are zero")
    cells = _renormalize([c / total for c in ints])
    return TestTable(*cells, name=name, source=source, counts=tuple(ints))


def yields(table: TestTable) -> tuple[float, float]:
    """Return ``(gamma, zeta)``, the reference and new-test yields."""
    return table.gamma, table.zeta


@dataclass(frozen=True)
class StudyConfig:
    """Reference sensitivity, representativeness and optional screening minimum.

    No validation happens here; see :func:`validate_config`.
    """

    sigma: float
    tau: float = 1.0
    sigma_min_threshold: Optional[float] = None


class Violation(NamedTuple):
    kind: type
    message: str


@dataclass(frozen=True)
class ValidationResult:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok

    @property
    def kinds(self) -> tuple[type, ...]:
        return tuple(v.kind for v in self.violations)

    def raise_if_invalid(self) -> None:
        if self.violations:
            first = self.violations[0]
            err = first.kind("; ".join(v.message for v in self.violations))
            err.violations = self.violations
            raise err


def validate_config(table: TestTable, config: StudyConfig) -> ValidationResult:
    """Check a configuration against the data and the maintained assumptions.

    Valid iff ``gamma < sigma <= 1``, ``0 < tau <= 1`` and both yields are
    positive.  All violations are collected rather than stopping at the first.
    """
    out: list[Violation] = []
    gamma, zeta = yields(table)
    sigma, tau = config.sigma, config.tau
    if not (0.0 < tau <= 1.0):
        out.append(Violation(BadTau, f"tau must lie in (0, 1], got {tau!r}"))
    if not (0.0 < sigma <= 1.0):
        out.append(Violation(BadSigma, f"sigma must lie in (0, 1], got {sigma!r}"))
    if gamma <= 0.0:
        out.append(Violation(DegenerateYield, "reference yield gamma is 0"))
    if zeta <= 0.0:
        out.append(Violation(DegenerateYield, "new-test yield zeta is 0"))
    if 0.0 < sigma <= 1.0 and sigma <= gamma:
        out.append(
            Violation(
                SigmaInconsistent,
                f"sigma={sigma!r} must exceed the reference yield gamma={gamma!r}",
            )
        )
    smin = config.sigma_min_threshold
    if smin is not None and not (0.0 < smin <= 1.0):
        out.append(Violation(BadSigma, f"minimum sensitivity threshold must lie in (0, 1], got {smin!r}"))
    return ValidationResult(tuple(out))


def require_sigma(table: TestTable, sigma: float) -> None:
    """Raise unless ``gamma < sigma <= 1`` and ``gamma > 0``."""
    if not (0.0 < sigma <= 1.0):
        raise BadSigma(f"sigma must lie in (0, 1], got {sigma!r}")
    if table.gamma <= 0.0:
        raise DegenerateYield("reference yield gamma is 0")
    if sigma <= table.gamma:
        raise SigmaInconsistent(f"sigma={sigma!r} must exceed the reference yield gamma={table.gamma!r}")


def require_config(table: TestTable, config: StudyConfig) -> None:
    """Like :func:`require_sigma` but also checks ``tau``."""
    if not (0.0 < config.tau <= 1.0):
        raise BadTau(f"tau must lie in (0, 1], got {config.tau!r}")
    require_sigma(table, config.sigma)
