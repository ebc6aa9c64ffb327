"""Dilation: when every new-test result leaves the prior inside the posterior set.

A new test is a dilation for the tested pool when both the set of
``P(x=1 | z=1, t=1)`` and the set of ``P(x=1 | z=0, t=1)`` contain the
tested-pool prevalence ``gamma / sigma``.  That happens exactly when
``sigma <= min{gamma*zeta/p11, gamma*(1-zeta)/p10}``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .bounds import prior_containment_bound
from .core import TOL, TestTable, require_sigma

#: minimum apparent sensitivity recommended for rapid antigen tests
WHO_MIN_SENSITIVITY = 0.8


class ThresholdStatus(str, enum.Enum):
    INTERIOR = "InteriorThreshold"
    NEVER = "NeverDilates"
    ALWAYS = "AlwaysDilates"


@dataclass(frozen=True)
class DilationVerdict:
    is_dilation: bool
    binding_term: str  # "positive" (gamma*zeta/p11) or "negative" (gamma*(1-zeta)/p10)
    raw_bound: float
    sigma_used: float

    def __bool__(self) -> bool:
        return self.is_dilation


@dataclass(frozen=True)
class ThresholdResult:
    raw_threshold: float
    status: ThresholdStatus
    gamma: float

    def dilates_at(self, sigma: float) -> bool:
        return sigma <= self.raw_threshold + TOL


@dataclass(frozen=True)
class ScreenResult:
    passed: bool
    zeta: float
    limit: float
    apparent_sensitivity: float
    explanation: str

    def __bool__(self) -> bool:
        return self.passed


def dilation_terms(table: TestTable) -> tuple[float, float]:
    """``(gamma*zeta/p11, gamma*(1-zeta)/p10)`` with zero denominators as ``inf``."""
    gamma, zeta = table.gamma, table.zeta
    positive = gamma * zeta / table.p11 if table.p11 > 0 else math.inf
    negative = gamma * (1.0 - zeta) / table.p10 if table.p10 > 0 else math.inf
    return positive, negative


def dilation_bound(table: TestTable) -> float:
    """Largest reference sensitivity at which the new test is a dilation.

    May exceed one, in which case every admissible ``sigma`` dilates.
    """
    return prior_containment_bound(table)


def is_dilation(table: TestTable, sigma: float) -> DilationVerdict:
    require_sigma(table, sigma)
    positive, negative = dilation_terms(table)
    raw = min(positive, negative)
    binding = "positive" if positive <= negative else "negative"
    return DilationVerdict(sigma <= raw + TOL, binding, raw, sigma)


def dilation_threshold(table: TestTable) -> ThresholdResult:
    """The threshold sensitivity and where it sits relative to ``(gamma, 1]``.

    ``raw_threshold`` is reported unclamped so a value above one still shows
    how far the test is from being informative.
    """
    raw = dilation_bound(table)
    gamma = table.gamma
    if raw <= gamma + TOL:
        status = ThresholdStatus.NEVER
    elif raw >= 1.0 - TOL:
        status = ThresholdStatus.ALWAYS
    else:
        status = ThresholdStatus.INTERIOR
    return ThresholdResult(raw, status, gamma)


def who_screen(table: TestTable, sigma: float, sigma_min_threshold: float = WHO_MIN_SENSITIVITY) -> ScreenResult:
    """Yield check ``zeta <= sigma * sigma_min_threshold``.

    Passing rules out dilation for a test whose apparent sensitivity
    ``p11/gamma`` exceeds ``sigma_min_threshold``, provided the negative-result
    term ``gamma*(1-zeta)/p10`` is not the binding one.
    """
    if not (0.0 < sigma_min_threshold <= 1.0):
        raise ValueError(f"sigma_min_threshold must lie in (0, 1], got {sigma_min_threshold!r}")
    zeta = table.zeta
    limit = sigma * sigma_min_threshold
    passed = zeta <= limit + TOL
    apparent = table.p11 / table.gamma if table.gamma > 0 else float("nan")
    positive, negative = dilation_terms(table)
    verdict = "passes" if passed else "fails"
    relation = "<=" if passed else ">"
    lines = [
        f"new-test yield {zeta:.4f} {relation} sigma * minimum sensitivity = {limit:.4f}: screen {verdict}.",
    ]
    if passed:
        caveats = []
        if not apparent > sigma_min_threshold:
            caveats.append(
                f"apparent sensitivity {apparent:.4f} does not exceed the minimum {sigma_min_threshold:.4f}"
            )
        if negative < positive:
            caveats.append("the negative-result term gamma*(1-zeta)/p10 binds")
        if caveats:
            lines.append("Not sufficient to rule out dilation here: " + "; ".join(caveats) + ".")
        else:
            lines.append("Sufficient to rule out dilation for this test.")
    else:
        lines.append("The screen is only sufficient; check the exact dilation threshold.")
    return ScreenResult(passed, zeta, limit, apparent, " ".join(lines))
