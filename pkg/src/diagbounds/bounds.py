"""Sharp identification bounds on the accuracy of both tests.

Every interval is read off the extreme members of the Fréchet class (see
:mod:`diagbounds.frechet`) as a max/min envelope, so no case split is needed
to compute it.  The case labels of :func:`classify_case` and
:func:`classify_case_star` are computed independently and only describe which
closed form is active.

Notation: ``gamma``/``zeta`` are the yields of the reference and the new test
among tested people, ``chi = gamma / sigma`` is the prevalence in the tested
pool, and ``tau = P(t=1)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Literal, Optional

import numpy as np

from .core import (
    BOUNDARY_TOL,
    TOL,
    DegenerateYield,
    Interval,
    StudyConfig,
    TestTable,
    clamp_probability,
    require_config,
    require_sigma,
)
from .frechet import extreme_pmfs, tested_extremes

Method = Literal["sharp", "frechet"]
DEFAULT_SENSITIVITY_GRID = 2001


class Case(str, enum.Enum):
    CONFIRMATORY = "C"
    INFORMATIVE = "I"
    UNINFORMATIVE = "U"
    CONTRADICTORY = "X"


@dataclass(frozen=True)
class CaseLabel:
    """Regime relating the two tests; ``starred`` for the whole-population variant."""

    case: Case
    boundary: bool = False
    starred: bool = False

    @property
    def label(self) -> str:
        return self.case.value + ("*" if self.starred else "")

    def __str__(self) -> str:
        return self.label


@dataclass(frozen=True)
class CaseLabelStar(CaseLabel):
    starred: bool = True


@dataclass(frozen=True)
class EstablishedPosteriors:
    """Identified sets for ``P(x=1 | .)`` before and after a reference result."""

    prior: Interval
    after_positive: Interval
    after_negative: Interval


@dataclass(frozen=True)
class CombinedPosteriors:
    """Posteriors after both tests; ``None`` marks a probability-zero conditioning event."""

    ppv_any_z: Interval
    p_x0_given_y0z0: Optional[Interval]
    p_x0_given_y0z1: Optional[Interval]


def _chi(table: TestTable, sigma: float) -> float:
    return table.gamma / sigma


def _ratio(num: float, den: float) -> float:
    return clamp_probability(num / den)


# -- the reference test -------------------------------------------------------


def prevalence_bounds(table: TestTable, config: StudyConfig) -> Interval:
    """Population prevalence ``[tau*gamma/sigma, gamma/sigma]``."""
    require_config(table, config)
    chi = _chi(table, config.sigma)
    return Interval.clamped(config.tau * chi, chi)


def _npv_y(alpha: float, sigma: float) -> float:
    """Reference NPV when ``P(y=1) = alpha``; non-increasing in ``alpha``."""
    return (sigma - alpha) / (sigma * (1.0 - alpha))


def npv_established(table: TestTable, config: StudyConfig) -> Interval:
    """Reference-test NPV: ``NPV_y(gamma) <= NPV_y <= NPV_y(tau*gamma)``."""
    require_config(table, config)
    gamma, sigma, tau = table.gamma, config.sigma, config.tau
    if gamma >= 1.0:
        raise DegenerateYield("reference yield gamma is 1; no negative results")
    return Interval.clamped(_npv_y(gamma, sigma), _npv_y(tau * gamma, sigma))


def established_posteriors(table: TestTable, config: StudyConfig) -> EstablishedPosteriors:
    require_config(table, config)
    gamma, sigma, tau = table.gamma, config.sigma, config.tau
    prior = prevalence_bounds(table, config)
    after_negative = Interval.clamped(
        (tau * gamma / sigma) * (1.0 - sigma) / (1.0 - tau * gamma),
        (gamma / sigma) * (1.0 - sigma) / (1.0 - gamma),
    )
    return EstablishedPosteriors(prior, Interval(1.0, 1.0), after_negative)


# -- case taxonomy ------------------------------------------------------------


def _label(value: float, first: float, second: float) -> tuple[Case, bool]:
    """Place ``value`` against the two thresholds with weak inequalities winning."""
    above_first = value >= first - TOL
    above_second = value >= second - TOL
    if above_first and above_second:
        case = Case.CONFIRMATORY
    elif above_first:
        case = Case.INFORMATIVE
    elif above_second:
        case = Case.UNINFORMATIVE
    else:
        case = Case.CONTRADICTORY
    boundary = min(abs(value - first), abs(value - second)) <= BOUNDARY_TOL
    return case, boundary


def classify_case(table: TestTable, sigma: float) -> CaseLabel:
    """Compare ``P(y=0, z=0 | t=1)`` with ``chi*(1-sigma)`` and ``1-chi``."""
    require_sigma(table, sigma)
    chi = _chi(table, sigma)
    case, boundary = _label(table.p00, chi * (1.0 - sigma), 1.0 - chi)
    return CaseLabel(case, boundary)


def classify_case_star(table: TestTable, config: StudyConfig) -> CaseLabel:
    """Whole-population case: the first threshold becomes ``1 - gamma - (1-chi)/tau``."""
    require_config(table, config)
    chi = _chi(table, config.sigma)
    first = 1.0 - table.gamma - (1.0 - chi) / config.tau
    case, boundary = _label(table.p00, first, 1.0 - chi)
    return CaseLabelStar(case, boundary)


# -- the new test in the tested pool ------------------------------------------


def _x_z(joint, x: int, z: int) -> float:
    return joint.prob(x=x, z=z)


def ppv_new(table: TestTable, sigma: float) -> Interval:
    """``P(x=1 | z=1, t=1)``.

    The lower end puts as little infected-but-missed mass on ``z=1`` as the
    data allow, the upper end as much.
    """
    require_sigma(table, sigma)
    if table.zeta <= 0.0:
        raise DegenerateYield("new-test yield zeta is 0")
    lower, upper = tested_extremes(table, sigma)
    return Interval.clamped(_x_z(lower, 1, 1) / table.zeta, _x_z(upper, 1, 1) / table.zeta)


def npv_new(table: TestTable, sigma: float) -> Interval:
    """``P(x=0 | z=0, t=1)``: ``[max{0, p00 - chi(1-sigma)}, min{1-chi, p00}] / (1-zeta)``."""
    require_sigma(table, sigma)
    if table.zeta >= 1.0:
        raise DegenerateYield("new-test yield zeta is 1; no negative results")
    lower, upper = tested_extremes(table, sigma)
    den = 1.0 - table.zeta
    return Interval.clamped(_x_z(lower, 0, 0) / den, _x_z(upper, 0, 0) / den)


def ppv_new_perfect_reference(table: TestTable) -> float:
    """PPV when the reference never misses: ``P(y=1 | z=1, t=1)``."""
    if table.zeta <= 0.0:
        raise DegenerateYield("new-test yield zeta is 0")
    return _ratio(table.p11, table.zeta)


def npv_new_perfect_reference(table: TestTable) -> float:
    """NPV when the reference never misses: ``P(y=0 | z=0, t=1)``."""
    if table.zeta >= 1.0:
        raise DegenerateYield("new-test yield zeta is 1; no negative results")
    return _ratio(table.p00, 1.0 - table.zeta)


def prior_containment_bound(table: TestTable) -> float:
    """``min{gamma*zeta/p11, gamma*(1-zeta)/p10}``, zero denominators read as infinity.

    The posterior sets after either new-test result contain the tested-pool
    prevalence exactly when ``sigma`` does not exceed this value.
    """
    gamma, zeta = table.gamma, table.zeta
    if gamma <= 0.0:
        raise DegenerateYield("reference yield gamma is 0")
    positive = gamma * zeta / table.p11 if table.p11 > 0 else math.inf
    negative = gamma * (1.0 - zeta) / table.p10 if table.p10 > 0 else math.inf
    return min(positive, negative)


def ppv_contains_prior(table: TestTable, sigma: float) -> bool:
    """Whether the PPV set contains the tested-pool prevalence ``gamma/sigma``."""
    require_sigma(table, sigma)
    return sigma <= prior_containment_bound(table) + TOL


def npv_contains_prior(table: TestTable, sigma: float) -> bool:
    """Whether the set of ``P(x=1 | z=0, t=1)`` contains ``gamma/sigma``.

    The condition coincides with :func:`ppv_contains_prior`: at every
    feasible joint the prevalence is a ``zeta``-weighted average of the two
    posteriors, so one set reaches across it iff the other does.
    """
    require_sigma(table, sigma)
    return sigma <= prior_containment_bound(table) + TOL


def combined_posteriors(table: TestTable, sigma: float) -> CombinedPosteriors:
    """``P(x | y, z, t=1)`` after both tests.

    A positive reference result is always conclusive.  For ``y=0`` the
    infected-but-missed mass ``chi(1-sigma)`` is split across ``z`` and only
    the extremes of that split matter.
    """
    require_sigma(table, sigma)
    lower, upper = tested_extremes(table, sigma)
    out = {}
    for z, key in ((0, "p_x0_given_y0z0"), (1, "p_x0_given_y0z1")):
        den = table.cell(0, z)
        if den <= 0.0:
            out[key] = None
            continue
        a = lower.prob(x=0, y=0, z=z) / den
        b = upper.prob(x=0, y=0, z=z) / den
        out[key] = Interval.clamped(min(a, b), max(a, b))
    return CombinedPosteriors(Interval(1.0, 1.0), **out)


def sensitivity_new_conditional(table: TestTable, sigma: float) -> Interval:
    """``P(z=1 | x=1, t=1)``: the PPV numerators divided by ``chi`` instead of ``zeta``."""
    require_sigma(table, sigma)
    lower, upper = tested_extremes(table, sigma)
    chi = _chi(table, sigma)
    return Interval.clamped(_x_z(lower, 1, 1) / chi, _x_z(upper, 1, 1) / chi)


# -- the new test in the whole population -------------------------------------


def npv_new_unconditional(
    table: TestTable, config: StudyConfig, method: Method = "sharp"
) -> Interval:
    """``P(x=0 | z=0)`` in the whole population.

    Parameters
    ----------
    method : {"sharp", "frechet"}
        ``"sharp"`` keeps the tested pool's own structure: its infected share
        is exactly ``chi`` and every untested person has ``z=0``, so
        ``P(x=0, z=0)`` ranges over
        ``tau*[tested envelope] + (1-tau)*[1-chi, 1]``.
        ``"frechet"`` uses the whole-population Fréchet class at
        ``Gamma = gamma`` (lower) and ``Gamma = tau*gamma`` (upper), i.e.
        ``max{0, 1-chi-tau*p01}`` and ``1 - tau*max{chi, 1-p00}``.  Both agree
        on the upper end and whenever ``p00 >= chi(1-sigma)``; elsewhere the
        Fréchet lower end is valid but not attained.
    """
    require_config(table, config)
    tau, sigma = config.tau, config.sigma
    den = 1.0 - tau * table.zeta
    if den <= 0.0:
        raise DegenerateYield("tau * zeta is 1; no negative new-test results")
    chi = _chi(table, sigma)
    if method == "sharp":
        t_lower, t_upper = tested_extremes(table, sigma)
        lo = tau * _x_z(t_lower, 0, 0) + (1.0 - tau) * (1.0 - chi)
        hi = tau * _x_z(t_upper, 0, 0) + (1.0 - tau)
    elif method == "frechet":
        lower, _ = extreme_pmfs(table, sigma, tau, table.gamma)
        _, upper = extreme_pmfs(table, sigma, tau, tau * table.gamma)
        lo, hi = _x_z(lower, 0, 0), _x_z(upper, 0, 0)
    else:
        raise ValueError(f"unknown method {method!r}")
    return Interval.clamped(lo / den, hi / den)


def gamma_grid(table: TestTable, tau: float, grid_size: int) -> np.ndarray:
    """Uniform grid over ``[tau*gamma, gamma]`` including both ends."""
    if grid_size < 2:
        raise ValueError("grid_size must be at least 2")
    if tau == 1.0:
        return np.array([table.gamma])
    grid = np.linspace(tau * table.gamma, table.gamma, grid_size)
    grid[0], grid[-1] = tau * table.gamma, table.gamma
    return grid


def _sensitivity_numerators(
    table: TestTable, config: StudyConfig, gamma_cap: float, method: Method, tested=None
) -> tuple[float, float]:
    tau, sigma = config.tau, config.sigma
    if method == "sharp":
        lower, upper = tested if tested is not None else tested_extremes(table, sigma)
        # untested infected people never test positive on the new test
        return tau * _x_z(lower, 1, 1), tau * _x_z(upper, 1, 1)
    if method == "frechet":
        lower, upper = extreme_pmfs(table, sigma, tau, gamma_cap)
        return _x_z(lower, 1, 1), _x_z(upper, 1, 1)
    raise ValueError(f"unknown method {method!r}")


def sensitivity_bounds_at(
    table: TestTable, config: StudyConfig, gamma_cap: float, method: Method = "sharp"
) -> Interval:
    """Sharp ``[L, H]`` for ``P(z=1 | x=1)`` with ``P(y=1) = gamma_cap`` held fixed."""
    require_config(table, config)
    lo, hi = _sensitivity_numerators(table, config, gamma_cap, method)
    prevalence = gamma_cap / config.sigma
    return Interval.clamped(lo / prevalence, hi / prevalence)


def sensitivity_new_unconditional(
    table: TestTable,
    config: StudyConfig,
    grid_size: int = DEFAULT_SENSITIVITY_GRID,
    method: Method = "sharp",
) -> Interval:
    """``P(z=1 | x=1)`` in the whole population.

    Numerator and denominator both move with ``Gamma``, so the per-``Gamma``
    bounds ``[L, H]`` are evaluated on a uniform grid over
    ``[tau*gamma, gamma]`` and the result is ``[min L, max H]``.
    """
    require_config(table, config)
    tested = tested_extremes(table, config.sigma) if method == "sharp" else None
    lows, highs = [], []
    for g in gamma_grid(table, config.tau, grid_size):
        lo, hi = _sensitivity_numerators(table, config, float(g), method, tested)
        prevalence = g / config.sigma
        lows.append(lo / prevalence)
        highs.append(hi / prevalence)
    return Interval.clamped(min(lows), max(highs))
