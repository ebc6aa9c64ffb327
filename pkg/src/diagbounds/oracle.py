"""Brute-force enumeration of the joint distributions consistent with the data.

Every feasible ``P(x, y, z)`` is pinned down by two numbers: ``Gamma = P(y=1)``
in ``[tau*gamma, gamma]``, which fixes how many untested people the reference
test would flag, and ``t = P(x=1, y=0, z=1 | t=1)``, the share of tested people
who are infected, missed by the reference test and caught by the new one.
This module sweeps a uniform grid over both, materializes each joint as an
array of cells and evaluates every measure straight from those cells.  It does
not import :mod:`diagbounds.bounds`; agreement with the closed forms is
evidence, not an identity.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import (
    TOL,
    InfeasibleGamma,
    InfeasiblePoint,
    Interval,
    StudyConfig,
    TestTable,
    Undefined,
    require_config,
)
from .frechet import Joint3

DEFAULT_GRID = (201, 4001)
#: slack added to oracle hulls when testing whether they contain the prior
HULL_TOL = 1e-12


class Measure(str, enum.Enum):
    PPVz = "ppv_z"
    NPVz = "npv_z"
    NPVz_unconditional = "npv_z_unconditional"
    SENSz = "sens_z"
    SENSz_unconditional = "sens_z_unconditional"
    P_x0_y0z0 = "p_x0_given_y0z0"
    P_x0_y0z1 = "p_x0_given_y0z1"

    @property
    def population(self) -> bool:
        """Whether the measure refers to the whole population rather than the tested pool."""
        return self in (Measure.NPVz_unconditional, Measure.SENSz_unconditional)


@dataclass(frozen=True)
class FeasiblePoint:
    gamma_cap: float
    t_split: float
    joint: Joint3


def _missed_mass(table: TestTable, sigma: float) -> float:
    """``P(x=1, y=0 | t=1)``: infected tested people the reference test misses."""
    prevalence = table.gamma / sigma
    return prevalence - table.gamma


def _affine_cells(table: TestTable, sigma: float) -> dict[tuple[int, int, int], tuple[float, float]]:
    """Tested-pool cells as ``(intercept, slope)`` in ``t``."""
    missed = _missed_mass(table, sigma)
    return {
        (1, 1, 1): (table.p11, 0.0),
        (1, 1, 0): (table.p10, 0.0),
        (1, 0, 1): (0.0, 1.0),
        (1, 0, 0): (missed, -1.0),
        (0, 0, 1): (table.p01, -1.0),
        (0, 0, 0): (table.p00 - missed, 1.0),
        (0, 1, 1): (0.0, 0.0),
        (0, 1, 0): (0.0, 0.0),
    }


def feasible_t_range(table: TestTable, sigma: float, gamma_cap: Optional[float] = None) -> Interval:
    """Values of ``t`` that keep every tested-pool cell non-negative.

    ``gamma_cap`` only affects the untested block, so it is checked for
    feasibility but does not move the range.
    """
    if gamma_cap is not None and not (0.0 < gamma_cap <= table.gamma + TOL):
        raise InfeasibleGamma(f"Gamma={gamma_cap!r} exceeds the tested-pool yield {table.gamma!r}")
    lo, hi = -np.inf, np.inf
    for intercept, slope in _affine_cells(table, sigma).values():
        if slope > 0:
            lo = max(lo, -intercept / slope)
        elif slope < 0:
            hi = min(hi, intercept / -slope)
        elif intercept < -TOL:
            raise InfeasibleGamma("a fixed cell is negative")
    if lo > hi + TOL:
        raise InfeasibleGamma(f"no feasible split: t must lie in [{lo!r}, {hi!r}]")
    lo = min(max(lo, 0.0), 1.0)
    return Interval(lo, min(max(hi, lo), 1.0))


def _untested(table: TestTable, config: StudyConfig, gamma_cap):
    """``(P(y=1 | t=0), P(x=1 | t=0))``; broadcasts over ``gamma_cap``."""
    tau, sigma = config.tau, config.sigma
    y1 = (np.asarray(gamma_cap, dtype=float) - tau * table.gamma) / (1.0 - tau)
    return y1, y1 / sigma


def _population_pmf(table: TestTable, config: StudyConfig, gamma_caps: np.ndarray, ts: np.ndarray) -> np.ndarray:
    """Cells ``[i_gamma, i_t, x, y, z]`` for every grid point."""
    tau = config.tau
    pmf = np.zeros((gamma_caps.size, ts.size, 2, 2, 2))
    for (x, y, z), (intercept, slope) in _affine_cells(table, config.sigma).items():
        pmf[:, :, x, y, z] = tau * (intercept + slope * ts)[None, :]
    if tau < 1.0:
        y1, x1 = _untested(table, config, gamma_caps)
        # untested people never take the new test, so z=0
        pmf[:, :, 1, 1, 0] += ((1.0 - tau) * y1)[:, None]
        pmf[:, :, 1, 0, 0] += ((1.0 - tau) * (x1 - y1))[:, None]
        pmf[:, :, 0, 0, 0] += ((1.0 - tau) * (1.0 - x1))[:, None]
    return pmf


def joint_from_point(table: TestTable, config: StudyConfig, gamma_cap: float, t_split: float) -> Joint3:
    """Materialize the joint at ``(Gamma, t)``.

    Raises
    ------
    InfeasiblePoint
        If any tested or untested cell would be negative.
    """
    require_config(table, config)
    tau = config.tau
    if tau == 1.0 and abs(gamma_cap - table.gamma) > TOL:
        raise InfeasiblePoint(f"with tau=1, Gamma must equal gamma={table.gamma!r}")
    if not (tau * table.gamma - TOL <= gamma_cap <= table.gamma + TOL):
        raise InfeasiblePoint(f"Gamma={gamma_cap!r} outside [tau*gamma, gamma]")
    tested = np.zeros((2, 2, 2))
    for key, (intercept, slope) in _affine_cells(table, config.sigma).items():
        tested[key] = intercept + slope * t_split
    if np.any(tested < -TOL):
        raise InfeasiblePoint(f"t={t_split!r} makes a tested cell negative")
    tested = np.clip(tested, 0.0, None)
    untested_y1 = untested_x1 = None
    pmf = tested
    if tau < 1.0:
        y1, x1 = (float(v) for v in _untested(table, config, gamma_cap))
        if y1 < -TOL or x1 < y1 - TOL or x1 > 1.0 + TOL:
            raise InfeasiblePoint(f"untested block infeasible at Gamma={gamma_cap!r}")
        untested = np.zeros((2, 2, 2))
        untested[1, 1, 0] = max(y1, 0.0)
        untested[1, 0, 0] = max(x1 - y1, 0.0)
        untested[0, 0, 0] = max(1.0 - x1, 0.0)
        pmf = tau * tested + (1.0 - tau) * untested
        untested_y1, untested_x1 = y1, x1
    tested.setflags(write=False)
    pmf.setflags(write=False)
    return Joint3(
        pmf=pmf,
        gamma_cap=gamma_cap,
        sigma=config.sigma,
        tau=tau,
        tested=tested,
        untested_y1=untested_y1,
        untested_x1=untested_x1,
    )


def feasible_point(table: TestTable, config: StudyConfig, gamma_cap: float, t_split: float) -> FeasiblePoint:
    return FeasiblePoint(gamma_cap, t_split, joint_from_point(table, config, gamma_cap, t_split))


def _grid(lo: float, hi: float, n: int) -> np.ndarray:
    if n < 2:
        raise ValueError("grid sizes must be at least 2")
    if hi - lo <= 0.0:
        return np.array([lo])
    g = np.linspace(lo, hi, n)
    g[0], g[-1] = lo, hi
    return g


def grid_points(table: TestTable, config: StudyConfig, grid: tuple[int, int] = DEFAULT_GRID):
    """The ``Gamma`` and ``t`` axes of the sweep; ``Gamma`` collapses to ``[gamma]`` at ``tau = 1``."""
    require_config(table, config)
    n_gamma, n_t = grid
    if config.tau == 1.0:
        if n_gamma < 1:
            raise ValueError("grid sizes must be positive")
        gammas = np.array([table.gamma])
    else:
        gammas = _grid(config.tau * table.gamma, table.gamma, n_gamma)
    t_range = feasible_t_range(table, config.sigma)
    return gammas, _grid(t_range.lo, t_range.hi, n_t)


def _ratio(num: np.ndarray, den: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(den > 0.0, num / np.where(den > 0.0, den, 1.0), np.nan)


def _evaluate(pmf: np.ndarray, measure: Measure) -> np.ndarray:
    """Measure at every grid point, ``nan`` where its conditioning event is null."""
    x1 = pmf[..., 1, :, :]
    x0 = pmf[..., 0, :, :]
    if measure is Measure.PPVz:
        return _ratio(x1[..., :, 1].sum(-1), pmf[..., :, :, 1].sum((-1, -2)))
    if measure in (Measure.NPVz, Measure.NPVz_unconditional):
        return _ratio(x0[..., :, 0].sum(-1), pmf[..., :, :, 0].sum((-1, -2)))
    if measure in (Measure.SENSz, Measure.SENSz_unconditional):
        return _ratio(x1[..., :, 1].sum(-1), x1.sum((-1, -2)))
    if measure is Measure.P_x0_y0z0:
        return _ratio(x0[..., 0, 0], pmf[..., :, 0, 0].sum(-1))
    if measure is Measure.P_x0_y0z1:
        return _ratio(x0[..., 0, 1], pmf[..., :, 0, 1].sum(-1))
    raise ValueError(f"unknown measure {measure!r}")


def oracle_values(
    table: TestTable,
    config: StudyConfig,
    measure: Measure,
    grid: tuple[int, int] = DEFAULT_GRID,
) -> np.ndarray:
    """Measure evaluated on the ``(Gamma, t)`` grid, shape ``(n_gamma, n_t)``.

    Tested-pool measures use ``tau = 1`` regardless of ``config.tau``.
    """
    measure = Measure(measure)
    if not measure.population:
        config = StudyConfig(config.sigma, 1.0)
    gammas, ts = grid_points(table, config, grid)
    return _evaluate(_population_pmf(table, config, gammas, ts), measure)


def oracle_bounds(
    table: TestTable,
    config: StudyConfig,
    measure: Measure,
    grid: tuple[int, int] = DEFAULT_GRID,
) -> Interval:
    """``[min, max]`` of the measure over the grid, an inner approximation of its identified set."""
    values = oracle_values(table, config, measure, grid)
    finite = values[~np.isnan(values)]
    if finite.size == 0:
        raise Undefined(f"{Measure(measure).value} is undefined at every grid point")
    return Interval.clamped(float(finite.min()), float(finite.max()))


def oracle_dilation(table: TestTable, config: StudyConfig, n_t: int = DEFAULT_GRID[1]) -> bool:
    """Whether the prevalence lies in the hull of ``P(x=1 | z)`` for both ``z``.

    A new-test result that never occurs cannot move beliefs and is skipped.
    """
    if config.tau != 1.0:
        raise ValueError("dilation is defined for the tested pool; use tau=1")
    gammas, ts = grid_points(table, config, (1, n_t))
    pmf = _population_pmf(table, config, gammas, ts)
    prevalence = float(pmf[0, 0, 1].sum())
    for z in (0, 1):
        posterior = _ratio(pmf[..., 1, :, z].sum(-1), pmf[..., :, :, z].sum((-1, -2)))
        finite = posterior[~np.isnan(posterior)]
        if finite.size == 0:
            continue
        if not (finite.min() - HULL_TOL <= prevalence <= finite.max() + HULL_TOL):
            return False
    return True
