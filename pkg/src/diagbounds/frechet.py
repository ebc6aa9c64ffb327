"""Extreme joint distributions of infection, reference and new-test results.

For a fixed ``Gamma = P(y=1)`` in ``[tau*gamma, gamma]`` the pair of
overlapping marginals ``P(x, y)`` and ``P(y, z)`` is known; the set of all
``P(x, y, z)`` sharing them is bounded in CDF order by two extreme members.
Because ``y`` is the shared coordinate, the only freedom left is how the
``(x=1, y=0)`` mass splits across ``z``; the extremes put as little or as much
of it as possible on ``z=1``.

Arrays are indexed ``[x, y, z]``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import (
    TOL,
    InfeasibleGamma,
    InternalConsistencyError,
    Interval,
    StudyConfig,
    TestTable,
    require_config,
)


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    a.setflags(write=False)
    return a


def _clean(a: np.ndarray) -> np.ndarray:
    """Clamp cancellation noise of at most ``TOL`` below zero; reject anything worse."""
    a = np.asarray(a, dtype=float)
    if np.any(a < -TOL):
        raise InternalConsistencyError(f"negative probability mass {a.min()!r}")
    return np.where(a < 0.0, 0.0, a)


@dataclass(frozen=True)
class MarginalXY:
    """``P(x, y)`` for a given ``Gamma``; ``cells[x, y]``."""

    cells: np.ndarray
    gamma_cap: float
    sigma: float

    @property
    def prevalence(self) -> float:
        return self.gamma_cap / self.sigma


@dataclass(frozen=True)
class MarginalYZ:
    """``P(y, z)`` for a given ``Gamma``; ``cells[y, z]``."""

    cells: np.ndarray
    gamma_cap: float
    tau: float


@dataclass(frozen=True, eq=False)
class Joint3:
    """One member of the Fréchet class.

    ``pmf[x, y, z]`` is the distribution of the population it describes: the
    tested pool when ``tau == 1``, the whole population otherwise.  When the
    member was built from an explicit tested/untested split, ``tested`` holds
    ``P(x, y, z | t=1)`` and ``untested_y1`` / ``untested_x1`` hold
    ``P(y=1 | t=0)`` / ``P(x=1 | t=0)``; those fields are ``None`` when
    ``tau == 1`` or when no split is known.
    """

    pmf: np.ndarray
    gamma_cap: float
    sigma: float
    tau: float = 1.0
    tested: Optional[np.ndarray] = None
    untested_y1: Optional[float] = None
    untested_x1: Optional[float] = None

    def prob(self, x: Optional[int] = None, y: Optional[int] = None, z: Optional[int] = None) -> float:
        """Marginal probability; ``None`` sums over that coordinate."""
        idx = tuple(slice(None) if v is None else v for v in (x, y, z))
        return float(np.sum(self.pmf[idx]))

    def cdf(self) -> np.ndarray:
        """``F[x, y, z] = P(X <= x, Y <= y, Z <= z)``."""
        return np.cumsum(np.cumsum(np.cumsum(self.pmf, axis=0), axis=1), axis=2)

    def marginal_xy(self) -> np.ndarray:
        return self.pmf.sum(axis=2)

    def marginal_yz(self) -> np.ndarray:
        return self.pmf.sum(axis=0)


def gamma_range(table: TestTable, config: StudyConfig) -> Interval:
    """Admissible ``Gamma = P(y=1)``: ``[tau*gamma, gamma]``."""
    require_config(table, config)
    return Interval(config.tau * table.gamma, table.gamma)


def _check_gamma(table: TestTable, tau: float, gamma_cap: float) -> None:
    lo, hi = tau * table.gamma, table.gamma
    if not (lo - TOL <= gamma_cap <= hi + TOL):
        raise InfeasibleGamma(f"Gamma={gamma_cap!r} outside [{lo!r}, {hi!r}]")


def marginal_xy(gamma_cap: float, sigma: float) -> MarginalXY:
    """Joint of infection and reference result when ``P(y=1) = Gamma``.

    No false positives means ``P(x=0, y=1) = 0``; sensitivity ``sigma`` fixes
    prevalence at ``Gamma / sigma``.
    """
    if not (0.0 < sigma <= 1.0):
        raise InfeasibleGamma(f"sigma must lie in (0, 1], got {sigma!r}")
    if not (0.0 < gamma_cap <= sigma + TOL):
        raise InfeasibleGamma(f"Gamma={gamma_cap!r} must lie in (0, sigma={sigma!r}]")
    cells = np.array(
        [
            [1.0 - gamma_cap / sigma, 0.0],
            [gamma_cap * (1.0 - sigma) / sigma, gamma_cap],
        ]
    )
    return MarginalXY(_frozen(_clean(cells)), gamma_cap, sigma)


def marginal_yz(table: TestTable, tau: float, gamma_cap: float) -> MarginalYZ:
    """Joint of the two test results in the whole population.

    Untested people never have ``z=1``; the untested positives of the
    reference test make up ``Gamma - tau*gamma``.
    """
    _check_gamma(table, tau, gamma_cap)
    cells = np.array(
        [
            [1.0 - gamma_cap - tau * table.p01, tau * table.p01],
            [gamma_cap - tau * table.p11, tau * table.p11],
        ]
    )
    return MarginalYZ(_frozen(_clean(cells)), gamma_cap, tau)


def _split_range(xy: MarginalXY, yz: MarginalYZ) -> tuple[float, float]:
    """Bounds on ``P(x=1, y=0, z=1)`` given both marginals."""
    x1y0 = xy.cells[1, 0]
    y0z0, y0z1 = yz.cells[0, 0], yz.cells[0, 1]
    return max(0.0, x1y0 - y0z0), min(x1y0, y0z1)


def _assemble(xy: MarginalXY, yz: MarginalYZ, split: float) -> np.ndarray:
    x1y0 = xy.cells[1, 0]
    pmf = np.zeros((2, 2, 2))
    pmf[1, 1, :] = yz.cells[1, :]
    pmf[1, 0, 1] = split
    pmf[1, 0, 0] = x1y0 - split
    pmf[0, 0, 1] = yz.cells[0, 1] - split
    pmf[0, 0, 0] = yz.cells[0, 0] - (x1y0 - split)
    return _frozen(_clean(pmf))


def extreme_pmfs(
    table: TestTable, sigma: float, tau: float, gamma_cap: float
) -> tuple[Joint3, Joint3]:
    """Lower and upper extreme members of the Fréchet class for one ``Gamma``.

    Returns
    -------
    (lower, upper) : tuple of Joint3
        ``lower.cdf() <= J.cdf() <= upper.cdf()`` cellwise for every joint
        ``J`` with the same ``(x, y)`` and ``(y, z)`` marginals.  With
        ``tau == 1`` and ``gamma_cap == gamma`` these are the tested-pool
        extremes every closed-form bound is read from.
    """
    require_config(table, StudyConfig(sigma=sigma, tau=tau))
    _check_gamma(table, tau, gamma_cap)
    xy = marginal_xy(gamma_cap, sigma)
    yz = marginal_yz(table, tau, gamma_cap)
    lo, hi = _split_range(xy, yz)
    if lo > hi + TOL:
        raise InfeasibleGamma(f"no joint distribution for Gamma={gamma_cap!r}")
    hi = max(lo, hi)
    tested_pool = tau == 1.0
    pair = []
    for split in (lo, hi):
        pmf = _assemble(xy, yz, split)
        pair.append(
            Joint3(
                pmf=pmf,
                gamma_cap=gamma_cap,
                sigma=sigma,
                tau=tau,
                tested=pmf if tested_pool else None,
            )
        )
    return pair[0], pair[1]


def tested_extremes(table: TestTable, sigma: float) -> tuple[Joint3, Joint3]:
    """Extremes of ``P(x, y, z | t=1)``: the Fréchet class with ``tau = 1``."""
    return extreme_pmfs(table, sigma, 1.0, table.gamma)
