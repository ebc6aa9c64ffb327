"""Estimator-style wrapper: fit on paired test results, transform new results to bounds.

``fit`` tabulates paired binary results of the new test and the reference
test among tested people; every fitted bound is then a deterministic function
of that table and the hyperparameters.  ``transform`` maps each new-test
result to the identified set of the infection probability it implies.
"""

from __future__ import annotations

from typing import Optional

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_consistent_length, check_is_fitted, column_or_1d

from .bounds import (
    DEFAULT_SENSITIVITY_GRID,
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
from .core import StudyConfig, TestTable, table_from_counts, validate_config
from .dilation import WHO_MIN_SENSITIVITY, dilation_threshold, is_dilation, who_screen


def _binary(values, name: str) -> np.ndarray:
    arr = column_or_1d(check_array(np.asarray(values).reshape(len(values), -1), ensure_2d=True, dtype=None))
    uniq = set(np.unique(arr).tolist())
    if not uniq <= {0, 1, False, True}:
        raise ValueError(f"{name} must be binary 0/1, got values {sorted(uniq)!r}")
    return arr.astype(int)


class ImperfectReferenceBounds(TransformerMixin, BaseEstimator):
    """Sharp accuracy bounds for a new test judged against an imperfect reference.

    Parameters
    ----------
    sigma : float, default=0.9
        Sensitivity of the reference test; must exceed its yield.
    tau : float, default=1.0
        Share of the population that was tested.
    sigma_min : float, default=0.8
        Minimum apparent sensitivity used by the yield screen.
    grid_size : int, default=2001
        Points over ``P(y=1)`` for the whole-population sensitivity.
    method : {"sharp", "frechet"}, default="sharp"
        Construction of the whole-population bounds.

    Attributes
    ----------
    table_ : TestTable
    ppv_, npv_, sensitivity_ : Interval
        Tested-pool bounds on the new test's predictive values and sensitivity.
    prevalence_, npv_reference_ : Interval
    npv_unconditional_, sensitivity_unconditional_ : Interval
    case_, case_star_ : CaseLabel
    dilation_ : DilationVerdict
    threshold_ : ThresholdResult
    screen_ : ScreenResult
    """

    def __init__(
        self,
        sigma: float = 0.9,
        tau: float = 1.0,
        sigma_min: float = WHO_MIN_SENSITIVITY,
        grid_size: int = DEFAULT_SENSITIVITY_GRID,
        method: str = "sharp",
    ):
        self.sigma = sigma
        self.tau = tau
        self.sigma_min = sigma_min
        self.grid_size = grid_size
        self.method = method

    def fit(self, X, y):
        """Tabulate paired results.

        Parameters
        ----------
        X : array-like of shape (n_samples,) or (n_samples, 1)
            New-test results, 0 or 1.
        y : array-like of shape (n_samples,)
            Reference-test results, 0 or 1.
        """
        z = _binary(X, "X")
        ref = _binary(y, "y")
        check_consistent_length(z, ref)
        counts = [int(np.sum((ref == a) & (z == b))) for a in (0, 1) for b in (0, 1)]
        self.n_samples_ = int(z.size)
        return self.fit_table(table_from_counts(counts, name="fitted"))

    def fit_table(self, table: TestTable):
        """Fit directly from a :class:`TestTable`."""
        config = StudyConfig(self.sigma, self.tau, self.sigma_min)
        validate_config(table, config).raise_if_invalid()
        if self.method not in ("sharp", "frechet"):
            raise ValueError(f"method must be 'sharp' or 'frechet', got {self.method!r}")
        self.table_ = table
        self.gamma_, self.zeta_ = table.gamma, table.zeta
        self.prevalence_ = prevalence_bounds(table, config)
        self.npv_reference_ = npv_established(table, config)
        self.case_ = classify_case(table, self.sigma)
        self.case_star_ = classify_case_star(table, config)
        self.ppv_ = ppv_new(table, self.sigma)
        self.npv_ = npv_new(table, self.sigma)
        self.sensitivity_ = sensitivity_new_conditional(table, self.sigma)
        self.combined_ = combined_posteriors(table, self.sigma)
        self.npv_unconditional_ = npv_new_unconditional(table, config, self.method)
        self.sensitivity_unconditional_ = sensitivity_new_unconditional(
            table, config, self.grid_size, self.method
        )
        self.dilation_ = is_dilation(table, self.sigma)
        self.threshold_ = dilation_threshold(table)
        self.screen_ = who_screen(table, self.sigma, self.sigma_min)
        return self

    def transform(self, X) -> np.ndarray:
        """Bounds on ``P(x=1 | z, t=1)`` for each new-test result ``z``.

        Returns
        -------
        ndarray of shape (n_samples, 2)
            ``[lo, hi]`` per row: the PPV set for ``z=1`` and one minus the
            NPV set for ``z=0``.
        """
        check_is_fitted(self, "table_")
        z = _binary(X, "X")
        positive = np.array(self.ppv_.as_tuple())
        negative = np.array(self.npv_.complement().as_tuple())
        return np.where(z[:, None] == 1, positive, negative)

    def predict_interval(self, X) -> np.ndarray:
        return self.transform(X)

    @property
    def is_dilation_(self) -> Optional[bool]:
        check_is_fitted(self, "table_")
        return self.dilation_.is_dilation
