"""Sharp identification bounds for a diagnostic test evaluated against an imperfect reference test."""

__version__ = "0.1.0"

from .bounds import (
    Case,
    CaseLabel,
    CaseLabelStar,
    CombinedPosteriors,
    EstablishedPosteriors,
    classify_case,
    classify_case_star,
    combined_posteriors,
    established_posteriors,
    npv_contains_prior,
    npv_established,
    npv_new,
    npv_new_perfect_reference,
    npv_new_unconditional,
    ppv_contains_prior,
    ppv_new,
    ppv_new_perfect_reference,
    prevalence_bounds,
    sensitivity_new_conditional,
    sensitivity_new_unconditional,
)
from .core import (
    BadSigma,
    BadTau,
    DegenerateYield,
    DiagBoundsError,
    EmptyData,
    InfeasibleGamma,
    InfeasiblePoint,
    Interval,
    ParseError,
    SigmaInconsistent,
    StudyConfig,
    TestTable,
    Undefined,
    table_from_counts,
    validate_config,
    yields,
)
from .datasets import EMBEDDED, load_dataset
from .dilation import dilation_bound, dilation_threshold, is_dilation, who_screen
from .estimator import ImperfectReferenceBounds
from .frechet import Joint3, extreme_pmfs, gamma_range, marginal_xy, marginal_yz
from .oracle import Measure, feasible_t_range, joint_from_point, oracle_bounds, oracle_dilation
from .report import BoundsReport, emit_case_figure, run_oracle_check, run_report

__all__ = [name for name in dir() if not name.startswith("_")]
