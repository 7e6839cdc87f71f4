"""Closed-form unit normal loss integrals and value-of-information tools.

The package computes E[max(Y, 0)] for normal Y and E[max(Y1, Y2, 0)] for
bivariate normal (Y1, Y2) in closed form, applies them to EVPI for two- and
three-strategy decision problems, and provides a seeded Monte Carlo oracle,
a patient-level trial pipeline (closed form vs bootstrap), and a CLI.
"""

from .errors import DomainError, TrialParseError, UnliError
from .kernels import bvn_cdf, std_normal_cdf, std_normal_pdf, validate_correlation
from .loss import (
    DEGENERACY_EPS,
    BvnParams,
    TermIntermediates,
    Unli2dBreakdown,
    term_intermediates,
    u_term,
    unli_1d,
    unli_2d,
    v_term,
)
from .mc import (
    GridRow,
    GridSpec,
    McEstimate,
    derive_seed,
    mc_unli_2d,
    run_grid,
    sample_bvn,
    write_grid_csv,
)
from .trial import (
    COPD_PRESET_SEED,
    ArmSpec,
    ArmSummary,
    TrialDataset,
    arm_summaries,
    bootstrap_evpi,
    bootstrap_evpi_curve,
    closed_evpi_curve,
    copd_preset,
    estimate_inb_bvn,
    load_trial_csv,
    net_benefit,
    synth_trial,
    write_trial_csv,
)
from .voi import EvpiCurve, evpi_curve_closed, evpi_three, evpi_two, write_curve_csv

__version__ = "0.1.0"

__all__ = [
    "ArmSpec",
    "ArmSummary",
    "BvnParams",
    "COPD_PRESET_SEED",
    "DEGENERACY_EPS",
    "DomainError",
    "EvpiCurve",
    "GridRow",
    "GridSpec",
    "McEstimate",
    "TermIntermediates",
    "TrialDataset",
    "TrialParseError",
    "Unli2dBreakdown",
    "UnliError",
    "arm_summaries",
    "bootstrap_evpi",
    "bootstrap_evpi_curve",
    "bvn_cdf",
    "closed_evpi_curve",
    "copd_preset",
    "derive_seed",
    "estimate_inb_bvn",
    "evpi_curve_closed",
    "evpi_three",
    "evpi_two",
    "load_trial_csv",
    "mc_unli_2d",
    "net_benefit",
    "run_grid",
    "sample_bvn",
    "std_normal_cdf",
    "std_normal_pdf",
    "synth_trial",
    "term_intermediates",
    "u_term",
    "unli_1d",
    "unli_2d",
    "v_term",
    "validate_correlation",
    "write_curve_csv",
    "write_grid_csv",
    "write_trial_csv",
]
