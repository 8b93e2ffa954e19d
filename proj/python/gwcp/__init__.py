"""Branching random walks and contact processes on Galton-Watson trees.

Simulation plus certified critical-value bounds: spectral radii, global- and
local-survival thresholds, supermartingale certificates, and the weak-survival
verdict. The heavy lifting lives in the compiled ``gwcp._core`` module.
"""

from gwcp._core import (  # noqa: F401
    BisectResult,
    BlockExpectation,
    BoundReport,
    BrwRunSummary,
    Certificate,
    CertificateCheck,
    CpCaps,
    CpSummary,
    OffspringDistribution,
    Phase,
    ProbeResult,
    Process,
    RefinedUpperBound,
    SurvivalEstimate,
    SurvivalMode,
    TreeMode,
    TreeStore,
    TrialPlan,
    __version__,
    bisect_critical,
    block_expectation,
    bound_report,
    brw_phase,
    check_certificate,
    check_certificate_full,
    continuous_brw_reduction,
    distance_distribution,
    estimate_survival,
    f_hmin,
    lambda_g_upper_refined,
    lambda_g_upper_simple,
    lambda_l_lower_brw,
    return_probability_dp,
    run_brw,
    run_cp,
    run_cp_coupled,
    search_certificate,
    spectral_radius_dp_estimate,
    spectral_radius_formula,
    wilson95,
)
