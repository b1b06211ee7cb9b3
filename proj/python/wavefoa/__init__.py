"""Focus-of-attention simulation by damped-wave potential propagation."""

from ._core import (
    ConvergenceReport,
    DynamicsParams,
    Fixation,
    Grid,
    MassParams,
    MetricReport,
    OutOfDomainError,
    PdeParams,
    Scanpath,
    Scheme,
    SimulationParams,
    SimulationResult,
    SolverDivergedError,
    UnstableSchemeError,
    WavefoaError,
    accumulate_saliency,
    aggregate,
    analytic_heat_kernel,
    analytic_point_mass_wave,
    apply_dirichlet,
    auc_judd,
    bilinear_sample,
    gradient_at,
    gravitational_gradient_bruteforce,
    laplacian_5pt,
    load_pgm,
    load_saliency_pgm,
    nss,
    read_scanpath_json,
    sed,
    simulate,
    solve_poisson,
    stability_bound,
    stde,
    step_potential,
    three_blob_mass,
    verify_limit,
    write_saliency_pgm,
    write_scanpath_json,
)

__version__ = "0.1.0"

__all__ = [
    "ConvergenceReport",
    "DynamicsParams",
    "Fixation",
    "Grid",
    "MassParams",
    "MetricReport",
    "OutOfDomainError",
    "PdeParams",
    "Scanpath",
    "Scheme",
    "SimulationParams",
    "SimulationResult",
    "SolverDivergedError",
    "UnstableSchemeError",
    "WavefoaError",
    "accumulate_saliency",
    "aggregate",
    "analytic_heat_kernel",
    "analytic_point_mass_wave",
    "apply_dirichlet",
    "auc_judd",
    "bilinear_sample",
    "gradient_at",
    "gravitational_gradient_bruteforce",
    "laplacian_5pt",
    "load_pgm",
    "load_saliency_pgm",
    "nss",
    "read_scanpath_json",
    "sed",
    "simulate",
    "solve_poisson",
    "stability_bound",
    "stde",
    "step_potential",
    "three_blob_mass",
    "verify_limit",
    "write_saliency_pgm",
    "write_scanpath_json",
]
