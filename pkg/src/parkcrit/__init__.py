"""Parking on the infinite binary tree: regimes, exact enumeration, simulation.

Cars arrive at the vertices of the complete infinite binary tree
according to an i.i.d. arrival law and drive toward the root, parking
at the first free vertex; the surplus through a vertex is its flux.
This package decides whether a law is subcritical, critical, or
supercritical, evaluates the quantities attached to the transition,
enumerates fully parked trees exactly, and checks everything against
Monte Carlo simulation.
"""

__version__ = "0.1.0"

from . import errors
from .analytic import (
    CriticalQuantities,
    CriticalTime,
    FluxDistribution,
    OffspringLaw,
    RegimeReport,
    classify,
    critical_quantities,
    density_from_time,
    empty_vertex_offspring,
    find_alpha_c,
    find_critical_time,
    flux_distribution,
    flux_zero_gf,
    kernel_margin,
    mean_identities,
    occupancy_self_consistency,
    solve_empty_prob,
    time_from_density,
)
from .enumeration import (
    DecoratedTree,
    FptTable,
    ParkOutcome,
    TableFluxComparison,
    brute_force_table,
    check_against_oracle,
    flux_via_table,
    tutte_series,
)
from .laws import (
    FAMILIES,
    ArrivalLaw,
    Binary0kLaw,
    CustomAnalyticLaw,
    FiniteSupportLaw,
    GeometricLaw,
    NongenericExampleLaw,
    PoissonLaw,
    binary0k,
    geometric,
    make_finite_law,
    nongeneric_example,
    poisson,
)
from .simulate import (
    ClusterStats,
    SimulationStats,
    estimate_root_law,
    root_cluster_stats,
    sample_root_load,
)

__all__ = [
    "ArrivalLaw",
    "Binary0kLaw",
    "ClusterStats",
    "CriticalQuantities",
    "CriticalTime",
    "CustomAnalyticLaw",
    "DecoratedTree",
    "FAMILIES",
    "FiniteSupportLaw",
    "FluxDistribution",
    "FptTable",
    "GeometricLaw",
    "NongenericExampleLaw",
    "OffspringLaw",
    "ParkOutcome",
    "PoissonLaw",
    "RegimeReport",
    "SimulationStats",
    "TableFluxComparison",
    "binary0k",
    "brute_force_table",
    "check_against_oracle",
    "classify",
    "critical_quantities",
    "density_from_time",
    "empty_vertex_offspring",
    "errors",
    "estimate_root_law",
    "find_alpha_c",
    "find_critical_time",
    "flux_distribution",
    "flux_via_table",
    "flux_zero_gf",
    "geometric",
    "kernel_margin",
    "make_finite_law",
    "mean_identities",
    "nongeneric_example",
    "occupancy_self_consistency",
    "poisson",
    "root_cluster_stats",
    "sample_root_load",
    "solve_empty_prob",
    "time_from_density",
    "tutte_series",
]
