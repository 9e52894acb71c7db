"""combwalk: simulation and verification toolkit for K-comb lattice walks."""

__version__ = "0.1.0"

from .errors import (
    CombWalkError,
    DuplicateLevel,
    EmptyConfig,
    EmptyTable,
    InsufficientGrid,
    InvalidPath,
    InvalidProbability,
    InvalidScale,
    NotComparable,
    RangeWarning,
    ShapeMismatch,
    TooLargeForExact,
)
from .lattice import (
    DistributionTable,
    KCombConfig,
    LineSpec,
    Position,
    Trajectory,
    exact_distribution,
    simulate_direct,
    step_direct,
    validate_config,
)
from .coupling import (
    CoupledDecomposition,
    GeomRun,
    aggregate_run_weight,
    coupling_error_growth,
    expected_horizontal_steps,
    sample_geometric,
    simulate_coupled,
)
from .localtime import (
    LocalTimeTable,
    adjacent_uniformity_stat,
    local_time_table,
    max_local_time,
)
from .geom_bound import TailCheckReport, empirical_tail, tail_bound, tail_check
from .limit_stats import (
    EnsembleSummary,
    LimitOracle,
    chi_square_endpoint,
    compare_samplers_to_exact,
    ks_two_sample,
    lil_series,
    position_invariance_test,
    sample_horizontal_limit,
    scaling_exponent,
)
from .rng import SeedSpec

__all__ = [
    "__version__",
    "CombWalkError",
    "DuplicateLevel",
    "EmptyConfig",
    "EmptyTable",
    "InsufficientGrid",
    "InvalidPath",
    "InvalidProbability",
    "InvalidScale",
    "NotComparable",
    "RangeWarning",
    "ShapeMismatch",
    "TooLargeForExact",
    "DistributionTable",
    "KCombConfig",
    "LineSpec",
    "Position",
    "Trajectory",
    "exact_distribution",
    "simulate_direct",
    "step_direct",
    "validate_config",
    "CoupledDecomposition",
    "GeomRun",
    "aggregate_run_weight",
    "coupling_error_growth",
    "expected_horizontal_steps",
    "sample_geometric",
    "simulate_coupled",
    "LocalTimeTable",
    "adjacent_uniformity_stat",
    "local_time_table",
    "max_local_time",
    "TailCheckReport",
    "empirical_tail",
    "tail_bound",
    "tail_check",
    "EnsembleSummary",
    "LimitOracle",
    "chi_square_endpoint",
    "compare_samplers_to_exact",
    "ks_two_sample",
    "lil_series",
    "position_invariance_test",
    "sample_horizontal_limit",
    "scaling_exponent",
    "SeedSpec",
]
