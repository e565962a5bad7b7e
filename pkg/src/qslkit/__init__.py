"""Speed limits from energy statistics.

The package turns a Hamiltonian spectrum and a state's energy mean into
evolution-time bounds, checks them against exact hit times for unitary
and damped dynamics, and batch-runs the Monte Carlo experiments that
map where the mean-based bound is tight.
"""
from .bloch import (
    BlochState,
    antisym_index,
    bloch_from_density,
    density_from_bloch,
    diag_index,
    physicality_check,
    su_generators,
    sym_index,
    target_angle,
    two_level_state,
)
from .bounds import (
    BoundReport,
    EnergyStats,
    bound_report,
    bures_angle,
    energy_stats,
    tau_bd,
    tau_bd_from_scalars,
    two_level_bounds,
)
from .dynamics import (
    LadderPropagator,
    NoiseParams,
    Trajectory,
    first_hit_time,
    lindblad_evolve,
    nbar_planck,
    noisy_reach,
    unitary_evolve,
)
from .errors import (
    DomainError,
    InconsistentStatsError,
    IntegrationError,
    InvalidDimensionError,
    UndefinedAngleError,
    ValidationError,
)
from .experiments import (
    BdTestConfig,
    ExperimentResult,
    HMinConfig,
    NoiseScanConfig,
    OatGridConfig,
    SummaryStats,
    XYScanConfig,
    run_bd_test,
    run_h_min_table,
    run_noise_scan,
    run_oat_grid,
    run_xy_scan,
)
from .oat import (
    CssParams,
    OatParams,
    css_mean_energy,
    oat_extremes,
    oat_extremes_brute,
    oat_profiles,
    oat_tau,
)
from .output import Table, format_value, table_payload, write_csv, write_json
from .reachable import (
    PiReachReport,
    S0Descriptor,
    pi_reach_report,
    random_s0,
    s_residual,
    sample_s0,
    two_level_hit_time,
)
from .spectrum import (
    Spectrum,
    StructureReport,
    classify_structure,
    gap_set,
    gap_table,
    odd_odd_ratio,
    oqsl,
    parse_spectrum,
)
from .threelevel import (
    HMinResult,
    RegimeVerdict,
    XYPoint,
    bd_validity,
    extremal_diag_xy,
    h_min,
    h_pair,
    hit_time_els3,
    regime_membership,
    sample_state_xy,
    tau_circle_max,
    xy_of_state,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "BlochState",
    "su_generators",
    "sym_index",
    "antisym_index",
    "diag_index",
    "density_from_bloch",
    "bloch_from_density",
    "physicality_check",
    "target_angle",
    "two_level_state",
    "EnergyStats",
    "energy_stats",
    "tau_bd",
    "tau_bd_from_scalars",
    "bures_angle",
    "BoundReport",
    "bound_report",
    "two_level_bounds",
    "NoiseParams",
    "nbar_planck",
    "Trajectory",
    "unitary_evolve",
    "first_hit_time",
    "lindblad_evolve",
    "LadderPropagator",
    "noisy_reach",
    "ValidationError",
    "InvalidDimensionError",
    "InconsistentStatsError",
    "UndefinedAngleError",
    "DomainError",
    "IntegrationError",
    "SummaryStats",
    "ExperimentResult",
    "OatGridConfig",
    "run_oat_grid",
    "NoiseScanConfig",
    "run_noise_scan",
    "BdTestConfig",
    "run_bd_test",
    "XYScanConfig",
    "run_xy_scan",
    "HMinConfig",
    "run_h_min_table",
    "OatParams",
    "CssParams",
    "oat_extremes",
    "oat_extremes_brute",
    "oat_tau",
    "css_mean_energy",
    "oat_profiles",
    "Table",
    "format_value",
    "write_csv",
    "write_json",
    "table_payload",
    "S0Descriptor",
    "PiReachReport",
    "s_residual",
    "sample_s0",
    "random_s0",
    "pi_reach_report",
    "two_level_hit_time",
    "Spectrum",
    "parse_spectrum",
    "gap_set",
    "gap_table",
    "odd_odd_ratio",
    "StructureReport",
    "classify_structure",
    "oqsl",
    "XYPoint",
    "RegimeVerdict",
    "xy_of_state",
    "regime_membership",
    "hit_time_els3",
    "tau_circle_max",
    "bd_validity",
    "h_pair",
    "HMinResult",
    "h_min",
    "extremal_diag_xy",
    "sample_state_xy",
]
