"""Joint radio-and-computation scheduling for multiuser edge offloading
under VM I/O interference: rate maximization, energy minimization, their
brute-force certification oracles, and a Monte Carlo benchmark harness."""

__version__ = "0.1.0"

from .energy import (
    FeasibilityResult,
    Partition,
    benchmark_energy_all_offloading,
    feasibility_gap,
    feasibility_tmin,
    partition_users,
    required_compute_time,
    solve_energy_suboptimal,
    solve_lp_m1,
    total_delay,
)
from .lp import (
    BudgetExceededError,
    LpProblem,
    LpSolution,
    LpStructureError,
    constraint,
    enumerate_vertices,
    solve_lp,
)
from .model import (
    ConfigurationError,
    DerivedUser,
    EnergySchedule,
    GenerationSpec,
    Instance,
    ParseError,
    RateSchedule,
    UserProfile,
    ValidationReport,
    baseline_local_energy,
    derive_user,
    generate_instance,
    mediant,
    read_instance,
    validate_energy_schedule,
    validate_rate_schedule,
    vm_rate_factor,
    with_deadline,
    write_instance,
)
from .oracle import OracleBudget, brute_force_energy, brute_force_rate_max
from .rate import (
    ConditionalSolution,
    DinkelbachTrace,
    benchmark_all_offloading,
    benchmark_greedy,
    benchmark_lr,
    conditional_solution,
    dinkelbach_slave,
    homogeneous_m_star,
    homogeneous_txrate_schedule,
    no_interference_schedule,
    solve_rate_max,
)

__all__ = [
    "__version__",
    "BudgetExceededError",
    "ConditionalSolution",
    "ConfigurationError",
    "DerivedUser",
    "DinkelbachTrace",
    "EnergySchedule",
    "FeasibilityResult",
    "GenerationSpec",
    "Instance",
    "LpProblem",
    "LpSolution",
    "LpStructureError",
    "OracleBudget",
    "ParseError",
    "Partition",
    "RateSchedule",
    "UserProfile",
    "ValidationReport",
    "baseline_local_energy",
    "benchmark_all_offloading",
    "benchmark_energy_all_offloading",
    "benchmark_greedy",
    "benchmark_lr",
    "brute_force_energy",
    "brute_force_rate_max",
    "conditional_solution",
    "constraint",
    "derive_user",
    "dinkelbach_slave",
    "enumerate_vertices",
    "feasibility_gap",
    "feasibility_tmin",
    "generate_instance",
    "homogeneous_m_star",
    "homogeneous_txrate_schedule",
    "mediant",
    "no_interference_schedule",
    "partition_users",
    "read_instance",
    "required_compute_time",
    "solve_energy_suboptimal",
    "solve_lp",
    "solve_lp_m1",
    "solve_rate_max",
    "total_delay",
    "validate_energy_schedule",
    "validate_rate_schedule",
    "vm_rate_factor",
    "with_deadline",
    "write_instance",
]
