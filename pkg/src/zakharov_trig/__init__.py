"""Fourier pseudo-spectral trigonometric time integrators for the 1-D
Zakharov system, with an experiment harness for convergence-order,
solitary-wave and conservation studies."""

from .spectral import (
    Field,
    GridMismatchError,
    TorusGrid,
    apply_multiplier,
    mean_value,
    product_physical,
    sobolev_norm,
    to_physical,
    to_spectral,
)
from .symbols import MultiplierSymbol, SymbolKind
from .model import (
    Diagnostics,
    DomainTooSmallError,
    Scheme,
    SolitonParams,
    ZakharovState,
    component_errors,
    composite_error,
    diagnostics,
    example1_data,
    hamiltonian,
    init_state,
    l2_norm_E,
    soliton_exact,
)
from .integrators import (
    DivergenceError,
    OracleStabilityError,
    PropagatorSet,
    RunResult,
    advance,
    integrate_rk4,
    rk4_stability_limit,
    run,
    step_first_order,
    step_rk4_oracle,
    step_second_order,
)
from .harness import (
    ConvergenceRecord,
    FitResult,
    ReferenceMismatchError,
    RunRecord,
    build_example1_reference,
    conservation_run,
    convergence_study,
    csv_export,
    fit_order,
    read_table,
    snapshot_export,
)

__version__ = "0.1.0"

__all__ = [
    "ConvergenceRecord",
    "Diagnostics",
    "DivergenceError",
    "DomainTooSmallError",
    "Field",
    "FitResult",
    "GridMismatchError",
    "MultiplierSymbol",
    "OracleStabilityError",
    "PropagatorSet",
    "ReferenceMismatchError",
    "RunRecord",
    "RunResult",
    "Scheme",
    "SolitonParams",
    "SymbolKind",
    "TorusGrid",
    "ZakharovState",
    "advance",
    "apply_multiplier",
    "build_example1_reference",
    "component_errors",
    "composite_error",
    "conservation_run",
    "convergence_study",
    "csv_export",
    "diagnostics",
    "example1_data",
    "fit_order",
    "hamiltonian",
    "init_state",
    "integrate_rk4",
    "l2_norm_E",
    "mean_value",
    "product_physical",
    "read_table",
    "rk4_stability_limit",
    "run",
    "snapshot_export",
    "sobolev_norm",
    "soliton_exact",
    "step_first_order",
    "step_rk4_oracle",
    "step_second_order",
    "to_physical",
    "to_spectral",
]
