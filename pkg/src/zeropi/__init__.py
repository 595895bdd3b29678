"""zeropi: finite-difference spectral simulator for the 0-pi circuit."""

__version__ = "0.1.0"

from .analysis import (
    DegeneracyReport,
    FitResult,
    OptimizeResult,
    SweepPoint,
    SweepResult,
    degeneracy,
    dmax_grid,
    export_wavefunction,
    fit_ejstar,
    flux_sweep,
    optimize_ej,
    ridge_masses,
)
from .config import ConfigError, RunConfig, load_config, parse_config
from .dispersive import (
    Couplings,
    DispersiveResult,
    cj_disorder_check,
    coupling_elements,
    dispersive_analysis,
    dispersive_shifts,
    junction_disorder_sweep,
)
from .grid import (
    AssemblyError,
    Grid2D,
    SparseHamiltonian,
    assemble,
    default_grid,
    inner_product,
)
from .params import (
    CircuitParams,
    DerivedScales,
    DisorderParams,
    NormalCoords,
    RegimeReport,
    derived_scales,
    node_to_normal,
    normal_to_node,
    physical_units,
    potential_disordered,
    potential_symmetric,
    potential_toy,
    regime_check,
)
from .runner import run
from .solver import (
    ConvergenceError,
    EigenSolution,
    lowest_eigenpairs,
    solve_on_grids,
    solve_refined,
)

__all__ = [
    "__version__",
    "AssemblyError",
    "CircuitParams",
    "ConfigError",
    "ConvergenceError",
    "Couplings",
    "DegeneracyReport",
    "DerivedScales",
    "DispersiveResult",
    "DisorderParams",
    "EigenSolution",
    "FitResult",
    "Grid2D",
    "NormalCoords",
    "OptimizeResult",
    "RegimeReport",
    "RunConfig",
    "SparseHamiltonian",
    "SweepPoint",
    "SweepResult",
    "assemble",
    "cj_disorder_check",
    "coupling_elements",
    "default_grid",
    "degeneracy",
    "derived_scales",
    "dispersive_analysis",
    "dispersive_shifts",
    "dmax_grid",
    "export_wavefunction",
    "fit_ejstar",
    "flux_sweep",
    "inner_product",
    "junction_disorder_sweep",
    "load_config",
    "lowest_eigenpairs",
    "node_to_normal",
    "normal_to_node",
    "optimize_ej",
    "parse_config",
    "physical_units",
    "potential_disordered",
    "potential_symmetric",
    "potential_toy",
    "regime_check",
    "ridge_masses",
    "run",
    "solve_on_grids",
    "solve_refined",
]
