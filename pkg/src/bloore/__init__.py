"""Separability and PPT probabilities of low-dimensional quantum states in Bloore coordinates."""

from .statespace import (
    BlooreParams,
    DensityMatrix,
    GridVariable,
    NumberField,
    RatioVars,
    ScenarioSpec,
    SystemSplit,
    assemble_density,
    canonical_diag,
    ratio_variables,
    solve_rho33_for_nu,
)

__version__ = "0.1.0"

__all__ = [
    "BlooreParams",
    "DensityMatrix",
    "GridVariable",
    "NumberField",
    "RatioVars",
    "ScenarioSpec",
    "SystemSplit",
    "assemble_density",
    "canonical_diag",
    "ratio_variables",
    "solve_rho33_for_nu",
    "__version__",
]
