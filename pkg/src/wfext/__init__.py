from wfext.__about__ import version as __version__
from wfext.enums import FillPolicy, OperatorKind
from wfext.errors import (
    ArgumentError,
    DecompositionError,
    EvaluationError,
    OutOfModelError,
    RangeError,
    RestrictionError,
    WfextError,
)
from wfext.extension import ExtensionStep, PiecewiseSolution, global_extension, pathwise_extension
from wfext.hierarchy import (
    GlobalSolution,
    StratifiedFinalCondition,
    littler,
    solve_extended_kbe,
    stationary_solution,
    stem_check,
)
from wfext.oracle import MCConfig, continuity_probe, mc_backward_estimate, pde_residual
from wfext.polyalg import MultiPoly, RationalFn
from wfext.simplex import Face, PathSpec, SimplexPoint
from wfext.spectral import proper_basis, proper_solution

__all__ = [
    "__version__",
    "ArgumentError",
    "DecompositionError",
    "EvaluationError",
    "ExtensionStep",
    "Face",
    "FillPolicy",
    "GlobalSolution",
    "MCConfig",
    "MultiPoly",
    "OperatorKind",
    "OutOfModelError",
    "PathSpec",
    "PiecewiseSolution",
    "RangeError",
    "RationalFn",
    "RestrictionError",
    "SimplexPoint",
    "StratifiedFinalCondition",
    "WfextError",
    "continuity_probe",
    "global_extension",
    "littler",
    "mc_backward_estimate",
    "pathwise_extension",
    "pde_residual",
    "proper_basis",
    "proper_solution",
    "solve_extended_kbe",
    "stationary_solution",
    "stem_check",
]
