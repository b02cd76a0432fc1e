"""Exact resolutions, Betti numbers and interleavings of multi-parameter persistence modules."""

from .complexes import (
    ChainMap,
    FreeChainComplex,
    Homotopy,
    chain_map_space,
    is_nullhomotopic,
    lift_resolution,
    shift_complex,
    smoothing_chain_map,
    validate,
    verify_resolution,
)
from .field import GF, QQ, Matrix, field_from_name, kernel_basis, rref, solve
from .freemod import FreeModule, GradedMatrix, compose, evaluate_free, shift_free, smoothing_free, xi
from .grading import Grid, critical_grid, grade, leq, shift_grade
from .ingest import Bifiltration, homology_presentation, perturb
from .interleave import (
    BudgetExhausted,
    DistanceBracket,
    InterleavingCertificate,
    derived_interleaving,
    estimate_distance,
    isometry_check,
    rank_obstruction,
    search_homotopy_interleaving,
    search_module_interleaving,
    verify_homotopy_interleaving,
    verify_module_interleaving,
)
from .presentation import (
    FPMorphism,
    Presentation,
    betti,
    evaluate,
    hom_space,
    kernel_presentation,
    minimal_free_resolution,
    minimize,
    shift_presentation,
    smoothing_fp,
    structure_map,
)

__all__ = [name for name in dir() if not name.startswith("_")]
