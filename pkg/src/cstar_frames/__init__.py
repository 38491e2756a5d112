"""Frames in free Hilbert modules over finite-dimensional C*-algebras.

The package represents block C*-algebras and free modules over them,
computes frame and Gram operators, optimal frame bounds and canonical
duals, and decides frame properties (omega-independence, biorthogonality,
exactness, Riesz-type conditions) with independent procedures whose
classical equivalences are cross-checked at classification time.
"""

from .algebra import (
    DEFAULT_TOLERANCE,
    AlgebraElement,
    AlgebraSignature,
    StructureError,
    Tolerance,
    adjoint,
    inverse,
    is_invertible,
    is_positive,
    multiply,
    norm,
    spectrum_bounds,
)
from .classify import (
    ClassificationReport,
    ConsistencyError,
    Witnesses,
    classify,
    frame_flags,
    has_biorthogonal_sequence,
    is_biorthogonal,
    is_exact_by_lemma,
    is_exact_by_removal,
    is_frame,
    is_modular_riesz,
    is_omega_independent,
    is_riesz_frank_larson,
)
from .corpus import KINDS, GeneratorSpec, generate, sweep
from .frames import (
    FrameBounds,
    FrameSystem,
    NotAFrameError,
    bound_witnesses,
    bounds_admit_frame,
    canonical_dual,
    frame_bounds,
    gram_condition,
    gram_operator,
    is_dual_pair,
    reconstruction_residual,
    riesz_bounds_check,
    synthesis_map,
)
from .module import (
    ModuleMap,
    ModuleVector,
    apply_map,
    canonical_basis,
    compose,
    flatten_map,
    identity_map,
    inner_product,
    map_adjoint,
    map_from_rows,
    map_inverse,
    map_invertible,
    operator_norm,
    rows_of,
    unflatten_map,
    vector_norm,
    zero_vector,
)

__version__ = "0.1.0"
