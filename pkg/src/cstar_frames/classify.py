"""Decision procedures for frame properties of finite systems.

Every predicate here is computed from its own definition, never derived
from another predicate, so the classical equivalences between them become
checkable cross-validations.  ``classify`` runs all of them and raises a
``ConsistencyError`` if two procedures that must agree do not.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .algebra import (
    DEFAULT_TOLERANCE,
    AlgebraElement,
    AlgebraSignature,
    StructureError,
    Tolerance,
    is_invertible,
    multiply,
)
from .algebra import norm as element_norm
from .frames import (
    FrameBounds,
    FrameSystem,
    NotAFrameError,
    bounds_admit_frame,
    canonical_dual,
    frame_bounds,
    synthesis_map,
)
from .module import (
    ModuleVector,
    flatten_map,
    inner_product,
    map_adjoint,
    map_invertible,
    rows_of,
    unflatten_map,
    vector_norm,
)

__all__ = [
    "ClassificationReport",
    "Witnesses",
    "ConsistencyError",
    "frame_flags",
    "is_frame",
    "is_omega_independent",
    "is_biorthogonal",
    "has_biorthogonal_sequence",
    "is_exact_by_lemma",
    "is_exact_by_removal",
    "is_riesz_frank_larson",
    "is_modular_riesz",
    "classify",
]

# Rank decisions for a possibly rank-deficient least-squares system get a
# looser floor than spectral comparisons; it absorbs the conditioning of
# random corpora.
BIORTHOGONAL_RESIDUAL_FLOOR = 1e-7


class ConsistencyError(RuntimeError):
    """Two procedures that must agree returned different verdicts."""

    def __init__(self, check: str, verdicts: dict):
        self.check = check
        self.verdicts = dict(verdicts)
        detail = ", ".join(f"{k}={v}" for k, v in self.verdicts.items())
        super().__init__(f"internal consistency violation in {check}: {detail}")


@dataclass(frozen=True)
class Witnesses:
    """Certificates gathered during classification.

    ``kernel_coefficients`` is a nontrivial coefficient tuple summing the
    vectors to zero (present when the system is not omega-independent).
    The per-index tuples are only present for frames: entry l records
    whether removing vector l leaves a frame, once decided by actual
    removal and once by invertibility of 1 - <x_l, S^-1 x_l>.
    """

    kernel_coefficients: tuple[AlgebraElement, ...] | None = None
    removal_leaves_frame: tuple[bool, ...] | None = None
    gap_invertible: tuple[bool, ...] | None = None


@dataclass(frozen=True)
class ClassificationReport:
    is_bessel: bool
    is_frame: bool
    is_tight: bool
    is_parseval: bool
    is_omega_independent: bool
    is_biorthogonal_to_canonical_dual: bool
    has_biorthogonal_sequence: bool
    is_exact_by_lemma: bool
    is_exact_by_removal: bool
    is_riesz_frank_larson: bool
    is_modular_riesz: bool
    bounds: FrameBounds
    witnesses: Witnesses


def frame_flags(
    system: FrameSystem, tol: Tolerance = DEFAULT_TOLERANCE
) -> tuple[FrameBounds, bool, bool, bool, bool]:
    """Bounds plus the (bessel, frame, tight, parseval) ladder."""
    bounds = frame_bounds(system, tol)
    bessel = math.isfinite(bounds.upper)
    frame = bounds_admit_frame(bounds, tol)
    tight = frame and (bounds.upper - bounds.lower) <= tol.rel_tol * bounds.upper
    parseval = tight and abs(bounds.upper - 1.0) <= tol.rel_tol
    return bounds, bessel, frame, tight, parseval


def is_frame(system: FrameSystem, tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
    return bounds_admit_frame(frame_bounds(system, tol), tol)


def _synthesis_svd(system: FrameSystem):
    """Full SVDs of the flattened synthesis blocks plus the global extremes
    of the padded singular values (padded with zeros where rows exceed
    columns, matching the row-space action of right multiplication)."""
    decompositions = []
    largest = 0.0
    smallest = math.inf
    for block in flatten_map(synthesis_map(system)):
        u, svals, vh = np.linalg.svd(block, full_matrices=True)
        rows = block.shape[0]
        padded = np.zeros(rows)
        padded[: svals.size] = svals
        decompositions.append((u, padded))
        if padded.size:
            largest = max(largest, float(padded.max()))
            smallest = min(smallest, float(padded.min()))
    return decompositions, largest, smallest


def _kernel_coefficients(
    system: FrameSystem, block_index: int, row_vector: np.ndarray
) -> tuple[AlgebraElement, ...]:
    """Coefficient tuple whose flattened block ``block_index`` has the given
    first row; it annihilates the synthesis map by construction."""
    signature = system.signature
    n = signature.block_sizes[block_index]
    chunks = row_vector.reshape(system.size, n)
    coeffs = []
    for j in range(system.size):
        blocks = []
        for k, size in enumerate(signature.block_sizes):
            mat = np.zeros((size, size), dtype=np.complex128)
            if k == block_index:
                mat[0, :] = chunks[j]
            blocks.append(mat)
        coeffs.append(AlgebraElement(signature, tuple(blocks)))
    return tuple(coeffs)


def is_omega_independent(
    system: FrameSystem, tol: Tolerance = DEFAULT_TOLERANCE
) -> tuple[bool, tuple[AlgebraElement, ...] | None]:
    """Trivial kernel of the synthesis action a -> a.X, with a witness.

    Decided from the flattened blocks: the coefficient-to-vector map is
    block diagonal over them, so its smallest singular value is the global
    minimum of the padded block spectra.  On failure returns a unit-norm
    kernel coefficient tuple.
    """
    decompositions, largest, smallest = _synthesis_svd(system)
    if smallest > tol.rel_tol * largest:
        return True, None
    # left singular vector for the smallest padded singular value
    best = None
    for k, (u, padded) in enumerate(decompositions):
        idx = int(np.argmin(padded))
        if best is None or padded[idx] < best[0]:
            best = (float(padded[idx]), k, np.conj(u[:, idx]))
    return False, _kernel_coefficients(system, best[1], best[2])


def is_biorthogonal(
    system: FrameSystem, other: FrameSystem, tol: Tolerance = DEFAULT_TOLERANCE
) -> bool:
    """Whether <x_i, y_j> = delta_ij 1 for all index pairs."""
    if system.signature != other.signature:
        raise StructureError("signature mismatch between systems")
    if system.rank != other.rank or system.size != other.size:
        raise StructureError("biorthogonality needs equal rank and index size")
    one = AlgebraElement.identity(system.signature)
    defect = 0.0
    for i, xi in enumerate(system.vectors):
        for j, yj in enumerate(other.vectors):
            pairing = inner_product(xi, yj)
            if i == j:
                pairing = pairing - one
            defect = max(defect, element_norm(pairing))
    scale = max(
        1.0,
        max(vector_norm(v) for v in system.vectors)
        * max(vector_norm(v) for v in other.vectors),
    )
    return defect <= tol.margin(scale)


def has_biorthogonal_sequence(
    system: FrameSystem, tol: Tolerance = DEFAULT_TOLERANCE
) -> tuple[bool, FrameSystem | None]:
    """Solvability of X.Y* = I over the algebra, by least squares.

    Solved per flattened block; the relative residual decides solvability
    against ``max(rel_tol, BIORTHOGONAL_RESIDUAL_FLOOR)``.  On success the
    minimizer is unflattened into an actual biorthogonal system.
    """
    blocks = flatten_map(synthesis_map(system))
    solution_blocks = []
    worst = 0.0
    for block in blocks:
        rows = block.shape[0]
        eye = np.eye(rows, dtype=np.complex128)
        solution, *_ = np.linalg.lstsq(block, eye, rcond=None)
        residual = float(np.linalg.norm(block @ solution - eye)) / math.sqrt(rows)
        worst = max(worst, residual)
        solution_blocks.append(solution)
    if worst > max(tol.rel_tol, BIORTHOGONAL_RESIDUAL_FLOOR):
        return False, None
    adjoint_map = unflatten_map(
        system.signature, system.rank, system.size, solution_blocks
    )
    return True, FrameSystem(tuple(rows_of(map_adjoint(adjoint_map))))


def _diagonal_projector_gaps(
    system: FrameSystem, tol: Tolerance
) -> list[AlgebraElement]:
    """The elements 1 - <x_l, S^-1 x_l> for every index l.

    <x_l, S^-1 x_l> is the l-th diagonal block of X.G^-1.X*, whose
    flattening is the orthogonal projector onto the column space of the
    flattened synthesis block; computing it from an SVD basis avoids the
    cond(G) error amplification of an explicit Gram inverse.
    """
    signature = system.signature
    projectors = []
    for block in flatten_map(synthesis_map(system)):
        u, svals, _ = np.linalg.svd(block, full_matrices=False)
        cutoff = tol.rel_tol * float(svals[0]) if svals.size else 0.0
        keep = u[:, svals > cutoff]
        projectors.append(keep @ keep.conj().T)
    one = AlgebraElement.identity(signature)
    gaps = []
    for ell in range(system.size):
        blocks = []
        for k, n in enumerate(signature.block_sizes):
            sub = projectors[k][ell * n : (ell + 1) * n, ell * n : (ell + 1) * n]
            blocks.append(np.asarray(sub))
        gaps.append(one - AlgebraElement(signature, tuple(blocks)))
    return gaps


def is_exact_by_lemma(
    system: FrameSystem, tol: Tolerance = DEFAULT_TOLERANCE
) -> tuple[bool, tuple[bool, ...]]:
    """Exactness via invertibility of 1 - <x_l, S^-1 x_l> per index.

    Returns (exact, per_index) where per_index[l] is True iff the gap
    element is invertible, i.e. vector l is removable.  The invertibility
    floor is scaled by the synthesis condition number, since that is the
    accuracy to which the gap elements can be computed at all.
    """
    bounds = frame_bounds(system, tol)
    if not bounds_admit_frame(bounds, tol):
        raise NotAFrameError("exactness is defined for frames only")
    cond_factor = math.sqrt(bounds.upper / bounds.lower)
    gap_tol = Tolerance(
        rel_tol=tol.rel_tol, abs_tol=max(tol.abs_tol, tol.rel_tol * cond_factor)
    )
    invertible = tuple(
        is_invertible(gap, gap_tol) for gap in _diagonal_projector_gaps(system, tol)
    )
    return not any(invertible), invertible


def is_exact_by_removal(
    system: FrameSystem, tol: Tolerance = DEFAULT_TOLERANCE
) -> tuple[bool, tuple[bool, ...]]:
    """Exactness by actually deleting each vector and retesting the bounds.

    A singleton system is exact by convention: the empty family is never a
    frame when the rank is at least one.
    """
    if not is_frame(system, tol):
        raise NotAFrameError("exactness is defined for frames only")
    if system.size == 1:
        return True, (False,)
    leaves_frame = tuple(
        is_frame(system.without(ell), tol) for ell in range(system.size)
    )
    return not any(leaves_frame), leaves_frame


def is_riesz_frank_larson(
    system: FrameSystem, tol: Tolerance = DEFAULT_TOLERANCE
) -> bool:
    """Nonzero vectors, and every vanishing combination vanishes termwise.

    The condition quantifies over all finitely supported relations; since
    a -> a_j x_j is complex linear it is enough to test a basis of the
    kernel of the flattened synthesis action.  Kernel basis vectors living
    in matrix rows other than the first give the same term norms, so only
    first-row embeddings are checked.
    """
    norms = [vector_norm(v) for v in system.vectors]
    scale = max(norms)
    if any(value <= tol.margin(scale) for value in norms):
        return False
    decompositions, largest, _ = _synthesis_svd(system)
    if largest == 0.0:
        return False
    for k, (u, padded) in enumerate(decompositions):
        for idx in np.nonzero(padded <= tol.rel_tol * largest)[0]:
            coeffs = _kernel_coefficients(system, k, np.conj(u[:, idx]))
            for a, xj, xj_norm in zip(coeffs, system.vectors, norms):
                if vector_norm(a * xj) > tol.margin(xj_norm):
                    return False
    return True


def is_modular_riesz(system: FrameSystem, tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
    """Image of the canonical basis under an invertible adjointable map;
    for free modules that means a square, invertible synthesis matrix."""
    if system.size != system.rank:
        return False
    return map_invertible(synthesis_map(system), tol)


def classify(
    system: FrameSystem, tol: Tolerance = DEFAULT_TOLERANCE
) -> ClassificationReport:
    """Run every predicate, cross-check the ones that must agree, and
    aggregate verdicts plus witnesses into a report.

    Raises ``ConsistencyError`` instead of silently reporting when the
    independently computed procedures contradict each other.
    """
    bounds, bessel, frame, tight, parseval = frame_flags(system, tol)
    omega, kernel_witness = is_omega_independent(system, tol)
    has_bio, _ = has_biorthogonal_sequence(system, tol)
    frank_larson = is_riesz_frank_larson(system, tol)
    modular = is_modular_riesz(system, tol)

    if frame:
        dual = canonical_dual(system, tol)
        bio_dual = is_biorthogonal(system, dual, tol)
        exact_lemma, gap_invertible = is_exact_by_lemma(system, tol)
        exact_removal, removal_leaves = is_exact_by_removal(system, tol)

        quartet = {
            "is_modular_riesz": modular,
            "is_omega_independent": omega,
            "is_biorthogonal_to_canonical_dual": bio_dual,
            "has_biorthogonal_sequence": has_bio,
        }
        if len(set(quartet.values())) > 1:
            raise ConsistencyError("riesz_equivalence", quartet)
        if exact_lemma != exact_removal or gap_invertible != removal_leaves:
            raise ConsistencyError(
                "exactness_agreement",
                {
                    "is_exact_by_lemma": exact_lemma,
                    "is_exact_by_removal": exact_removal,
                    "gap_invertible": gap_invertible,
                    "removal_leaves_frame": removal_leaves,
                },
            )
    else:
        # not a frame, hence not an exact frame and there is no canonical
        # dual to be biorthogonal with
        bio_dual = False
        exact_lemma = exact_removal = False
        gap_invertible = removal_leaves = None

    return ClassificationReport(
        is_bessel=bessel,
        is_frame=frame,
        is_tight=tight,
        is_parseval=parseval,
        is_omega_independent=omega,
        is_biorthogonal_to_canonical_dual=bio_dual,
        has_biorthogonal_sequence=has_bio,
        is_exact_by_lemma=exact_lemma,
        is_exact_by_removal=exact_removal,
        is_riesz_frank_larson=frank_larson,
        is_modular_riesz=modular,
        bounds=bounds,
        witnesses=Witnesses(
            kernel_coefficients=kernel_witness,
            removal_leaves_frame=removal_leaves,
            gap_invertible=gap_invertible,
        ),
    )
