"""Frame operators and quantities for finite systems in free modules.

A frame system is an indexed family of module vectors.  Its synthesis
matrix X (one row per vector) turns coefficient rows into module elements;
the Gram matrix G = X*.X realizes the frame operator as right
multiplication, and the optimal frame bounds are the spectral extremes of
the flattened Gram blocks.
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
    adjoint,
    multiply,
)
from .algebra import norm as element_norm
from .module import (
    ModuleMap,
    ModuleVector,
    compose,
    flatten_map,
    inner_product,
    map_adjoint,
    map_from_rows,
    operator_norm,
    rows_of,
    unflatten_map,
    vector_norm,
    zero_vector,
)

__all__ = [
    "FrameSystem",
    "FrameBounds",
    "NotAFrameError",
    "synthesis_map",
    "gram_operator",
    "frame_bounds",
    "bounds_admit_frame",
    "gram_condition",
    "canonical_dual",
    "reconstruction_residual",
    "is_dual_pair",
    "riesz_bounds_check",
    "bound_witnesses",
]


class NotAFrameError(ValueError):
    """An operation that needs an invertible frame operator got a non-frame."""


@dataclass(frozen=True, eq=False, repr=False)
class FrameSystem:
    """An indexed finite family of module vectors of a common rank."""

    vectors: tuple[ModuleVector, ...]

    def __post_init__(self):
        vectors = tuple(self.vectors)
        if not vectors:
            raise StructureError("frame systems must be nonempty")
        signature = vectors[0].signature
        rank = vectors[0].rank
        for v in vectors:
            if v.signature != signature or v.rank != rank:
                raise StructureError("frame vectors must share signature and rank")
        object.__setattr__(self, "vectors", vectors)

    @property
    def signature(self) -> AlgebraSignature:
        return self.vectors[0].signature

    @property
    def rank(self) -> int:
        return self.vectors[0].rank

    @property
    def size(self) -> int:
        return len(self.vectors)

    def without(self, index: int) -> "FrameSystem":
        """The subsystem with one vector removed."""
        if not 0 <= index < self.size:
            raise StructureError(f"index {index} out of range")
        if self.size == 1:
            raise StructureError("cannot remove the only vector")
        return FrameSystem(self.vectors[:index] + self.vectors[index + 1 :])

    def __repr__(self):
        return (
            f"FrameSystem(signature={self.signature.block_sizes}, "
            f"rank={self.rank}, size={self.size})"
        )


@dataclass(frozen=True)
class FrameBounds:
    """Optimal constants of the two-sided frame inequality."""

    lower: float
    upper: float

    def __post_init__(self):
        if not 0 <= self.lower <= self.upper:
            raise ValueError(f"bounds must satisfy 0 <= lower <= upper, got {self}")


def synthesis_map(system: FrameSystem) -> ModuleMap:
    """The m x d matrix whose rows are the frame vectors, so that a
    coefficient row a maps to a.X = sum_j a_j x_j."""
    return map_from_rows(system.vectors)


def gram_operator(system: FrameSystem) -> ModuleMap:
    """G = X*.X; right multiplication by G is x -> sum_j <x, x_j> x_j."""
    x = synthesis_map(system)
    return compose(map_adjoint(x), x)


def frame_bounds(
    system: FrameSystem, tol: Tolerance = DEFAULT_TOLERANCE
) -> FrameBounds:
    """Optimal frame bounds: spectral extremes of the flattened Gram blocks,
    clamped below at zero."""
    lows, highs = [], []
    for block in flatten_map(gram_operator(system)):
        evals = np.linalg.eigvalsh((block + block.conj().T) / 2.0)
        lows.append(float(evals[0]))
        highs.append(float(evals[-1]))
    lower = max(0.0, min(lows))
    upper = max(0.0, max(highs))
    return FrameBounds(lower, upper)


def bounds_admit_frame(bounds: FrameBounds, tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
    """Frame test on already-computed bounds: lower clears rel_tol * upper.

    The abs_tol floor on the upper bound keeps numerically-zero systems,
    whose two roundoff-sized bounds can have ratio one, out of the frames.
    """
    return bounds.upper > tol.abs_tol and bounds.lower > tol.rel_tol * bounds.upper


def gram_condition(system: FrameSystem, tol: Tolerance = DEFAULT_TOLERANCE) -> float:
    """Spectral condition number of the Gram operator (inf for non-frames)."""
    bounds = frame_bounds(system, tol)
    if not bounds_admit_frame(bounds, tol):
        return math.inf
    return bounds.upper / bounds.lower


def _flat_synthesis(system: FrameSystem) -> list[np.ndarray]:
    return flatten_map(synthesis_map(system))


def canonical_dual(
    system: FrameSystem, tol: Tolerance = DEFAULT_TOLERANCE
) -> FrameSystem:
    """The dual system {x_j . G^-1}.

    Computed per flattened block as pinv(B)^H, which equals the flattening
    of X.G^-1 for full-column-rank B but avoids squaring the condition
    number the explicit Gram inverse would cost.
    """
    bounds = frame_bounds(system, tol)
    if not bounds_admit_frame(bounds, tol):
        raise NotAFrameError("frame operator not invertible")
    dual_blocks = [np.linalg.pinv(b).conj().T for b in _flat_synthesis(system)]
    dual_map = unflatten_map(system.signature, system.size, system.rank, dual_blocks)
    return FrameSystem(tuple(rows_of(dual_map)))


def reconstruction_residual(
    system: FrameSystem, x: ModuleVector, tol: Tolerance = DEFAULT_TOLERANCE
) -> float:
    """Norm of x - sum_j <x, S^-1 x_j> x_j, accumulated by direct summation."""
    dual = canonical_dual(system, tol)
    acc = zero_vector(system.signature, system.rank)
    for xj, dj in zip(system.vectors, dual.vectors):
        acc = acc + inner_product(x, dj) * xj
    return vector_norm(x - acc)


def is_dual_pair(
    system: FrameSystem, other: FrameSystem, tol: Tolerance = DEFAULT_TOLERANCE
) -> bool:
    """Whether Y*.X is the identity, i.e. x = sum_j <x, y_j> x_j for all x."""
    if system.signature != other.signature:
        raise StructureError("signature mismatch between systems")
    if system.rank != other.rank or system.size != other.size:
        raise StructureError("dual pairs need equal rank and index size")
    x = synthesis_map(system)
    y = synthesis_map(other)
    product = compose(map_adjoint(y), x)
    defect = 0.0
    for block in flatten_map(product):
        eye = np.eye(block.shape[0])
        defect = max(defect, float(np.linalg.norm(block - eye, 2)))
    scale = max(1.0, operator_norm(x) * operator_norm(y))
    return defect <= tol.margin(scale)


def riesz_bounds_check(
    system: FrameSystem,
    coeffs,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> bool:
    """Sampled two-sided coefficient inequality at the optimal bounds.

    For a coefficient tuple {a_j} checks
    C ||sum a_j a_j*||  <=  ||sum a_j x_j||^2  <=  D ||sum a_j a_j*||
    up to a tolerance slack.  Both sides are evaluated by direct summation.
    The coefficient square a_j a_j* is the one matching an inner product
    that is linear in its first slot.
    """
    coeffs = list(coeffs)
    if not coeffs:
        raise StructureError("coefficient list must be nonempty")
    if len(coeffs) != system.size:
        raise StructureError(
            f"expected {system.size} coefficients, got {len(coeffs)}"
        )
    for a in coeffs:
        if a.signature != system.signature:
            raise StructureError("coefficient signature mismatch")
    bounds = frame_bounds(system, tol)
    square = AlgebraElement.zero(system.signature)
    combo = zero_vector(system.signature, system.rank)
    for a, xj in zip(coeffs, system.vectors):
        square = square + multiply(a, adjoint(a))
        combo = combo + a * xj
    lhs = element_norm(square)
    mid = vector_norm(combo) ** 2
    slack = tol.margin(max(1.0, bounds.upper * lhs, mid))
    return bounds.lower * lhs - slack <= mid <= bounds.upper * lhs + slack


def bound_witnesses(system: FrameSystem) -> tuple[ModuleVector, ModuleVector]:
    """Unit vectors achieving the lower and upper frame bound.

    Pulled back from extreme eigenvectors of the flattened Gram blocks:
    the conjugated eigenvector, laid into the first row of its block,
    gives ||<x, x>|| = 1 with Rayleigh quotient exactly the eigenvalue.
    """
    gram_blocks = flatten_map(gram_operator(system))
    best_low = None
    best_high = None
    for k, block in enumerate(gram_blocks):
        evals, evecs = np.linalg.eigh((block + block.conj().T) / 2.0)
        if best_low is None or evals[0] < best_low[0]:
            best_low = (float(evals[0]), k, evecs[:, 0])
        if best_high is None or evals[-1] > best_high[0]:
            best_high = (float(evals[-1]), k, evecs[:, -1])
    return (
        _embed_row_vector(system.signature, system.rank, best_low[1], best_low[2]),
        _embed_row_vector(system.signature, system.rank, best_high[1], best_high[2]),
    )


def _embed_row_vector(
    signature: AlgebraSignature, rank: int, block_index: int, eigvec: np.ndarray
) -> ModuleVector:
    """Module vector whose block ``block_index`` carries conj(eigvec) in the
    first matrix row of each entry, all other blocks zero."""
    n = signature.block_sizes[block_index]
    chunks = np.conj(eigvec).reshape(rank, n)
    entries = []
    for i in range(rank):
        blocks = []
        for k, size in enumerate(signature.block_sizes):
            mat = np.zeros((size, size), dtype=np.complex128)
            if k == block_index:
                mat[0, :] = chunks[i]
            blocks.append(mat)
        entries.append(AlgebraElement(signature, tuple(blocks)))
    return ModuleVector(signature, tuple(entries))
