"""Free Hilbert modules A^d over a block algebra.

Vectors are rows of algebra elements; the algebra-valued inner product is
linear in the first slot, so scalars multiply vectors from the left.
Module maps are matrices over the algebra acting on the right
(x -> x . M), and ``flatten_map`` gives the faithful complex block-matrix
picture used for every rank, kernel and spectral decision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from numbers import Number

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

__all__ = [
    "ModuleVector",
    "ModuleMap",
    "inner_product",
    "vector_norm",
    "apply_map",
    "map_adjoint",
    "compose",
    "flatten_map",
    "unflatten_map",
    "operator_norm",
    "map_invertible",
    "map_inverse",
    "identity_map",
    "zero_vector",
    "canonical_basis",
    "map_from_rows",
    "rows_of",
]


@dataclass(frozen=True, eq=False, repr=False)
class ModuleVector:
    """Element of A^d: a length-d row of algebra elements."""

    signature: AlgebraSignature
    entries: tuple[AlgebraElement, ...]

    def __post_init__(self):
        entries = tuple(self.entries)
        if not entries:
            raise StructureError("module vectors need rank >= 1")
        for e in entries:
            if e.signature != self.signature:
                raise StructureError("vector entries must share the signature")
        object.__setattr__(self, "entries", entries)

    @property
    def rank(self) -> int:
        return len(self.entries)

    def __repr__(self):
        return (
            f"ModuleVector(signature={self.signature.block_sizes}, rank={self.rank})"
        )

    def __add__(self, other):
        if not isinstance(other, ModuleVector):
            return NotImplemented
        _require_same_shape(self, other)
        return ModuleVector(
            self.signature, tuple(a + b for a, b in zip(self.entries, other.entries))
        )

    def __sub__(self, other):
        if not isinstance(other, ModuleVector):
            return NotImplemented
        _require_same_shape(self, other)
        return ModuleVector(
            self.signature, tuple(a - b for a, b in zip(self.entries, other.entries))
        )

    def __neg__(self):
        return ModuleVector(self.signature, tuple(-a for a in self.entries))

    def __rmul__(self, other):
        # left module action: algebra elements and complex scalars
        if isinstance(other, AlgebraElement):
            return ModuleVector(
                self.signature, tuple(multiply(other, e) for e in self.entries)
            )
        if isinstance(other, Number):
            return ModuleVector(self.signature, tuple(other * e for e in self.entries))
        return NotImplemented


@dataclass(frozen=True, eq=False, repr=False)
class ModuleMap:
    """A-linear map A^m -> A^d as an m x d matrix over the algebra."""

    signature: AlgebraSignature
    matrix: tuple[tuple[AlgebraElement, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(row) for row in self.matrix)
        if not rows or not rows[0]:
            raise StructureError("module maps need at least one row and column")
        width = len(rows[0])
        for row in rows:
            if len(row) != width:
                raise StructureError("module map matrix must be rectangular")
            for entry in row:
                if entry.signature != self.signature:
                    raise StructureError("map entries must share the signature")
        object.__setattr__(self, "matrix", rows)

    @property
    def domain_rank(self) -> int:
        return len(self.matrix)

    @property
    def codomain_rank(self) -> int:
        return len(self.matrix[0])

    def __repr__(self):
        return (
            f"ModuleMap(signature={self.signature.block_sizes}, "
            f"shape=({self.domain_rank}, {self.codomain_rank}))"
        )


def _require_same_shape(x: ModuleVector, y: ModuleVector) -> None:
    if x.signature != y.signature:
        raise StructureError("signature mismatch between module vectors")
    if x.rank != y.rank:
        raise StructureError(f"rank mismatch: {x.rank} vs {y.rank}")


def inner_product(x: ModuleVector, y: ModuleVector) -> AlgebraElement:
    """Algebra-valued inner product, linear in the first slot:
    sum_i x_i . y_i*."""
    _require_same_shape(x, y)
    acc = AlgebraElement.zero(x.signature)
    for xe, ye in zip(x.entries, y.entries):
        acc = acc + multiply(xe, adjoint(ye))
    return acc


def vector_norm(x: ModuleVector) -> float:
    """Module norm, the square root of ||<x, x>||."""
    return math.sqrt(element_norm(inner_product(x, x)))


def apply_map(m: ModuleMap, x: ModuleVector) -> ModuleVector:
    """Right action x . M: result_j = sum_i x_i . M[i][j]."""
    if x.signature != m.signature:
        raise StructureError("signature mismatch between vector and map")
    if x.rank != m.domain_rank:
        raise StructureError(
            f"vector rank {x.rank} does not match map domain {m.domain_rank}"
        )
    out = []
    for j in range(m.codomain_rank):
        acc = AlgebraElement.zero(m.signature)
        for i in range(m.domain_rank):
            acc = acc + multiply(x.entries[i], m.matrix[i][j])
        out.append(acc)
    return ModuleVector(m.signature, tuple(out))


def map_adjoint(m: ModuleMap) -> ModuleMap:
    """Adjoint map: the d x m matrix with entries M[j][i]*."""
    return ModuleMap(
        m.signature,
        tuple(
            tuple(adjoint(m.matrix[i][j]) for i in range(m.domain_rank))
            for j in range(m.codomain_rank)
        ),
    )


def compose(m: ModuleMap, n: ModuleMap) -> ModuleMap:
    """Matrix product M . N, so that x.(M.N) == (x.M).N."""
    if m.signature != n.signature:
        raise StructureError("signature mismatch between maps")
    if m.codomain_rank != n.domain_rank:
        raise StructureError(
            f"cannot compose shapes ({m.domain_rank},{m.codomain_rank}) "
            f"and ({n.domain_rank},{n.codomain_rank})"
        )
    rows = []
    for i in range(m.domain_rank):
        row = []
        for j in range(n.codomain_rank):
            acc = AlgebraElement.zero(m.signature)
            for t in range(m.codomain_rank):
                acc = acc + multiply(m.matrix[i][t], n.matrix[t][j])
            row.append(acc)
        rows.append(tuple(row))
    return ModuleMap(m.signature, tuple(rows))


def flatten_map(m: ModuleMap) -> list[np.ndarray]:
    """Faithful complex picture: per block k an (m*n_k) x (d*n_k) matrix.

    Flattening is multiplicative and compatible with adjoints, so rank,
    kernel and spectral questions about the map reduce to dense linear
    algebra on these blocks.
    """
    out = []
    for k in range(m.signature.num_blocks):
        grid = [
            [m.matrix[i][j].blocks[k] for j in range(m.codomain_rank)]
            for i in range(m.domain_rank)
        ]
        out.append(np.block(grid))
    return out


def unflatten_map(
    signature: AlgebraSignature,
    domain_rank: int,
    codomain_rank: int,
    blocks: list[np.ndarray],
) -> ModuleMap:
    """Inverse of ``flatten_map`` for block matrices of the right shapes."""
    sizes = signature.block_sizes
    if len(blocks) != len(sizes):
        raise StructureError(f"expected {len(sizes)} flattened blocks")
    for k, (n, mat) in enumerate(zip(sizes, blocks)):
        expected = (domain_rank * n, codomain_rank * n)
        if mat.shape != expected:
            raise StructureError(
                f"flattened block {k} has shape {mat.shape}, expected {expected}"
            )
    rows = []
    for i in range(domain_rank):
        row = []
        for j in range(codomain_rank):
            entry_blocks = tuple(
                np.asarray(blocks[k][i * n : (i + 1) * n, j * n : (j + 1) * n])
                for k, n in enumerate(sizes)
            )
            row.append(AlgebraElement(signature, entry_blocks))
        rows.append(tuple(row))
    return ModuleMap(signature, tuple(rows))


def operator_norm(m: ModuleMap) -> float:
    """Operator norm of the map: the largest flattened-block 2-norm."""
    return max(float(np.linalg.norm(b, 2)) for b in flatten_map(m))


def map_invertible(m: ModuleMap, tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
    """Invertibility over the algebra, decided on the flattened blocks."""
    if m.domain_rank != m.codomain_rank:
        return False
    svals = [np.linalg.svd(b, compute_uv=False) for b in flatten_map(m)]
    largest = max(float(s[0]) for s in svals)
    return all(float(s[-1]) > tol.rel_tol * largest for s in svals)


def map_inverse(m: ModuleMap, tol: Tolerance = DEFAULT_TOLERANCE) -> ModuleMap:
    """Inverse map via blockwise flattened inversion and unflattening."""
    if not map_invertible(m, tol):
        raise ValueError("module map is not invertible")
    inv_blocks = [np.linalg.inv(b) for b in flatten_map(m)]
    return unflatten_map(m.signature, m.domain_rank, m.codomain_rank, inv_blocks)


def identity_map(signature: AlgebraSignature, rank: int) -> ModuleMap:
    one = AlgebraElement.identity(signature)
    zero = AlgebraElement.zero(signature)
    return ModuleMap(
        signature,
        tuple(
            tuple(one if i == j else zero for j in range(rank)) for i in range(rank)
        ),
    )


def zero_vector(signature: AlgebraSignature, rank: int) -> ModuleVector:
    zero = AlgebraElement.zero(signature)
    return ModuleVector(signature, (zero,) * rank)


def canonical_basis(signature: AlgebraSignature, rank: int) -> list[ModuleVector]:
    """The orthonormal rows e_1, ..., e_d of A^d."""
    one = AlgebraElement.identity(signature)
    zero = AlgebraElement.zero(signature)
    return [
        ModuleVector(signature, tuple(one if i == j else zero for i in range(rank)))
        for j in range(rank)
    ]


def map_from_rows(vectors) -> ModuleMap:
    """Stack module vectors as the rows of a map."""
    vectors = list(vectors)
    if not vectors:
        raise StructureError("need at least one row")
    signature = vectors[0].signature
    rank = vectors[0].rank
    for v in vectors:
        if v.signature != signature or v.rank != rank:
            raise StructureError("rows must share signature and rank")
    return ModuleMap(signature, tuple(v.entries for v in vectors))


def rows_of(m: ModuleMap) -> list[ModuleVector]:
    return [ModuleVector(m.signature, row) for row in m.matrix]
