"""Block arithmetic for finite-dimensional C*-algebras.

An algebra is a direct sum of full complex matrix blocks, fixed by a tuple
of block sizes (n1, ..., nK).  Elements are K-tuples of dense complex
matrices, one square matrix per block.  Norm, positivity, invertibility and
spectral bounds are all decided blockwise from dense eigen- or
singular-value decompositions; a single ``Tolerance`` value threads through
every such decision in one computation.
"""

from __future__ import annotations

from dataclasses import dataclass
from numbers import Number

import numpy as np

__all__ = [
    "AlgebraSignature",
    "AlgebraElement",
    "Tolerance",
    "DEFAULT_TOLERANCE",
    "StructureError",
    "multiply",
    "adjoint",
    "norm",
    "is_positive",
    "is_invertible",
    "inverse",
    "spectrum_bounds",
]


class StructureError(ValueError):
    """Signatures, ranks or matrix shapes that do not line up."""


@dataclass(frozen=True)
class AlgebraSignature:
    """Block sizes (n1, ..., nK) of the algebra M_n1 (+) ... (+) M_nK."""

    block_sizes: tuple[int, ...]

    def __post_init__(self):
        sizes = tuple(int(n) for n in self.block_sizes)
        if not sizes:
            raise StructureError("signature needs at least one block")
        if any(n < 1 for n in sizes):
            raise StructureError(f"block sizes must be >= 1, got {sizes}")
        object.__setattr__(self, "block_sizes", sizes)

    @property
    def num_blocks(self) -> int:
        return len(self.block_sizes)

    @property
    def complex_dimension(self) -> int:
        return sum(n * n for n in self.block_sizes)


@dataclass(frozen=True)
class Tolerance:
    """Relative tolerance with an absolute floor for spectral decisions."""

    rel_tol: float = 1e-9
    abs_tol: float = 1e-12

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be positive")
        if self.abs_tol < 0:
            raise ValueError("abs_tol must be nonnegative")

    def margin(self, scale: float) -> float:
        """Absolute slack allowed for a quantity of the given magnitude."""
        return max(self.abs_tol, self.rel_tol * float(scale))


DEFAULT_TOLERANCE = Tolerance()


@dataclass(frozen=True, eq=False, repr=False)
class AlgebraElement:
    """One element of a block algebra: a complex matrix per block."""

    signature: AlgebraSignature
    blocks: tuple[np.ndarray, ...]

    def __post_init__(self):
        sizes = self.signature.block_sizes
        if len(self.blocks) != len(sizes):
            raise StructureError(
                f"expected {len(sizes)} blocks, got {len(self.blocks)}"
            )
        frozen = []
        for k, (n, block) in enumerate(zip(sizes, self.blocks)):
            arr = np.array(block, dtype=np.complex128)
            if arr.shape != (n, n):
                raise StructureError(
                    f"block {k} has shape {arr.shape}, expected ({n}, {n})"
                )
            arr.flags.writeable = False
            frozen.append(arr)
        object.__setattr__(self, "blocks", tuple(frozen))

    def __repr__(self):
        return f"AlgebraElement(signature={self.signature.block_sizes})"

    @classmethod
    def zero(cls, signature: AlgebraSignature) -> "AlgebraElement":
        return cls(signature, tuple(np.zeros((n, n)) for n in signature.block_sizes))

    @classmethod
    def identity(cls, signature: AlgebraSignature) -> "AlgebraElement":
        return cls(signature, tuple(np.eye(n) for n in signature.block_sizes))

    @classmethod
    def from_block_scalars(cls, signature: AlgebraSignature, values) -> "AlgebraElement":
        """Element whose k-th block is values[k] times the block identity."""
        values = tuple(values)
        if len(values) != signature.num_blocks:
            raise StructureError(
                f"expected {signature.num_blocks} scalars, got {len(values)}"
            )
        return cls(
            signature,
            tuple(complex(v) * np.eye(n) for v, n in zip(values, signature.block_sizes)),
        )

    def __add__(self, other):
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        _require_same_signature(self, other)
        return AlgebraElement(
            self.signature, tuple(a + b for a, b in zip(self.blocks, other.blocks))
        )

    def __sub__(self, other):
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        _require_same_signature(self, other)
        return AlgebraElement(
            self.signature, tuple(a - b for a, b in zip(self.blocks, other.blocks))
        )

    def __neg__(self):
        return AlgebraElement(self.signature, tuple(-a for a in self.blocks))

    def __mul__(self, other):
        if isinstance(other, AlgebraElement):
            return multiply(self, other)
        if isinstance(other, Number):
            return AlgebraElement(
                self.signature, tuple(complex(other) * a for a in self.blocks)
            )
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, Number):
            return AlgebraElement(
                self.signature, tuple(complex(other) * a for a in self.blocks)
            )
        return NotImplemented


def _require_same_signature(a: AlgebraElement, b: AlgebraElement) -> None:
    if a.signature != b.signature:
        raise StructureError(
            f"signature mismatch: {a.signature.block_sizes} vs {b.signature.block_sizes}"
        )


def multiply(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    """Blockwise matrix product."""
    _require_same_signature(a, b)
    return AlgebraElement(
        a.signature, tuple(x @ y for x, y in zip(a.blocks, b.blocks))
    )


def adjoint(a: AlgebraElement) -> AlgebraElement:
    """Blockwise conjugate transpose."""
    return AlgebraElement(a.signature, tuple(x.conj().T for x in a.blocks))


def norm(a: AlgebraElement) -> float:
    """C*-norm: the largest singular value over all blocks."""
    return max(float(np.linalg.norm(x, 2)) for x in a.blocks)


def _hermitian_defect(a: AlgebraElement) -> float:
    return max(float(np.linalg.norm(x - x.conj().T, 2)) for x in a.blocks)


def is_positive(a: AlgebraElement, tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
    """Whether the element is positive up to tolerance.

    Requires the element to be Hermitian within the tolerance margin and
    every block's smallest eigenvalue to clear ``-margin``.  Non-Hermitian
    inputs answer False rather than raising.
    """
    slack = tol.margin(norm(a))
    if _hermitian_defect(a) > slack:
        return False
    for block in a.blocks:
        evals = np.linalg.eigvalsh((block + block.conj().T) / 2.0)
        if evals[0] < -slack:
            return False
    return True


def is_invertible(a: AlgebraElement, tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
    """Scale-aware invertibility via smallest singular values.

    True iff every block's smallest singular value exceeds
    ``rel_tol * (largest singular value over all blocks)``, with the
    ``abs_tol`` floor so the zero element never counts as invertible.
    """
    svals = [np.linalg.svd(x, compute_uv=False) for x in a.blocks]
    largest = max(float(s[0]) for s in svals)
    threshold = max(tol.rel_tol * largest, tol.abs_tol)
    return all(float(s[-1]) > threshold for s in svals)


def inverse(a: AlgebraElement) -> AlgebraElement:
    """Blockwise inverse; callers guard with ``is_invertible`` first."""
    return AlgebraElement(a.signature, tuple(np.linalg.inv(x) for x in a.blocks))


def spectrum_bounds(
    a: AlgebraElement, tol: Tolerance = DEFAULT_TOLERANCE
) -> tuple[float, float]:
    """Smallest and largest eigenvalue over all blocks of a Hermitian element.

    Unlike ``is_positive`` this returns numbers, not a verdict, so a
    non-Hermitian input (beyond the tolerance margin) is a domain error.
    """
    slack = tol.margin(norm(a))
    if _hermitian_defect(a) > slack:
        raise ValueError("spectrum bounds require a Hermitian element")
    lows, highs = [], []
    for block in a.blocks:
        evals = np.linalg.eigvalsh((block + block.conj().T) / 2.0)
        lows.append(float(evals[0]))
        highs.append(float(evals[-1]))
    return min(lows), max(highs)
