"""Shared builders for the test suite."""

import math

import numpy as np

from cstar_frames import (
    AlgebraElement,
    AlgebraSignature,
    FrameSystem,
    ModuleMap,
    ModuleVector,
)

SCALAR = AlgebraSignature((1,))

SIGNATURES = [
    AlgebraSignature((1,)),
    AlgebraSignature((2,)),
    AlgebraSignature((1, 2)),
    AlgebraSignature((2, 2)),
]


def element(signature, *blocks) -> AlgebraElement:
    return AlgebraElement(
        signature, tuple(np.asarray(b, dtype=np.complex128) for b in blocks)
    )


def scalar_element(value) -> AlgebraElement:
    return element(SCALAR, [[value]])


def scalar_vector(values) -> ModuleVector:
    return ModuleVector(SCALAR, tuple(scalar_element(v) for v in values))


def scalar_system(rows) -> FrameSystem:
    return FrameSystem(tuple(scalar_vector(row) for row in rows))


def mercedes() -> FrameSystem:
    """Three vectors in rank 2 over the scalar algebra: two basis vectors
    plus their sum."""
    return scalar_system([(1, 0), (0, 1), (1, 1)])


def random_element(signature, rng) -> AlgebraElement:
    blocks = tuple(
        (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
        / math.sqrt(2.0)
        for n in signature.block_sizes
    )
    return AlgebraElement(signature, blocks)


def random_vector(signature, rank, rng) -> ModuleVector:
    return ModuleVector(
        signature, tuple(random_element(signature, rng) for _ in range(rank))
    )


def random_map(signature, domain_rank, codomain_rank, rng) -> ModuleMap:
    return ModuleMap(
        signature,
        tuple(
            tuple(random_element(signature, rng) for _ in range(codomain_rank))
            for _ in range(domain_rank)
        ),
    )


def rng_for(seed) -> np.random.Generator:
    return np.random.default_rng(seed)
