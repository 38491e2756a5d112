"""Deterministic, seeded generators for frame systems.

Every kind is reproducible bit for bit: entries are sampled from PCG64
streams keyed by (seed, kind, attempt, row, column) through SeedSequence,
so identical specs give identical systems on every platform and run order
never matters.  Kinds cover each classification branch, including the
diagonal-unit system over a commutative algebra that is exact without
being a modular Riesz basis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .algebra import AlgebraElement, AlgebraSignature, StructureError
from .frames import FrameSystem
from .module import ModuleVector, flatten_map, map_from_rows, rows_of, unflatten_map

__all__ = ["KINDS", "GeneratorSpec", "generate", "sweep"]

KINDS = (
    "modular_riesz",
    "overcomplete_frame",
    "delta_example",
    "duplicated_vector",
    "near_singular",
    "non_frame",
)
_KIND_TAG = {kind: index for index, kind in enumerate(KINDS)}

_MASK64 = (1 << 64) - 1
_MAX_BLOCK = 8
_MAX_BLOCKS = 8
_MAX_RANK = 8
_MAX_COUNT = 16
_MAX_ATTEMPTS = 100
# cap on the Gram condition number of emitted frames
_GRAM_CONDITION_CAP = 1e6
# dedicated stream tags, disjoint from attempt indices
_TAG_TARGET_CONDITION = 1_000_001
_TAG_KERNEL_DIRECTION = 1_000_002
_TAG_DUPLICATE_INDEX = 1_000_003


@dataclass(frozen=True)
class GeneratorSpec:
    """Parameters of one deterministic draw."""

    seed: int
    signature: AlgebraSignature
    rank: int
    count: int
    kind: str

    def __post_init__(self):
        if not 0 <= self.seed <= _MASK64:
            raise StructureError("seed must be an unsigned 64-bit integer")
        if self.kind not in KINDS:
            raise StructureError(f"unknown generator kind {self.kind!r}")
        sizes = self.signature.block_sizes
        if len(sizes) > _MAX_BLOCKS or any(n > _MAX_BLOCK for n in sizes):
            raise StructureError(f"signature exceeds the {_MAX_BLOCK}-cap: {sizes}")
        if not 1 <= self.rank <= _MAX_RANK:
            raise StructureError(f"rank must be in 1..{_MAX_RANK}")
        if not 1 <= self.count <= _MAX_COUNT:
            raise StructureError(f"count must be in 1..{_MAX_COUNT}")


def _stream(spec: GeneratorSpec, *key: int) -> np.random.Generator:
    seq = np.random.SeedSequence((spec.seed, _KIND_TAG[spec.kind]) + tuple(key))
    return np.random.Generator(np.random.PCG64(seq))


def _sample_entry(spec: GeneratorSpec, attempt: int, row: int, col: int) -> AlgebraElement:
    rng = _stream(spec, attempt, row, col)
    blocks = []
    for n in spec.signature.block_sizes:
        real = rng.standard_normal((n, n))
        imag = rng.standard_normal((n, n))
        blocks.append((real + 1j * imag) / math.sqrt(2.0))
    return AlgebraElement(spec.signature, tuple(blocks))


def _sample_vectors(spec: GeneratorSpec, attempt: int) -> list[ModuleVector]:
    return [
        ModuleVector(
            spec.signature,
            tuple(_sample_entry(spec, attempt, row, col) for col in range(spec.rank)),
        )
        for row in range(spec.count)
    ]


def _singular_extremes(vectors) -> tuple[float, float]:
    largest = 0.0
    smallest = math.inf
    for block in flatten_map(map_from_rows(vectors)):
        svals = np.linalg.svd(block, compute_uv=False)
        largest = max(largest, float(svals[0]))
        smallest = min(smallest, float(svals[-1]))
    return smallest, largest


def _generate_modular_riesz(spec: GeneratorSpec) -> FrameSystem:
    if spec.count != spec.rank:
        raise StructureError("modular_riesz needs count == rank")
    for attempt in range(_MAX_ATTEMPTS):
        vectors = _sample_vectors(spec, attempt)
        smallest, largest = _singular_extremes(vectors)
        if smallest > 0 and (largest / smallest) ** 2 <= _GRAM_CONDITION_CAP:
            return FrameSystem(tuple(vectors))
    raise RuntimeError(f"resampling budget exhausted for {spec}")


def _generate_overcomplete(spec: GeneratorSpec) -> FrameSystem:
    if spec.count <= spec.rank:
        raise StructureError("overcomplete_frame needs count > rank")
    for attempt in range(_MAX_ATTEMPTS):
        vectors = _sample_vectors(spec, attempt)
        smallest, largest = _singular_extremes(vectors)
        if smallest > 0 and (largest / smallest) ** 2 <= _GRAM_CONDITION_CAP:
            return FrameSystem(tuple(vectors))
    raise RuntimeError(f"resampling budget exhausted for {spec}")


def _generate_delta(spec: GeneratorSpec) -> FrameSystem:
    sizes = spec.signature.block_sizes
    if spec.rank != 1 or sizes != (1,) * spec.count:
        raise StructureError(
            "delta_example needs rank 1 and an all-ones signature of length count"
        )
    vectors = []
    for j in range(spec.count):
        values = [1.0 if k == j else 0.0 for k in range(spec.count)]
        entry = AlgebraElement.from_block_scalars(spec.signature, values)
        vectors.append(ModuleVector(spec.signature, (entry,)))
    return FrameSystem(tuple(vectors))


def _generate_duplicated(spec: GeneratorSpec) -> FrameSystem:
    if spec.count < 2 or spec.count - 1 < spec.rank:
        raise StructureError("duplicated_vector needs count >= max(2, rank + 1)")
    base_kind = "modular_riesz" if spec.count - 1 == spec.rank else "overcomplete_frame"
    base = generate(
        GeneratorSpec(spec.seed, spec.signature, spec.rank, spec.count - 1, base_kind)
    )
    rng = _stream(spec, _TAG_DUPLICATE_INDEX)
    index = int(rng.integers(0, spec.count - 1))
    return FrameSystem(base.vectors + (base.vectors[index],))


def _generate_near_singular(spec: GeneratorSpec) -> FrameSystem:
    if spec.count < spec.rank:
        raise StructureError("near_singular needs count >= rank")
    slots = spec.rank * sum(spec.signature.block_sizes)
    if slots < 2:
        raise StructureError("near_singular needs at least two singular values")
    rng = _stream(spec, _TAG_TARGET_CONDITION)
    target = 10.0 ** rng.uniform(4.0, 6.0)
    # remap the singular values of a Gaussian draw onto a geometric ladder
    # whose extremes give the Gram condition number exactly `target`
    vectors = _sample_vectors(spec, 0)
    ladder = np.geomspace(1.0, target ** -0.5, slots)
    position = 0
    rebuilt = []
    for block in flatten_map(map_from_rows(vectors)):
        u, svals, vh = np.linalg.svd(block, full_matrices=False)
        replacement = ladder[position : position + svals.size]
        position += svals.size
        rebuilt.append((u * replacement) @ vh)
    shaped = unflatten_map(spec.signature, spec.count, spec.rank, rebuilt)
    return FrameSystem(tuple(rows_of(shaped)))


def _generate_non_frame(spec: GeneratorSpec) -> FrameSystem:
    vectors = _sample_vectors(spec, 0)
    blocks = flatten_map(map_from_rows(vectors))
    rng = _stream(spec, _TAG_KERNEL_DIRECTION)
    width = blocks[0].shape[1]
    direction = rng.standard_normal(width) + 1j * rng.standard_normal(width)
    direction = direction / np.linalg.norm(direction)
    # kill one column direction of the first block: no lower frame bound
    scale = float(np.abs(blocks[0]).max(initial=1.0))
    blocks[0] = blocks[0] - np.outer(blocks[0] @ direction, np.conj(direction))
    # snap roundoff residue to honest zeros (the whole block when width is 1)
    blocks[0][np.abs(blocks[0]) <= 1e-14 * scale] = 0.0
    shaped = unflatten_map(spec.signature, spec.count, spec.rank, blocks)
    return FrameSystem(tuple(rows_of(shaped)))


_GENERATORS = {
    "modular_riesz": _generate_modular_riesz,
    "overcomplete_frame": _generate_overcomplete,
    "delta_example": _generate_delta,
    "duplicated_vector": _generate_duplicated,
    "near_singular": _generate_near_singular,
    "non_frame": _generate_non_frame,
}


def generate(spec: GeneratorSpec) -> FrameSystem:
    """Emit the frame system determined by the spec."""
    return _GENERATORS[spec.kind](spec)


_SWEEP_SIGNATURES = ((1,), (2,), (1, 1), (1, 2), (2, 2))


def sweep(seed: int, per_kind: int) -> list[GeneratorSpec]:
    """A deterministic schedule of specs spanning every kind, the sweep
    signatures and ranks 1..4, suitable for randomized verification runs."""
    specs = []
    for kind in KINDS:
        for t in range(per_kind):
            sizes = _SWEEP_SIGNATURES[t % len(_SWEEP_SIGNATURES)]
            rank = 1 + t % 4
            if kind == "delta_example":
                n = 2 + t % 7
                sizes, rank, count = (1,) * n, 1, n
            elif kind == "modular_riesz":
                count = rank
            elif kind == "overcomplete_frame":
                count = rank + 1 + t % 3
            elif kind == "duplicated_vector":
                count = rank + 1 + t % 2
            elif kind == "near_singular":
                if rank * sum(sizes) < 2:
                    rank = 2
                count = rank + t % 3
            else:  # non_frame
                count = max(1, rank - 1 + t % 3)
            specs.append(
                GeneratorSpec(
                    (seed + t) & _MASK64,
                    AlgebraSignature(sizes),
                    rank,
                    count,
                    kind,
                )
            )
    return specs
