"""Command line front end.

Subcommands: ``classify`` a frame document, ``bounds`` (optimal frame
bounds and canonical dual), ``verify`` (randomized cross-checks between the
independently implemented decision procedures) and ``example`` (emit ready
made documents).  Documents are JSON: matrices are row-major lists of
[re, im] pairs, one matrix per algebra block, one block list per entry of
each frame vector.

Exit codes: 0 success, 2 input error, 3 consistency or suite failure,
4 precondition failure (e.g. asking a non-frame for its bounds).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from .algebra import AlgebraElement, AlgebraSignature, StructureError, Tolerance
from .algebra import norm as element_norm
from .classify import (
    ClassificationReport,
    ConsistencyError,
    classify,
    frame_flags,
    has_biorthogonal_sequence,
    is_biorthogonal,
    is_exact_by_lemma,
    is_exact_by_removal,
    is_modular_riesz,
    is_omega_independent,
    is_riesz_frank_larson,
)
from .corpus import KINDS, GeneratorSpec, generate, sweep
from .frames import (
    FrameSystem,
    NotAFrameError,
    bounds_admit_frame,
    canonical_dual,
    frame_bounds,
    reconstruction_residual,
    riesz_bounds_check,
)
from .module import ModuleVector, canonical_basis, inner_product, vector_norm

__all__ = ["main", "parse_document", "system_to_document"]

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_CONSISTENCY = 3
EXIT_PRECONDITION = 4

SEED_ENV_VAR = "CSTAR_FRAMES_SEED"

REPORT_FIELDS = (
    "is_bessel",
    "is_frame",
    "is_tight",
    "is_parseval",
    "is_omega_independent",
    "is_biorthogonal_to_canonical_dual",
    "has_biorthogonal_sequence",
    "is_exact_by_lemma",
    "is_exact_by_removal",
    "is_riesz_frank_larson",
    "is_modular_riesz",
)

VERIFY_SUITES = (
    "riesz_equivalence",
    "exactness_agreement",
    "diagonal_criterion",
    "riesz_implies_exact",
    "reconstruction",
    "synthesis_bounds",
)


class DocumentError(ValueError):
    """Malformed frame document, with the offending JSON path."""


# ---------------------------------------------------------------------------
# document parsing and emission


def _fail(path: str, message: str):
    raise DocumentError(f"{path}: {message}")


def _get(obj: dict, key: str, path: str):
    if key not in obj:
        _fail(path, f"missing key {key!r}")
    return obj[key]


def _as_list(value, path: str) -> list:
    if not isinstance(value, list):
        _fail(path, "expected a JSON array")
    return value


def _as_int(value, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        _fail(path, "expected an integer")
    return value


def _as_number(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        _fail(path, "expected a number")
    return float(value)


def _matrix_from_json(value, size: int, path: str) -> np.ndarray:
    rows = _as_list(value, path)
    if len(rows) != size:
        _fail(path, f"expected {size} rows, got {len(rows)}")
    out = np.zeros((size, size), dtype=np.complex128)
    for r, row in enumerate(rows):
        cells = _as_list(row, f"{path}[{r}]")
        if len(cells) != size:
            _fail(f"{path}[{r}]", f"expected {size} entries, got {len(cells)}")
        for c, cell in enumerate(cells):
            pair = _as_list(cell, f"{path}[{r}][{c}]")
            if len(pair) != 2:
                _fail(f"{path}[{r}][{c}]", "expected a [re, im] pair")
            re = _as_number(pair[0], f"{path}[{r}][{c}][0]")
            im = _as_number(pair[1], f"{path}[{r}][{c}][1]")
            out[r, c] = complex(re, im)
    return out


def _element_from_json(
    value, signature: AlgebraSignature, path: str
) -> AlgebraElement:
    mats = _as_list(value, path)
    if len(mats) != signature.num_blocks:
        _fail(path, f"expected {signature.num_blocks} blocks, got {len(mats)}")
    blocks = tuple(
        _matrix_from_json(mat, n, f"{path}.block[{k}]")
        for k, (n, mat) in enumerate(zip(signature.block_sizes, mats))
    )
    return AlgebraElement(signature, blocks)


def parse_document(data) -> tuple[FrameSystem, Tolerance | None]:
    """Parse a frame document into a system plus its optional tolerance."""
    if not isinstance(data, dict):
        _fail("document", "expected a JSON object")
    algebra = _get(data, "algebra", "document")
    if not isinstance(algebra, dict):
        _fail("algebra", "expected a JSON object")
    sizes = _as_list(_get(algebra, "blocks", "algebra"), "algebra.blocks")
    if not sizes:
        _fail("algebra.blocks", "expected at least one block size")
    block_sizes = []
    for k, value in enumerate(sizes):
        n = _as_int(value, f"algebra.blocks[{k}]")
        if n < 1:
            _fail(f"algebra.blocks[{k}]", "block sizes must be >= 1")
        block_sizes.append(n)
    signature = AlgebraSignature(tuple(block_sizes))

    rank = _as_int(_get(data, "module_rank", "document"), "module_rank")
    if rank < 1:
        _fail("module_rank", "module rank must be >= 1")

    rows = _as_list(_get(data, "frame", "document"), "frame")
    if not rows:
        _fail("frame", "expected at least one vector")
    vectors = []
    for j, row in enumerate(rows):
        entries = _as_list(row, f"frame[{j}]")
        if len(entries) != rank:
            _fail(f"frame[{j}]", f"expected {rank} entries, got {len(entries)}")
        parsed = tuple(
            _element_from_json(entry, signature, f"frame[{j}][{i}]")
            for i, entry in enumerate(entries)
        )
        vectors.append(ModuleVector(signature, parsed))

    tolerance = None
    if "tolerance" in data:
        tol = data["tolerance"]
        if not isinstance(tol, dict):
            _fail("tolerance", "expected a JSON object")
        rel = _as_number(_get(tol, "rel_tol", "tolerance"), "tolerance.rel_tol")
        abs_ = _as_number(_get(tol, "abs_tol", "tolerance"), "tolerance.abs_tol")
        try:
            tolerance = Tolerance(rel_tol=rel, abs_tol=abs_)
        except ValueError as exc:
            _fail("tolerance", str(exc))
    return FrameSystem(tuple(vectors)), tolerance


def _element_to_json(element: AlgebraElement) -> list:
    return [
        [[[float(z.real), float(z.imag)] for z in row] for row in block]
        for block in element.blocks
    ]


def system_to_document(system: FrameSystem) -> dict:
    return {
        "algebra": {"blocks": list(system.signature.block_sizes)},
        "module_rank": system.rank,
        "frame": [
            [_element_to_json(entry) for entry in vector.entries]
            for vector in system.vectors
        ],
    }


def _dump(obj) -> str:
    return json.dumps(obj, indent=2)


def _load_system(path: str) -> tuple[FrameSystem, Tolerance | None]:
    with open(path, "r", encoding="utf-8") as handle:
        data = json.load(handle)
    return parse_document(data)


# ---------------------------------------------------------------------------
# report formatting


def _report_dict(
    system: FrameSystem, report: ClassificationReport, with_witnesses: bool
) -> dict:
    out = {
        "signature": list(system.signature.block_sizes),
        "module_rank": system.rank,
        "vector_count": system.size,
    }
    for name in REPORT_FIELDS:
        out[name] = getattr(report, name)
    out["bounds"] = {"lower": report.bounds.lower, "upper": report.bounds.upper}
    if with_witnesses:
        wits = report.witnesses
        out["witnesses"] = {
            "kernel_coefficients": (
                None
                if wits.kernel_coefficients is None
                else [_element_to_json(a) for a in wits.kernel_coefficients]
            ),
            "removal_leaves_frame": (
                None
                if wits.removal_leaves_frame is None
                else list(wits.removal_leaves_frame)
            ),
            "gap_invertible": (
                None if wits.gap_invertible is None else list(wits.gap_invertible)
            ),
        }
    return out


def _print_report_text(data: dict) -> None:
    print(f"signature      {data['signature']}")
    print(f"module_rank    {data['module_rank']}")
    print(f"vector_count   {data['vector_count']}")
    bounds = data["bounds"]
    print(f"bounds         lower={bounds['lower']:.12g} upper={bounds['upper']:.12g}")
    for name in REPORT_FIELDS:
        print(f"{name:<36} {'true' if data[name] else 'false'}")
    if "witnesses" in data:
        wits = data["witnesses"]
        removable = wits["removal_leaves_frame"]
        if removable is not None:
            indices = [i for i, flag in enumerate(removable) if flag]
            print(f"removable_indices                    {indices}")
        gaps = wits["gap_invertible"]
        if gaps is not None:
            indices = [i for i, flag in enumerate(gaps) if flag]
            print(f"gap_invertible_indices               {indices}")
        if wits["kernel_coefficients"] is not None:
            print("kernel_coefficients:")
            print(_dump(wits["kernel_coefficients"]))


# ---------------------------------------------------------------------------
# subcommands


def _resolve_tolerance(flag_tol, document_tol) -> Tolerance:
    if flag_tol is not None:
        return Tolerance(rel_tol=flag_tol, abs_tol=flag_tol * 1e-3)
    if document_tol is not None:
        return document_tol
    return Tolerance()


def _cmd_classify(args) -> int:
    system, doc_tol = _load_system(args.path)
    tol = _resolve_tolerance(args.tol, doc_tol)
    try:
        report = classify(system, tol)
    except ConsistencyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONSISTENCY
    data = _report_dict(system, report, args.witnesses)
    if args.format == "json":
        print(_dump(data))
    else:
        _print_report_text(data)
    return EXIT_OK


def _cmd_bounds(args) -> int:
    system, doc_tol = _load_system(args.path)
    tol = _resolve_tolerance(args.tol, doc_tol)
    bounds = frame_bounds(system, tol)
    try:
        dual = canonical_dual(system, tol) if args.dual else None
    except NotAFrameError:
        dual = None
    if not bounds_admit_frame(bounds, tol):
        print("error: not a frame (lower bound 0)", file=sys.stderr)
        return EXIT_PRECONDITION
    if args.format == "json":
        data = {"lower": bounds.lower, "upper": bounds.upper}
        if dual is not None:
            data["dual"] = system_to_document(dual)
        print(_dump(data))
    else:
        print(f"{bounds.lower:.12g} {bounds.upper:.12g}")
        if dual is not None:
            print(_dump(system_to_document(dual)))
    return EXIT_OK


_EXAMPLE_KINDS = {
    "delta": "delta_example",
    "basis": None,
    "mrb": "modular_riesz",
    "overcomplete": "overcomplete_frame",
    "duplicated": "duplicated_vector",
    "near-singular": "near_singular",
    "non-frame": "non_frame",
}


def _parse_blocks(text: str) -> AlgebraSignature:
    try:
        sizes = tuple(int(part) for part in text.split(","))
    except ValueError:
        raise StructureError(f"cannot parse block sizes {text!r}")
    return AlgebraSignature(sizes)


def _cmd_example(args) -> int:
    if args.kind not in _EXAMPLE_KINDS:
        known = ", ".join(sorted(_EXAMPLE_KINDS))
        print(f"error: unknown example kind {args.kind!r} (known: {known})",
              file=sys.stderr)
        return EXIT_INPUT
    seed = args.seed if args.seed is not None else _default_seed()
    if args.kind == "delta":
        n = args.n
        spec = GeneratorSpec(seed, AlgebraSignature((1,) * n), 1, n, "delta_example")
        system = generate(spec)
    elif args.kind == "basis":
        signature = _parse_blocks(args.blocks)
        system = FrameSystem(tuple(canonical_basis(signature, args.d)))
    else:
        signature = _parse_blocks(args.blocks)
        kind = _EXAMPLE_KINDS[args.kind]
        count = args.count
        if count is None:
            count = {
                "modular_riesz": args.d,
                "overcomplete_frame": args.d + 1,
                "duplicated_vector": args.d + 2,
                "near_singular": args.d + 1,
                "non_frame": args.d,
            }[kind]
        spec = GeneratorSpec(seed, signature, args.d, count, kind)
        system = generate(spec)
    print(_dump(system_to_document(system)))
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify


def _default_seed() -> int:
    return int(os.environ.get(SEED_ENV_VAR, "0"))


def _vector_stream(spec: GeneratorSpec, tag: int) -> np.random.Generator:
    seq = np.random.SeedSequence((spec.seed, 7_700_000 + tag))
    return np.random.Generator(np.random.PCG64(seq))


def _random_vector(
    signature: AlgebraSignature, rank: int, rng: np.random.Generator
) -> ModuleVector:
    entries = []
    for _ in range(rank):
        blocks = tuple(
            (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
            / math.sqrt(2.0)
            for n in signature.block_sizes
        )
        entries.append(AlgebraElement(signature, blocks))
    return ModuleVector(signature, tuple(entries))


def _random_coefficients(
    signature: AlgebraSignature, count: int, rng: np.random.Generator, sparse: bool
) -> list[AlgebraElement]:
    coeffs = []
    for _ in range(count):
        blocks = tuple(
            (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
            / math.sqrt(2.0)
            for n in signature.block_sizes
        )
        coeffs.append(AlgebraElement(signature, blocks))
    if sparse and count > 1:
        keep = int(rng.integers(0, count))
        zero = AlgebraElement.zero(signature)
        coeffs = [a if j == keep else zero for j, a in enumerate(coeffs)]
    return coeffs


def run_verification(trials: int, seed: int, tol: Tolerance) -> dict:
    """Run every cross-check suite over a seeded sweep of generated systems.

    Deterministic for fixed (trials, seed, tol): the result dictionary is
    byte-identical across runs once serialized.
    """
    suites = {name: {"passed": 0, "applicable": 0} for name in VERIFY_SUITES}
    failures = []

    def record(name: str, spec: GeneratorSpec, ok: bool, detail: str) -> None:
        suites[name]["applicable"] += 1
        if ok:
            suites[name]["passed"] += 1
        else:
            failures.append(
                {
                    "suite": name,
                    "kind": spec.kind,
                    "seed": spec.seed,
                    "signature": list(spec.signature.block_sizes),
                    "rank": spec.rank,
                    "count": spec.count,
                    "detail": detail,
                }
            )

    for spec in sweep(seed, trials):
        system = generate(spec)
        bounds, _, frame, _, _ = frame_flags(system, tol)
        omega, _ = is_omega_independent(system, tol)
        has_bio, _ = has_biorthogonal_sequence(system, tol)
        frank_larson = is_riesz_frank_larson(system, tol)
        modular = is_modular_riesz(system, tol)
        if not frame:
            continue

        dual = canonical_dual(system, tol)
        bio_dual = is_biorthogonal(system, dual, tol)
        exact_lemma, gaps = is_exact_by_lemma(system, tol)
        exact_removal, leaves = is_exact_by_removal(system, tol)
        condition = bounds.upper / bounds.lower

        quartet = (modular, omega, bio_dual, has_bio)
        record(
            "riesz_equivalence",
            spec,
            len(set(quartet)) == 1,
            f"modular={modular} omega={omega} bio_dual={bio_dual} has_bio={has_bio}",
        )
        record(
            "exactness_agreement",
            spec,
            exact_lemma == exact_removal and gaps == leaves,
            f"lemma={exact_lemma}/{gaps} removal={exact_removal}/{leaves}",
        )

        one = AlgebraElement.identity(system.signature)
        diagonal_holds = all(
            element_norm(one - inner_product(xj, dj)) <= tol.margin(1.0)
            for xj, dj in zip(system.vectors, dual.vectors)
        )
        record(
            "diagonal_criterion",
            spec,
            (not diagonal_holds) or modular,
            f"diagonal_holds={diagonal_holds} modular={modular}",
        )
        record(
            "riesz_implies_exact",
            spec,
            (not frank_larson) or exact_removal,
            f"frank_larson={frank_larson} exact={exact_removal}",
        )

        rng = _vector_stream(spec, 1)
        recon_ok = True
        worst = 0.0
        for _ in range(3):
            x = _random_vector(system.signature, system.rank, rng)
            residual = reconstruction_residual(system, x, tol)
            allowed = tol.rel_tol * condition * vector_norm(x)
            worst = max(worst, residual)
            if residual > allowed:
                recon_ok = False
        record("reconstruction", spec, recon_ok, f"worst residual {worst:.3e}")

        if modular:
            rng = _vector_stream(spec, 2)
            bounds_ok = True
            for trial in range(5):
                coeffs = _random_coefficients(
                    system.signature, system.size, rng, sparse=trial >= 3
                )
                if not riesz_bounds_check(system, coeffs, tol):
                    bounds_ok = False
            record("synthesis_bounds", spec, bounds_ok, "sampled coefficient bounds")

    return {
        "trials": trials,
        "seed": seed,
        "rel_tol": tol.rel_tol,
        "abs_tol": tol.abs_tol,
        "suites": suites,
        "failures": failures,
        "all_passed": not failures,
    }


def _cmd_verify(args) -> int:
    if args.trials < 1:
        print("error: --trials must be >= 1", file=sys.stderr)
        return EXIT_INPUT
    seed = args.seed if args.seed is not None else _default_seed()
    tol = _resolve_tolerance(args.tol, None)
    result = run_verification(args.trials, seed, tol)
    if args.format == "json":
        print(_dump(result))
    else:
        print(
            f"trials {result['trials']}  seed {result['seed']}  "
            f"rel_tol {result['rel_tol']:g}  abs_tol {result['abs_tol']:g}"
        )
        for failure in result["failures"]:
            print(
                "FAIL "
                + " ".join(f"{key}={failure[key]}" for key in
                           ("suite", "kind", "seed", "signature", "rank", "count"))
                + f" detail: {failure['detail']}"
            )
        for name in VERIFY_SUITES:
            stats = result["suites"][name]
            print(f"{name:<24} pass {stats['passed']}/{stats['applicable']}")
        print("all suites passed" if result["all_passed"] else "suite failures found")
    return EXIT_OK if result["all_passed"] else EXIT_CONSISTENCY


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cstar-frames",
        description="Classify frame systems in free Hilbert modules over "
        "finite-dimensional C*-algebras.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=None,
                        help="relative tolerance for all spectral decisions")
    common.add_argument("--format", choices=("text", "json"), default="text")

    sub = parser.add_subparsers(dest="command", required=True)

    p_classify = sub.add_parser("classify", parents=[common],
                                help="full property report for a frame document")
    p_classify.add_argument("path")
    p_classify.add_argument("--witnesses", action="store_true",
                            help="include certificates in the report")
    p_classify.set_defaults(handler=_cmd_classify)

    p_bounds = sub.add_parser("bounds", parents=[common],
                              help="optimal frame bounds, optionally the dual")
    p_bounds.add_argument("path")
    p_bounds.add_argument("--dual", action="store_true",
                          help="emit the canonical dual as a frame document")
    p_bounds.set_defaults(handler=_cmd_bounds)

    p_verify = sub.add_parser("verify", parents=[common],
                              help="randomized cross-checks of the decision procedures")
    p_verify.add_argument("--trials", type=int, default=20,
                          help="systems per generator kind")
    p_verify.add_argument("--seed", type=int, default=None)
    p_verify.set_defaults(handler=_cmd_verify)

    p_example = sub.add_parser("example", parents=[common],
                               help="emit a ready-made frame document")
    p_example.add_argument("kind",
                           help="delta | basis | mrb | overcomplete | duplicated | "
                           "near-singular | non-frame")
    p_example.add_argument("--n", type=int, default=4,
                           help="size of the delta system")
    p_example.add_argument("--d", type=int, default=2, help="module rank")
    p_example.add_argument("--count", type=int, default=None,
                           help="number of vectors")
    p_example.add_argument("--blocks", default="1",
                           help="comma separated block sizes, e.g. 1,2")
    p_example.add_argument("--seed", type=int, default=None)
    p_example.set_defaults(handler=_cmd_example)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except (DocumentError, StructureError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NotAFrameError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except ConsistencyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONSISTENCY


if __name__ == "__main__":
    raise SystemExit(main())
