"""Command line interface: documents, reports, exit codes, determinism."""

import json

import pytest

from cstar_frames import (
    AlgebraSignature,
    GeneratorSpec,
    canonical_dual,
    generate,
    vector_norm,
)
from cstar_frames.cli import (
    EXIT_CONSISTENCY,
    EXIT_INPUT,
    EXIT_OK,
    EXIT_PRECONDITION,
    REPORT_FIELDS,
    DocumentError,
    main,
    parse_document,
    system_to_document,
)
from helpers import mercedes, scalar_system


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def write_doc(tmp_path, name, system):
    path = tmp_path / name
    path.write_text(json.dumps(system_to_document(system)), encoding="utf-8")
    return str(path)


def delta_system(n=4):
    return generate(GeneratorSpec(0, AlgebraSignature((1,) * n), 1, n, "delta_example"))


class TestDocuments:
    def test_round_trip_bit_exact(self):
        specs = [
            GeneratorSpec(5, AlgebraSignature((2, 2)), 2, 3, "overcomplete_frame"),
            GeneratorSpec(6, AlgebraSignature((1, 2)), 3, 3, "modular_riesz"),
            GeneratorSpec(7, AlgebraSignature((2,)), 2, 1, "non_frame"),
        ]
        for spec in specs:
            system = generate(spec)
            emitted = json.dumps(system_to_document(system))
            reparsed, _ = parse_document(json.loads(emitted))
            assert json.dumps(system_to_document(reparsed)) == emitted
            for original, copy in zip(system.vectors, reparsed.vectors):
                assert vector_norm(original - copy) == 0

    def test_tolerance_override_parsed(self):
        doc = system_to_document(delta_system())
        doc["tolerance"] = {"rel_tol": 1e-6, "abs_tol": 1e-9}
        _, tol = parse_document(doc)
        assert tol.rel_tol == 1e-6 and tol.abs_tol == 1e-9

    @pytest.mark.parametrize(
        "mutate, path_fragment",
        [
            (lambda d: d.pop("algebra"), "document"),
            (lambda d: d["algebra"].update(blocks=[0]), "algebra.blocks[0]"),
            (lambda d: d.update(module_rank="x"), "module_rank"),
            (lambda d: d["frame"][0].pop(), "frame[0]"),
            (lambda d: d["frame"][1][0].pop(), "frame[1][0]"),
            (lambda d: d["frame"][2][0][0][0].__setitem__(0, [1, 2, 3]), "frame[2][0]"),
        ],
    )
    def test_path_qualified_errors(self, mutate, path_fragment):
        doc = system_to_document(delta_system())
        mutate(doc)
        with pytest.raises(DocumentError) as excinfo:
            parse_document(doc)
        assert path_fragment in str(excinfo.value)


class TestClassifyCommand:
    def test_delta_text_report(self, tmp_path, capsys):
        path = write_doc(tmp_path, "delta.json", delta_system())
        code, out, _ = run_cli(capsys, "classify", path)
        assert code == EXIT_OK
        assert "is_parseval" in out and "true" in out
        assert "is_modular_riesz                     false" in out

    def test_delta_json_report(self, tmp_path, capsys):
        path = write_doc(tmp_path, "delta.json", delta_system())
        code, out, _ = run_cli(capsys, "classify", path, "--format", "json")
        assert code == EXIT_OK
        data = json.loads(out)
        assert data["is_parseval"] is True
        assert data["is_modular_riesz"] is False
        assert data["is_exact_by_removal"] is True
        assert data["bounds"] == {"lower": 1.0, "upper": 1.0}

    def test_report_key_order_is_stable(self, tmp_path, capsys):
        path = write_doc(tmp_path, "m.json", mercedes())
        _, out, _ = run_cli(capsys, "classify", path, "--format", "json")
        keys = list(json.loads(out))
        expected = ["signature", "module_rank", "vector_count"]
        expected += list(REPORT_FIELDS) + ["bounds"]
        assert keys == expected

    def test_witnesses_flag(self, tmp_path, capsys):
        path = write_doc(tmp_path, "m.json", mercedes())
        code, out, _ = run_cli(
            capsys, "classify", path, "--witnesses", "--format", "json"
        )
        assert code == EXIT_OK
        data = json.loads(out)
        assert data["witnesses"]["kernel_coefficients"] is not None
        assert data["witnesses"]["removal_leaves_frame"] == [True, True, True]

    def test_non_frame_still_reports(self, tmp_path, capsys):
        system = generate(
            GeneratorSpec(3, AlgebraSignature((2,)), 2, 2, "non_frame")
        )
        path = write_doc(tmp_path, "nf.json", system)
        code, out, _ = run_cli(capsys, "classify", path, "--format", "json")
        assert code == EXIT_OK
        data = json.loads(out)
        assert data["is_frame"] is False
        assert isinstance(data["is_riesz_frank_larson"], bool)

    def test_parse_error_exit_code(self, tmp_path, capsys):
        path = tmp_path / "broken.json"
        path.write_text('{"algebra": {"blocks": [1]}, "module_rank": 1}')
        code, _, err = run_cli(capsys, "classify", str(path))
        assert code == EXIT_INPUT
        assert "frame" in err

    def test_missing_file_exit_code(self, capsys):
        code, _, _ = run_cli(capsys, "classify", "/nonexistent/x.json")
        assert code == EXIT_INPUT


class TestBoundsCommand:
    def test_delta_bounds(self, tmp_path, capsys):
        path = write_doc(tmp_path, "delta.json", delta_system())
        code, out, _ = run_cli(capsys, "bounds", path)
        assert code == EXIT_OK
        lower, upper = map(float, out.split())
        assert (lower, upper) == (1.0, 1.0)

    def test_mercedes_bounds(self, tmp_path, capsys):
        path = write_doc(tmp_path, "m.json", mercedes())
        code, out, _ = run_cli(capsys, "bounds", path)
        assert code == EXIT_OK
        lower, upper = map(float, out.split())
        assert lower == pytest.approx(1.0, abs=1e-11)
        assert upper == pytest.approx(3.0, abs=1e-11)

    def test_non_frame_exit_code(self, tmp_path, capsys):
        path = write_doc(tmp_path, "nf.json", scalar_system([(1, 0)]))
        code, _, err = run_cli(capsys, "bounds", path)
        assert code == EXIT_PRECONDITION
        assert "not a frame (lower bound 0)" in err

    def test_dual_of_parseval_is_input(self, tmp_path, capsys):
        system = delta_system()
        path = write_doc(tmp_path, "delta.json", system)
        code, out, _ = run_cli(capsys, "bounds", path, "--dual", "--format", "json")
        assert code == EXIT_OK
        data = json.loads(out)
        dual, _ = parse_document(data["dual"])
        for xj, dj in zip(system.vectors, dual.vectors):
            assert vector_norm(xj - dj) < 1e-12

    def test_dual_matches_library(self, tmp_path, capsys):
        system = mercedes()
        path = write_doc(tmp_path, "m.json", system)
        _, out, _ = run_cli(capsys, "bounds", path, "--dual", "--format", "json")
        dual_doc, _ = parse_document(json.loads(out)["dual"])
        expected = canonical_dual(system)
        for got, want in zip(dual_doc.vectors, expected.vectors):
            assert vector_norm(got - want) < 1e-12


class TestExampleCommand:
    def test_delta_round_trips_through_classify(self, tmp_path, capsys):
        code, out, _ = run_cli(capsys, "example", "delta", "--n", "4")
        assert code == EXIT_OK
        doc = json.loads(out)
        assert doc["algebra"]["blocks"] == [1, 1, 1, 1]
        path = tmp_path / "delta.json"
        path.write_text(out)
        code, out, _ = run_cli(capsys, "classify", str(path), "--format", "json")
        assert code == EXIT_OK
        assert json.loads(out)["is_parseval"] is True

    def test_basis_document(self, capsys):
        code, out, _ = run_cli(capsys, "example", "basis", "--d", "3", "--blocks", "2")
        assert code == EXIT_OK
        doc = json.loads(out)
        assert doc["module_rank"] == 3
        system, _ = parse_document(doc)
        assert system.size == 3

    def test_mrb_document_is_modular_riesz(self, tmp_path, capsys):
        from cstar_frames import is_modular_riesz

        code, out, _ = run_cli(
            capsys, "example", "mrb", "--seed", "11", "--d", "2", "--blocks", "1,2"
        )
        assert code == EXIT_OK
        system, _ = parse_document(json.loads(out))
        assert is_modular_riesz(system)

    def test_unknown_kind(self, capsys):
        code, _, err = run_cli(capsys, "example", "hexagon")
        assert code == EXIT_INPUT
        assert "unknown example kind" in err

    def test_env_seed_default(self, capsys, monkeypatch):
        monkeypatch.setenv("CSTAR_FRAMES_SEED", "11")
        _, with_env, _ = run_cli(capsys, "example", "mrb", "--d", "2", "--blocks", "1")
        monkeypatch.delenv("CSTAR_FRAMES_SEED")
        _, with_flag, _ = run_cli(
            capsys, "example", "mrb", "--d", "2", "--blocks", "1", "--seed", "11"
        )
        assert with_env == with_flag


class TestVerifyCommand:
    def test_smoke(self, capsys):
        code, out, _ = run_cli(capsys, "verify", "--trials", "1", "--seed", "0")
        assert code == EXIT_OK
        assert "all suites passed" in out

    def test_json_all_suites_pass(self, capsys):
        code, out, _ = run_cli(
            capsys, "verify", "--trials", "3", "--seed", "5", "--format", "json"
        )
        assert code == EXIT_OK
        data = json.loads(out)
        assert data["all_passed"] is True
        for stats in data["suites"].values():
            assert stats["passed"] == stats["applicable"]

    def test_tiny_tolerance_fails(self, capsys):
        code, out, _ = run_cli(
            capsys, "verify", "--trials", "3", "--seed", "1", "--tol", "1e-15"
        )
        assert code == EXIT_CONSISTENCY
        assert "FAIL" in out

    def test_failure_reports_reproduction_spec(self, capsys):
        code, out, _ = run_cli(
            capsys,
            "verify", "--trials", "3", "--seed", "1", "--tol", "1e-15",
            "--format", "json",
        )
        assert code == EXIT_CONSISTENCY
        data = json.loads(out)
        assert data["failures"]
        failure = data["failures"][0]
        for key in ("suite", "kind", "seed", "signature", "rank", "count"):
            assert key in failure

    def test_invalid_trials(self, capsys):
        code, _, _ = run_cli(capsys, "verify", "--trials", "0")
        assert code == EXIT_INPUT

    def test_in_process_determinism(self, capsys):
        _, first, _ = run_cli(
            capsys, "verify", "--trials", "2", "--seed", "9", "--format", "json"
        )
        _, second, _ = run_cli(
            capsys, "verify", "--trials", "2", "--seed", "9", "--format", "json"
        )
        assert first == second
