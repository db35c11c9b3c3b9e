import json
from dataclasses import replace
import math
from pathlib import Path

import pytest

from tpgrass import cli, verify
from tpgrass.models import SuiteFailure

GOLDEN_DIR = Path(__file__).resolve().parent.parent / "golden"
SUITE_SUMMARY_KEYS = ("N", "k", "seed", "num_samples", "kinds", "counts", "failures", "verdict")


def run(args, capsys):
    code = cli.main(args)
    return code, capsys.readouterr()


def test_plucker_prints_lexicographic_coordinates(matrix_file, capsys):
    path = matrix_file("1 1 1 1\n1 2 4 8\n")
    code, captured = run(["plucker", str(path)], capsys)
    assert code == 0
    assert captured.out == "12:1 13:3 14:7 23:2 24:6 34:4\n"


def test_plucker_of_identity_block(matrix_file, capsys):
    code, captured = run(["plucker", str(matrix_file("1 0 0\n0 1 0\n"))], capsys)
    assert code == 0
    assert captured.out == "12:1 13:0 23:0\n"


def test_plucker_json_format(matrix_file, capsys):
    code, captured = run(["plucker", str(matrix_file("1 1/2\n")), "--format", "json"], capsys)
    assert code == 0
    assert json.loads(captured.out) == {"1": "1", "2": "1/2"}


@pytest.mark.parametrize("text", ["1 1//2\n", "1 2\n1 2\n", "1 2 3\n4 5\n"])
def test_bad_matrix_files_are_usage_errors(matrix_file, capsys, text):
    with pytest.raises(SystemExit) as info:
        cli.main(["plucker", str(matrix_file(text))])
    assert info.value.code == 2
    assert "error" in capsys.readouterr().err


def test_parse_error_reports_position(matrix_file, capsys):
    with pytest.raises(SystemExit):
        cli.main(["plucker", str(matrix_file("1 1//2\n"))])
    assert "line 1, column 3" in capsys.readouterr().err


def test_missing_file_is_usage_error(tmp_path):
    with pytest.raises(SystemExit) as info:
        cli.main(["classify", str(tmp_path / "missing.txt")])
    assert info.value.code == 2


def test_decimal_rejected_in_exact_mode(matrix_file):
    with pytest.raises(SystemExit) as info:
        cli.main(["classify", str(matrix_file("1 0.5 2\n")), "--mode", "exact"])
    assert info.value.code == 2


@pytest.mark.parametrize(
    "rows,expected",
    [
        ("1 1 1 1\n1 2 4 8\n", (True, True, True, True)),
        ("1 0 0 0\n0 0 1 0\n", (False, True, False, False)),
        ("1 -1 1\n", (False, False, True, True)),
    ],
)
def test_classify_records(matrix_file, capsys, rows, expected):
    code, captured = run(["classify", str(matrix_file(rows))], capsys)
    assert code == 0
    record = json.loads(captured.out)
    assert (record["positive"], record["nonnegative"], record["all_nonzero"], record["generic"]) == expected


def test_verify_vandermonde_sampler_passes(capsys):
    code, captured = run(["verify", "--n", "4", "--k", "2", "--sampler", "vandermonde", "--seed", "7"], capsys)
    assert code == 0
    certificate = json.loads(captured.out)
    assert certificate["verdict"]["status"] == "pass"
    assert set(certificate) == {"input", "classification", "trace", "n0", "path_check", "verdict"}


def test_verify_with_iteration_cap_fails(capsys):
    args = ["verify", "--n", "4", "--k", "2", "--sampler", "vandermonde", "--seed", "7", "--n-max", "2"]
    code, captured = run(args, capsys)
    assert code == 1
    assert json.loads(captured.out)["verdict"]["status"] == "fail"


def test_verify_nonpositive_start_fails(matrix_file, capsys):
    code, captured = run(["verify", "--start-file", str(matrix_file("1 -1 1\n"))], capsys)
    assert code == 1
    assert "positive" in captured.err


def test_verify_without_start_is_usage_error():
    with pytest.raises(SystemExit) as info:
        cli.main(["verify", "--n", "4", "--k", "2"])
    assert info.value.code == 2


def test_suite_passes(capsys):
    code, captured = run(["suite", "--n", "5", "--k", "2", "--samples", "200", "--seed", "1"], capsys)
    assert code == 0
    report = json.loads(captured.out)
    assert report["failures"] == []
    assert report["num_samples"] == 200


def test_suite_on_smallest_ambient(capsys):
    code, _ = run(["suite", "--n", "2", "--k", "1", "--samples", "8", "--seed", "4"], capsys)
    assert code == 0


def test_flow_rate_from_start_file(matrix_file, capsys):
    path = matrix_file("1 2 3\n")
    code, captured = run(["flow", "--start-file", str(path), "--epsilon", "1e-8"], capsys)
    assert code == 0
    trace = json.loads(captured.out)
    assert trace["rate_estimate"] == pytest.approx(math.exp(-math.sqrt(2)), rel=0.10)
    assert trace["gap_ratio"] == pytest.approx(math.exp(-math.sqrt(2)))


def test_flow_csv_trace(matrix_file, capsys):
    code, captured = run(["flow", "--start-file", str(matrix_file("1 2 3\n")), "--format", "csv"], capsys)
    assert code == 0
    lines = captured.out.splitlines()
    assert lines[0] == "n,distance,min_margin,sign_ok"
    assert lines[1].startswith("0,") and lines[1].endswith(",true")


def test_flow_without_convergence_fails(matrix_file, capsys):
    code, _ = run(["flow", "--start-file", str(matrix_file("1 2 3\n")), "--n-max", "1"], capsys)
    assert code == 1


@pytest.mark.parametrize(
    "args",
    [
        ["flow", "--n", "3", "--k", "1", "--sampler", "vandermonde"],
        ["verify", "--n", "3", "--k", "1", "--sampler", "vandermonde"],
        ["closure", "--n", "3", "--index-set", "1"],
    ],
)
def test_flow_commands_reject_exact_mode(capsys, args):
    with pytest.raises(SystemExit) as info:
        cli.main(args + ["--mode", "exact"])
    assert info.value.code == 2
    assert "flow requires floating mode" in capsys.readouterr().err


def golden(name):
    return (GOLDEN_DIR / name).read_text(encoding="utf-8")


def assert_same_report(actual, expected, path="$"):
    """Exact match on keys, strings, flags and counts; floats to a relative 1e-6."""
    if isinstance(expected, dict):
        assert isinstance(actual, dict) and sorted(actual) == sorted(expected), path
        for key in expected:
            assert_same_report(actual[key], expected[key], f"{path}.{key}")
    elif isinstance(expected, list):
        assert isinstance(actual, list) and len(actual) == len(expected), path
        for index, (a, e) in enumerate(zip(actual, expected)):
            assert_same_report(a, e, f"{path}[{index}]")
    elif isinstance(expected, float) and not isinstance(actual, bool):
        assert actual == pytest.approx(expected, rel=1e-6, abs=1e-13), path
    else:
        assert type(actual) is type(expected) and actual == expected, path


@pytest.mark.parametrize(
    "args,name",
    [
        (["plucker"], "plucker_vandermonde.txt"),
        (["classify"], "classify_vandermonde.json"),
    ],
)
def test_exact_reports_match_golden_files(matrix_file, capsys, args, name):
    code, captured = run(args + [str(matrix_file("1 1 1 1\n1 2 4 8\n"))], capsys)
    assert code == 0
    assert captured.out == golden(name)


def test_sample_matches_golden_file(capsys):
    code, captured = run(["sample", "--n", "3", "--sampler", "vandermonde", "--nodes", "1/2,1"], capsys)
    assert code == 0
    assert captured.out == golden("sample_vandermonde.txt")


@pytest.mark.parametrize(
    "command,name",
    [
        (["verify", "--start-file"], "verify_line_12.json"),
        (["flow", "--start-file"], "flow_line_12.json"),
    ],
)
def test_flow_reports_match_golden_files(matrix_file, capsys, command, name):
    # span((1, 2)) in R^2 contracts toward span((1, 1)) with distance atan(exp(-2n) / 3)
    code, captured = run(command + [str(matrix_file("1 2\n"))], capsys)
    assert code == 0
    assert_same_report(json.loads(captured.out), json.loads(golden(name)))


def test_closure_report_matches_golden_file(capsys):
    # g_r e_1 = (cosh r, sinh r): margin tanh r, distance atan(tanh r)
    code, captured = run(["closure", "--n", "2", "--index-set", "1", "--r-list", "1,0.1,0.01"], capsys)
    assert code == 0
    assert_same_report(json.loads(captured.out), json.loads(golden("closure_n2_i1.json")))


def test_suite_summary_matches_golden_file(capsys):
    code, captured = run(["suite", "--n", "5", "--k", "2", "--samples", "200", "--seed", "1"], capsys)
    assert code == 0
    record = json.loads(captured.out)
    summary = {key: record[key] for key in SUITE_SUMMARY_KEYS}
    assert json.dumps(summary, indent=2, sort_keys=True) + "\n" == golden("suite_summary.json")
    assert run(["suite", "--n", "5", "--k", "2", "--samples", "200", "--seed", "1"], capsys)[1].out == captured.out


def test_suite_with_injected_failure_exits_with_failure(monkeypatch, capsys):
    evaluate = verify.evaluate_sample

    def flip_first_sample(task):
        outcome = evaluate(task)
        if task[3] != 0:
            return outcome
        injected = SuiteFailure(0, outcome.kind, verify.CHECK_VANDERMONDE_POSITIVE, "injected sign flip", "12")
        return replace(outcome, failures=(injected,))

    monkeypatch.setattr(verify, "evaluate_sample", flip_first_sample)
    code, captured = run(["suite", "--n", "4", "--k", "2", "--samples", "8", "--seed", "1", "--jobs", "1"], capsys)
    assert code == 1
    record = json.loads(captured.out)
    assert record["verdict"] == {"status": "fail"}
    assert record["failures"] == [
        {
            "check": "vandermonde_positive",
            "detail": "injected sign flip",
            "index": 0,
            "kind": "vandermonde",
            "witness": "12",
        }
    ]


def test_sample_output_classifies_as_generated(tmp_path, capsys):
    code, captured = run(["sample", "--n", "4", "--k", "2", "--sampler", "mixed_sign", "--seed", "3"], capsys)
    assert code == 0
    path = tmp_path / "sample.txt"
    path.write_text(captured.out, encoding="utf-8")
    code, captured = run(["classify", str(path)], capsys)
    record = json.loads(captured.out)
    assert record["all_nonzero"] and record["generic"] and not record["positive"]


def test_sample_rejects_invalid_nodes():
    with pytest.raises(SystemExit) as info:
        cli.main(["sample", "--n", "3", "--sampler", "vandermonde", "--nodes", "2,1"])
    assert info.value.code == 2


def test_closure_and_perron(capsys):
    code, captured = run(["closure", "--n", "4", "--index-set", "1,3"], capsys)
    assert code == 0
    assert json.loads(captured.out)["verdict"]["status"] == "pass"
    code, captured = run(["perron", "--n", "3", "--k", "1"], capsys)
    assert code == 0
    assert json.loads(captured.out)["gap_ratio"] == pytest.approx(math.exp(-math.sqrt(2)))


def test_output_directory_from_environment(output_dir, matrix_file, capsys):
    code, captured = run(["classify", str(matrix_file("1 1 1 1\n1 2 4 8\n"))], capsys)
    assert code == 0
    assert captured.out == ""
    assert json.loads((output_dir / "classify.json").read_text(encoding="utf-8"))["positive"] is True


def test_explicit_output_path(tmp_path, matrix_file, capsys):
    target = tmp_path / "p.csv"
    code, _ = run(["plucker", str(matrix_file("1 1 1 1\n1 2 4 8\n")), "--format", "csv", "--output", str(target)], capsys)
    assert code == 0
    assert target.read_text(encoding="utf-8").splitlines()[1] == "12,1"


def test_config_file_overrides(tmp_path, capsys):
    config = tmp_path / "config.json"
    config.write_text(json.dumps({"n_max": 2}), encoding="utf-8")
    args = ["--config", str(config), "verify", "--n", "4", "--k", "2", "--sampler", "vandermonde", "--seed", "7"]
    code, _ = run(args, capsys)
    assert code == 1


def test_config_file_with_unknown_key(tmp_path):
    config = tmp_path / "config.json"
    config.write_text(json.dumps({"colour": "blue"}), encoding="utf-8")
    with pytest.raises(SystemExit) as info:
        cli.main(["--config", str(config), "perron", "--n", "3", "--k", "1"])
    assert info.value.code == 2


def test_unwritable_output_is_usage_error(tmp_path, matrix_file, capsys):
    blocker = tmp_path / "blocker"
    blocker.write_text("", encoding="utf-8")
    with pytest.raises(SystemExit) as info:
        cli.main(["plucker", str(matrix_file("1 2\n")), "--output", str(blocker / "p.json")])
    assert info.value.code == 2
    assert "cannot write" in capsys.readouterr().err


def test_help_documents_exit_status(capsys):
    with pytest.raises(SystemExit) as info:
        cli.main(["--help"])
    assert info.value.code == 0
    assert "Exit status" in capsys.readouterr().out
