import json

import pytest

from support import record_mock_script
from svloop.errors import ReportError
from svloop.manifest import RunConfig, load_corpus
from svloop.matrix import evaluate_matrix
from svloop.report import build_report, validate_report, write_report


@pytest.fixture(scope="module")
def run_pair(corpus_dir, tmp_path_factory):
    base = tmp_path_factory.mktemp("report")
    problems = load_corpus(corpus_dir)
    script = base / "script"
    record_mock_script(problems, script, base / "scratch")
    config = RunConfig(provider="mock", script_dir=str(script), seed=1)
    dirs = []
    for name in ("r1", "r2"):
        out = base / name
        evaluate_matrix(problems, config, out)
        dirs.append(out)
    return dirs


def test_report_structure(run_pair):
    report = build_report(run_pair[0])
    assert set(report["matrices"]) == {"ar", "dr", "da"}
    some_cell = next(iter(report["matrices"]["dr"].values()))
    assert sum(some_cell["distribution"]["counts"]) == len(some_cell["values"])
    assert set(report["per_target_medians"]["dr"]) >= {"BC03", "BC04", "BC05"}
    assert report["debug"]["combinational"]["values"]
    assert report["debug"]["sequential"]["values"]
    for entry in report["debug"]["sequential"]["values"]:
        assert 0 <= entry["rate"] <= 1


def test_debug_split_follows_manifest_kind(run_pair, corpus_dir):
    report = build_report(run_pair[0])
    kinds = {p.id: p.manifest.kind for p in load_corpus(corpus_dir)}
    for kind in ("combinational", "sequential"):
        for entry in report["debug"][kind]["values"]:
            assert kinds[entry["problem"]] == kind


def test_reports_from_identical_inputs_are_byte_identical(run_pair):
    out_a = write_report(run_pair[0])
    out_b = write_report(run_pair[1])
    assert (out_a / "report.json").read_bytes() == (out_b / "report.json").read_bytes()
    assert (out_a / "scoreboard.txt").read_bytes() == (out_b / "scoreboard.txt").read_bytes()


def test_report_validates_against_shipped_schema(run_pair):
    report = build_report(run_pair[0])
    validate_report(report)  # no exception
    broken = json.loads(json.dumps(report))
    broken["matrices"]["dr"]["BC01->BC01"] = {"values": [2.0], "distribution": None}
    with pytest.raises(ReportError):
        validate_report(broken)


def test_missing_artifacts(tmp_path):
    with pytest.raises(ReportError):
        build_report(tmp_path)


def test_config_flags_recorded_in_report_header(corpus_dir, tmp_path):
    problems = [p for p in load_corpus(corpus_dir) if p.id == "full_adder"]
    script = tmp_path / "script"
    config = RunConfig(strategy="nlsc", shots=5, provider="mock",
                       script_dir=str(script), seed=3)
    record_mock_script(problems, script, tmp_path / "scratch", config=config)
    out = tmp_path / "run"
    evaluate_matrix(problems, config, out)
    report = build_report(out)
    assert report["config"]["strategy"] == "nlsc"
    assert report["config"]["shots"] == 5
    assert report["config"]["seed"] == 3
    assert report["tool"]["version"]


def test_jobs_parallel_run_matches_serial(run_pair, corpus_dir, tmp_path):
    problems = load_corpus(corpus_dir)
    script = run_pair[0] / ".." / "script"
    config = RunConfig(provider="mock", script_dir=str(script.resolve()), seed=1, jobs=2)
    parallel = tmp_path / "parallel"
    evaluate_matrix(problems, config, parallel)
    serial_report = build_report(run_pair[0])
    parallel_report = build_report(parallel)
    assert serial_report["matrices"] == parallel_report["matrices"]
    assert serial_report["debug"] == parallel_report["debug"]
