import json

import pytest

import cli
from cli import EXIT_INVALID, EXIT_NUMERIC, EXIT_OK, JobSpec, main, render, run


@pytest.fixture
def fixture_path(fixtures_dir):
    return lambda name: str(fixtures_dir / name)


def test_deform_reports_constants(fixture_path):
    status, artifact = run(JobSpec("deform", fixture_path("five_point_three_edges.json")))
    assert status == EXIT_OK
    assert artifact["coefficients"]["C_40^11"] == "v^24/(v^30-1)"
    assert artifact["braiding_defects"] == []
    assert "v^24/(v^30-1)" in render(artifact, "json")


def test_verify_counts_normal_words(fixture_path):
    status, artifact = run(JobSpec("verify", fixture_path("five_point.json")))
    assert status == EXIT_OK
    assert artifact["diamond"]["passed"]
    assert artifact["hilbert"] == [1, 5, 15, 35, 70, 126, 210]


def test_diagram_lists_chains(fixture_path):
    status, artifact = run(JobSpec("diagram", fixture_path("five_point.json"), format="text"))
    assert status == EXIT_OK
    assert len(artifact["diagram"]["edges"]) == 3
    assert artifact["decomposition"] == {"chains": [[0, 4], [1, 2, 3]], "cycles": []}
    assert render(artifact, "text") == artifact["text"]


def test_superpotential_of_undeformed_algebra(fixture_path):
    status, artifact = run(JobSpec("superpotential", fixture_path("five_point.json")))
    assert status == EXIT_OK
    assert artifact["twist"]["is_identity"]
    assert len(artifact["superpotential"]) == 120


def test_main_prints_json(fixture_path, capsys):
    assert main(["analyze", "--input", fixture_path("five_point.json")]) == EXIT_OK
    data = json.loads(capsys.readouterr().out)
    assert data["corank"] == 1
    assert data["genericity"]["corank_ok"]
    assert len(data["smoothable"]) == 3


def test_main_writes_output_file(fixture_path, tmp_path):
    target = tmp_path / "diagram.json"
    assert main(["diagram", "-i", fixture_path("five_point.json"), "-o", str(target)]) == EXIT_OK
    assert json.loads(target.read_text())["decomposition"]["cycles"] == []


def test_invalid_inline_matrix(capsys):
    inline = json.dumps({"numerators": [[0, 1, 2], [1, 0, 3], [-2, -3, 5]]})
    assert main(["analyze", "--input", inline]) == EXIT_INVALID
    assert "alternation" in json.loads(capsys.readouterr().out)["error"]


def test_missing_input():
    assert main(["deform"]) == EXIT_INVALID
    assert main(["fo", "--n", "3"]) == EXIT_INVALID


def test_output_is_deterministic(fixture_path):
    spec = JobSpec("analyze", fixture_path("five_point.json"))
    assert render(run(spec)[1], "json") == render(run(spec)[1], "json")


def test_fo_command():
    assert main(["fo", "--n", "3", "--k", "1"]) == EXIT_OK
    assert main(["fo", "--n", "3", "--k", "1", "--z", "0"]) == EXIT_NUMERIC
    assert main(["fo", "--n", "4", "--k", "2"]) == EXIT_INVALID


def test_fo_with_degeneration_report():
    status, artifact = run(
        JobSpec("fo", options={"n": 5, "k": 2, "taus": ["8j", "10j", "12j"]})
    )
    assert status == EXIT_OK
    assert artifact["degeneration"]["gammas_nonzero"]


def test_job_spec_validation():
    with pytest.raises(ValueError):
        JobSpec("bogus")
    with pytest.raises(ValueError):
        JobSpec("deform")
    with pytest.raises(ValueError):
        JobSpec("fo", format="yaml")


def test_fo_reports_degeneration_by_default(capsys):
    assert main(["fo", "--n", "3", "--k", "1"]) == EXIT_OK
    report = json.loads(capsys.readouterr().out)["degeneration"]
    assert report["gammas_nonzero"]


def test_arithmetic_errors_are_numeric_failures(monkeypatch, fixture_path):
    def divide_by_zero(spec):
        raise ZeroDivisionError("division by zero in Q(v)")

    monkeypatch.setitem(cli.HANDLERS, "analyze", divide_by_zero)
    status, artifact = run(JobSpec("analyze", fixture_path("five_point.json")))
    assert status == EXIT_NUMERIC
    assert artifact["kind"] == "ZeroDivisionError"
