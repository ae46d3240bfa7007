"""Tests for the command-line front end."""
import json
import logging

import pandas as pd
import pytest

from src import cli
from src.check_suite import CheckReport, CheckResult
from src.exceptions import IllConditionedError

MEASURES_ARGS = ["measures", "--grid", "lambda:1:2:2", "--grid", "s:3:4:2"]


def read_csv(path):
    return pd.read_csv(path, comment="#")


def test_measures_csv(tmp_path):
    out = tmp_path / "measures.csv"
    assert cli.main(MEASURES_ARGS + ["--out", str(out)]) == cli.EXIT_OK
    text = out.read_text()
    assert text.startswith("# tool: ")
    assert "# grid: lambda:1.0:2.0:2:lin s:3.0:4.0:2:lin" in text
    frame = read_csv(out)
    assert list(frame.columns) == ["lambda", "s", "blp", "rhp", "lower_bound"]
    assert len(frame) == 4
    assert frame.loc[0, "blp"] == pytest.approx(0.043227, abs=1e-6)


def test_csv_is_byte_identical_across_thread_counts(tmp_path):
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    assert cli.main(MEASURES_ARGS + ["--threads", "1", "--out", str(first)]) == 0
    assert cli.main(MEASURES_ARGS + ["--threads", "3", "--out", str(second)]) == 0
    assert first.read_bytes() == second.read_bytes()


def test_json_output(tmp_path):
    out = tmp_path / "qrt.json"
    args = ["qrt", "--grid", "lambda:0:0.5:2", "--grid", "s:2:3:2", "--format", "json", "--out", str(out)]
    assert cli.main(args) == 0
    document = json.loads(out.read_text())
    assert document["metadata"]["command"] == "qrt"
    assert len(document["rows"]) == 4
    assert document["rows"][0]["z"] == 0.0


def test_stdout_when_no_output_path(capsys):
    assert cli.main(["oracle", "--grid", "t:0:1:2", "--modes", "512"]) == 0
    captured = capsys.readouterr()
    assert "gamma_oracle" in captured.out
    assert "✓ oracle: 2 rows" in captured.err


@pytest.mark.parametrize(
    "argv",
    [
        ["nope"],
        [],
        ["measures", "--grid", "lambda:0:1"],
        ["measures", "--lambda", "-1"],
        ["measures", "--beta", "0"],
        ["qrt", "--quantities", "blp"],
        ["check", "--only", "no_such_check"],
    ],
)
def test_usage_errors(argv):
    assert cli.main(argv) == cli.EXIT_USAGE


def test_model_file_with_flag_override(tmp_path):
    config = tmp_path / "model.toml"
    config.write_text(
        '[model]\nomega_s = 0.0\nbeta = "inf"\n\n[model.ohmic]\nlambda = 2.0\ns = 4.0\n\n'
        '[sweep]\ngrid = ["lambda:1:2:2", "s:3:4:2"]\n\n[output]\nformat = "csv"\n'
    )
    out = tmp_path / "m.csv"
    assert cli.main(["measures", "--model-file", str(config), "--out", str(out)]) == 0
    assert len(read_csv(out)) == 4

    args = cli.build_parser().parse_args(["qrt", "--model-file", str(config), "--s", "3"])
    spec = cli.spec_from_args(args)
    assert spec.ohmic.lam == 2.0 and spec.ohmic.s == 3.0
    assert spec.inverse_temperature.is_zero_temperature


def test_lorentzian_mixture_block(tmp_path, caplog):
    config = tmp_path / "photonic.toml"
    config.write_text(
        "[model.lorentzian_mixture]\ndelta_n = 2.0\n"
        "components = [{A = 0.5, omega0 = 0.0, delta_omega = 1.0}, {A = 0.5, omega0 = 1.0, delta_omega = 1.0}]\n"
    )
    args = cli.build_parser().parse_args(["photonic", "--model-file", str(config), "--panel", "b"])
    with caplog.at_level(logging.WARNING, logger=cli.__name__):
        spec = cli.spec_from_args(args)
    assert spec.delta_n == 2.0
    assert spec.panel == "b"
    assert "components are ignored" in caplog.text


def test_mixture_without_components_is_quiet(tmp_path, caplog):
    config = tmp_path / "photonic.toml"
    config.write_text("[model.lorentzian_mixture]\ndelta_n = 2.0\n")
    args = cli.build_parser().parse_args(["photonic", "--model-file", str(config)])
    with caplog.at_level(logging.WARNING, logger=cli.__name__):
        spec = cli.spec_from_args(args)
    assert spec.delta_n == 2.0
    assert "components are ignored" not in caplog.text


@pytest.mark.parametrize(
    "content",
    ["[model\n", "[plots]\nx = 1\n", "[model]\ncolour = 1\n", "[model.ohmic]\nlambda = 1.0\n[model.lorentzian_mixture]\n"],
)
def test_bad_model_files(tmp_path, content):
    config = tmp_path / "bad.toml"
    config.write_text(content)
    assert cli.main(["measures", "--model-file", str(config)]) == cli.EXIT_USAGE


def test_missing_model_file(tmp_path):
    assert cli.main(["measures", "--model-file", str(tmp_path / "absent.toml")]) == cli.EXIT_USAGE


def test_numerical_failure_exit_status(monkeypatch):
    def fail(spec):
        raise IllConditionedError("denominator vanishes", 0.0)

    monkeypatch.setitem(cli.COMMANDS, "measures", fail)
    assert cli.main(MEASURES_ARGS) == cli.EXIT_NUMERICAL


def test_check_command_report(tmp_path):
    out = tmp_path / "report.json"
    argv = ["check", "--only", "rate_forms_identity", "--only", "semigroup_qrt", "--out", str(out)]
    assert cli.main(argv) == cli.EXIT_OK
    report = json.loads(out.read_text())
    assert report["passed"] is True
    assert [c["name"] for c in report["checks"]] == ["rate_forms_identity", "semigroup_qrt"]


def test_check_failure_exit_status(monkeypatch, capsys):
    failing = CheckReport([CheckResult("qrt_generator", 0.05, 1e-5, False, "failed")])
    monkeypatch.setattr(cli, "run_check_suite", lambda *args, **kwargs: failing)
    assert cli.main(["check"]) == cli.EXIT_CHECK_FAILED
    assert json.loads(capsys.readouterr().out)["passed"] is False
