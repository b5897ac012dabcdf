import json
import math

import pytest
import toml
from click.testing import CliRunner

from hyperell.cli import cli, format_number
from hyperell.verification import VerifyParameters


@pytest.fixture
def runner():
    return CliRunner()


def _values(output):
    """name = value lines as a dict of strings."""
    lines = [line.split(" = ", 1) for line in output.splitlines() if " = " in line]
    return {name: value for name, value in lines}


def test_format_number():
    assert format_number(math.pi) == "3.14159265358979"
    assert format_number(complex(1.5, -2.0)) == "1.5-2j"
    assert format_number("near-unit-circle") == "near-unit-circle"


def test_eval_K(runner):
    result = runner.invoke(cli, ["eval", "K", "k=0"])
    assert result.exit_code == 0, result.output
    assert float(_values(result.output)["value"]) == pytest.approx(math.pi / 2, rel=1e-14)


def test_eval_lambda(runner):
    result = runner.invoke(cli, ["eval", "lambda", "n=3"])
    assert result.exit_code == 0, result.output
    values = _values(result.output)
    assert float(values["value"]) == pytest.approx(0.258819045102521, abs=1e-14)
    assert float(values["closed_form"]) == pytest.approx(0.258819045102521, abs=1e-14)


def test_eval_pi(runner):
    result = runner.invoke(cli, ["eval", "pi", "index=1", "a=2", "b=1"])
    assert result.exit_code == 0, result.output
    values = _values(result.output)
    assert float(values["value"]) == pytest.approx(math.pi, abs=1e-7)
    assert float(values["abs_error"]) < 1e-7


@pytest.mark.parametrize(
    "arguments",
    [
        ["Kpair", "a=3", "b=1"],
        ["I_direct", "index=4", "a=3", "b=1"],
        ["I_closed", "index=4", "a=3", "b=1"],
        ["I_u", "index=4", "a=3", "b=1", "tol=1e-12"],
        ["I_lauricella", "index=4", "a=3", "b=1"],
        ["fd", "a=0.5", "b=0.5", "c=1", "x=0.2,-0.3", "method=series"],
        ["fd", "a=0.5", "b=0.5,0.5", "c=1", "x=0.5+0.5j,0.5-0.5j"],
        ["2f1", "a=0.5", "b=0.5", "c=1", "x=0.3"],
        ["theta", "n=5"],
        ["ratio", "a=3", "b=1"],
        ["identity", "n=3", "family=H2"],
    ],
)
def test_eval_targets(runner, arguments):
    result = runner.invoke(cli, ["eval", *arguments])
    assert result.exit_code == 0, result.output
    assert _values(result.output)


def test_eval_routes_agree(runner):
    outputs = {}
    for target in ("I_direct", "I_closed", "I_u"):
        result = runner.invoke(cli, ["eval", target, "index=2", "a=2", "b=1"])
        outputs[target] = float(_values(result.output)["value"])
    assert outputs["I_direct"] == pytest.approx(outputs["I_closed"], rel=1e-8)
    assert outputs["I_u"] == pytest.approx(outputs["I_closed"], rel=1e-8)


@pytest.mark.parametrize(
    "arguments",
    [
        ["nonsense", "k=0"],
        ["K", "k"],
        ["K"],
        ["K", "k=0", "a=1"],
        ["K", "k=abc"],
        ["pi", "index=1.5", "a=2", "b=1"],
        ["pi", "index=nan", "a=2", "b=1"],
        ["I_closed", "index=inf", "a=2", "b=1"],
        ["identity", "n=-inf"],
        ["fd", "a=0.5", "b=0.5", "c=1", "x=0.2", "method=magic"],
    ],
)
def test_eval_usage_errors(runner, arguments):
    result = runner.invoke(cli, ["eval", *arguments])
    assert result.exit_code == 2


@pytest.mark.parametrize("arguments", [["K", "k=1.5"], ["pi", "index=1", "a=1", "b=2"], ["lambda", "n=-1"]])
def test_eval_domain_errors(runner, arguments):
    result = runner.invoke(cli, ["eval", *arguments])
    assert result.exit_code == 1
    assert "Error" in result.output


def test_verify_json(runner, tmp_path):
    out = tmp_path / "report.json"
    result = runner.invoke(
        cli, ["verify", "legendre", "--jobs", "1", "--no-progress", "--format", "json", "--out", str(out)]
    )
    assert result.exit_code == 0, result.output
    data = json.loads(out.read_text())
    assert data["suite"] == "legendre"
    assert data["config"] == {"tol": None, "seed": 42, "jobs": 1}
    assert len(data["checks"]) == 11
    assert all(check["pass"] for check in data["checks"])


def test_verify_csv(runner, tmp_path):
    out = tmp_path / "report.csv"
    result = runner.invoke(
        cli, ["verify", "continuation", "-j", "1", "--no-progress", "--format", "csv", "--out", str(out)]
    )
    assert result.exit_code == 0, result.output
    lines = out.read_text().splitlines()
    assert lines[0] == "id,lhs,rhs,error,tol,pass"
    assert len(lines) == 25


def test_verify_text(runner):
    result = runner.invoke(cli, ["verify", "legendre", "--jobs", "1", "--no-progress"])
    assert result.exit_code == 0, result.output
    assert "11/11 checks passed" in result.output


def test_verify_failure_exit_code(runner, tmp_path):
    out = tmp_path / "report.json"
    result = runner.invoke(
        cli, ["verify", "legendre", "--jobs", "1", "--no-progress", "--tol", "1e-300",
              "--format", "json", "--out", str(out)]
    )
    assert result.exit_code == 1
    assert "FAILED" in result.output
    data = json.loads(out.read_text())
    assert not all(check["pass"] for check in data["checks"])


def test_verify_unknown_suite(runner):
    result = runner.invoke(cli, ["verify", "everything"])
    assert result.exit_code == 2


def test_dump_template_and_config(runner, tmp_path):
    result = runner.invoke(cli, ["dump-verify-toml-template", str(tmp_path / "params")])
    assert result.exit_code == 0, result.output
    path = tmp_path / "params.toml"
    assert toml.load(path) == VerifyParameters().__dict__

    params = toml.load(path)
    params.update(jobs=1, output_format="json", output_path=str(tmp_path / "from_config.json"))
    with open(path, "w") as stream:
        toml.dump(params, stream)

    result = runner.invoke(cli, ["verify", "continuation", "--config", str(path), "--no-progress"])
    assert result.exit_code == 0, result.output
    data = json.loads((tmp_path / "from_config.json").read_text())
    assert data["suite"] == "continuation"
    assert data["config"]["jobs"] == 1
