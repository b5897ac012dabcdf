import io
import json

import pandas as pd
import pytest

from hyperell.report import CSV_COLUMNS, Check, Report, round_significant


def test_round_significant():
    assert round_significant(None) is None
    assert round_significant(1.0 / 3.0) == 0.333333333333333
    assert round_significant(complex(1.0 / 3.0, -2.0 / 3.0)) == complex(0.333333333333333, -0.666666666666667)
    assert round_significant(float("inf")) == float("inf")
    assert round_significant(0.0) == 0.0


def test_check_compare():
    relative = Check.compare("a", 1.1, 1.0, 0.2)
    assert relative.error == pytest.approx(0.1)
    assert relative.passed
    absolute = Check.compare("b", 3.0, 2.0, 0.5, relative=False)
    assert absolute.error == 1.0
    assert not absolute.passed
    # zero right side falls back to the absolute error
    assert Check.compare("c", 1e-3, 0.0, 1e-2).error == 1e-3


def test_check_tolerance_boundary():
    assert Check.compare("exact", 2.0, 2.0, 0.0).passed
    assert Check(id="edge", lhs=1.0, rhs=1.0, error=1e-8, tol=1e-8).passed


def test_failed_check():
    check = Check.failed("broken", 1e-8)
    assert check.error is None
    assert not check.passed
    assert check.to_dict()["pass"] is False


def test_complex_check_dict():
    check = Check.compare("z", complex(1.0, 2.0), complex(1.0, 2.0), 1e-12)
    data = check.to_dict()
    assert data["lhs"] == [1.0, 2.0]
    assert Check.from_dict(data) == check


@pytest.fixture
def report():
    return Report(
        suite="demo",
        config={"tol": None, "seed": 42, "jobs": 2},
        checks=[
            Check.compare("b-second", 2.0, 2.0 + 1e-9, 1e-6),
            Check.compare("a-first", complex(0.5, -0.25), complex(0.5, -0.25), 1e-12),
            Check.compare("c-third", 1.0, 2.0, 1e-3, relative=False),
            Check.failed("d-error", 1e-8),
        ],
        elapsed_ms=12.3456789,
    )


def test_report_sorted(report):
    assert [check.id for check in report.checks] == ["a-first", "b-second", "c-third", "d-error"]


def test_report_pass_state(report):
    assert not report.passed
    assert [check.id for check in report.failures] == ["c-third", "d-error"]
    assert Report("empty", {}).passed


def test_json_round_trip(report):
    text = report.to_json()
    data = json.loads(text)
    assert set(data) == {"suite", "config", "checks", "elapsed_ms"}
    assert set(data["config"]) == {"tol", "seed", "jobs"}
    assert set(data["checks"][0]) == set(CSV_COLUMNS)
    assert Report.from_json(text) == report


def test_csv(report):
    text = report.to_csv()
    lines = text.splitlines()
    assert lines[0] == "id,lhs,rhs,error,tol,pass"
    assert len(lines) == 5
    assert lines[1].startswith("a-first,5.00000000000000e-01-2.50000000000000e-01j,")
    assert lines[4].endswith(",false")

    frame = pd.read_csv(io.StringIO(text), keep_default_na=False)
    assert list(frame.columns) == CSV_COLUMNS
    assert list(frame["pass"]) == [True, True, False, False]


def test_csv_to_file(report, tmp_path):
    path = tmp_path / "report.csv"
    report.to_csv(path)
    assert path.read_text().splitlines()[0] == ",".join(CSV_COLUMNS)


def test_text(report):
    text = report.to_text()
    assert text.startswith("suite: demo")
    assert "PASS" in text and "FAIL" in text
    assert "2/4 checks passed" in text


def test_render(report):
    assert report.render("json") == report.to_json()
    assert report.render("csv") == report.to_csv()
    assert report.render("text") == report.to_text()
    with pytest.raises(ValueError):
        report.render("xml")
