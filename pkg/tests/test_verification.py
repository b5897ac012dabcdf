import json
from dataclasses import asdict
from pathlib import Path

import pytest
import toml

from hyperell.singular import IDENTITY_CASES, TABULATED_ORDERS
from hyperell.verification import (
    PI_GRID,
    REDUCTION_GRID,
    SUITES,
    VerifyParameters,
    load_verify_parameters,
    run_verification,
    suite_tasks,
    task_worker,
)

SHIPPED_CONFIG = Path(__file__).parent.parent / "configuration" / "hyperell_verify.toml"


def test_parameters_defaults():
    params = VerifyParameters()
    assert params.seed == 42
    assert params.output_format == "text"
    assert params.workers >= 1
    assert VerifyParameters(jobs=3).workers == 3


def test_parameters_toml_round_trip(tmp_path):
    path = tmp_path / "verify.toml"
    original = VerifyParameters(jobs=2, seed=7, quadrature_tol=1e-11, output_format="json")
    with open(path, "w") as stream:
        toml.dump(original.__dict__, stream)
    assert load_verify_parameters(path) == original


def test_shipped_configuration_loads():
    params = load_verify_parameters(SHIPPED_CONFIG)
    assert asdict(params) == asdict(VerifyParameters())


def test_suite_sizes():
    params = VerifyParameters()
    assert len(REDUCTION_GRID) == 20
    assert len(PI_GRID) == 9
    assert len(suite_tasks("legendre", params)) == 1
    assert len(suite_tasks("reduction", params)) == 20
    assert len(suite_tasks("pi", params)) == 9
    assert len(suite_tasks("continuation", params)) == 4
    assert len(suite_tasks("singular", params)) == len(TABULATED_ORDERS) + len(IDENTITY_CASES)
    assert len(suite_tasks("all", params)) == sum(len(suite_tasks(suite, params)) for suite in SUITES)
    with pytest.raises(ValueError):
        suite_tasks("nonsense", params)


def test_property_tasks_are_seeded(serial_params):
    first = suite_tasks("properties", serial_params)
    assert first == suite_tasks("properties", serial_params)
    serial_params.seed = 7
    assert first != suite_tasks("properties", serial_params)


def test_route_samples_cover_every_argument_count():
    tasks = suite_tasks("properties", VerifyParameters())
    samples = [args for name, args in tasks if name == "fd-routes"]
    assert len(samples) == 200
    assert {len(x) for _, _, _, _, x, _ in samples} == {1, 2, 3, 4}
    for _, a, b, c, x, _ in samples:
        assert 0.0 < a < c < 3.0
        assert all(0.0 < value < 3.0 for value in b)
        assert max(abs(value) for value in x) <= 0.8
    assert max(abs(value) for *_, x, _ in samples for value in x) > 0.75


def test_task_worker_turns_errors_into_failed_checks():
    # a < b is not a valid pair
    checks = task_worker(("pi", (1.0, 2.0, 1e-12), 0.0))
    assert len(checks) == 1
    assert checks[0].error is None
    assert not checks[0].passed


def test_task_worker_applies_override():
    checks = task_worker(("continuation", (2.0, 1.0, 1e-12), 1e-3))
    assert all(check.tol == 1e-3 for check in checks)
    assert all(check.passed for check in checks)


def test_legendre_suite(serial_params):
    report = run_verification("legendre", serial_params, progress=False)
    assert report.suite == "legendre"
    assert len(report.checks) == 11
    assert report.passed, [check.id for check in report.failures]
    assert report.config == {"tol": None, "seed": 42, "jobs": 1}
    ids = [check.id for check in report.checks]
    assert "legendre-p192" in ids and "legendre-p192b" in ids
    assert ids == sorted(ids)


def test_tight_override_fails(serial_params):
    serial_params.tol = 1e-300
    report = run_verification("legendre", serial_params, progress=False)
    assert not report.passed
    assert report.config["tol"] == 1e-300


def test_continuation_suite(serial_params):
    report = run_verification("continuation", serial_params, progress=False)
    assert len(report.checks) == 24
    assert report.passed, [check.id for check in report.failures]


def test_report_is_json_serialisable(serial_params):
    report = run_verification("continuation", serial_params, progress=False)
    data = json.loads(report.to_json())
    assert len(data["checks"]) == 24


@pytest.mark.slow
@pytest.mark.parametrize("suite", ["reduction", "pi", "singular", "properties"])
def test_full_suites_pass(suite, serial_params):
    report = run_verification(suite, serial_params, progress=False)
    assert report.passed, [check.id for check in report.failures]


@pytest.mark.slow
def test_singular_suite_composition(serial_params):
    report = run_verification("singular", serial_params, progress=False)
    ids = [check.id for check in report.checks]
    assert sum(check_id.endswith("-solver") for check_id in ids) == 8
    assert sum(check_id.endswith("-theta") for check_id in ids) == 8
    assert sum("-identity-" in check_id for check_id in ids) == 16


@pytest.mark.slow
def test_parallel_matches_serial(serial_params):
    serial = run_verification("continuation", serial_params, progress=False)
    serial_params.jobs = 2
    parallel = run_verification("continuation", serial_params, progress=False)
    assert [check.id for check in parallel.checks] == [check.id for check in serial.checks]
    assert [check.lhs for check in parallel.checks] == [check.lhs for check in serial.checks]
