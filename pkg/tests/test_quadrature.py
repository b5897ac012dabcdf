import math

import numpy as np
import pytest
from scipy.special import gamma

from hyperell.elliptic import ParamPair
from hyperell.errors import ConvergenceError, DomainError
from hyperell.quadrature import (
    IntegrandSpec,
    QuadResult,
    hyperelliptic_direct,
    hyperelliptic_integrand,
    integrate,
    legendre_showcase,
)


def _ones(x):
    return np.ones_like(x)


def test_polynomial():
    result = integrate(IntegrandSpec(lambda x: x * x, 0.0, 1.0))
    assert result.value == pytest.approx(1.0 / 3.0, rel=1e-14)
    assert result.error_estimate >= 0.0
    assert result.evaluations > 0
    assert result.flags == ()


def test_endpoint_exponents():
    root = integrate(IntegrandSpec(_ones, 0.0, 1.0, exponents=(-0.5, 0.0)), tol=1e-12)
    assert root.value == pytest.approx(2.0, rel=1e-12)
    # B(1/2, 1/2)
    beta = integrate(IntegrandSpec(_ones, 0.0, 1.0, exponents=(-0.5, -0.5)), tol=1e-12)
    assert beta.value == pytest.approx(math.pi, rel=1e-12)


def test_strong_endpoint_singularity():
    # B(0.1, 1) = 10
    result = integrate(IntegrandSpec(_ones, 0.0, 1.0, exponents=(-0.9, 0.0)), tol=1e-11)
    assert result.value == pytest.approx(10.0, rel=1e-9)


def test_semi_infinite():
    result = integrate(IntegrandSpec(lambda x: 1.0 / (1.0 + x * x), 0.0, math.inf), tol=1e-12)
    assert result.value == pytest.approx(math.pi / 2, rel=1e-12)

    decay = integrate(IntegrandSpec(lambda x: np.exp(-x), 0.0, math.inf, scale=2.0), tol=1e-12)
    assert decay.value == pytest.approx(1.0, rel=1e-12)


def test_declared_split_point():
    spec = IntegrandSpec(lambda x: np.abs(x - 0.3), 0.0, 1.0, points=(0.3,))
    assert integrate(spec, tol=1e-12).value == pytest.approx(0.045 + 0.245, rel=1e-12)


def test_complex_integrand():
    result = integrate(IntegrandSpec(lambda x: np.exp(1j * x), 0.0, 1.0))
    assert isinstance(result.value, complex)
    assert result.value == pytest.approx(complex(math.sin(1.0), 1.0 - math.cos(1.0)), rel=1e-10)


def test_restricted_pieces_sum_to_whole():
    spec = IntegrandSpec(_ones, 0.0, 1.0, exponents=(-0.5, 0.0))
    left = integrate(spec.restricted(0.0, 0.25), tol=1e-12).value
    right = integrate(spec.restricted(0.25, 1.0), tol=1e-12).value
    assert left == pytest.approx(1.0, rel=1e-12)
    assert right == pytest.approx(1.0, rel=1e-12)


def test_restricted_semi_infinite(pair):
    spec = hyperelliptic_integrand(1, pair)
    split = pair.sqrt_ab
    pieces = integrate(spec.restricted(0.0, split), 1e-12).value
    pieces += integrate(spec.restricted(split, math.inf), 1e-12).value
    assert pieces == pytest.approx(integrate(spec, 1e-12).value, rel=1e-10)


def test_restricted_outside_domain():
    spec = IntegrandSpec(_ones, 0.0, 1.0)
    with pytest.raises(DomainError):
        spec.restricted(-0.5, 0.5)


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(lower=0.0, upper=1.0, exponents=(-1.0, 0.0)),
        dict(lower=0.0, upper=1.0, exponents=(0.0, -1.5)),
        dict(lower=1.0, upper=1.0),
        dict(lower=-math.inf, upper=0.0),
        dict(lower=0.0, upper=math.inf, exponents=(0.0, -0.5)),
        dict(lower=0.0, upper=1.0, points=(2.0,)),
        dict(lower=0.0, upper=1.0, scale=0.0),
    ],
)
def test_integrand_spec_validation(kwargs):
    with pytest.raises(DomainError):
        IntegrandSpec(_ones, **kwargs)


@pytest.mark.parametrize("tol", [1e-15, 1e-2])
def test_tolerance_range(tol):
    with pytest.raises(DomainError):
        integrate(IntegrandSpec(_ones, 0.0, 1.0), tol=tol)


def test_convergence_error_carries_estimate():
    # undeclared interior singularity
    spec = IntegrandSpec(lambda x: 1.0 / np.sqrt(np.abs(x - 1.0 / 3.0)), 0.0, 1.0)
    with pytest.raises(ConvergenceError) as info:
        integrate(spec, tol=1e-14, max_level=4)
    assert info.value.best_estimate is not None
    assert info.value.error_estimate > 0.0


def _arcsine_gap(u, dl, dr):
    # 1 - u^2 = (1 - u)(1 + u), the first factor carried by the exponent
    return 1.0 / np.sqrt(1.0 + u)


def test_arcsine_with_endpoint_exponent():
    spec = IntegrandSpec(_arcsine_gap, 0.0, 1.0, exponents=(0.0, -0.5), offsets=True)
    result = integrate(spec, tol=1e-12)
    assert result.value == pytest.approx(math.pi / 2, rel=1e-12)
    assert result.flags == ()


def _plain_arcsine(x):
    return 1.0 / np.sqrt(1.0 - x * x)


def test_plain_arcsine_reports_dropped_nodes():
    # x rounds to 1 next to the endpoint, where the integrand overflows
    result = integrate(IntegrandSpec(_plain_arcsine, 0.0, 1.0), tol=1e-6)
    assert "dropped-nodes" in result.flags
    assert abs(result.value - math.pi / 2) <= result.error_estimate
    assert result.value == pytest.approx(math.pi / 2, rel=1e-6)


def test_plain_arcsine_does_not_claim_tight_tolerance():
    with pytest.raises(ConvergenceError) as info:
        integrate(IntegrandSpec(_plain_arcsine, 0.0, 1.0), tol=1e-10)
    assert abs(info.value.best_estimate - math.pi / 2) <= info.value.error_estimate


CLOSED_FORMS = [
    (IntegrandSpec(lambda x: x * x, 0.0, 1.0), 1.0 / 3.0),
    (IntegrandSpec(np.exp, 0.0, 1.0), math.e - 1.0),
    (IntegrandSpec(lambda x: 1.0 / (1.0 + x * x), 0.0, 1.0), math.pi / 4),
    (IntegrandSpec(np.sin, 0.0, math.pi), 2.0),
    (IntegrandSpec(np.cos, 0.0, math.pi / 2), 1.0),
    (IntegrandSpec(np.sqrt, 0.0, 1.0), 2.0 / 3.0),
    (IntegrandSpec(np.log, 0.0, 1.0), -1.0),
    (IntegrandSpec(lambda x: 1.0 / np.sqrt(x), 0.0, 1.0), 2.0),
    (IntegrandSpec(lambda x: x**-0.25, 0.0, 1.0), 4.0 / 3.0),
    (IntegrandSpec(_ones, 0.0, 1.0, exponents=(-0.5, 0.0)), 2.0),
    (IntegrandSpec(_ones, 0.0, 1.0, exponents=(-0.5, -0.5)), math.pi),
    (IntegrandSpec(_ones, 0.0, 1.0, exponents=(-0.9, 0.0)), 10.0),
    (IntegrandSpec(_arcsine_gap, 0.0, 1.0, exponents=(0.0, -0.5), offsets=True), math.pi / 2),
    (
        IntegrandSpec(
            lambda u, dl, dr: 1.0 / np.sqrt((1.0 + u) * (1.0 + u * u)),
            0.0,
            1.0,
            exponents=(0.0, -0.5),
            offsets=True,
        ),
        gamma(0.25) ** 2 / (4.0 * math.sqrt(2.0 * math.pi)),
    ),
    (IntegrandSpec(lambda x: 1.0 / (1.0 + x * x), 0.0, math.inf), math.pi / 2),
    (IntegrandSpec(lambda x: 1.0 / (x * x + 4.0), 0.0, math.inf, scale=2.0), math.pi / 4),
    (IntegrandSpec(lambda x: np.exp(-x), 0.0, math.inf), 1.0),
    (IntegrandSpec(lambda x: x * np.exp(-x), 0.0, math.inf), 1.0),
    (IntegrandSpec(lambda x: np.exp(-x * x), 0.0, math.inf), math.sqrt(math.pi) / 2),
    (IntegrandSpec(lambda x: 1.0 / (1.0 + x) ** 2, 0.0, math.inf), 1.0),
]


def test_error_estimates_cover_true_errors():
    covered = 0
    for spec, exact in CLOSED_FORMS:
        result = integrate(spec, tol=1e-8)
        true_error = abs(result.value - exact)
        assert true_error <= 10.0 * result.error_estimate, (spec, exact)
        covered += true_error <= result.error_estimate
    assert len(CLOSED_FORMS) == 20
    assert covered >= 19


def test_quad_result_validation():
    with pytest.raises(ValueError):
        QuadResult(1.0, -1.0, 1)
    with pytest.raises(ValueError):
        QuadResult(1.0, 0.0, 0)


def test_hyperelliptic_integrand_domains(pair):
    assert hyperelliptic_integrand(1, pair).upper == math.inf
    assert hyperelliptic_integrand(3, pair).lower == pair.a
    assert hyperelliptic_integrand(5, pair).upper == pair.b
    with pytest.raises(DomainError):
        hyperelliptic_integrand(7, pair)


def test_hyperelliptic_direct_scaling(pair):
    # I1(la, lb) = l^(-3/2) I1(a, b)
    scaled = hyperelliptic_direct(1, pair.scaled(4.0), 1e-12)
    assert scaled == pytest.approx(hyperelliptic_direct(1, pair, 1e-12) / 8.0, rel=1e-10)


def test_hyperelliptic_direct_full_output():
    result = hyperelliptic_direct(5, ParamPair(3.0, 1.0), full_output=True)
    assert isinstance(result, QuadResult)
    assert result.value > 0.0


@pytest.mark.filterwarnings("error::RuntimeWarning")
@pytest.mark.parametrize("index", [1, 2, 3, 4])
def test_semi_infinite_weights_stay_quiet(pair, index):
    # the weights overflow far out on the semi-infinite map
    result = hyperelliptic_direct(index, pair.scaled(40.0), 1e-12, full_output=True)
    assert result.error_estimate <= 1e-12 * abs(result.value)


@pytest.fixture(scope="module")
def showcase():
    return legendre_showcase(1e-12)


def test_showcase_gamma_value(showcase):
    expected = gamma(0.25) ** 2 / (12.0 * math.sqrt(2.0 * math.pi))
    assert showcase.x_gamma == pytest.approx(expected, rel=1e-15)


def test_showcase_rows(showcase):
    rows = showcase.rows()
    assert len(rows) == 11
    assert len({row_id for row_id, _, _ in rows}) == 11


def test_showcase_identities_hold(showcase):
    for row_id, lhs, rhs in showcase.rows():
        assert lhs == pytest.approx(rhs, rel=1e-9), row_id


def test_full_range_is_twice_half_range(showcase):
    assert showcase.cubic_full_lhs == pytest.approx(2.0 * showcase.cubic_half_lhs, rel=1e-10)
    assert showcase.quartic_full_lhs == pytest.approx(2.0 * showcase.quartic_half_lhs, rel=1e-10)
