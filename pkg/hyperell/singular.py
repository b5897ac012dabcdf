import logging
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import optimize

from hyperell.elliptic import Modulus, ParamPair, agm, modulus_pair
from hyperell.errors import BranchError, DomainError, NotTabulatedError
from hyperell.lauricella import h_eval

logger = logging.getLogger(__name__)

_EPS = np.finfo(float).eps

DEFAULT_SOLVER_TOL = 1e-15
THETA_TRUNCATION = 1e-17

# Smallest modulus the bisection starts from; caps the order near 1.9e5
_SMALLEST_MODULUS = 1e-300

TABULATED_ORDERS = (3, 5, 7, 9, 13, 15, 25, 33)

_r3, _r5, _r7, _r11, _r13, _r33 = (np.sqrt(v) for v in (3.0, 5.0, 7.0, 11.0, 13.0, 33.0))
_r2 = np.sqrt(2.0)


@dataclass(frozen=True)
class SingularEntry:
    """Closed-form singular modulus lambda*(n) and the ratio a/b whose k- equals it."""

    n: int
    lambda_closed: float
    ab_ratio: float

    def __post_init__(self):
        if not 0.0 < self.lambda_closed <= 1.0 / math.sqrt(2.0) + _EPS:
            raise DomainError(f"lambda*({self.n}) = {self.lambda_closed} is not in (0, 1/sqrt(2)]")
        if not self.ab_ratio > 1.0:
            raise DomainError(f"a/b = {self.ab_ratio} for order {self.n} must exceed 1")

    @property
    def pair(self):
        """The pair (a/b, 1)."""
        return ParamPair(self.ab_ratio, 1.0)


# Nested radicals as printed, evaluated once at import
SINGULAR_TABLE = {
    entry.n: entry
    for entry in (
        SingularEntry(3, (_r3 - 1.0) / (2.0 * _r2), 3.0),
        SingularEntry(5, 0.5 * (np.sqrt(_r5 - 1.0) - np.sqrt(3.0 - _r5)), 0.5 * (1.0 + _r5)),
        SingularEntry(7, (3.0 - _r7) / (4.0 * _r2), 9.0 / 7.0),
        SingularEntry(9, 0.5 * (_r2 - 3.0**0.25) * (_r3 - 1.0), 2.0 / _r3),
        SingularEntry(
            13,
            0.5 * (np.sqrt(5.0 * _r13 - 17.0) - np.sqrt(19.0 - 5.0 * _r13)),
            (1.0 + 5.0 * _r13) / 18.0,
        ),
        SingularEntry(
            15,
            (2.0 - _r3) * (3.0 - _r5) * (_r5 - _r3) / (8.0 * _r2),
            (21.0 - 8.0 * _r5) / 3.0,
        ),
        SingularEntry(25, (3.0 - 2.0 * 5.0**0.25) * (_r5 - 2.0) / _r2, 9.0 / (4.0 * _r5)),
        SingularEntry(
            33,
            0.5
            * (
                np.sqrt(261.0 - 150.0 * _r3 - 78.0 * _r11 + 45.0 * _r33)
                - np.sqrt(-259.0 + 150.0 * _r3 + 78.0 * _r11 - 45.0 * _r33)
            ),
            3.0 / 16.0 * (5.0 * _r3 - _r11),
        ),
    )
}


@dataclass(frozen=True)
class IdentityCase:
    """
    A printed identity H(x, y, z) = R G(x, y, z) of the given order.

    Arguments on the cut [1, inf) are rejected at construction.
    """

    order: int
    family: str
    x: float
    y: float
    z: float
    R: float

    def __post_init__(self):
        if self.family not in ("H1", "H2"):
            raise DomainError(f"Identity family must be H1 or H2, got {self.family!r}")
        for value in (self.x, self.y, self.z):
            if value >= 1.0:
                raise BranchError(
                    f"Order {self.order} {self.family} argument {value} lies on [1, inf)"
                )

    @property
    def key(self):
        return self.order, self.family


def _h1_case(order, y, z, R):
    return IdentityCase(order, "H1", 0.5, float(y), float(z), float(R))


def _h2_case(order, y, R):
    return IdentityCase(order, "H2", -1.0, float(y), float(-y), float(R))


_R = {
    3: 2.0 * _r3 * (2.0 - _r3),
    5: 2.0 * np.sqrt(_r5 - 2.0),
    7: 2.0 * (4.0 - _r7) / _r7,
    9: _r2 / 3.0**0.25,
    13: 2.0 * np.sqrt(37.0 * _r13 - 106.0) / 9.0,
    15: 2.0 * (_r3 - 3.0 * _r5) * (_r5 - 4.0) / (3.0 * (1.0 + np.sqrt(15.0))),
    25: 2.0 / 5.0**0.25,
    33: _r3 * (17.0 - _r33) * (43.0 - 5.0 * _r33) ** 0.25 / 2.0**4.75,
}

IDENTITY_CASES = {
    case.key: case
    for case in (
        _h1_case(3, 0.25, -0.5, _R[3]),
        _h1_case(5, (3.0 - _r5) / 2.0, -(1.0 + _r5) / 2.0, _R[5]),
        _h1_case(7, 7.0 / 16.0, -7.0 / 2.0, _R[7]),
        _h1_case(9, 2.0 * _r3 - 3.0, -(2.0 * _r3 + 3.0), _R[9]),
        _h1_case(13, (19.0 - 5.0 * _r13) / 2.0, -(17.0 + 5.0 * _r13) / 2.0, _R[13]),
        _h1_case(15, 3.0 / 32.0 * (3.0 + _r5), -1.5 * (9.0 + 4.0 * _r5), _R[15]),
        _h1_case(25, 4.0 * (9.0 * _r5 - 20.0), -4.0 * (20.0 + 9.0 * _r5), _R[25]),
        _h1_case(
            33,
            16.0 / (16.0 + 15.0 * _r3 - 3.0 * _r11),
            16.0 / (16.0 - 15.0 * _r3 + 3.0 * _r11),
            _R[33],
        ),
        _h2_case(3, 1.0 / 3.0, _R[3]),
        _h2_case(5, (_r5 - 1.0) / 2.0, _R[5]),
        _h2_case(7, 7.0 / 9.0, _R[7]),
        _h2_case(9, _r3 / 2.0, _R[9]),
        _h2_case(13, (5.0 * _r13 - 1.0) / 18.0, _R[13]),
        _h2_case(15, 3.0 / 121.0 * (21.0 + 8.0 * _r5), _R[15]),
        _h2_case(25, 4.0 * _r5 / 9.0, _R[25]),
        _h2_case(33, 16.0 / (15.0 * _r3 - 3.0 * _r11), _R[33]),
    )
}


@dataclass(frozen=True)
class IdentityResult:
    case: IdentityCase
    lhs: float
    rhs: float
    reconstructed_R: float

    @property
    def R(self):
        return self.case.R

    @property
    def error(self):
        return abs(self.lhs - self.rhs)

    @property
    def relative_error(self):
        return self.error / abs(self.lhs)

    @property
    def R_residual(self):
        """|printed R - 2 sqrt(a/b) (sqrt(n) - 1)/(sqrt(n) + 1)|."""
        return abs(self.case.R - self.reconstructed_R)


class RatioCheck(NamedTuple):
    direct: float
    via_quozi: float
    via_quozi2: float

    @property
    def spread(self):
        return max(self) - min(self)


def lambda_closed(n) -> SingularEntry:
    """Closed-form table entry of order `n`."""
    try:
        return SINGULAR_TABLE[n]
    except KeyError:
        raise NotTabulatedError(
            f"Order {n} is not tabulated; available orders are {TABULATED_ORDERS}"
        ) from None


def _ratio_excess(k, root_n):
    # K'/K = agm(1, k')/agm(1, k)
    modulus = Modulus(k)
    return agm(1.0, modulus.kc) / agm(1.0, modulus.k) - root_n


def lambda_solver(n, tol=DEFAULT_SOLVER_TOL) -> Modulus:
    """
    Singular modulus lambda*(n): the k in (0, 1) with K'(k)/K(k) = sqrt(n).

    K'/K is strictly decreasing in k, so the root is bracketed and found by
    bisection; for n < 1 the complement of lambda*(1/n) is returned.

    Parameters
    ----------
    n : float
        Positive order.
    tol : float
        Absolute tolerance on k.
    """
    n = float(n)
    if not n > 0.0 or not math.isfinite(n):
        raise DomainError(f"Singular modulus order must be positive, got {n}")
    if n == 1.0:
        half = 1.0 / math.sqrt(2.0)
        return Modulus(k=half, kc=half)
    if n < 1.0:
        return lambda_solver(1.0 / n, tol).complement

    root_n = math.sqrt(n)
    upper = 1.0 / math.sqrt(2.0)
    if _ratio_excess(_SMALLEST_MODULUS, root_n) <= 0.0:
        raise DomainError(f"lambda*({n}) is below the smallest representable modulus")

    logger.debug("Bisecting K'/K = %s on [%g, %g]", root_n, _SMALLEST_MODULUS, upper)
    k = optimize.bisect(
        _ratio_excess,
        _SMALLEST_MODULUS,
        upper,
        args=(root_n,),
        xtol=tol,
        rtol=4.0 * _EPS,
        maxiter=400,
    )
    return Modulus(k)


def theta_modulus(n, tol=THETA_TRUNCATION) -> Modulus:
    """
    Singular modulus from theta constants, k = (theta2(q)/theta3(q))^2.

    The nome is q = exp(-pi sqrt(n)), which makes K'/K = sqrt(n); the
    complement (theta4/theta3)^2 is returned alongside. Sums stop once a
    term falls below `tol` relative to the partial sum. Terms are formed as
    exp(-pi sqrt(n) m^2) so that large orders keep k although q underflows;
    for n < 1 the complement of theta_modulus(1/n) is returned.
    """
    n = float(n)
    if not n > 0.0 or not math.isfinite(n):
        raise DomainError(f"Singular modulus order must be positive, got {n}")
    if n < 1.0:
        reflected = theta_modulus(1.0 / n, tol)
        if reflected.k == 0.0:
            raise DomainError(f"The complementary modulus of order {n} underflows")
        return reflected.complement
    rate = math.pi * math.sqrt(n)

    theta2 = 0.0
    m = 0
    while True:
        term = 2.0 * math.exp(-rate * (m + 0.5) ** 2)
        theta2 += term
        if term <= tol * theta2 or term == 0.0:
            break
        m += 1

    theta3 = theta4 = 1.0
    m = 1
    while True:
        term = 2.0 * math.exp(-rate * m * m)
        theta3 += term
        theta4 += term if m % 2 == 0 else -term
        if term <= tol * abs(theta4) or term == 0.0:
            break
        m += 1

    return Modulus(k=(theta2 / theta3) ** 2, kc=(theta4 / theta3) ** 2)


def _quozi(p: ParamPair, tol):
    a, b = p.a, p.b
    arguments = (0.5, b / (a + b), b / (b - a))
    h1 = h_eval("H1", *arguments, tol=tol)
    g = h_eval("G", *arguments, tol=tol)
    half_root_b, root_a = 0.5 * math.sqrt(b), math.sqrt(a)
    return (half_root_b * h1 + root_a * g) / (root_a * g - half_root_b * h1)


def _quozi2(p: ParamPair, tol):
    a, b = p.a, p.b
    arguments = (-1.0, b / a, -b / a)
    g = h_eval("G", *arguments, tol=tol)
    h2 = h_eval("H2", *arguments, tol=tol)
    weight_g = 2.0 * math.sqrt(a * (a + b))
    weight_h = math.sqrt(b * (a + b))
    return (weight_g * g + weight_h * h2) / (weight_g * g - weight_h * h2)


def ratio_check(p: ParamPair, tol=None) -> RatioCheck:
    """K+/K- directly and through the two Lauricella quotients."""
    moduli = modulus_pair(p)
    return RatioCheck(
        direct=moduli.ratio,
        via_quozi=_quozi(p, tol),
        via_quozi2=_quozi2(p, tol),
    )


def reconstructed_R(n, ab_ratio=None):
    """
    2 sqrt(a/b) (sqrt(n) - 1)/(sqrt(n) + 1), the constant both identity
    families share once K+/K- = sqrt(n).
    """
    if ab_ratio is None:
        ab_ratio = lambda_closed(n).ab_ratio
    root_n = math.sqrt(n)
    return 2.0 * math.sqrt(ab_ratio) * (root_n - 1.0) / (root_n + 1.0)


def singular_identity(order, family, tol=None) -> IdentityResult:
    """
    Both sides of H_family(x, y, z) = R G(x, y, z) for a printed order.

    Raises
    ------
    NotTabulatedError
        If the (order, family) combination is not printed.
    """
    try:
        case = IDENTITY_CASES[(order, family)]
    except KeyError:
        raise NotTabulatedError(f"No printed identity for order {order}, family {family}") from None

    lhs = h_eval(case.family, case.x, case.y, case.z, tol)
    rhs = case.R * h_eval("G", case.x, case.y, case.z, tol)
    return IdentityResult(case=case, lhs=lhs, rhs=rhs, reconstructed_R=reconstructed_R(order))

