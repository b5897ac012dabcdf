import logging
import math
import threading
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy import special

from hyperell.errors import (
    BranchError,
    ConvergenceError,
    DomainError,
    PoleError,
    PreconditionError,
    SingularPivotError,
)
from hyperell.quadrature import IntegrandSpec, QuadResult, integrate

logger = logging.getLogger(__name__)

_EPS = np.finfo(float).eps

DEFAULT_SERIES_TOL = 1e-15
DEFAULT_MAX_DEGREE = 2000

# |x| at or beyond this is reported as close to the unit circle
NEAR_UNIT_CIRCLE = 1.0 - 1e-8

# Parameter sets (a; b; c) of the three F_D^(3) shorthands
FAMILIES = {
    "H1": (0.5, 0.5, 2.0),
    "G": (0.5, 0.5, 1.0),
    "H2": (1.5, 0.5, 2.0),
}


def _number(value):
    """Plain float for real input, complex otherwise."""
    value = complex(value)
    return value.real if value.imag == 0.0 else value


@dataclass(frozen=True)
class LauricellaSpec:
    """
    Parameters of F_D^(n)(a; b_1, ..., b_n; c | x_1, ..., x_n).

    Every parameter may be complex; real values are kept as floats so that
    real specs are evaluated in real arithmetic.
    """

    a: complex
    b: Tuple
    c: complex
    x: Tuple

    def __post_init__(self):
        b = tuple(_number(value) for value in np.atleast_1d(self.b))
        x = tuple(_number(value) for value in np.atleast_1d(self.x))
        if len(x) < 1:
            raise DomainError("F_D needs at least one argument")
        if len(b) != len(x):
            raise DomainError(f"Got {len(b)} exponents for {len(x)} arguments")
        object.__setattr__(self, "a", _number(self.a))
        object.__setattr__(self, "c", _number(self.c))
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "x", x)

    @classmethod
    def with_common_exponent(cls, a, b, c, x):
        """F_D^(n)(a; b; c | x) with b repeated once per argument."""
        x = tuple(np.atleast_1d(x))
        return cls(a=a, b=(b,) * len(x), c=c, x=x)

    @property
    def n(self):
        return len(self.x)

    @property
    def is_real(self):
        return not any(
            isinstance(value, complex) for value in (self.a, self.c, *self.b, *self.x)
        )

    def permuted(self, order):
        """The LauricellaSpec with its (b_i, x_i) pairs reordered."""
        return LauricellaSpec(
            a=self.a,
            b=tuple(self.b[i] for i in order),
            c=self.c,
            x=tuple(self.x[i] for i in order),
        )


class PochhammerCache:
    """
    Memoised rising factorials (lambda)_0 ... (lambda)_m per base lambda.

    Sequences only grow; concurrent fills under the lock are idempotent.
    """

    def __init__(self):
        self._sequences = {}
        self._lock = threading.Lock()

    def sequence(self, base, length):
        """Array of (base)_0 ... (base)_{length-1}."""
        key = complex(base)
        with self._lock:
            cached = self._sequences.get(key)
            if cached is None or cached.size < length:
                dtype = float if key.imag == 0.0 else complex
                value = key.real if dtype is float else key
                factors = value + np.arange(max(length - 1, 0), dtype=dtype)
                cached = np.concatenate(([dtype(1)], np.cumprod(factors)))
                cached.setflags(write=False)
                self._sequences[key] = cached
            return cached[:length]

    def clear(self):
        with self._lock:
            self._sequences.clear()


_POCHHAMMER = PochhammerCache()


def pochhammer(base, m):
    """
    Rising factorial (base)_m = base (base + 1) ... (base + m - 1), with (base)_0 = 1.
    """
    if m < 0 or int(m) != m:
        raise DomainError(f"Pochhammer index must be a non-negative integer, got {m}")
    return _number(_POCHHAMMER.sequence(base, int(m) + 1)[int(m)])


def _is_non_positive_integer(value):
    value = complex(value)
    return value.imag == 0.0 and value.real <= 0.0 and value.real == math.floor(value.real)


def _stagnation_index(layers, partial, tol, run=3):
    """
    First M >= run - 1 at which layers M-run+1 .. M are all below tol |partial sum|.

    Symmetric arguments can cancel up to n - 1 consecutive layers exactly,
    so callers pass run > n.
    """
    small = (np.abs(layers) <= tol * np.abs(partial)).astype(int)
    if small.size < run:
        return None
    hits = np.flatnonzero(np.convolve(small, np.ones(run, dtype=int), mode="valid") == run)
    return int(hits[0]) + run - 1 if hits.size else None


def _near_unit_circle(x):
    return any(abs(abs(value) - 1.0) <= 1.0 - NEAR_UNIT_CIRCLE for value in x)


def gauss_2f1(a, b, c, x, tol=DEFAULT_SERIES_TOL, max_terms=100_000):
    """
    Gauss hypergeometric series 2F1(a, b; c; x) for |x| < 1.

    Raises
    ------
    DomainError
        If |x| >= 1.
    PoleError
        If c is a non-positive integer.
    """
    if _is_non_positive_integer(c):
        raise PoleError(f"2F1 has a pole at c={c}")
    if abs(x) >= 1.0:
        raise DomainError(f"2F1 series requires |x| < 1, got x={x}")

    total = 1.0
    term = 1.0
    quiet = 0
    for n in range(max_terms):
        term = term * (a + n) * (b + n) / ((c + n) * (n + 1)) * x
        total = total + term
        quiet = quiet + 1 if abs(term) <= tol * abs(total) else 0
        if quiet == 3 or term == 0:
            return _number(total)

    raise ConvergenceError(
        f"2F1({a}, {b}; {c}; {x}) did not converge in {max_terms} terms",
        best_estimate=_number(total),
    )


def _argument_coefficients(b, x, degree, dtype):
    """Coefficients (b)_m x^m / m! of (1 - x s)^(-b), m = 0 .. degree."""
    m = np.arange(degree, dtype=dtype)
    ratios = (b + m) / (m + 1) * x
    return np.concatenate(([dtype(1)], np.cumprod(ratios)))


def fd_series(spec: LauricellaSpec, tol=DEFAULT_SERIES_TOL, max_degree=DEFAULT_MAX_DEGREE,
              full_output=False):
    """
    Sum the F_D^(n) series by total-degree layers.

    Layer M equals (a)_M/(c)_M T_M, where T_M is the degree-M coefficient of
    prod_i (1 - x_i s)^(-b_i); the T_M are obtained by convolving the
    one-argument coefficient sequences. The degree is doubled until
    max(3, n + 2) consecutive layers fall below tol times the partial sum,
    which outlasts the runs of exactly cancelling layers that symmetric
    arguments produce.

    Parameters
    ----------
    spec : LauricellaSpec
        All |x_i| < 1.
    tol : float
        Relative stopping tolerance.
    max_degree : int
        Highest total degree tried.
    full_output : bool
        Return a `QuadResult` whose `evaluations` is the number of layers.

    Raises
    ------
    DomainError
        If some |x_i| >= 1.
    PoleError
        If c is a non-positive integer.
    ConvergenceError
        If `max_degree` is reached.
    """
    radius = max(abs(value) for value in spec.x)
    if radius >= 1.0:
        raise DomainError(f"F_D series requires every |x_i| < 1, got {spec.x}")
    if _is_non_positive_integer(spec.c):
        raise PoleError(f"F_D has a pole at c={spec.c}")

    flags = ()
    if _near_unit_circle(spec.x):
        flags = ("near-unit-circle",)
        logger.warning("F_D series argument %s is close to the unit circle", spec.x)

    dtype = float if spec.is_real else complex
    run = max(3, spec.n + 2)
    degree = min(64, max_degree)
    while True:
        product = np.ones(1, dtype=dtype)
        for b, x in zip(spec.b, spec.x):
            product = np.convolve(product, _argument_coefficients(b, x, degree, dtype))[: degree + 1]
        m = np.arange(degree, dtype=dtype)
        ratio = np.concatenate(([dtype(1)], np.cumprod((spec.a + m) / (spec.c + m))))
        layers = ratio * product
        partial = np.cumsum(layers)

        stop = _stagnation_index(layers, partial, tol, run)
        if stop is not None:
            value = partial[stop]
            tail = np.abs(layers[stop - run + 1: stop + 1]).sum() / (1.0 - radius)
            error = float(max(tail, _EPS * np.abs(layers[: stop + 1]).sum()))
            logger.debug("F_D series stopped at degree %d", stop)
            result = QuadResult(_number(value), error, stop + 1, flags)
            return result if full_output else result.value

        if degree >= max_degree:
            raise ConvergenceError(
                f"F_D series did not converge up to degree {max_degree} for x={spec.x}",
                best_estimate=_number(partial[-1]),
                error_estimate=float(np.abs(layers[-run:]).sum()),
            )
        degree = min(2 * degree, max_degree)


def _check_integral_domain(spec):
    if not np.real(spec.c) > np.real(spec.a) > 0.0:
        raise DomainError(
            f"Integral representation requires Re c > Re a > 0, got a={spec.a}, c={spec.c}"
        )
    for value in spec.x:
        value = complex(value)
        if value.imag == 0.0 and value.real >= 1.0:
            raise BranchError(f"Argument {value.real} lies on the branch cut [1, inf)")


def fd_integral(spec: LauricellaSpec, tol=None, full_output=False):
    """
    F_D^(n) through its one-dimensional integral representation

        Gamma(c) / (Gamma(a) Gamma(c - a)) int_0^1 u^(a-1) (1-u)^(c-a-1) prod_i (1 - x_i u)^(-b_i) du

    valid for Re c > Re a > 0 and every argument off the cut [1, inf).
    Complex powers take the principal branch.

    Parameters
    ----------
    spec : LauricellaSpec
    tol : float, optional
        Relative quadrature tolerance; the quadrature default otherwise.
    full_output : bool
        Return the `QuadResult`, flagged ``"near-unit-circle"`` when some
        |x_i| lies within 1e-8 of 1.
    """
    _check_integral_domain(spec)

    dtype = float if spec.is_real else complex
    b = np.asarray(spec.b, dtype=dtype)[:, None]
    x = np.asarray(spec.x, dtype=dtype)[:, None]
    one_minus_x = 1.0 - x

    def evaluate(u, dl, dr):
        # 1 - x u = (1 - x) + x (1 - u) next to u = 1
        factors = np.where(dl <= dr, 1.0 - x * u, one_minus_x + x * dr)
        return np.prod(factors ** (-b), axis=0)

    integrand = IntegrandSpec(
        evaluate,
        0.0,
        1.0,
        exponents=(spec.a - 1.0, spec.c - spec.a - 1.0),
        offsets=True,
    )
    result = integrate(integrand, tol)

    flags = result.flags
    if _near_unit_circle(spec.x):
        flags = flags + ("near-unit-circle",)
        logger.debug("F_D integral argument %s is on or close to the unit circle", spec.x)

    normalisation = special.gamma(spec.c) / (special.gamma(spec.a) * special.gamma(spec.c - spec.a))
    value = _number(normalisation * result.value)
    scaled = QuadResult(
        value,
        float(abs(normalisation) * result.error_estimate),
        result.evaluations,
        flags,
    )
    return scaled if full_output else scaled.value


def fd_reduce(spec: LauricellaSpec):
    """
    Lower the number of arguments by one when c = b_1 + ... + b_n.

    F_D^(n)(a; b; c | x) = (1 - x_n)^(-a) F_D^(n-1)(a; b_1 .. b_{n-1}; c | (x_i - x_n)/(1 - x_n))

    Returns
    -------
    prefactor : float or complex
        (1 - x_n)^(-a) on the principal branch.
    reduced : LauricellaSpec
        The n-1 argument LauricellaSpec; exponents stay paired with their arguments.

    Raises
    ------
    PreconditionError
        If n < 2 or c differs from the sum of the exponents.
    SingularPivotError
        If x_n = 1.
    """
    if spec.n < 2:
        raise PreconditionError("The reduction needs at least two arguments")
    exponent_sum = sum(spec.b)
    if abs(spec.c - exponent_sum) > 1e-12 * max(1.0, abs(spec.c)):
        raise PreconditionError(f"Reduction requires c = sum(b) = {exponent_sum}, got c={spec.c}")
    pivot = spec.x[-1]
    if pivot == 1:
        raise SingularPivotError("The reduction pivot x_n equals 1")

    base = 1 - pivot
    if isinstance(base, complex) or isinstance(spec.a, complex) or base < 0:
        prefactor = _number(np.power(complex(base), -complex(spec.a)))
    else:
        prefactor = base ** (-spec.a)

    reduced = LauricellaSpec(
        a=spec.a,
        b=spec.b[:-1],
        c=spec.c,
        x=tuple((value - pivot) / base for value in spec.x[:-1]),
    )
    return prefactor, reduced


def h_eval(family, x, y, z, tol=None):
    """
    The three-argument shorthands H1 = F_D(1/2; 1/2; 2), G = F_D(1/2; 1/2; 1)
    and H2 = F_D(3/2; 1/2; 2), evaluated through the integral representation.
    """
    try:
        a, b, c = FAMILIES[family]
    except KeyError:
        raise DomainError(f"Unknown family {family!r}, expected one of {sorted(FAMILIES)}") from None
    return fd_integral(LauricellaSpec.with_common_exponent(a, b, c, (x, y, z)), tol)
