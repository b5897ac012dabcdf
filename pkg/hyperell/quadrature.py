import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, NamedTuple, Optional, Tuple

import numpy as np
from scipy import special

from hyperell.elliptic import Modulus, ParamPair, complete_K
from hyperell.errors import ConvergenceError, DomainError

logger = logging.getLogger(__name__)

_EPS = np.finfo(float).eps

# exp(-2|s|) stays normal and exp(2|s|) finite for |t| below this
_T_MAX = float(np.arcsinh(700.0 / np.pi))

MAX_LEVEL = 12
MIN_LEVEL = 3

DEFAULT_TOL = 1e-10
DEFAULT_COMPLEX_TOL = 1e-8

TOL_RANGE = (1e-14, 1e-3)


@dataclass(frozen=True)
class IntegrandSpec:
    """
    A one-dimensional integrand together with what is known about it.

    Parameters
    ----------
    evaluator : callable
        Vectorised map from a numpy array of abscissae to real or complex
        values. With ``offsets=True`` it is called as ``evaluator(x, dl, dr)``
        where ``dl = x - lower`` and ``dr = upper - x`` are computed without
        cancellation.
    lower, upper : float
        Integration domain; ``upper`` may be ``inf``.
    exponents : tuple(float or complex, float or complex)
        Algebraic endpoint exponents (alpha, beta). The integrand is
        ``dl**alpha * dr**beta * evaluator(...)``. Real parts must exceed -1
        and beta must be zero on an infinite upper limit.
    points : tuple(float)
        Interior split points, declared by the caller.
    scale : float
        Length scale L of the map p = lower + L s/(1-s) on a semi-infinite
        last segment.
    offsets : bool
        Pass the endpoint gaps to the evaluator.
    """

    evaluator: Callable
    lower: float
    upper: float
    exponents: Tuple = (0.0, 0.0)
    points: Tuple[float, ...] = ()
    scale: float = 1.0
    offsets: bool = False

    def __post_init__(self):
        if not math.isfinite(self.lower):
            raise DomainError(f"Lower limit must be finite, got {self.lower}")
        if not self.upper > self.lower:
            raise DomainError(f"Empty domain [{self.lower}, {self.upper}]")
        alpha, beta = self.exponents
        if np.real(alpha) <= -1.0 or np.real(beta) <= -1.0:
            raise DomainError(
                f"Endpoint exponents {self.exponents} are not integrable (real part <= -1)"
            )
        if math.isinf(self.upper) and beta != 0:
            raise DomainError("An infinite upper limit cannot carry an endpoint exponent")
        if not self.scale > 0.0:
            raise DomainError(f"Scale must be positive, got {self.scale}")
        points = tuple(sorted(float(point) for point in self.points))
        for point in points:
            if not self.lower < point < self.upper:
                raise DomainError(
                    f"Split point {point} is outside ({self.lower}, {self.upper})"
                )
        object.__setattr__(self, "points", points)

    @property
    def breakpoints(self):
        return (self.lower, *self.points, self.upper)

    def restricted(self, lower, upper):
        """
        The same integrand over [lower, upper] inside the current domain.

        Endpoint factors of an endpoint that moves are folded into the
        evaluator, so the restricted pieces of a domain sum to the whole.
        """
        if not self.lower <= lower < upper <= self.upper:
            raise DomainError(
                f"[{lower}, {upper}] is not inside [{self.lower}, {self.upper}]"
            )
        alpha, beta = self.exponents
        left_shift = lower - self.lower
        right_shift = 0.0 if upper == self.upper else self.upper - upper
        folded_alpha = alpha if left_shift else 0.0
        folded_beta = beta if right_shift else 0.0
        inner, inner_offsets = self.evaluator, self.offsets

        def evaluate(x, dl, dr):
            dl = dl + left_shift
            dr = dr + right_shift
            values = inner(x, dl, dr) if inner_offsets else inner(x)
            if folded_alpha != 0:
                values = values * dl**folded_alpha
            if folded_beta != 0:
                values = values * dr**folded_beta
            return values

        return IntegrandSpec(
            evaluator=evaluate,
            lower=lower,
            upper=upper,
            exponents=(alpha - folded_alpha, beta - folded_beta),
            points=tuple(point for point in self.points if lower < point < upper),
            scale=self.scale,
            offsets=True,
        )


@dataclass(frozen=True)
class QuadResult:
    """
    Outcome of an integration or series evaluation.

    Attributes
    ----------
    value : float or complex
    error_estimate : float
        Non-negative estimate of the absolute error of `value`.
    evaluations : int
        Integrand evaluations (or series terms) used.
    flags : tuple(str)
        Diagnostics such as ``"near-unit-circle"`` or ``"dropped-nodes"``.
    """

    value: complex
    error_estimate: float
    evaluations: int
    flags: Tuple[str, ...] = ()

    def __post_init__(self):
        if not self.error_estimate >= 0.0:
            raise ValueError(f"error_estimate must be non-negative, got {self.error_estimate}")
        if self.evaluations < 1:
            raise ValueError(f"evaluations must be at least 1, got {self.evaluations}")


class _NodeTable(NamedTuple):
    abscissa: np.ndarray
    left_gap: np.ndarray
    right_gap: np.ndarray
    jacobian: np.ndarray


@lru_cache(maxsize=None)
def _node_table(level):
    """
    Nodes added at `level` of the tanh-sinh rule on [0, 1].

    Level 0 holds every integer t in [-T, T]; level j > 0 holds the odd
    multiples of 2**-j. Gaps to both endpoints are formed from exp(-2|s|)
    so that neither loses precision next to its endpoint.
    """
    h = 2.0**-level
    n = int(_T_MAX / h)
    k = np.arange(-n, n + 1)
    if level > 0:
        k = k[k % 2 != 0]
    t = k * h

    s = 0.5 * np.pi * np.sinh(t)
    e = np.exp(-2.0 * np.abs(s))
    large = 1.0 / (1.0 + e)
    small = e / (1.0 + e)

    table = _NodeTable(
        abscissa=t,
        left_gap=np.where(t >= 0.0, large, small),
        right_gap=np.where(t >= 0.0, small, large),
        jacobian=np.pi * np.cosh(t),
    )
    for array in table:
        array.setflags(write=False)
    return table


def _dropped_edges(abscissa, terms, finite):
    """
    Bound on the mass lost with non-finite terms, per side of the segment.

    Each side ("left" for t < 0, "right" otherwise) with dropped nodes gets
    the magnitude of the kept term nearest inside its innermost dropped node,
    taken over a unit width in t. Assumes the terms decay towards the ends
    of the rule.
    """
    depth = np.abs(abscissa)
    edges = {}
    for side, on_side in (("left", abscissa < 0.0), ("right", abscissa >= 0.0)):
        lost = on_side & ~finite
        if not lost.any():
            continue
        kept = np.flatnonzero(on_side & finite & (depth < depth[lost].min()))
        if kept.size:
            edges[side] = float(np.abs(terms[kept[np.argmax(depth[kept])]]))
        else:
            edges[side] = math.inf
    return edges


def _segment_sum(spec, start, stop, table):
    """
    Raw trapezoid sum (without the step h) of one segment for one level's nodes.

    Returns the sum, the sum of magnitudes, the node count and the
    `_dropped_edges` of any non-finite terms.
    """
    left, right = table.left_gap, table.right_gap

    with np.errstate(all="ignore"):
        if math.isinf(stop):
            ratio = left / right
            local_left = spec.scale * ratio
            x = start + local_left
            weight = table.jacobian * spec.scale * ratio
            dr = np.full_like(x, np.inf)
        else:
            length = stop - start
            local_left = length * left
            local_right = length * right
            x = np.where(left <= right, start + local_left, stop - local_right)
            weight = table.jacobian * left * right * length
            dr = local_right + (spec.upper - stop)
        dl = local_left + (start - spec.lower)

        alpha, beta = spec.exponents
        if alpha != 0:
            weight = weight * dl**alpha
        if beta != 0:
            weight = weight * dr**beta

        values = spec.evaluator(x, dl, dr) if spec.offsets else spec.evaluator(x)
        terms = weight * values

    finite = np.isfinite(terms)
    edges = {}
    if not finite.all():
        edges = _dropped_edges(table.abscissa, terms, finite)
        logger.debug(
            "Dropped %d non-finite nodes on [%s, %s], edge terms %s",
            terms.size - int(np.count_nonzero(finite)), start, stop, edges,
        )
        terms = terms[finite]

    return terms.sum(), np.abs(terms).sum(), int(x.size), edges


def _check_tol(tol):
    if not TOL_RANGE[0] <= tol <= TOL_RANGE[1]:
        raise DomainError(f"Tolerance must lie in [{TOL_RANGE[0]}, {TOL_RANGE[1]}], got {tol}")


def integrate(f: IntegrandSpec, tol: Optional[float] = None, atol=0.0, max_level=MAX_LEVEL):
    """
    Integrate with the double exponential (tanh-sinh) rule.

    The step is halved level by level, reusing every previous node, until two
    consecutive estimates agree to `tol` relative (or `atol` absolute).
    Nodes whose terms overflow or turn NaN are dropped; the mass they stand
    for is bounded from the neighbouring kept terms and added to the error
    estimate, and the result is flagged ``"dropped-nodes"``.
    Each segment between breakpoints is mapped to [0, 1]; a semi-infinite
    last segment is mapped with p = start + L s/(1-s).

    Parameters
    ----------
    f : IntegrandSpec
        The integrand.
    tol : float, optional
        Relative tolerance in [1e-14, 1e-3]. Defaults to 1e-10 for real and
        1e-8 for complex integrands.
    atol : float, optional
        Absolute tolerance, default 0.
    max_level : int, optional
        Number of step halvings before giving up, at most 12.

    Returns
    -------
    QuadResult

    Raises
    ------
    ConvergenceError
        When the level cap is reached; carries the best estimate.
    """
    if tol is not None:
        _check_tol(tol)
    max_level = min(int(max_level), MAX_LEVEL)

    segments = list(zip(f.breakpoints[:-1], f.breakpoints[1:]))
    raw_sum = 0.0
    raw_abs = 0.0
    evaluations = 0
    previous = None
    error = math.inf
    # (segment, side) -> bound on the mass of its dropped nodes
    edges = {}

    for level in range(max_level + 1):
        table = _node_table(level)
        for position, (start, stop) in enumerate(segments):
            total, magnitude, count, dropped = _segment_sum(f, start, stop, table)
            raw_sum = raw_sum + total
            raw_abs += magnitude
            evaluations += count
            for side, edge in dropped.items():
                edges[position, side] = edge

        if tol is None:
            tol = DEFAULT_COMPLEX_TOL if np.iscomplexobj(raw_sum) else DEFAULT_TOL

        h = 2.0**-level
        estimate = h * raw_sum
        floor = 8.0 * _EPS * h * raw_abs
        tail = sum(edges.values())
        if previous is not None:
            difference = abs(estimate - previous)
            error = max(difference, floor) + tail
            logger.debug(
                "level %d: estimate %r, difference %.3e, dropped tail %.3e",
                level, estimate, difference, tail,
            )
            if level >= MIN_LEVEL and difference + tail <= max(tol * abs(estimate), atol, floor):
                flags = ("dropped-nodes",) if edges else ()
                return QuadResult(_scalar(estimate), float(error), evaluations, flags)
        previous = estimate

    raise ConvergenceError(
        f"tanh-sinh quadrature did not reach tol={tol} after {max_level} levels "
        f"(error estimate {error:.3e})",
        best_estimate=_scalar(previous),
        error_estimate=float(error),
    )


def _scalar(value):
    return complex(value) if np.iscomplexobj(value) else float(value)


def hyperelliptic_integrand(index, pair: ParamPair) -> IntegrandSpec:
    """
    The defining integrand of I_index(a, b).

    I1, I2 run over [0, inf), I3, I4 over [a, inf) and I5, I6 over [0, b],
    where the two negative factors of (p^2 - a^2)(p^2 - b^2) give a positive
    product. Square-root endpoint singularities are passed as exponents.
    """
    a, b = pair.a, pair.b
    gap = a - b

    if index in (1, 2):

        def evaluate(p):
            return 1.0 / np.sqrt((p * p + a * a) * (p * p + b * b))

        alpha = -0.5 if index == 1 else 0.5
        return IntegrandSpec(evaluate, 0.0, math.inf, exponents=(alpha, 0.0), scale=pair.sqrt_ab)

    if index in (3, 4):
        power = -0.5 if index == 3 else 0.5

        def evaluate(p, dl, dr):
            # p^2 - a^2 = dl (2a + dl), p - b = dl + (a - b)
            return p**power / np.sqrt((2.0 * a + dl) * (dl + gap) * (p + b))

        return IntegrandSpec(
            evaluate, a, math.inf, exponents=(-0.5, 0.0), scale=pair.sqrt_ab, offsets=True
        )

    if index in (5, 6):
        alpha = -0.5 if index == 5 else 0.5

        def evaluate(p, dl, dr):
            # b^2 - p^2 = dr (b + p), a - p = dr + (a - b)
            return 1.0 / np.sqrt((dr + gap) * (a + p) * (b + p))

        return IntegrandSpec(evaluate, 0.0, b, exponents=(alpha, -0.5), offsets=True)

    raise DomainError(f"Integral index must be 1..6, got {index}")


def hyperelliptic_direct(index, p: ParamPair, tol=DEFAULT_TOL, full_output=False):
    """
    Direct quadrature of I_index(a, b).

    Parameters
    ----------
    index : int
        1..6.
    p : ParamPair
    tol : float
    full_output : bool
        Return the `QuadResult` instead of its value.
    """
    result = integrate(hyperelliptic_integrand(index, p), tol)
    return result if full_output else result.value


@dataclass(frozen=True)
class LegendreShowcase:
    """
    The classical evaluations of X = int_0^1 x^2/sqrt(1 - x^12) dx and the
    modular identities derived from them.

    The two z-integrals over [0, inf) are invariant under z -> 1/z, so the
    printed right sides (1/2) int_2^inf equal the integrals over [0, 1]; the
    full-range integrals equal the whole of int_2^inf. Both pairings are kept.
    """

    x_gamma: float
    x_direct: float
    x_elliptic: float
    x_lemniscate: float
    x_hyperelliptic: float
    p192_lhs: float
    p192_rhs: float
    p192b_lhs: float
    p192b_rhs: float
    cubic_half_lhs: float
    cubic_full_lhs: float
    cubic_rhs: float
    quartic_half_lhs: float
    quartic_full_lhs: float
    quartic_rhs: float

    def rows(self):
        """(check id, lhs, rhs) triples, grouped by identity."""
        x_routes = {
            "direct": self.x_direct,
            "elliptic": self.x_elliptic,
            "lemniscate": self.x_lemniscate,
            "hyperelliptic": self.x_hyperelliptic,
        }
        rows = [(f"X-{name}-vs-gamma", value, self.x_gamma) for name, value in x_routes.items()]
        rows.append(("X-direct-vs-elliptic", self.x_direct, self.x_elliptic))
        rows.extend(
            [
                ("p192", self.p192_lhs, self.p192_rhs),
                ("p192b", self.p192b_lhs, self.p192b_rhs),
                ("z12-square-half-range", self.cubic_half_lhs, self.cubic_rhs),
                ("z12-square-full-range", self.cubic_full_lhs, 2.0 * self.cubic_rhs),
                ("z12-quartic-half-range", self.quartic_half_lhs, self.quartic_rhs),
                ("z12-quartic-full-range", self.quartic_full_lhs, 2.0 * self.quartic_rhs),
            ]
        )
        return rows


def _x_integrand(x, dl, dr):
    # 1 - x^12 = (1 - x)(1 + x + ... + x^11)
    return x * x / np.sqrt(np.polynomial.polynomial.polyval(x, np.ones(12)))


def _lemniscate_integrand(u, dl, dr):
    return 1.0 / np.sqrt((1.0 + u) * (1.0 + u * u))


def _z12_square(z):
    return z * z / np.sqrt(1.0 + z**12)


def _z12_quartic(z):
    return (1.0 + z**4) / np.sqrt(1.0 + z**12)


def legendre_showcase(tol=DEFAULT_TOL) -> LegendreShowcase:
    """Evaluate every route and both sides of every classical identity."""
    root2, root3 = math.sqrt(2.0), math.sqrt(3.0)
    quartic_root3 = 3.0**0.25
    k_reference = complete_K(1.0 / root2)

    x_direct = integrate(
        IntegrandSpec(_x_integrand, 0.0, 1.0, exponents=(0.0, -0.5), offsets=True), tol
    ).value
    x_lemniscate = (
        integrate(
            IntegrandSpec(_lemniscate_integrand, 0.0, 1.0, exponents=(0.0, -0.5), offsets=True),
            tol,
        ).value
        / 3.0
    )

    # a^2 = 4, b^2 = 3 in the three hyperelliptic families
    pair = ParamPair(2.0, root3)

    # complementary moduli: k1^2 + k2^2 = 1
    small = (root2 - quartic_root3) / (1.0 + root3)
    large = (root2 + quartic_root3) / (1.0 + root3)

    return LegendreShowcase(
        x_gamma=float(special.gamma(0.25) ** 2 / (12.0 * math.sqrt(2.0 * math.pi))),
        x_direct=x_direct,
        x_elliptic=k_reference / (3.0 * root2),
        x_lemniscate=x_lemniscate,
        x_hyperelliptic=0.5 * hyperelliptic_direct(1, pair, tol),
        p192_lhs=complete_K(Modulus(k=small, kc=large)),
        p192_rhs=root2 / (27.0**0.25 * (root3 - 1.0)) * k_reference,
        p192b_lhs=complete_K(Modulus(k=large, kc=small)),
        p192b_rhs=math.sqrt(3.0 + 2.0 * root3) * k_reference,
        cubic_half_lhs=integrate(IntegrandSpec(_z12_square, 0.0, 1.0), tol).value,
        cubic_full_lhs=integrate(IntegrandSpec(_z12_square, 0.0, math.inf), tol).value,
        cubic_rhs=0.5 * hyperelliptic_direct(3, pair, tol),
        quartic_half_lhs=integrate(IntegrandSpec(_z12_quartic, 0.0, 1.0), tol).value,
        quartic_full_lhs=integrate(IntegrandSpec(_z12_quartic, 0.0, math.inf), tol).value,
        quartic_rhs=0.5 * hyperelliptic_direct(4, pair, tol),
    )
