import logging
import math
from dataclasses import dataclass
from typing import Iterable, List, Tuple

from hyperell.elliptic import ParamPair, modulus_pair
from hyperell.errors import ConsistencyError
from hyperell.lauricella import LauricellaSpec, fd_integral, fd_reduce, h_eval
from hyperell.quadrature import DEFAULT_TOL
from hyperell.reduction import INDICES, check_index

logger = logging.getLogger(__name__)

# (a; c) of the four-argument functions behind I1 and I2; every b is 1/2
_CONJUGATE_PARAMETERS = {1: (1.5, 2.0), 2: (0.5, 2.0)}


@dataclass(frozen=True)
class PiVerdict:
    """One evaluation of a pi formula, with its distance from pi."""

    index: int
    pair: ParamPair
    pi_value: float
    abs_error: float


@dataclass(frozen=True)
class ContinuationResult:
    """
    Both sides of the two F_D^(3) evaluations at ((a+b)/b, (b-a)/b, 2).

    The left sides come from the four-argument functions through the
    reduction with pivot 1 - ib. The principal branch reproduces the printed
    unimodular constants, but the magnitudes differ: lhs1 = rhs1 sqrt(b/a)
    and lhs2 = rhs2 sqrt(a).
    """

    pair: ParamPair
    lhs1: complex
    rhs1: complex
    lhs2: complex
    rhs2: complex
    reduced_arguments: Tuple

    @property
    def factor1(self):
        return self.lhs1 / self.rhs1

    @property
    def factor2(self):
        return self.lhs2 / self.rhs2

    @property
    def expected_factor1(self):
        return math.sqrt(self.pair.b / self.pair.a)

    @property
    def expected_factor2(self):
        return math.sqrt(self.pair.a)


def conjugate_spec(index, p: ParamPair) -> LauricellaSpec:
    """F_D^(4) LauricellaSpec with arguments 1 +- ia, 1 +- ib used for I1 (index 1) and I2 (index 2)."""
    a_param, c_param = _CONJUGATE_PARAMETERS[index]
    arguments = (complex(1.0, p.a), complex(1.0, -p.a), complex(1.0, p.b), complex(1.0, -p.b))
    return LauricellaSpec.with_common_exponent(a_param, 0.5, c_param, arguments)


def _real_part(value, tol, label):
    tol = DEFAULT_TOL if tol is None else tol
    if isinstance(value, complex):
        if abs(value.imag) > tol * max(1.0, abs(value.real)):
            raise ConsistencyError(
                f"{label} has imaginary residue {value.imag:.3e} above tol={tol}"
            )
        return value.real
    return value


def _fd_value(index, p: ParamPair, tol):
    """The Lauricella function appearing in the representation of I_index."""
    a, b = p.a, p.b
    if index in (1, 2):
        value = fd_integral(conjugate_spec(index, p), tol)
        return _real_part(value, tol, f"F_D^(4) of I{index}")
    if index in (3, 4):
        family = "H1" if index == 3 else "G"
        return h_eval(family, 0.5, b / (a + b), b / (b - a), tol)
    family = "G" if index == 5 else "H2"
    return h_eval(family, -1.0, b / a, -b / a, tol)


def _representation_prefactor(index, p: ParamPair):
    a, b = p.a, p.b
    squares_gap = (a - b) * (a + b)
    if index in (1, 2):
        return 0.5 * math.pi
    if index == 3:
        return math.pi / (2.0 * math.sqrt(2.0 * a * squares_gap))
    if index == 4:
        return math.pi * math.sqrt(a / (2.0 * squares_gap))
    if index == 5:
        return math.pi / (a * math.sqrt(b))
    return math.pi * math.sqrt(b) / (2.0 * a)


def lauricella_form(index, p: ParamPair, tol=DEFAULT_TOL):
    """
    I_index(a, b) through its Lauricella representation.

    I1, I2 use F_D^(4) at (1+ia, 1-ia, 1+ib, 1-ib); I3, I4 use F_D^(3) at
    (1/2, b/(a+b), b/(b-a)); I5, I6 use F_D^(3) at (-1, b/a, -b/a).

    Raises
    ------
    ConsistencyError
        If a four-argument evaluation keeps an imaginary part above `tol`.
    """
    check_index(index)
    return _representation_prefactor(index, p) * _fd_value(index, p, tol)


def _pi_numerator(index, p: ParamPair):
    moduli = modulus_pair(p)
    k_minus, k_plus = moduli.K_minus, moduli.K_plus
    a, b = p.a, p.b
    if index == 1:
        return 4.0 / math.sqrt(a * b * (a + b)) * k_minus
    if index == 2:
        return 4.0 / math.sqrt(a + b) * k_minus
    if index == 3:
        return 2.0 * math.sqrt(a - b) / math.sqrt(b) * (k_plus - k_minus)
    if index == 4:
        return math.sqrt(a - b) / math.sqrt(a) * (k_plus + k_minus)
    if index == 5:
        return math.sqrt(a) / math.sqrt(2.0 * (a + b)) * (k_plus + k_minus)
    return math.sqrt(2.0) * a / math.sqrt(b * (a + b)) * (k_plus - k_minus)


def pi_estimate(index, p: ParamPair, tol=DEFAULT_TOL) -> PiVerdict:
    """
    pi as the ratio of an elliptic numerator to a Lauricella denominator.

    Parameters
    ----------
    index : int
        Which of the six formulae, 1..6.
    p : ParamPair
    tol : float
        Relative tolerance of the Lauricella quadrature.
    """
    check_index(index)
    value = _pi_numerator(index, p) / _fd_value(index, p, tol)
    verdict = PiVerdict(index=index, pair=p, pi_value=value, abs_error=abs(value - math.pi))
    logger.debug("pi formula %d at (%s, %s): %.16g", index, p.a, p.b, value)
    return verdict


def pi_grid(pairs: Iterable[ParamPair], tol=DEFAULT_TOL) -> List[PiVerdict]:
    """All six formulae over every pair."""
    return [pi_estimate(index, pair, tol) for pair in pairs for index in INDICES]


def continuation_pair(p: ParamPair, tol=None) -> ContinuationResult:
    """
    Evaluate F_D^(3)(3/2; 1/2; 2) and F_D^(3)(1/2; 1/2; 2) at ((a+b)/b, (b-a)/b, 2).

    The argument 2 lies on the cut of the integral representation, so the
    left sides are obtained from the four-argument functions: with pivot
    1 - ib the reduction gives F^(4) = (ib)^(-a) F^(3), hence
    F^(3) = F^(4) / prefactor.
    """
    k_minus = modulus_pair(p).K_minus
    a, b = p.a, p.b

    left_sides = []
    reduced_arguments = ()
    for index in (1, 2):
        spec = conjugate_spec(index, p)
        prefactor, reduced = fd_reduce(spec)
        reduced_arguments = reduced.x
        left_sides.append(fd_integral(spec, tol) / prefactor)

    rhs1 = 4.0 * complex(-1.0, 1.0) / (math.pi * math.sqrt(2.0)) * math.sqrt(b / (a + b)) * k_minus
    rhs2 = 4.0 * complex(1.0, 1.0) / (math.pi * math.sqrt(2.0)) * math.sqrt(b / (a * (a + b))) * k_minus

    return ContinuationResult(
        pair=p,
        lhs1=complex(left_sides[0]),
        rhs1=rhs1,
        lhs2=complex(left_sides[1]),
        rhs2=rhs2,
        reduced_arguments=reduced_arguments,
    )
