import math

import numpy as np

from hyperell.elliptic import ParamPair, modulus_pair
from hyperell.errors import DomainError
from hyperell.quadrature import DEFAULT_TOL, IntegrandSpec, integrate

INDICES = (1, 2, 3, 4, 5, 6)


def check_index(index):
    if index not in INDICES:
        raise DomainError(f"Integral index must be 1..6, got {index}")


def u_form_integrand(index, p: ParamPair) -> IntegrandSpec:
    """
    Integrand of I_index(a, b) after the substitution u = p + ab/p.

    Indices 1 and 2 run over [2 sqrt(ab), inf), indices 3 to 6 over
    [a + b, inf). The combinations 1/sqrt(u - 2 sqrt(ab)) -/+ 1/sqrt(u + 2 sqrt(ab))
    are evaluated term by term as written, without recombination.
    """
    check_index(index)
    a, b = p.a, p.b
    sqrt_ab = p.sqrt_ab
    two_c = 2.0 * sqrt_ab

    if index in (1, 2):
        prefactor = 1.0 / sqrt_ab if index == 1 else 1.0
        spread = (a - b) ** 2

        def evaluate(u):
            return prefactor / np.sqrt(u * u + spread)

        return IntegrandSpec(evaluate, two_c, math.inf, exponents=(-0.5, 0.0), scale=sqrt_ab)

    total = a + b
    # a + b - 2 sqrt(ab) = (sqrt(a) - sqrt(b))^2, formed without cancellation
    lead = (a - b) ** 2 / (math.sqrt(a) + math.sqrt(b)) ** 2
    prefactor = 0.5 / sqrt_ab if index in (3, 5) else 0.5
    sign = -1.0 if index in (3, 6) else 1.0

    def evaluate(u, dl, dr):
        # u^2 - (a+b)^2 = dl (2(a+b) + dl)
        bracket = 1.0 / np.sqrt(dl + lead) + sign / np.sqrt(u + two_c)
        return prefactor * bracket / np.sqrt(2.0 * total + dl)

    return IntegrandSpec(
        evaluate, total, math.inf, exponents=(-0.5, 0.0), scale=total, offsets=True
    )


def reduced_u_form(index, p: ParamPair, tol=DEFAULT_TOL, full_output=False):
    """
    Evaluate I_index(a, b) through its u-domain integral by quadrature.

    Parameters
    ----------
    index : int
        1..6.
    p : ParamPair
    tol : float
        Relative tolerance of the quadrature.
    full_output : bool
        Return the `QuadResult` instead of its value.
    """
    result = integrate(u_form_integrand(index, p), tol)
    return result if full_output else result.value


def elliptic_closed(index, p: ParamPair):
    """
    I_index(a, b) in terms of K+ and K- of the pair.

    ====== =================================
    index  closed form
    ====== =================================
    1      2 K- / sqrt(ab(a+b))
    2      2 K- / sqrt(a+b)
    3      (K+ - K-) / sqrt(2ab(a+b))
    4      (K+ + K-) / sqrt(2(a+b))
    5      (K+ + K-) / sqrt(2ab(a+b))
    6      (K+ - K-) / sqrt(2(a+b))
    ====== =================================
    """
    check_index(index)
    moduli = modulus_pair(p)
    k_minus, k_plus = moduli.K_minus, moduli.K_plus
    total = p.total
    ab = p.a * p.b

    if index == 1:
        return 2.0 * k_minus / math.sqrt(ab * total)
    if index == 2:
        return 2.0 * k_minus / math.sqrt(total)
    if index == 3:
        return (k_plus - k_minus) / math.sqrt(2.0 * ab * total)
    if index == 4:
        return (k_plus + k_minus) / math.sqrt(2.0 * total)
    if index == 5:
        return (k_plus + k_minus) / math.sqrt(2.0 * ab * total)
    return (k_plus - k_minus) / math.sqrt(2.0 * total)
