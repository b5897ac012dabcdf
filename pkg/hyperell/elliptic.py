import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np

from hyperell.errors import ConvergenceError, DomainError

logger = logging.getLogger(__name__)

_EPS = np.finfo(float).eps

# Relative gap (a - b)/a below which a parameter pair is treated as degenerate
DEGENERACY_THRESHOLD = 1e-12

# Quadratic convergence reaches double precision long before this
_AGM_MAX_ITERATIONS = 64


@dataclass(frozen=True)
class Modulus:
    """
    Elliptic modulus with its complement.

    Parameters
    ----------
    k : float
        The modulus, 0 <= k < 1.
    kc : float, optional
        The complementary modulus sqrt(1 - k**2). Computed from `k` when not
        given; pass it explicitly when it is known in closed form, which keeps
        K accurate for k close to 1.
    """

    k: float
    kc: Optional[float] = None

    def __post_init__(self):
        k = float(self.k)
        if not math.isfinite(k) or k < 0.0:
            raise DomainError(f"Modulus must satisfy 0 <= k < 1, got {self.k}")
        if self.kc is None:
            if k >= 1.0:
                raise DomainError(
                    f"Modulus must satisfy 0 <= k < 1, got {self.k} (K diverges)"
                )
            kc = math.sqrt((1.0 - k) * (1.0 + k))
        else:
            kc = float(self.kc)
            # k may round to 1.0 when the complement is below sqrt(eps)
            if k > 1.0:
                raise DomainError(f"Modulus must satisfy 0 <= k <= 1, got {self.k}")
            if not (0.0 < kc <= 1.0):
                raise DomainError(
                    f"Complementary modulus must satisfy 0 < k' <= 1, got {self.kc}"
                )
            if abs(k * k + kc * kc - 1.0) > 1e-12:
                raise DomainError(
                    f"k={k} and k'={kc} are not complementary (k^2 + k'^2 = {k * k + kc * kc})"
                )
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "kc", kc)

    @classmethod
    def from_complement(cls, kc):
        """Build the modulus whose complement is `kc`."""
        kc = float(kc)
        if not (0.0 < kc <= 1.0):
            raise DomainError(f"Complementary modulus must satisfy 0 < k' <= 1, got {kc}")
        return cls(k=math.sqrt((1.0 - kc) * (1.0 + kc)), kc=kc)

    @property
    def complement(self):
        """The complementary modulus as a `Modulus`."""
        return Modulus(k=self.kc, kc=self.k) if self.k > 0.0 else None


@dataclass(frozen=True)
class ParamPair:
    """
    Parameters (a, b) of the hyperelliptic families, a > b > 0.

    Pairs whose relative gap (a - b)/a falls below `DEGENERACY_THRESHOLD` are
    rejected: the closed forms divide by sqrt(a - b).
    """

    a: float
    b: float

    def __post_init__(self):
        a, b = float(self.a), float(self.b)
        if not (math.isfinite(a) and math.isfinite(b)) or b <= 0.0 or a <= b:
            raise DomainError(f"Parameters must satisfy a > b > 0, got a={self.a}, b={self.b}")
        if (a - b) / a < DEGENERACY_THRESHOLD:
            raise DomainError(
                f"Degenerate pair a={a}, b={b}: (a-b)/a below {DEGENERACY_THRESHOLD}"
            )
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def sqrt_ab(self):
        return math.sqrt(self.a * self.b)

    @property
    def total(self):
        return self.a + self.b

    @property
    def ratio(self):
        return self.a / self.b

    def scaled(self, factor):
        """Return the pair (factor*a, factor*b)."""
        return ParamPair(factor * self.a, factor * self.b)


@dataclass(frozen=True)
class EllipticPair:
    """Complementary moduli k+ and k- of a parameter pair and their integrals K+ and K-."""

    k_plus: Modulus
    k_minus: Modulus
    K_plus: float
    K_minus: float

    @property
    def ratio(self):
        """K+/K-, which equals K'/K at k = k-."""
        return self.K_plus / self.K_minus


def _as_modulus(k: Union[Modulus, float]) -> Modulus:
    return k if isinstance(k, Modulus) else Modulus(k)


def agm(x, y):
    """
    Arithmetic-geometric mean of two positive numbers.

    Parameters
    ----------
    x, y : float
        Strictly positive, finite.

    Returns
    -------
    float
        The common limit of the arithmetic and geometric mean iteration,
        reached when |a_n - b_n| <= 4 eps a_n.

    Raises
    ------
    DomainError
        If either argument is not finite or not strictly positive.
    """
    a, b = float(x), float(y)
    if not (math.isfinite(a) and math.isfinite(b)) or a <= 0.0 or b <= 0.0:
        raise DomainError(f"agm requires two positive finite numbers, got {x}, {y}")

    for _ in range(_AGM_MAX_ITERATIONS):
        if abs(a - b) <= 4.0 * _EPS * a:
            return a
        a, b = 0.5 * (a + b), math.sqrt(a * b)

    raise ConvergenceError(f"agm({x}, {y}) did not converge", best_estimate=a)


def complete_K(k: Union[Modulus, float]) -> float:
    """
    Complete elliptic integral of the first kind, K(k) = pi / (2 agm(1, k')).

    Parameters
    ----------
    k : Modulus or float
        The modulus, 0 <= k < 1.

    Returns
    -------
    float
        K(k) >= pi/2.
    """
    modulus = _as_modulus(k)
    return math.pi / (2.0 * agm(1.0, modulus.kc))


def complete_K_prime(k: Union[Modulus, float]) -> float:
    """K'(k) = K(k') = pi / (2 agm(1, k)), finite for 0 < k."""
    modulus = _as_modulus(k)
    if modulus.k == 0.0:
        raise DomainError("K'(0) diverges")
    return math.pi / (2.0 * agm(1.0, modulus.k))


def modulus_pair(p: ParamPair) -> EllipticPair:
    """
    Complementary moduli of the pair (a, b).

    k+ = (sqrt(a) + sqrt(b)) / sqrt(2(a+b)) and k- = (sqrt(a) - sqrt(b)) / sqrt(2(a+b)),
    with k+^2 + k-^2 = 1.
    """
    sa, sb = math.sqrt(p.a), math.sqrt(p.b)
    denominator = math.sqrt(2.0 * (p.a + p.b))
    plus = (sa + sb) / denominator
    # (sqrt(a) - sqrt(b)) without cancellation
    minus = (p.a - p.b) / ((sa + sb) * denominator)

    k_plus = Modulus(k=plus, kc=minus)
    k_minus = Modulus(k=minus, kc=plus)
    return EllipticPair(
        k_plus=k_plus,
        k_minus=k_minus,
        K_plus=complete_K(k_plus),
        K_minus=complete_K(k_minus),
    )


def landen_descend(k: Union[Modulus, float]) -> Tuple[Modulus, float]:
    """
    Modular transformation K(k) = K(2 sqrt(k)/(1+k)) / (1+k).

    Returns
    -------
    k_new : Modulus
        2 sqrt(k)/(1+k), with complement (1-k)/(1+k).
    factor : float
        1/(1+k).
    """
    modulus = _as_modulus(k)
    kk = modulus.k
    k_new = Modulus(k=2.0 * math.sqrt(kk) / (1.0 + kk), kc=(1.0 - kk) / (1.0 + kk))
    return k_new, 1.0 / (1.0 + kk)
