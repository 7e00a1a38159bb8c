"""Closed-form bounds and asymptotic rates for relay-tree error decay.

The one-level recursions sandwich the next error between powers of the
current one: alpha' / alpha^lambda lies in [1, c] with lambda the
per-level exponent floor((M+1)/2) and c an explicit binomial constant.
Telescoping gives two-sided bounds on log2(1/alpha_k) growing like
lambda^k, total-error bounds in the leaf count N = M^k, the decay
exponents log_M(lambda), and an inversion that sizes a tree for a
target error.  All quantities are in bits, i.e. on the log2(1/p) scale.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Optional

from .kernel import Priors

__all__ = [
    "RateKind",
    "BoundSandwich",
    "RateReport",
    "SampleSize",
    "BoundInapplicableError",
    "per_level_exponent",
    "ratio_poly",
    "level_bounds",
    "total_bounds",
    "lrt_lower_bound",
    "exponent",
    "sample_size",
    "exponent_table",
]


class RateKind(enum.Enum):
    """Which decay family a bound or exponent refers to."""

    MAJORITY_RANDOM = "majority"
    ALTERNATING = "alternating"
    UPPER_BOUND = "upper"
    LRT_LOWER = "lrt"


class BoundInapplicableError(ValueError):
    """The requested bound is vacuous for these inputs."""


@dataclass(frozen=True)
class BoundSandwich:
    """Two-sided bound, in bits, on a log2(1/p) quantity."""

    lower: float
    upper: float
    quantity: str

    def __post_init__(self):
        if self.lower > self.upper + 1e-9:
            raise ValueError(f"bound crossed: [{self.lower}, {self.upper}]")

    def contains(self, bits: float, tol: float = 1e-9) -> bool:
        return self.lower - tol <= bits <= self.upper + tol


@dataclass(frozen=True)
class RateReport:
    """Decay exponents gamma (error ~ 2^(-Theta(N^gamma))) for one fan-in."""

    m: int
    majority_random: float
    alternating: Optional[float]
    upper_bound: float
    lrt_lower: float


@dataclass(frozen=True)
class SampleSize:
    """Leaf budget certified to reach a target error.

    n_real is the real-valued solution of the bound inequality, k the
    tree height after rounding up to a full tree, n_tree = m^k.
    """

    n_real: float
    k: int
    n_tree: int


def per_level_exponent(m: int) -> int:
    """floor((m+1)/2): the factor by which one majority level raises the
    exponent of the error probability."""
    if m < 2:
        raise ValueError(f"fusion needs m >= 2, got {m}")
    return (m + 1) // 2


def _sandwich_constant(m: int, strategy: RateKind) -> int:
    lam = per_level_exponent(m)
    if strategy is RateKind.ALTERNATING and m % 2 == 1:
        raise ValueError(f"alternating strategy needs even m, got {m}")
    return math.comb(m, lam)


def ratio_poly(m: int, k: int, x: float) -> float:
    """sum_{j=0}^{k} C(m, j) x^(k-j) (1-x)^j for 0 < k < m.

    This polynomial is the one-level ratio alpha'/alpha^(k+...) behind
    the sandwich bounds; it decreases strictly from C(m, k) at 0 to 1
    at 1, which is what makes the bounds two-sided.
    """
    if not 0 < k < m:
        raise ValueError(f"need 0 < k < m, got k={k}, m={m}")
    if not 0.0 < x < 1.0:
        raise ValueError(f"need x in (0, 1), got {x}")
    return math.fsum(
        math.comb(m, j) * x ** (k - j) * (1.0 - x) ** j for j in range(k + 1)
    )


def _bits(p: float, name: str) -> float:
    if not 0.0 < p < 1.0:
        raise ValueError(f"{name} must be in (0, 1), got {p}")
    return -math.log2(p)


def _level_factor(m: int, k: int, strategy: RateKind) -> float:
    """Product of per-level exponents after k levels."""
    lam = per_level_exponent(m)
    if strategy is RateKind.MAJORITY_RANDOM:
        return float(lam**k)
    if strategy is RateKind.ALTERNATING:
        if k % 2 == 1:
            raise ValueError(
                f"alternating bounds hold at even heights only, got k={k}"
            )
        # tie-to-one levels contribute m/2, tie-to-zero levels m/2 + 1
        return float(lam**(k // 2) * (lam + 1) ** (k // 2))
    raise ValueError(f"no level bounds for strategy {strategy}")


def level_bounds(alpha0: float, m: int, k: int, strategy: RateKind) -> BoundSandwich:
    """Two-sided bound on log2(1/alpha_k) after k fusion levels.

    factor * (log2(1/alpha0) - log2(c))  <=  log2(1/alpha_k)  <=  factor * log2(1/alpha0)

    with factor the accumulated per-level exponent and c the sandwich
    constant C(m, floor((m+1)/2)).  Valid for the randomized-tie majority
    family at any k >= 0 and for the alternating family at even k.
    """
    if k < 0:
        raise ValueError(f"level k must be >= 0, got {k}")
    bits0 = _bits(alpha0, "alpha0")
    factor = _level_factor(m, k, strategy)
    log2_c = math.log2(_sandwich_constant(m, strategy))
    return BoundSandwich(
        factor * (bits0 - log2_c), factor * bits0, f"log2(1/alpha_{k})"
    )


def _height_of(n: int, m: int) -> int:
    """Exact k with n = m^k, else ValueError."""
    if n < 1:
        raise ValueError(f"leaf count must be >= 1, got {n}")
    k = 0
    power = 1
    while power < n:
        power *= m
        k += 1
    if power != n:
        raise ValueError(f"leaf count {n} is not a power of m={m}")
    return k


def total_bounds(
    alpha0: float,
    beta0: float,
    priors: Priors,
    m: int,
    n: int,
    strategy: RateKind = RateKind.MAJORITY_RANDOM,
) -> BoundSandwich:
    """Two-sided bound on log2(1/P_N), the total error at the root of a
    height-k tree with N = m^k leaves.

    The lower bound runs the level bound from the worse leaf error; the
    upper bound mixes the per-type upper bounds with the priors.
    """
    bits_a = _bits(alpha0, "alpha0")
    bits_b = _bits(beta0, "beta0")
    k = _height_of(n, m)
    factor = _level_factor(m, k, strategy)
    log2_c = math.log2(_sandwich_constant(m, strategy))
    worse = min(bits_a, bits_b)  # bits of max(alpha0, beta0)
    upper = factor * (priors.pi0 * bits_a + priors.pi1 * bits_b)
    return BoundSandwich(factor * (worse - log2_c), upper, "log2(1/P_N)")


def lrt_lower_bound(total0: float, priors: Priors, m: int, n: int) -> float:
    """Guaranteed bits at the root under likelihood-ratio fusion.

    log2(1/P_N) >= N^(log_M lambda) * (log2(1/L0) - log2(penalty)) with
    penalty = 2 C(m, lambda) max(pi) / min(pi)^lambda and L0 the total
    error of a single leaf.  May be negative (vacuous) for weak leaves;
    returned as-is.
    """
    priors.require_positive()
    bits0 = _bits(total0, "total0")
    lam = per_level_exponent(m)
    k = _height_of(n, m)
    penalty = (
        2.0
        * math.comb(m, lam)
        * max(priors.pi0, priors.pi1)
        / min(priors.pi0, priors.pi1) ** lam
    )
    return float(lam**k) * (bits0 - math.log2(penalty))


def exponent(m: int, which: RateKind) -> float:
    """Decay exponent gamma in error ~ 2^(-Theta(N^gamma)) for fan-in m.

    majority with randomized ties: log_M floor((M+1)/2)
    alternating ties (even M):     log_M (sqrt(M(M+2)) / 2)
    universal upper bound:         log_M ((M+1)/2)
    likelihood-ratio lower bound:  log_M floor((M+1)/2)
    """
    if m < 2:
        raise ValueError(f"fusion needs m >= 2, got {m}")
    log_m = math.log(m)
    if which is RateKind.MAJORITY_RANDOM or which is RateKind.LRT_LOWER:
        return math.log(per_level_exponent(m)) / log_m
    if which is RateKind.UPPER_BOUND:
        return math.log((m + 1) / 2.0) / log_m
    if which is RateKind.ALTERNATING:
        if m % 2 == 1:
            raise ValueError(f"alternating strategy needs even m, got {m}")
        return (0.5 * (math.log(m) + math.log(m + 2)) - math.log(2.0)) / log_m
    raise ValueError(f"unknown rate kind {which}")


def exponent_table(m_values: Iterable[int]) -> list:
    """RateReport rows for a range of fan-ins (each within [2, 64])."""
    rows = []
    for m in m_values:
        if not 2 <= m <= 64:
            raise ValueError(f"fan-in {m} outside [2, 64]")
        rows.append(
            RateReport(
                m=m,
                majority_random=exponent(m, RateKind.MAJORITY_RANDOM),
                alternating=(
                    exponent(m, RateKind.ALTERNATING) if m % 2 == 0 else None
                ),
                upper_bound=exponent(m, RateKind.UPPER_BOUND),
                lrt_lower=exponent(m, RateKind.LRT_LOWER),
            )
        )
    return rows


def sample_size(m: int, alpha0: float, beta0: float, epsilon: float) -> SampleSize:
    """Smallest certified leaf budget for root error <= epsilon under
    randomized-tie majority fusion.

    Inverts the total-error lower bound.  If the leaves already meet the
    target (max error <= epsilon) a single leaf suffices.  If the bound
    cannot certify any decay for these leaves, raises
    BoundInapplicableError rather than returning a vacuous answer.
    """
    bits_a = _bits(alpha0, "alpha0")
    bits_b = _bits(beta0, "beta0")
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must be in (0, 1), got {epsilon}")
    if max(alpha0, beta0) <= epsilon:
        return SampleSize(n_real=1.0, k=0, n_tree=1)
    lam = per_level_exponent(m)
    log2_c = math.log2(math.comb(m, lam))
    headroom = min(bits_a, bits_b) - log2_c
    if headroom <= 0.0:
        raise BoundInapplicableError(
            f"bound inapplicable: leaf errors ({alpha0}, {beta0}) give "
            f"log2(1/max) = {min(bits_a, bits_b):.6g} <= log2(c) = {log2_c:.6g} "
            f"for m={m}"
        )
    if lam == 1:
        raise BoundInapplicableError(
            "bound inapplicable: m=2 majority certifies no decay "
            "(per-level exponent 1)"
        )
    n_real = (math.log2(1.0 / epsilon) / headroom) ** (math.log(m) / math.log(lam))
    k = 0
    power = 1
    while power < n_real:
        power *= m
        k += 1
    return SampleSize(n_real=n_real, k=k, n_tree=power)
