"""Probability arithmetic in the natural-log domain.

Error probabilities in deep relay trees decay doubly exponentially with
height, far below the smallest positive double.  All kernel arithmetic
therefore runs on log-probabilities and only converts to linear scale at
the reporting boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

# log of probability zero
LOG_ZERO = float("-inf")

# Slack allowed before a positive log-probability is treated as an error
# rather than accumulated rounding from a sum that should be <= 1.
_POSITIVE_TOL = 1e-9


def log1mexp(x: float) -> float:
    """log(1 - exp(x)) for x <= 0, stable near both ends."""
    if x > 0.0:
        raise ValueError(f"log1mexp needs x <= 0, got {x}")
    if x == 0.0:
        return LOG_ZERO
    if x == LOG_ZERO:
        return 0.0
    # standard split at -ln 2 to keep one of expm1/exp well conditioned
    if x > -math.log(2.0):
        return math.log(-math.expm1(x))
    return math.log1p(-math.exp(x))


def log_sum_exp(terms) -> float:
    """log(sum(exp(t) for t in terms)) without overflow or underflow.

    Compensated: after factoring out the maximum the residual sum runs
    through math.fsum, so results are exactly rounded up to the final
    log1p call.
    """
    terms = list(terms)
    if not terms:
        return LOG_ZERO
    m = max(terms)
    if m == LOG_ZERO:
        return LOG_ZERO
    # sum of expm1 keeps full precision for terms close to the max
    rest = math.fsum(math.expm1(t - m) for t in terms)
    return m + math.log1p(rest + (len(terms) - 1))


def log_add(x: float, y: float) -> float:
    """log(exp(x) + exp(y))."""
    if x < y:
        x, y = y, x
    if x == LOG_ZERO:
        return LOG_ZERO
    return x + math.log1p(math.exp(y - x))


_LN2 = math.log(2.0)


@dataclass(frozen=True)
class LogProb:
    """A probability stored as its natural logarithm.

    value <= 0, with -inf encoding exact zero.  Tiny positive values
    (rounding residue from sums that are mathematically <= 1) are
    clamped to 0.0; anything larger is rejected.
    """

    value: float

    def __post_init__(self):
        v = self.value
        if math.isnan(v):
            raise ValueError("log-probability is NaN")
        if v > 0.0:
            if v > _POSITIVE_TOL:
                raise ValueError(f"log-probability {v} exceeds 0")
            object.__setattr__(self, "value", 0.0)

    @classmethod
    def from_linear(cls, p: float) -> "LogProb":
        if math.isnan(p) or p < 0.0 or p > 1.0:
            raise ValueError(f"probability {p} outside [0, 1]")
        if p == 0.0:
            return cls(LOG_ZERO)
        return cls(math.log(p))

    @property
    def linear(self) -> float:
        """Probability on the ordinary [0, 1] scale (may underflow to 0.0)."""
        return math.exp(self.value)

    @property
    def log2_inverse(self) -> float:
        """log2(1/p), the standard 'number of bits' scale for error decay."""
        if self.value == LOG_ZERO:
            return float("inf")
        return -self.value / _LN2

    def complement(self) -> "LogProb":
        """LogProb of 1 - p."""
        return LogProb(log1mexp(self.value))

    def __float__(self) -> float:
        return self.value


ZERO = LogProb(LOG_ZERO)
ONE = LogProb(0.0)
