"""Single-level fusion rules and their exact error-probability recursions.

Setting: a balanced tree of relay agents testing H0 against H1.  Leaves
measure and send one bit; every interior agent fuses the M bits of its
children into one bit.  Conditioned on the true hypothesis the child
messages are i.i.d. Bernoulli, so one level of fusion maps the error
pair (alpha, beta) = (false-alarm, miss) of the incoming messages to
the pair of the outgoing message.  This module implements those maps
exactly in the log domain:

  * majority vote for odd fan-in,
  * majority vote for even fan-in with a randomized tie-break,
  * majority vote with a deterministic tie direction that alternates
    between levels,
  * the Bayesian likelihood-ratio test with threshold pi0/pi1.

Propagating a schedule of rules up the tree yields the full per-level
trace of error pairs.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence, Union

from .logdomain import LOG_ZERO, LogProb, log_sum_exp

__all__ = [
    "ErrorPair",
    "Priors",
    "TiePhase",
    "MajorityOdd",
    "MajorityEven",
    "AlternatingMajority",
    "BayesianLRT",
    "Summation",
    "FusionRule",
    "LevelTrace",
    "binom_tail",
    "majority_step_odd",
    "majority_step_even",
    "alternating_step",
    "lrt_decision_rule",
    "lrt_step",
    "apply_rule",
    "majority_rule",
    "alternating_phases",
    "total_error",
    "propagate",
]


@dataclass(frozen=True)
class ErrorPair:
    """Type I / type II error probabilities of one message, in log domain.

    alpha = P(send 1 | H0), beta = P(send 0 | H1).
    """

    alpha: LogProb
    beta: LogProb

    @classmethod
    def from_linear(cls, alpha: float, beta: float) -> "ErrorPair":
        return cls(LogProb.from_linear(alpha), LogProb.from_linear(beta))

    @property
    def alpha_linear(self) -> float:
        return self.alpha.linear

    @property
    def beta_linear(self) -> float:
        return self.beta.linear

    def is_informative(self) -> bool:
        """True when alpha + beta < 1, i.e. the message is better than a coin."""
        return self.alpha.linear + self.beta.linear < 1.0


@dataclass(frozen=True)
class Priors:
    """Prior probabilities (pi0, pi1) of the two hypotheses.

    Must sum to 1 within 1e-12.  Zero mass on one side is accepted so
    degenerate weightings of the total error remain expressible, but
    likelihood-ratio operations require both priors strictly positive.
    """

    pi0: float
    pi1: float

    def __post_init__(self):
        if not (0.0 <= self.pi0 <= 1.0 and 0.0 <= self.pi1 <= 1.0):
            raise ValueError(f"priors ({self.pi0}, {self.pi1}) outside [0, 1]")
        if abs(self.pi0 + self.pi1 - 1.0) > 1e-12:
            raise ValueError(f"priors sum to {self.pi0 + self.pi1}, not 1")

    @classmethod
    def equal(cls) -> "Priors":
        return cls(0.5, 0.5)

    def require_positive(self) -> None:
        if self.pi0 <= 0.0 or self.pi1 <= 0.0:
            raise ValueError(
                f"likelihood-ratio threshold needs both priors positive, "
                f"got ({self.pi0}, {self.pi1})"
            )


class TiePhase(enum.Enum):
    """Deterministic tie direction for even fan-in majority."""

    TIES_TO_ONE = "one"
    TIES_TO_ZERO = "zero"

    def flipped(self) -> "TiePhase":
        if self is TiePhase.TIES_TO_ONE:
            return TiePhase.TIES_TO_ZERO
        return TiePhase.TIES_TO_ONE


@dataclass(frozen=True)
class MajorityOdd:
    """Strict majority over an odd number of messages."""

    m: int

    def __post_init__(self):
        if self.m < 3 or self.m % 2 == 0:
            raise ValueError(f"odd majority needs odd m >= 3, got {self.m}")


@dataclass(frozen=True)
class MajorityEven:
    """Majority over an even number of messages, ties broken by a
    Bernoulli(tie_prob) coin in favor of deciding 1."""

    m: int
    tie_prob: float = 0.5

    def __post_init__(self):
        if self.m < 2 or self.m % 2 == 1:
            raise ValueError(f"even majority needs even m >= 2, got {self.m}")
        if not (0.0 < self.tie_prob < 1.0):
            raise ValueError(f"tie_prob {self.tie_prob} outside (0, 1)")


@dataclass(frozen=True)
class AlternatingMajority:
    """Majority over an even number of messages with a deterministic tie
    direction; schedules flip the direction from level to level."""

    m: int
    phase: TiePhase = TiePhase.TIES_TO_ONE

    def __post_init__(self):
        if self.m < 2 or self.m % 2 == 1:
            raise ValueError(f"alternating majority needs even m >= 2, got {self.m}")


@dataclass(frozen=True)
class BayesianLRT:
    """Likelihood-ratio test on the count of ones, threshold pi0/pi1."""

    m: int
    priors: Priors

    def __post_init__(self):
        if self.m < 2:
            raise ValueError(f"fusion needs m >= 2, got {self.m}")
        self.priors.require_positive()


@dataclass(frozen=True)
class Summation:
    """Pass the integer sum of the children upward instead of deciding.

    Only meaningful for trees with a message alphabet larger than one
    bit; it has no binary error-pair recursion of its own.
    """

    m: int

    def __post_init__(self):
        if self.m < 2:
            raise ValueError(f"fusion needs m >= 2, got {self.m}")


FusionRule = Union[MajorityOdd, MajorityEven, AlternatingMajority, BayesianLRT, Summation]


def binom_tail(m: int, s_lo: int, s_hi: int, p: LogProb) -> LogProb:
    """log of sum_{s=s_lo}^{s_hi} C(m, s) p^s (1-p)^(m-s).

    Exact binomial coefficients; the sum runs through a compensated
    log-sum-exp, so tails deep below double underflow stay meaningful.
    """
    if not 0 <= s_lo <= s_hi <= m:
        raise ValueError(f"count window [{s_lo}, {s_hi}] invalid for m={m}")
    log_p = p.value
    log_q = p.complement().value
    terms = []
    for s in range(s_lo, s_hi + 1):
        t = math.log(math.comb(m, s)) if 0 < s < m else 0.0
        # skip multiplications by zero counts: 0 * -inf is NaN
        if s > 0:
            t += s * log_p
        if s < m:
            t += (m - s) * log_q
        terms.append(t)
    return LogProb(log_sum_exp(terms))


def majority_step_odd(pair: ErrorPair, m: int) -> ErrorPair:
    """One level of strict-majority fusion, odd fan-in.

    The outgoing false alarm is the upper tail P(Binom(m, alpha) >= (m+1)/2),
    and symmetrically for the miss.
    """
    if m < 3 or m % 2 == 0:
        raise ValueError(f"odd majority needs odd m >= 3, got {m}")
    half_up = (m + 1) // 2
    return ErrorPair(
        binom_tail(m, half_up, m, pair.alpha),
        binom_tail(m, half_up, m, pair.beta),
    )


def majority_step_even(pair: ErrorPair, m: int, tie_prob: float) -> ErrorPair:
    """One level of majority fusion with even fan-in and a random tie-break.

    A tie (exactly m/2 ones) decides 1 with probability tie_prob.  The
    closed interval [0, 1] is accepted here: the endpoints reproduce the
    two deterministic tie directions.
    """
    if m < 2 or m % 2 == 1:
        raise ValueError(f"even majority needs even m >= 2, got {m}")
    if not (0.0 <= tie_prob <= 1.0):
        raise ValueError(f"tie_prob {tie_prob} outside [0, 1]")
    if m == 2 and tie_prob == 0.5:
        # exact fixed point: alpha^2 + (1/2)*2*alpha*(1-alpha) == alpha,
        # preserved bit for bit rather than re-rounded through logs
        return pair
    half = m // 2

    def one_side(err: LogProb, weight: float) -> LogProb:
        tail = binom_tail(m, half + 1, m, err)
        if weight == 0.0:
            return tail
        tie = (
            math.log(weight)
            + math.log(math.comb(m, half))
            + half * err.value
            + half * err.complement().value
        )
        return LogProb(log_sum_exp([tail.value, tie]))

    return ErrorPair(one_side(pair.alpha, tie_prob), one_side(pair.beta, 1.0 - tie_prob))


def alternating_step(pair: ErrorPair, m: int, phase: TiePhase) -> ErrorPair:
    """One level of even-fan-in majority with a fixed tie direction.

    Ties to 1 push the whole tie mass into the false alarm: the outgoing
    alpha is the inclusive tail from m/2 while the miss needs a strict
    zero-majority, tail from m/2 + 1.  Ties to 0 mirrors the two roles.
    """
    if m < 2 or m % 2 == 1:
        raise ValueError(f"alternating majority needs even m >= 2, got {m}")
    half = m // 2
    if phase is TiePhase.TIES_TO_ONE:
        return ErrorPair(
            binom_tail(m, half, m, pair.alpha),
            binom_tail(m, half + 1, m, pair.beta),
        )
    return ErrorPair(
        binom_tail(m, half + 1, m, pair.alpha),
        binom_tail(m, half, m, pair.beta),
    )


def lrt_decision_rule(pair: ErrorPair, priors: Priors, m: int) -> tuple:
    """Decision table of the Bayesian likelihood-ratio test on the count.

    Entry s is True when a node seeing s ones among m messages decides H1:
    (1-beta)^s beta^(m-s) pi1 >= alpha^s (1-alpha)^(m-s) pi0, with ties
    sent to H1.  A tie means the two sides agree to within 1e-9 relative,
    so that inputs whose posteriors are equal in exact arithmetic land on
    the same side no matter how the comparison is rounded.  Degenerate
    incoming errors are rejected because the likelihood ratio is then 0
    or infinite.
    """
    priors.require_positive()
    if m < 2:
        raise ValueError(f"fusion needs m >= 2, got {m}")
    la, lb = pair.alpha.value, pair.beta.value
    if la == LOG_ZERO or la == 0.0 or lb == LOG_ZERO or lb == 0.0:
        raise ValueError(
            "likelihood-ratio rule undefined for boundary error probabilities"
        )
    l1a = pair.alpha.complement().value
    l1b = pair.beta.complement().value
    lp0, lp1 = math.log(priors.pi0), math.log(priors.pi1)
    table = []
    for s in range(m + 1):
        h1_side = s * l1b + (m - s) * lb + lp1
        h0_side = s * la + (m - s) * l1a + lp0
        slack = 1e-9 * max(1.0, abs(h1_side), abs(h0_side))
        table.append(h1_side >= h0_side - slack)
    return tuple(table)


def lrt_step(pair: ErrorPair, priors: Priors, m: int) -> ErrorPair:
    """One level of Bayesian likelihood-ratio fusion.

    Applies the decision table to the two conditional count distributions:
    outgoing alpha sums Binom(m, alpha) over counts deciding H1, outgoing
    beta sums Binom(m, 1-beta) over counts deciding H0.
    """
    table = lrt_decision_rule(pair, priors, m)
    la, lb = pair.alpha.value, pair.beta.value
    l1a = pair.alpha.complement().value
    l1b = pair.beta.complement().value
    alpha_terms = []
    beta_terms = []
    for s in range(m + 1):
        lc = math.log(math.comb(m, s)) if 0 < s < m else 0.0
        if table[s]:
            alpha_terms.append(lc + s * la + (m - s) * l1a)
        else:
            beta_terms.append(lc + s * l1b + (m - s) * lb)
    return ErrorPair(LogProb(log_sum_exp(alpha_terms)), LogProb(log_sum_exp(beta_terms)))


def apply_rule(pair: ErrorPair, rule: FusionRule) -> ErrorPair:
    """Dispatch one fusion level for any binary-output rule."""
    if isinstance(rule, MajorityOdd):
        return majority_step_odd(pair, rule.m)
    if isinstance(rule, MajorityEven):
        return majority_step_even(pair, rule.m, rule.tie_prob)
    if isinstance(rule, AlternatingMajority):
        return alternating_step(pair, rule.m, rule.phase)
    if isinstance(rule, BayesianLRT):
        return lrt_step(pair, rule.priors, rule.m)
    if isinstance(rule, Summation):
        raise ValueError("summation passes counts upward; it has no binary step")
    raise TypeError(f"not a fusion rule: {rule!r}")


def majority_rule(m: int, tie_prob: float = 0.5) -> FusionRule:
    """The parity-appropriate majority rule for fan-in m."""
    if m % 2 == 1:
        return MajorityOdd(m)
    return MajorityEven(m, tie_prob)


def alternating_phases(height: int, first: TiePhase = TiePhase.TIES_TO_ONE) -> list:
    """Tie directions for levels 1..height, flipping at every level."""
    phases = []
    phase = first
    for _ in range(height):
        phases.append(phase)
        phase = phase.flipped()
    return phases


def total_error(pair: ErrorPair, priors: Priors) -> LogProb:
    """Prior-weighted total error pi0*alpha + pi1*beta, in log domain."""
    terms = []
    if priors.pi0 > 0.0:
        terms.append(math.log(priors.pi0) + pair.alpha.value)
    if priors.pi1 > 0.0:
        terms.append(math.log(priors.pi1) + pair.beta.value)
    return LogProb(log_sum_exp(terms))


@dataclass(frozen=True)
class LevelTrace:
    """Per-level error evolution of one schedule of fusion rules.

    pairs[k] is the error pair after k levels (pairs[0] is the leaf
    pair), rules[k-1] produced pairs[k], and totals[k] is the
    prior-weighted total error at level k.
    """

    pairs: tuple
    rules: tuple
    totals: tuple
    priors: Priors

    @property
    def height(self) -> int:
        return len(self.rules)

    @property
    def root(self) -> ErrorPair:
        return self.pairs[-1]


def propagate(pair0: ErrorPair, schedule: Sequence[FusionRule], priors: Priors) -> LevelTrace:
    """Run the error recursion up a tree, one rule per level.

    Raises the underlying step error with the failing level attached.
    """
    pairs = [pair0]
    totals = [total_error(pair0, priors)]
    for k, rule in enumerate(schedule, start=1):
        try:
            nxt = apply_rule(pairs[-1], rule)
        except ValueError as err:
            raise ValueError(f"level {k}: {err}") from err
        pairs.append(nxt)
        totals.append(total_error(nxt, priors))
    return LevelTrace(tuple(pairs), tuple(schedule), tuple(totals), priors)
