"""Brute-force single-level oracles.

Everything here deliberately avoids the closed-form binomial recursions
of the kernel: error probabilities are obtained by enumerating all 2^m
child-message vectors and summing their probabilities in linear domain
with compensated summation.  Slow, simple, and independent, which is
the point; the kernel is tested against these functions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

from .kernel import ErrorPair, Priors

__all__ = [
    "VectorRule",
    "majority_vector_rule",
    "count_vector_rule",
    "enumerate_step",
    "optimal_step",
]

_MAX_FANIN = 20  # 2^20 vectors; beyond this enumeration is pointless


@dataclass(frozen=True)
class VectorRule:
    """A black-box fusion rule on raw message vectors.

    decide maps an m-tuple of bits to the probability of outputting 1,
    so deterministic rules return 0.0 or 1.0 and randomized tie-breaks
    return the tie weight.
    """

    m: int
    decide: Callable[[tuple], float]


def majority_vector_rule(m: int, tie_weight: float = 0.5) -> VectorRule:
    """Count-the-ones majority.  For even m a tie outputs 1 with
    probability tie_weight; 1.0 and 0.0 give the deterministic phases."""

    def decide(vector: tuple) -> float:
        ones = sum(vector)
        zeros = m - ones
        if ones > zeros:
            return 1.0
        if ones < zeros:
            return 0.0
        return tie_weight

    return VectorRule(m, decide)


def count_vector_rule(m: int, table) -> VectorRule:
    """Rule that looks up P(output 1) by the number of ones in the vector."""
    probs = tuple(float(x) for x in table)
    if len(probs) != m + 1:
        raise ValueError(f"need {m + 1} entries for fan-in {m}, got {len(probs)}")
    return VectorRule(m, lambda vector: probs[sum(vector)])


@lru_cache(maxsize=32)
def _vectors(m: int):
    """All m-bit vectors with their popcounts, lowest bit = first message."""
    out = []
    for code in range(1 << m):
        vec = tuple((code >> t) & 1 for t in range(m))
        out.append((vec, sum(vec)))
    return out


def _check_fanin(m: int) -> None:
    if not 2 <= m <= _MAX_FANIN:
        raise ValueError(f"enumeration supports 2 <= m <= {_MAX_FANIN}, got {m}")


def _pow_tables(p: float, m: int):
    """p^s and (1-p)^s for s = 0..m."""
    direct = [1.0]
    inverse = [1.0]
    for _ in range(m):
        direct.append(direct[-1] * p)
        inverse.append(inverse[-1] * (1.0 - p))
    return direct, inverse


def enumerate_step(pair: ErrorPair, m: int, rule: VectorRule) -> ErrorPair:
    """Exact one-level error pair of an arbitrary vector rule.

    alpha' = sum over vectors of P(v | H0) * decide(v)
    beta'  = sum over vectors of P(v | H1) * (1 - decide(v))

    where P(v | H0) makes each bit Bernoulli(alpha) and P(v | H1) each
    bit Bernoulli(1 - beta), independently.
    """
    _check_fanin(m)
    if rule.m != m:
        raise ValueError(f"rule fan-in {rule.m} does not match m={m}")
    a = pair.alpha.linear
    b = pair.beta.linear
    a_pow, a_comp = _pow_tables(a, m)
    # under H1 a bit is 1 w.p. 1-beta, so "ones" carry 1-beta factors;
    # powering b itself (not 1-(1-b)) keeps exact ties exactly tied
    b_pow, b_comp = _pow_tables(b, m)
    alpha_terms = []
    beta_terms = []
    for vec, ones in _vectors(m):
        d = rule.decide(vec)
        if d < 0.0 or d > 1.0:
            raise ValueError(f"decide({vec}) = {d} outside [0, 1]")
        if d > 0.0:
            alpha_terms.append(d * a_pow[ones] * a_comp[m - ones])
        if d < 1.0:
            beta_terms.append((1.0 - d) * b_comp[ones] * b_pow[m - ones])
    return ErrorPair.from_linear(
        min(math.fsum(alpha_terms), 1.0),
        min(math.fsum(beta_terms), 1.0),
    )


def optimal_step(pair: ErrorPair, priors: Priors, m: int) -> ErrorPair:
    """Error pair of the best possible fusion rule, found by brute force.

    Per vector, decide the hypothesis with the larger posterior mass
    pi_i * P(v | Hi), ties to H1.  Masses within 1e-9 relative count as
    tied, the same indifference convention as the likelihood-ratio rule,
    so the two routes agree at exact-arithmetic ties however the float
    products round.  This is the exact one-level optimum, so it doubles
    as an independent check of the likelihood-ratio step.
    """
    _check_fanin(m)
    priors.require_positive()
    a = pair.alpha.linear
    b = pair.beta.linear
    a_pow, a_comp = _pow_tables(a, m)
    b_pow, b_comp = _pow_tables(b, m)
    alpha_terms = []
    beta_terms = []
    for vec, ones in _vectors(m):
        p0 = a_pow[ones] * a_comp[m - ones]
        p1 = b_comp[ones] * b_pow[m - ones]
        mass0 = priors.pi0 * p0
        mass1 = priors.pi1 * p1
        if mass1 >= mass0 - 1e-9 * max(mass0, mass1):
            alpha_terms.append(p0)
        else:
            beta_terms.append(p1)
    return ErrorPair.from_linear(
        min(math.fsum(alpha_terms), 1.0),
        min(math.fsum(beta_terms), 1.0),
    )
