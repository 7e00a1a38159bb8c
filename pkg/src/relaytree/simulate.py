"""Monte Carlo corroboration of the analytic recursions.

Simulates the actual message-passing tree: leaves draw Bernoulli bits
under the chosen hypothesis, interior nodes apply their fusion rule,
and the root's mistakes are counted.  Randomness is counter-based: node
j's stream is Philox keyed by (seed, j) and trial i reads position i of
it, so results are bit-for-bit reproducible no matter how trials are
chunked or parallelized, and a tie-break at one node never perturbs
another node's draws.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .alphabet import TreeSpec
from .kernel import (
    AlternatingMajority,
    BayesianLRT,
    ErrorPair,
    FusionRule,
    MajorityEven,
    MajorityOdd,
    Summation,
    TiePhase,
    apply_rule,
    lrt_decision_rule,
)

__all__ = [
    "Hypothesis",
    "SimConfig",
    "SimResult",
    "ComparisonReport",
    "DEFAULT_BUDGET",
    "simulate",
    "simulate_alphabet",
    "reduced_root_pair",
    "compare_to_analytic",
]

DEFAULT_BUDGET = 10**10  # leaf samples per call before refusing


class Hypothesis(enum.Enum):
    H0 = "h0"
    H1 = "h1"


@dataclass(frozen=True)
class SimConfig:
    """One simulation request.

    The schedule names one rule per level, bottom up.  For d > 2 the
    non-deciding levels must be Summation and every k0-th level carries
    a binary rule over the accumulated count, fan-in m^k0.
    """

    spec: TreeSpec
    schedule: tuple
    leaf_pair: ErrorPair
    trials: int
    seed: int
    hypothesis: Hypothesis

    def __post_init__(self):
        object.__setattr__(self, "schedule", tuple(self.schedule))
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be a uint64, got {self.seed}")
        if len(self.schedule) != self.spec.height:
            raise ValueError(
                f"schedule has {len(self.schedule)} rules for height "
                f"{self.spec.height}"
            )
        if self.spec.d > 2 and self.spec.height % self.spec.k0 != 0:
            raise ValueError(
                f"height {self.spec.height} is not a multiple of "
                f"k0={self.spec.k0}"
            )
        m_eff = self.spec.m**self.spec.k0
        for level, rule in enumerate(self.schedule, start=1):
            if level % self.spec.k0 == 0:
                if isinstance(rule, Summation):
                    raise ValueError(
                        f"level {level} must decide, not sum (k0={self.spec.k0})"
                    )
                if rule.m != m_eff:
                    raise ValueError(
                        f"deciding rule at level {level} needs fan-in "
                        f"{m_eff}, got {rule.m}"
                    )
            elif not isinstance(rule, Summation):
                raise ValueError(
                    f"level {level} must be a Summation for alphabet "
                    f"d={self.spec.d} (k0={self.spec.k0})"
                )

    @property
    def boundary_rules(self) -> tuple:
        """The deciding rules, i.e. the schedule of the reduced binary tree."""
        return tuple(
            rule
            for level, rule in enumerate(self.schedule, start=1)
            if level % self.spec.k0 == 0
        )


@dataclass(frozen=True)
class SimResult:
    error_count: int
    trials: int
    estimate: float
    ci_halfwidth_3sigma: float


@dataclass(frozen=True)
class ComparisonReport:
    """Simulation vs. closed form; flagged when |z| > 4."""

    result: SimResult
    analytic: float
    z_score: float
    flagged: bool


def _node_stream(seed: int, node_uid: int, start: int) -> np.random.Generator:
    """Node node_uid's uniform stream positioned at trial index start.

    Philox emits 4 doubles per counter block, so chunk starts are kept
    at multiples of 4 and advance() skips whole blocks.
    """
    bg = np.random.Philox(key=np.array([seed, node_uid], dtype=np.uint64))
    if start:
        bg.advance(start // 4)
    return np.random.Generator(bg)


def _decide(counts: np.ndarray, rule: FusionRule, tie_u: Optional[np.ndarray]) -> np.ndarray:
    """Apply a binary rule to per-node one-counts, vectorized over trials."""
    if isinstance(rule, MajorityOdd):
        return (counts >= (rule.m + 1) // 2).astype(np.uint8)
    if isinstance(rule, MajorityEven):
        half = rule.m // 2
        out = counts > half
        ties = counts == half
        if np.any(ties):
            out = out | (ties & (tie_u < rule.tie_prob))
        return out.astype(np.uint8)
    if isinstance(rule, AlternatingMajority):
        half = rule.m // 2
        threshold = half if rule.phase is TiePhase.TIES_TO_ONE else half + 1
        return (counts >= threshold).astype(np.uint8)
    raise TypeError(f"no count decision for rule {rule!r}")


def _run(config: SimConfig, budget: int, chunk: Optional[int]) -> SimResult:
    spec = config.spec
    n_leaves = spec.n_leaves
    required = config.trials * n_leaves
    if required > budget:
        raise ValueError(
            f"simulation needs {required} leaf samples "
            f"({config.trials} trials x {n_leaves} leaves) but the budget "
            f"is {budget}; pass budget={required} or more to allow it"
        )

    if config.hypothesis is Hypothesis.H0:
        p_one = config.leaf_pair.alpha.linear
        error_value = 1
    else:
        p_one = -math.expm1(config.leaf_pair.beta.value)  # 1 - beta, stable
        error_value = 0

    if chunk is None:
        chunk = max(1, 4_000_000 // n_leaves)
    chunk = max(4, (chunk + 3) // 4 * 4)  # keep chunk starts block-aligned

    # precompute decision tables for likelihood-ratio levels: the rule at
    # a deciding level sees messages whose error pair is the reduced
    # tree's pair below that level
    tables = {}
    reduced_pair = config.leaf_pair
    for level, rule in enumerate(config.schedule, start=1):
        if isinstance(rule, Summation):
            continue
        if isinstance(rule, BayesianLRT):
            tables[level] = np.array(
                lrt_decision_rule(reduced_pair, rule.priors, rule.m), dtype=bool
            )
        reduced_pair = apply_rule(reduced_pair, rule)

    # node uids: leaves first, then each level in order
    level_uid_base = [0]
    width = n_leaves
    for _ in config.schedule:
        level_uid_base.append(level_uid_base[-1] + width)
        width //= spec.m

    error_count = 0
    start = 0
    while start < config.trials:
        cs = min(chunk, config.trials - start)
        values = np.empty((cs, n_leaves), dtype=np.int64)
        for j in range(n_leaves):
            u = _node_stream(config.seed, j, start).random(cs)
            values[:, j] = u < p_one
        width = n_leaves
        for level, rule in enumerate(config.schedule, start=1):
            nodes = width // spec.m
            counts = values.reshape(cs, nodes, spec.m).sum(axis=2)
            if isinstance(rule, Summation):
                values = counts
            elif isinstance(rule, BayesianLRT):
                values = tables[level][counts].astype(np.int64)
            else:
                tie_u = None
                if isinstance(rule, MajorityEven):
                    base = level_uid_base[level]
                    tie_u = np.empty((cs, nodes))
                    for j in range(nodes):
                        tie_u[:, j] = _node_stream(config.seed, base + j, start).random(cs)
                values = _decide(counts, rule, tie_u).astype(np.int64)
            width = nodes
        error_count += int(np.count_nonzero(values[:, 0] == error_value))
        start += cs

    estimate = error_count / config.trials
    ci = 3.0 * math.sqrt(estimate * (1.0 - estimate) / config.trials)
    return SimResult(error_count, config.trials, estimate, ci)


def simulate(config: SimConfig, *, budget: int = DEFAULT_BUDGET,
             chunk: Optional[int] = None) -> SimResult:
    """Simulate a single-bit-message tree (d = 2)."""
    if config.spec.d != 2:
        raise ValueError(
            f"simulate is for binary messages; spec has d={config.spec.d}, "
            f"use simulate_alphabet"
        )
    return _run(config, budget, chunk)


def simulate_alphabet(config: SimConfig, *, budget: int = DEFAULT_BUDGET,
                      chunk: Optional[int] = None) -> SimResult:
    """Simulate a count-forwarding tree: exact sums travel upward for
    k0 - 1 levels, a binary rule decides at every k0-th level."""
    return _run(config, budget, chunk)


def reduced_root_pair(config: SimConfig) -> ErrorPair:
    """Root error pair predicted by the closed-form recursion over the
    deciding levels (the reduced binary tree)."""
    pair = config.leaf_pair
    for rule in config.boundary_rules:
        pair = apply_rule(pair, rule)
    return pair


def compare_to_analytic(config: SimConfig, *, budget: int = DEFAULT_BUDGET,
                        chunk: Optional[int] = None) -> ComparisonReport:
    """Run the simulation and score it against the closed form.

    z is the error-count deviation in units of the binomial standard
    deviation implied by the analytic probability.  When that deviation
    is zero the z-score is 0 for exact agreement and +/-inf otherwise.
    """
    result = _run(config, budget, chunk)
    pair = reduced_root_pair(config)
    analytic = (
        pair.alpha.linear
        if config.hypothesis is Hypothesis.H0
        else pair.beta.linear
    )
    sd = math.sqrt(analytic * (1.0 - analytic) / config.trials)
    if sd == 0.0:
        z = 0.0 if result.estimate == analytic else math.copysign(
            math.inf, result.estimate - analytic
        )
    else:
        z = (result.estimate - analytic) / sd
    return ComparisonReport(result, analytic, z, abs(z) > 4.0)
