"""Monte Carlo cross-checks of the closed-form recursion.

Runs here are deliberately small; the statistically heavy agreement
matrix lives in the verify suite and the acceptance tests.
"""

import math

import pytest

from relaytree.alphabet import TreeSpec, alphabet_schedule
from relaytree.kernel import (
    AlternatingMajority,
    BayesianLRT,
    ErrorPair,
    MajorityEven,
    MajorityOdd,
    Priors,
    Summation,
    alternating_phases,
    majority_step_even,
)
from relaytree.simulate import (
    DEFAULT_BUDGET,
    Hypothesis,
    SimConfig,
    compare_to_analytic,
    reduced_root_pair,
    simulate,
    simulate_alphabet,
)


def binary_config(m, height, rule, a=0.1, b=0.1, trials=20000, seed=7,
                  hyp=Hypothesis.H0):
    return SimConfig(
        spec=TreeSpec(m, height, 2),
        schedule=[rule] * height,
        leaf_pair=ErrorPair.from_linear(a, b),
        trials=trials,
        seed=seed,
        hypothesis=hyp,
    )


class TestSimConfig:
    def test_rejects_bad_scalars(self):
        with pytest.raises(ValueError):
            binary_config(3, 2, MajorityOdd(3), trials=0)
        with pytest.raises(ValueError):
            binary_config(3, 2, MajorityOdd(3), seed=-1)
        with pytest.raises(ValueError):
            binary_config(3, 2, MajorityOdd(3), seed=2**64)

    def test_rejects_wrong_schedule_length(self):
        with pytest.raises(ValueError, match="schedule has 1"):
            SimConfig(
                spec=TreeSpec(3, 2, 2),
                schedule=[MajorityOdd(3)],
                leaf_pair=ErrorPair.from_linear(0.1, 0.1),
                trials=10,
                seed=1,
                hypothesis=Hypothesis.H0,
            )

    def test_alphabet_structure_enforced(self):
        spec = TreeSpec(2, 2, 3)  # k0 = 2: level 1 sums, level 2 decides
        good = [Summation(2), MajorityEven(4)]
        SimConfig(spec, good, ErrorPair.from_linear(0.1, 0.1), 10, 1, Hypothesis.H0)
        with pytest.raises(ValueError, match="must decide"):
            SimConfig(
                spec,
                [Summation(2), Summation(4)],
                ErrorPair.from_linear(0.1, 0.1), 10, 1, Hypothesis.H0,
            )
        with pytest.raises(ValueError, match="must be a Summation"):
            SimConfig(
                spec,
                [MajorityEven(2), MajorityEven(4)],
                ErrorPair.from_linear(0.1, 0.1), 10, 1, Hypothesis.H0,
            )
        with pytest.raises(ValueError, match="fan-in"):
            SimConfig(
                spec,
                [Summation(2), MajorityEven(2)],
                ErrorPair.from_linear(0.1, 0.1), 10, 1, Hypothesis.H0,
            )
        with pytest.raises(ValueError, match="multiple"):
            SimConfig(
                TreeSpec(2, 3, 3),
                [Summation(2), MajorityEven(4), Summation(2)],
                ErrorPair.from_linear(0.1, 0.1), 10, 1, Hypothesis.H0,
            )

    def test_boundary_rules(self):
        spec = TreeSpec(2, 4, 3)
        rules = [MajorityEven(4), AlternatingMajority(4)]
        config = SimConfig(
            spec,
            alphabet_schedule(spec, rules),
            ErrorPair.from_linear(0.1, 0.1), 10, 1, Hypothesis.H0,
        )
        assert config.boundary_rules == tuple(rules)


class TestDeterminism:
    def test_same_seed_same_count(self):
        c = binary_config(3, 2, MajorityOdd(3))
        assert simulate(c).error_count == simulate(c).error_count

    def test_chunking_is_invisible(self):
        c = binary_config(3, 2, MajorityOdd(3))
        want = simulate(c).error_count
        for chunk in (4, 52, 1000, 7):  # 7 rounds up to 8 internally
            assert simulate(c, chunk=chunk).error_count == want

    def test_chunking_is_invisible_with_tie_draws(self):
        c = binary_config(4, 2, MajorityEven(4))
        want = simulate(c).error_count
        for chunk in (52, 1000):
            assert simulate(c, chunk=chunk).error_count == want

    def test_different_seed_differs(self):
        base = binary_config(3, 2, MajorityOdd(3))
        other = binary_config(3, 2, MajorityOdd(3), seed=8)
        assert simulate(base).error_count != simulate(other).error_count


class TestBudget:
    def test_refuses_oversized_run(self):
        c = binary_config(5, 6, MajorityOdd(5), trials=10**9)
        with pytest.raises(ValueError, match="budget"):
            simulate(c)

    def test_explicit_budget_allows(self):
        c = binary_config(3, 1, MajorityOdd(3), trials=50)
        assert simulate(c, budget=150).trials == 50
        with pytest.raises(ValueError):
            simulate(c, budget=149)

    def test_default_budget_value(self):
        assert DEFAULT_BUDGET == 10**10


class TestResults:
    def test_estimate_and_ci_consistent(self):
        r = simulate(binary_config(3, 2, MajorityOdd(3)))
        assert r.estimate == r.error_count / r.trials
        want_ci = 3 * math.sqrt(r.estimate * (1 - r.estimate) / r.trials)
        assert r.ci_halfwidth_3sigma == pytest.approx(want_ci, rel=1e-12)

    def test_simulate_rejects_wide_alphabet(self):
        spec = TreeSpec(2, 2, 3)
        c = SimConfig(
            spec,
            alphabet_schedule(spec, [MajorityEven(4)]),
            ErrorPair.from_linear(0.1, 0.1), 10, 1, Hypothesis.H0,
        )
        with pytest.raises(ValueError, match="simulate_alphabet"):
            simulate(c)

    def test_reduced_root_pair(self):
        spec = TreeSpec(2, 2, 3)
        c = SimConfig(
            spec,
            alphabet_schedule(spec, [MajorityEven(4)]),
            ErrorPair.from_linear(0.1, 0.2), 10, 1, Hypothesis.H0,
        )
        got = reduced_root_pair(c)
        want = majority_step_even(ErrorPair.from_linear(0.1, 0.2), 4, 0.5)
        assert got.alpha.value == want.alpha.value
        assert got.beta.value == want.beta.value


class TestAgreement:
    def test_h0_majority(self):
        report = compare_to_analytic(
            binary_config(3, 2, MajorityOdd(3), trials=200000)
        )
        a1 = 3 * 0.01 * 0.9 + 0.001
        want = 3 * a1**2 * (1 - a1) + a1**3
        assert report.analytic == pytest.approx(want, rel=1e-12)
        assert abs(report.z_score) <= 4.0
        assert not report.flagged

    def test_h1_alternating(self):
        report = compare_to_analytic(
            binary_config(
                2, 2, AlternatingMajority(2), a=0.1, b=0.3,
                trials=200000, hyp=Hypothesis.H1,
            )
        )
        assert abs(report.z_score) <= 4.0

    def test_lrt_level(self):
        priors = Priors(0.3, 0.7)
        c = SimConfig(
            spec=TreeSpec(3, 1, 2),
            schedule=[BayesianLRT(3, priors)],
            leaf_pair=ErrorPair.from_linear(0.05, 0.2),
            trials=200000,
            seed=7,
            hypothesis=Hypothesis.H1,
        )
        report = compare_to_analytic(c)
        assert abs(report.z_score) <= 4.0

    def test_alternating_schedule_flips_phase(self):
        # level 1 ties to one, level 2 ties to zero
        phases = alternating_phases(2)
        sched = [AlternatingMajority(2, phase=p) for p in phases]
        c = SimConfig(
            spec=TreeSpec(2, 2, 2),
            schedule=sched,
            leaf_pair=ErrorPair.from_linear(0.1, 0.1),
            trials=200000,
            seed=11,
            hypothesis=Hypothesis.H0,
        )
        report = compare_to_analytic(c)
        assert abs(report.z_score) <= 4.0

    def test_degenerate_sigma_gives_zero_z(self):
        c = binary_config(3, 1, MajorityOdd(3), a=0.0, b=0.5, trials=1000)
        report = compare_to_analytic(c)
        assert report.analytic == 0.0
        assert report.result.estimate == 0.0
        assert report.z_score == 0.0
        assert not report.flagged


class TestAlphabetEquivalence:
    def test_wide_alphabet_matches_reduced_binary(self):
        # (2, d=3) with k0 = 2 collapses to fan-in 4; both simulations
        # must sit within 4 sigma of the same closed form
        leaf = ErrorPair.from_linear(0.1, 0.1)
        spec = TreeSpec(2, 2, 3)
        wide = SimConfig(
            spec,
            alphabet_schedule(spec, [MajorityEven(4)]),
            leaf, 200000, 13, Hypothesis.H0,
        )
        narrow = SimConfig(
            TreeSpec(4, 1, 2),
            [MajorityEven(4)],
            leaf, 200000, 13, Hypothesis.H0,
        )
        want = majority_step_even(leaf, 4, 0.5).alpha_linear
        wide_report = compare_to_analytic(wide)
        narrow_report = compare_to_analytic(narrow)
        assert wide_report.analytic == pytest.approx(want, rel=1e-12)
        assert narrow_report.analytic == pytest.approx(want, rel=1e-12)
        assert abs(wide_report.z_score) <= 4.0
        assert abs(narrow_report.z_score) <= 4.0

    def test_simulate_alphabet_handles_binary_too(self):
        c = binary_config(3, 1, MajorityOdd(3), trials=100)
        assert simulate_alphabet(c).trials == 100
