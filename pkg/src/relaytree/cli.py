"""Command-line front end.

Subcommands run the error recursion, the exponent and alphabet tables,
the sample-size planner, Monte Carlo simulations, and the verification
suites.  Tables go to standard output as CSV with 12-significant-digit
numerics (the planner emits JSON); diagnostics go to standard error.
Exit codes: 0 success, 1 verification failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from typing import Optional, Sequence

from . import bounds
from .alphabet import TreeSpec, alphabet_schedule, avg_bits, bits_bounds, k0_of, rates_from_k0
from .kernel import (
    AlternatingMajority,
    BayesianLRT,
    ErrorPair,
    MajorityEven,
    MajorityOdd,
    Priors,
    TiePhase,
    alternating_phases,
    majority_rule,
    propagate,
    total_error,
)
from .simulate import DEFAULT_BUDGET, Hypothesis, SimConfig, compare_to_analytic
from .verify import SUITES, run_suites

__all__ = ["run", "main"]


class UsageError(ValueError):
    """Bad flag combination or value; maps to exit code 2."""


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, int):
        return str(x)
    return f"{float(x):.12g}"


def _emit_csv(header, rows) -> None:
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(x) for x in row])


def _probability(name: str, value: float, open_interval: bool = True) -> float:
    if open_interval and not 0.0 < value < 1.0:
        raise UsageError(f"--{name} must be inside (0, 1), got {value}")
    if not open_interval and not 0.0 <= value <= 1.0:
        raise UsageError(f"--{name} must be inside [0, 1], got {value}")
    return value


def _phase_of(tag: str) -> TiePhase:
    return TiePhase.TIES_TO_ONE if tag == "one" else TiePhase.TIES_TO_ZERO


def _rule_schedule(args, m: int, levels: int, priors: Priors) -> list:
    """Build the per-level rule list for --rule/--pb/--phase, enforcing
    flag compatibility."""
    if args.rule == "majority":
        if args.phase is not None:
            raise UsageError("--phase conflicts with --rule majority; "
                             "it selects the alternating tie direction")
        if args.pb is not None:
            if m % 2 == 1:
                raise UsageError(f"--pb conflicts with odd --m {m}; "
                                 "ties need an even fan-in")
            _probability("pb", args.pb, open_interval=False)
        return [majority_rule(m, 0.5 if args.pb is None else args.pb)] * levels
    if args.rule == "alternating":
        if args.pb is not None:
            raise UsageError("--pb conflicts with --rule alternating; "
                             "its tie direction is deterministic")
        if m % 2 == 1:
            raise UsageError(f"--rule alternating conflicts with odd --m {m}")
        first = _phase_of(args.phase or "one")
        return [AlternatingMajority(m, ph) for ph in alternating_phases(levels, first)]
    # likelihood-ratio rule
    if args.pb is not None:
        raise UsageError("--pb conflicts with --rule lrt; the test has no ties")
    if args.phase is not None:
        raise UsageError("--phase conflicts with --rule lrt")
    if not 0.0 < priors.pi0 < 1.0:
        raise UsageError(f"--rule lrt needs 0 < --pi0 < 1, got {priors.pi0}")
    return [BayesianLRT(m, priors)] * levels


def _cmd_recurse(args) -> int:
    m = args.m
    if m < 2:
        raise UsageError(f"--m must be >= 2, got {m}")
    if args.levels < 0:
        raise UsageError(f"--levels must be >= 0, got {args.levels}")
    a0 = _probability("alpha0", args.alpha0)
    b0 = _probability("beta0", args.beta0)
    pi0 = _probability("pi0", args.pi0, open_interval=False)
    priors = Priors(pi0, 1.0 - pi0)
    schedule = _rule_schedule(args, m, args.levels, priors)
    trace = propagate(ErrorPair.from_linear(a0, b0), schedule, priors)
    leaf_total = total_error(trace.pairs[0], priors).linear

    rows = []
    for k, (pair, tot) in enumerate(zip(trace.pairs, trace.totals)):
        thm_lower: Optional[float] = None
        thm_upper: Optional[float] = None
        if args.rule == "majority" and (args.pb is None or args.pb == 0.5):
            sw = bounds.total_bounds(
                a0, b0, priors, m, m**k, bounds.RateKind.MAJORITY_RANDOM
            )
            thm_lower, thm_upper = sw.lower, sw.upper
        elif args.rule == "alternating" and k % 2 == 0 and m >= 4:
            # no columns at m=2: whichever tie direction comes first, one
            # of alpha/beta follows the order that escapes the even-height
            # constant, so the total-error sandwich does not hold there
            sw = bounds.total_bounds(
                a0, b0, priors, m, m**k, bounds.RateKind.ALTERNATING
            )
            thm_lower, thm_upper = sw.lower, sw.upper
        elif args.rule == "lrt":
            thm_lower = bounds.lrt_lower_bound(leaf_total, priors, m, m**k)
        rows.append(
            [
                k,
                pair.alpha_linear,
                pair.beta_linear,
                pair.alpha.log2_inverse,
                pair.beta.log2_inverse,
                tot.log2_inverse,
                thm_lower,
                thm_upper,
            ]
        )
    _emit_csv(
        [
            "level",
            "alpha",
            "beta",
            "alpha_log2inv",
            "beta_log2inv",
            "total_log2inv",
            "thm_lower",
            "thm_upper",
        ],
        rows,
    )
    return 0


def _cmd_simulate(args) -> int:
    if args.m < 2:
        raise UsageError(f"--m must be >= 2, got {args.m}")
    if args.height < 1:
        raise UsageError(f"--height must be >= 1, got {args.height}")
    if args.d < 2:
        raise UsageError(f"--d must be >= 2, got {args.d}")
    a0 = _probability("alpha0", args.alpha0)
    b0 = _probability("beta0", args.beta0)
    pi0 = _probability("pi0", args.pi0, open_interval=False)
    priors = Priors(pi0, 1.0 - pi0)
    spec = TreeSpec(args.m, args.height, args.d)
    if args.height % spec.k0 != 0:
        raise UsageError(
            f"--height {args.height} must be a multiple of k0={spec.k0} "
            f"for --d {args.d}"
        )
    m_eff = args.m**spec.k0
    boundary = _rule_schedule(args, m_eff, args.height // spec.k0, priors)
    schedule = alphabet_schedule(spec, boundary)
    config = SimConfig(
        spec=spec,
        schedule=tuple(schedule),
        leaf_pair=ErrorPair.from_linear(a0, b0),
        trials=args.trials,
        seed=args.seed,
        hypothesis=Hypothesis(args.hypothesis),
    )
    report = compare_to_analytic(config, budget=args.budget)
    if report.flagged:
        print(
            f"warning: |z| = {abs(report.z_score):.2f} > 4 against the "
            f"closed form",
            file=sys.stderr,
        )
    _emit_csv(
        ["estimate", "ci3sigma", "analytic", "zscore"],
        [
            [
                report.result.estimate,
                report.result.ci_halfwidth_3sigma,
                report.analytic,
                report.z_score,
            ]
        ],
    )
    return 0


def _cmd_exponents(args) -> int:
    if args.m_min < 2 or args.m_max > 64 or args.m_min > args.m_max:
        raise UsageError(
            f"need 2 <= --m-min <= --m-max <= 64, got "
            f"({args.m_min}, {args.m_max})"
        )
    rows = [
        [r.m, r.majority_random, r.alternating, r.upper_bound]
        for r in bounds.exponent_table(range(args.m_min, args.m_max + 1))
    ]
    _emit_csv(["m", "majority_random", "alternating", "upper_bound"], rows)
    return 0


def _cmd_alphabet(args) -> int:
    if args.m < 2:
        raise UsageError(f"--m must be >= 2, got {args.m}")
    if args.k0_max is not None:
        if args.d is not None:
            raise UsageError(
                "--d conflicts with --k0-max: the sweep ranges over "
                "counting depths directly"
            )
        if args.k0_max < 1:
            raise UsageError(f"--k0-max must be >= 1, got {args.k0_max}")
        k0_values = range(1, args.k0_max + 1)
    else:
        if args.d is None:
            raise UsageError("alphabet needs --d (single row) or --k0-max (sweep)")
        if args.d < 2:
            raise UsageError(f"--d must be >= 2, got {args.d}")
        k0_values = [k0_of(args.m, args.d)]
    lo, hi = bits_bounds(args.m)
    rows = []
    for k0 in k0_values:
        r = rates_from_k0(args.m, k0)
        rows.append([k0, r.rho, r.varrho, r.sigma, avg_bits(args.m, k0), lo, hi])
    _emit_csv(
        ["k0", "rho", "varrho", "sigma", "avg_bits", "band_lower", "band_upper"],
        rows,
    )
    return 0


def _cmd_samplesize(args) -> int:
    if args.m < 2:
        raise UsageError(f"--m must be >= 2, got {args.m}")
    a0 = _probability("alpha0", args.alpha0)
    b0 = _probability("beta0", args.beta0)
    if not 0.0 < args.epsilon < 1.0:
        raise UsageError(f"--epsilon must be inside (0, 1), got {args.epsilon}")
    res = bounds.sample_size(args.m, a0, b0, args.epsilon)
    json.dump({"n_real": res.n_real, "k": res.k, "n_tree": res.n_tree}, sys.stdout)
    sys.stdout.write("\n")
    return 0


def _cmd_verify(args) -> int:
    names = list(SUITES) if args.suite == "all" else [args.suite]
    failures = run_suites(names)
    if failures:
        print(f"{failures} failure(s)", file=sys.stderr)
        return 1
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="relaytree",
        description="Error evolution, bounds, and simulation for relay-tree "
        "hypothesis testing.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add_rule_flags(p):
        p.add_argument("--rule", choices=["majority", "alternating", "lrt"],
                       default="majority")
        p.add_argument("--pb", type=float, default=None,
                       help="tie probability for even-fan-in majority")
        p.add_argument("--phase", choices=["one", "zero"], default=None,
                       help="first tie direction for the alternating rule")
        p.add_argument("--pi0", type=float, default=0.5)
        p.add_argument("--alpha0", type=float, required=True)
        p.add_argument("--beta0", type=float, required=True)

    p = sub.add_parser("recurse", help="per-level error trace with bounds")
    p.add_argument("--m", type=int, required=True)
    add_rule_flags(p)
    p.add_argument("--levels", type=int, required=True)
    p.set_defaults(func=_cmd_recurse)

    p = sub.add_parser("simulate", help="Monte Carlo check of one tree")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--height", type=int, required=True)
    p.add_argument("--d", type=int, default=2)
    add_rule_flags(p)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--hypothesis", choices=["h0", "h1"], default="h0")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET,
                   help="maximum leaf samples before refusing")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("exponents", help="decay-exponent table")
    p.add_argument("--m-min", type=int, required=True)
    p.add_argument("--m-max", type=int, required=True)
    p.set_defaults(func=_cmd_exponents)

    p = sub.add_parser("alphabet", help="rates and message cost of count forwarding")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--d", type=int, default=None)
    p.add_argument("--k0-max", dest="k0_max", type=int, default=None)
    p.set_defaults(func=_cmd_alphabet)

    p = sub.add_parser("samplesize", help="leaf budget for a target error")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--alpha0", type=float, required=True)
    p.add_argument("--beta0", type=float, required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.set_defaults(func=_cmd_samplesize)

    p = sub.add_parser("verify", help="run the numeric invariant suites")
    p.add_argument("--suite", choices=[*SUITES, "all"], default="all")
    p.set_defaults(func=_cmd_verify)

    return parser


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except ValueError as err:
        # domain rejections (vacuous bounds, bad shapes) are usage errors too
        print(f"error: {err}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
