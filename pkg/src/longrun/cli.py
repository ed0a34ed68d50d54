"""Command-line front end for batch analysis.

Every subcommand loads a model file first and exits 2 on any parse or
validation failure, with a diagnostic on stderr. Decision subcommands
exit 0 for yes and 1 for no. Structured output is JSON; --csv switches
the Pareto and trajectory emissions. Identical invocations produce
byte-identical output, seeds included.
"""

from __future__ import annotations

import argparse
import json
import sys

from .expectation import (
    approximate_pareto_expectation,
    decide_achievable_expectation,
    decide_pareto_point_expectation,
    synthesize_expectation_strategy,
)
from .graph import maximal_end_components
from .model import load_model, parse_vector
from .rationals import format_rational, parse_rational
from .satisfaction import (
    approximate_pareto_satisfaction,
    decide_achievable_satisfaction,
    decide_pareto_point_satisfaction,
    synthesize_satisfaction_strategy,
)
from .strategy import load_strategy, strategy_to_json, validate_strategy
from .verify import evaluate, simulate

DEFAULT_EPSILON = "1/100"
DEFAULT_BUDGET = 10**6


def _emit(doc) -> None:
    print(json.dumps(doc, indent=2))


def _write_output(text: str, path) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _load_strategy_checked(mdp, path):
    strategy = load_strategy(path)
    problems = validate_strategy(mdp, strategy)
    if problems:
        raise ValueError("invalid strategy: " + "; ".join(problems))
    return strategy


def _pareto_csv(points, names) -> str:
    """One row per point, exact value and decimal approximation side by
    side for every column."""
    header = []
    for name in names:
        header.append(name)
        header.append(f"{name}_approx")
    lines = [",".join(header)]
    for point in points:
        row = []
        for q in point:
            row.append(format_rational(q))
            row.append(repr(float(q)))
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def _cmd_mecs(args) -> int:
    mdp, _ = load_model(args.model)
    mecs = [
        {
            "states": [mdp.states[s] for s in ec.states],
            "actions": [mdp.actions[a].name for a in ec.actions],
        }
        for ec in maximal_end_components(mdp)
    ]
    _emit({"mecs": mecs})
    return 0


def _cmd_check_exp(args) -> int:
    mdp, rewards = load_model(args.model)
    v = parse_vector(args.vector, rewards.dimension)
    ok, x = decide_achievable_expectation(mdp, rewards, v)
    if not ok:
        _emit({"achievable": False})
        return 1
    _emit(
        {
            "achievable": True,
            "frequencies": {
                act.name: format_rational(q) for act, q in zip(mdp.actions, x)
            },
        }
    )
    return 0


def _cmd_synth_exp(args) -> int:
    mdp, rewards = load_model(args.model)
    v = parse_vector(args.vector, rewards.dimension)
    ok, _ = decide_achievable_expectation(mdp, rewards, v)
    if not ok:
        print("threshold vector is not achievable in expectation", file=sys.stderr)
        return 1
    strategy = synthesize_expectation_strategy(mdp, rewards, v)
    _write_output(strategy_to_json(strategy), args.output)
    return 0


def _cmd_pareto_exp(args) -> int:
    mdp, rewards = load_model(args.model)
    sample = approximate_pareto_expectation(
        mdp, rewards, parse_rational(args.epsilon), budget=args.budget
    )
    if args.csv:
        sys.stdout.write(_pareto_csv(sample.points, list(rewards.names)))
    else:
        _emit(
            {
                "epsilon": format_rational(sample.epsilon),
                "magnitude": format_rational(sample.magnitude),
                "points": [[format_rational(q) for q in p] for p in sample.points],
            }
        )
    return 0


def _cmd_check_sat(args) -> int:
    mdp, rewards = load_model(args.model)
    nu = parse_rational(args.nu)
    v = parse_vector(args.vector, rewards.dimension)
    ok = decide_achievable_satisfaction(mdp, rewards, nu, v)
    _emit({"achievable": ok})
    return 0 if ok else 1


def _cmd_synth_sat(args) -> int:
    mdp, rewards = load_model(args.model)
    nu = parse_rational(args.nu)
    v = parse_vector(args.vector, rewards.dimension)
    if not decide_achievable_satisfaction(mdp, rewards, nu, v):
        print("threshold is not achievable in satisfaction", file=sys.stderr)
        return 1
    strategy = synthesize_satisfaction_strategy(
        mdp, rewards, nu, v, parse_rational(args.epsilon)
    )
    _write_output(strategy_to_json(strategy), args.output)
    return 0


def _cmd_pareto_sat(args) -> int:
    mdp, rewards = load_model(args.model)
    sample = approximate_pareto_satisfaction(
        mdp, rewards, parse_rational(args.epsilon), budget=args.budget
    )
    if args.csv:
        sys.stdout.write(_pareto_csv(sample.points, ["nu"] + list(rewards.names)))
    else:
        _emit(
            {
                "epsilon": format_rational(sample.epsilon),
                "magnitude": format_rational(sample.magnitude),
                "points": [[format_rational(q) for q in p] for p in sample.points],
            }
        )
    return 0


def _cmd_pareto_point_exp(args) -> int:
    mdp, rewards = load_model(args.model)
    v = parse_vector(args.vector, rewards.dimension)
    ok = decide_pareto_point_expectation(mdp, rewards, v)
    _emit({"paretoPoint": ok})
    return 0 if ok else 1


def _cmd_pareto_point_sat(args) -> int:
    mdp, rewards = load_model(args.model)
    nu = parse_rational(args.nu)
    v = parse_vector(args.vector, rewards.dimension)
    ok = decide_pareto_point_satisfaction(mdp, rewards, nu, v)
    _emit({"paretoPoint": ok})
    return 0 if ok else 1


def _cmd_evaluate(args) -> int:
    mdp, rewards = load_model(args.model)
    strategy = _load_strategy_checked(mdp, args.strategy)
    report = evaluate(mdp, rewards, strategy)
    doc = report.to_dict()
    if args.threshold:
        doc["thresholds"] = [
            {
                "vector": [format_rational(q) for q in vec],
                "probability": format_rational(report.satisfaction_probability(vec)),
            }
            for vec in (
                parse_vector(text, rewards.dimension) for text in args.threshold
            )
        ]
    _emit(doc)
    return 0


def _cmd_simulate(args) -> int:
    mdp, rewards = load_model(args.model)
    strategy = _load_strategy_checked(mdp, args.strategy)
    checkpoints = None
    if args.checkpoints is not None:
        checkpoints = [int(c.strip()) for c in args.checkpoints.split(",")]
    result = simulate(
        mdp,
        rewards,
        strategy,
        horizon=args.horizon,
        runs=args.runs,
        seed=args.seed,
        checkpoints=checkpoints,
    )
    if args.csv:
        sys.stdout.write(result.to_csv())
    else:
        _emit(
            {
                "horizon": args.horizon,
                "runs": args.runs,
                "seed": args.seed,
                "rewardNames": result.reward_names,
                "checkpoints": result.checkpoints,
                "empiricalMean": [float(x) for x in result.empirical_mean()],
            }
        )
    return 0


def _add_epsilon(parser, what) -> None:
    parser.add_argument(
        "--epsilon",
        default=DEFAULT_EPSILON,
        help=f"{what} (rational literal, default {DEFAULT_EPSILON})",
    )


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="longrun",
        description="Analyze finite MDPs with multiple long-run average rewards.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("mecs", help="list maximal end components")
    p.add_argument("model")
    p.set_defaults(handler=_cmd_mecs)

    p = sub.add_parser(
        "check-exp", help="decide achievability of an expectation threshold"
    )
    p.add_argument("model")
    p.add_argument("vector", help="comma-separated rational thresholds")
    p.set_defaults(handler=_cmd_check_exp)

    p = sub.add_parser(
        "synth-exp", help="synthesize a strategy for an expectation threshold"
    )
    p.add_argument("model")
    p.add_argument("vector", help="comma-separated rational thresholds")
    p.add_argument("-o", "--output", help="write the strategy JSON here")
    p.set_defaults(handler=_cmd_synth_exp)

    p = sub.add_parser(
        "pareto-exp", help="grid-approximate the expectation Pareto surface"
    )
    p.add_argument("model")
    _add_epsilon(p, "grid spacing")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET,
                   help=f"largest allowed grid size (default {DEFAULT_BUDGET})")
    p.add_argument("--csv", action="store_true", help="emit CSV instead of JSON")
    p.set_defaults(handler=_cmd_pareto_exp)

    p = sub.add_parser(
        "check-sat", help="decide achievability of a satisfaction threshold"
    )
    p.add_argument("model")
    p.add_argument("nu", help="probability threshold (rational literal)")
    p.add_argument("vector", help="comma-separated rational thresholds")
    p.set_defaults(handler=_cmd_check_sat)

    p = sub.add_parser(
        "synth-sat", help="synthesize a strategy for a satisfaction threshold"
    )
    p.add_argument("model")
    p.add_argument("nu", help="probability threshold (rational literal)")
    p.add_argument("vector", help="comma-separated rational thresholds")
    _add_epsilon(p, "threshold slack of the witness")
    p.add_argument("-o", "--output", help="write the strategy JSON here")
    p.set_defaults(handler=_cmd_synth_sat)

    p = sub.add_parser(
        "pareto-sat", help="grid-approximate the satisfaction Pareto surface"
    )
    p.add_argument("model")
    _add_epsilon(p, "grid spacing")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET,
                   help=f"largest allowed grid size (default {DEFAULT_BUDGET})")
    p.add_argument("--csv", action="store_true", help="emit CSV instead of JSON")
    p.set_defaults(handler=_cmd_pareto_sat)

    p = sub.add_parser(
        "pareto-point-exp", help="decide whether a vector is an expectation Pareto point"
    )
    p.add_argument("model")
    p.add_argument("vector", help="comma-separated rational thresholds")
    p.set_defaults(handler=_cmd_pareto_point_exp)

    p = sub.add_parser(
        "pareto-point-sat",
        help="decide whether (nu, vector) is a satisfaction Pareto point",
    )
    p.add_argument("model")
    p.add_argument("nu", help="probability threshold (rational literal)")
    p.add_argument("vector", help="comma-separated rational thresholds")
    p.set_defaults(handler=_cmd_pareto_point_sat)

    p = sub.add_parser("evaluate", help="exact long-run report for a strategy")
    p.add_argument("model")
    p.add_argument("--strategy", required=True, help="strategy JSON file")
    p.add_argument(
        "--threshold",
        action="append",
        help="also report the exact satisfaction probability of this vector"
        " (repeatable)",
    )
    p.set_defaults(handler=_cmd_evaluate)

    p = sub.add_parser("simulate", help="seeded Monte Carlo prefix averages")
    p.add_argument("model")
    p.add_argument("--strategy", required=True, help="strategy JSON file")
    p.add_argument("--horizon", type=int, required=True, help="steps per run")
    p.add_argument("--runs", type=int, default=100, help="number of runs (default 100)")
    p.add_argument("--seed", type=int, default=0, help="PRNG seed (default 0)")
    p.add_argument(
        "--checkpoints",
        help="comma-separated steps at which to record running averages",
    )
    p.add_argument("--csv", action="store_true",
                   help="emit the full trajectory CSV instead of a JSON summary")
    p.set_defaults(handler=_cmd_simulate)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
