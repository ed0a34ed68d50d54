"""Analysis of finite MDPs with multiple long-run average rewards.

The package decides achievability of threshold vectors under
expectation and satisfaction semantics, synthesizes witness strategies,
approximates Pareto surfaces on a grid, and verifies every synthesized
strategy with an exact product-chain evaluator. All decisions use
rational arithmetic end to end; floating point only ever appears in the
Monte Carlo simulation harness.
"""

from .expectation import (
    ParetoSample,
    approximate_pareto_expectation,
    build_achievability_system,
    decide_achievable_expectation,
    decide_pareto_point_expectation,
    dominance_maximal,
    synthesize_expectation_strategy,
)
from .graph import (
    EndComponent,
    MarkovChain,
    enumerate_end_components,
    is_single_end_component,
    max_reachability,
    maximal_end_components,
    restrict,
)
from .model import (
    Mdp,
    ModelError,
    RewardModel,
    format_vector,
    load_model,
    parse_model,
    parse_vector,
    serialize_model,
    validate,
)
from .rationals import RationalSyntaxError, format_rational, parse_rational, rat
from .satisfaction import (
    SatisfactionParetoSample,
    approximate_pareto_satisfaction,
    build_phase_schedule,
    decide_achievable_satisfaction,
    decide_pareto_point_satisfaction,
    is_good_mec,
    synthesize_satisfaction_strategy,
)
from .strategy import (
    MemorylessStrategy,
    Phase,
    PhaseSchedule,
    StochasticUpdateStrategy,
    StrategyError,
    load_strategy,
    memoryless_from_frequencies,
    product_chain,
    strategy_from_json,
    strategy_to_json,
    validate_strategy,
)
from .verify import (
    EvaluationReport,
    SimulationResult,
    chain_absorption,
    evaluate,
    exact_satisfaction_probability,
    reach_probability,
    simulate,
    stationary_distribution,
)

__version__ = "0.1.0"

__all__ = [
    "EndComponent",
    "EvaluationReport",
    "MarkovChain",
    "Mdp",
    "MemorylessStrategy",
    "ModelError",
    "ParetoSample",
    "Phase",
    "PhaseSchedule",
    "RationalSyntaxError",
    "RewardModel",
    "SatisfactionParetoSample",
    "SimulationResult",
    "StochasticUpdateStrategy",
    "StrategyError",
    "approximate_pareto_expectation",
    "approximate_pareto_satisfaction",
    "build_achievability_system",
    "build_phase_schedule",
    "chain_absorption",
    "decide_achievable_expectation",
    "decide_achievable_satisfaction",
    "decide_pareto_point_expectation",
    "decide_pareto_point_satisfaction",
    "dominance_maximal",
    "enumerate_end_components",
    "evaluate",
    "exact_satisfaction_probability",
    "format_rational",
    "format_vector",
    "is_good_mec",
    "is_single_end_component",
    "load_model",
    "load_strategy",
    "max_reachability",
    "maximal_end_components",
    "memoryless_from_frequencies",
    "parse_model",
    "parse_rational",
    "parse_vector",
    "product_chain",
    "rat",
    "reach_probability",
    "restrict",
    "serialize_model",
    "simulate",
    "stationary_distribution",
    "strategy_from_json",
    "strategy_to_json",
    "synthesize_expectation_strategy",
    "synthesize_satisfaction_strategy",
    "validate",
    "validate_strategy",
]
