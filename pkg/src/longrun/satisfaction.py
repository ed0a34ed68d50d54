"""Satisfaction objectives: probability thresholds on long-run rewards.

A strategy satisfies (nu, v) when, with probability at least nu, every
long-run average reward meets its threshold component of v. Whether
that is achievable reduces to reachability of the "good" maximal end
components, the ones that internally support action frequencies whose
mean rewards dominate v. Synthesis trades an epsilon of threshold slack
for a memoryless witness; closing the gap exactly needs unbounded
memory, which the phase schedules at the end of the module realize as
a sequence of memoryless strategies played for sharply growing numbers
of steps.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import lp as lp_mod
from .expectation import dominance_maximal
from .graph import (
    _is_end_component,
    EndComponent,
    bottom_components,
    is_single_end_component,
    max_reachability,
    maximal_end_components,
    restrict,
)
from .model import RewardModel
from .rationals import ONE, ZERO, rat
from .strategy import (
    MemorylessStrategy,
    Phase,
    PhaseSchedule,
    memoryless_from_frequencies,
    product_chain,
)
from .verify import _chain_tables, _substream, stationary_distribution


def _local_program(mdp, rewards, ec: EndComponent, v):
    """Frequency system inside one end component.

    Variables are long-run frequencies of the component's actions;
    constraints are flow invariance at every member state, unit total
    mass, and one reward threshold row per dimension. Returns the
    program and the variable indices aligned with ec.actions.
    """
    prog = lp_mod.LinearProgram()
    xvar = [prog.add_variable(f"x:{mdp.actions[a].name}") for a in ec.actions]
    col = {a: xvar[j] for j, a in enumerate(ec.actions)}
    members = set(ec.actions)
    for s in ec.states:
        coeffs = {}
        for a in mdp.enabled[s]:
            if a in members:
                coeffs[col[a]] = coeffs.get(col[a], ZERO) + ONE
        for a in ec.actions:
            for t, p in mdp.succ[a]:
                if t == s:
                    coeffs[col[a]] = coeffs.get(col[a], ZERO) - p
        prog.add_constraint(coeffs, lp_mod.EQUAL, ZERO)
    prog.add_constraint({x: ONE for x in xvar}, lp_mod.EQUAL, ONE)
    for i in range(rewards.dimension):
        coeffs = {}
        for j, a in enumerate(ec.actions):
            r = rewards.vectors[a][i]
            if r != 0:
                coeffs[xvar[j]] = r
        prog.add_constraint(coeffs, lp_mod.GREATER_EQUAL, rat(v[i]))
    return prog, xvar


def _good_witness(mdp, rewards, ec: EndComponent, v):
    """Frequencies over ec.actions meeting every threshold, or None."""
    prog, xvar = _local_program(mdp, rewards, ec, v)
    outcome = lp_mod.solve_feasible(prog)
    if outcome.status != lp_mod.FEASIBLE:
        return None
    return [outcome.assignment[prog.names[x]] for x in xvar]


def is_good_mec(mdp, rewards, ec: EndComponent, v) -> bool:
    """Can frequencies inside this end component dominate v on average?

    Good components are exactly the places where a run may settle while
    meeting every threshold, so the satisfaction decision below is a
    reachability question about their union. Raises ValueError when
    (states, actions) is not an end component of the model.
    """
    if not _is_end_component(mdp, list(ec.states), list(ec.actions)):
        raise ValueError("not an end component of this model")
    if len(v) != rewards.dimension:
        raise ValueError(
            f"threshold has {len(v)} components, model has {rewards.dimension}"
        )
    return _good_witness(mdp, rewards, ec, v) is not None


def _check_nu(nu):
    nu = rat(nu)
    if not 0 <= nu <= 1:
        raise ValueError(f"probability threshold {nu} is outside [0, 1]")
    return nu


def _reach_value(mdp, union, s0):
    """Maximal probability of reaching a state set; empty set gives 0."""
    if not union:
        return ZERO
    values, _ = max_reachability(mdp, sorted(union))
    return values[s0]


def decide_achievable_satisfaction(mdp, rewards, nu, v, start=None) -> bool:
    """Is there a strategy meeting every threshold with probability nu?

    Holds exactly when the union of good maximal end components is
    reachable with probability at least nu; with no good components
    only nu = 0 survives.
    """
    nu = _check_nu(nu)
    if len(v) != rewards.dimension:
        raise ValueError(
            f"threshold has {len(v)} components, model has {rewards.dimension}"
        )
    if start is None:
        start = mdp.initial
    s0 = mdp.state_index[start]
    union = set()
    for ec in maximal_end_components(mdp):
        if _good_witness(mdp, rewards, ec, v) is not None:
            union.update(ec.states)
    return _reach_value(mdp, union, s0) >= nu


def _positive_frequencies(mdp):
    """Strictly positive flow-invariant action frequencies, summing to 1.

    The model must be a single end component; the frequencies are the
    long-run action frequencies of the uniform memoryless choice, read
    off the stationary distribution of its product chain.
    """
    uniform = MemorylessStrategy(
        {
            mdp.states[s]: {
                mdp.actions[a].name: rat(1, len(mdp.enabled[s]))
                for a in mdp.enabled[s]
            }
            for s in range(mdp.n_states)
        }
    )
    chain = product_chain(mdp, uniform)
    comps = bottom_components(chain)
    assert len(comps) == 1 and len(comps[0]) == chain.n_locations
    pi = stationary_distribution(chain, comps[0])
    freq = {}
    for loc, p in zip(comps[0], pi):
        _, _, a_name = chain.locations[loc]
        freq[a_name] = p
    return [freq[act.name] for act in mdp.actions]


def synthesize_satisfaction_strategy(mdp, rewards, nu, v, epsilon, start=None):
    """Memoryless strategy meeting thresholds v - epsilon with probability nu.

    Outside the good components the strategy steers toward their union
    with an optimal reachability choice; inside each good component it
    plays frequencies nudged from a threshold witness toward a strictly
    positive vector, so the whole component becomes one recurrent class.
    The nudge costs at most epsilon of threshold per dimension and never
    touches the attained probability. Raises ValueError when (nu, v) is
    not achievable.
    """
    nu = _check_nu(nu)
    eps = rat(epsilon)
    if eps <= 0:
        raise ValueError("epsilon must be positive")
    if len(v) != rewards.dimension:
        raise ValueError(
            f"threshold has {len(v)} components, model has {rewards.dimension}"
        )
    if start is None:
        start = mdp.initial
    s0 = mdp.state_index[start]
    good = []
    for ec in maximal_end_components(mdp):
        witness = _good_witness(mdp, rewards, ec, v)
        if witness is not None:
            good.append((ec, witness))
    union = sorted({s for ec, _ in good for s in ec.states})
    if not union:
        if nu == 0:
            return MemorylessStrategy.pure(
                {
                    mdp.states[s]: mdp.actions[mdp.enabled[s][0]].name
                    for s in range(mdp.n_states)
                }
            )
        raise ValueError("threshold is not achievable in satisfaction")
    values, choice = max_reachability(mdp, union)
    if values[s0] < nu:
        raise ValueError("threshold is not achievable in satisfaction")

    magnitude = rewards.max_abs()
    bump = eps / (2 * magnitude) if magnitude > 0 else eps / 2
    inside = set(union)
    choices = {}
    for s in range(mdp.n_states):
        if s not in inside:
            choices[mdp.states[s]] = {mdp.actions[choice[s]].name: ONE}
    for ec, witness in good:
        sub, _ = restrict(mdp, rewards, ec)
        prime = _positive_frequencies(sub)
        z = [witness[j] + bump * prime[j] for j in range(len(ec.actions))]
        choices.update(memoryless_from_frequencies(sub, z).choices)
    return MemorylessStrategy(choices)


def decide_pareto_point_satisfaction(mdp, rewards, nu, v, start=None) -> bool:
    """Is (nu, v) achievable with no achievable point above it?

    Dominance can only come from raising the probability at fixed
    thresholds or raising one threshold at fixed probability, so the
    check is: the good-component union is reached with probability
    exactly nu, and for every dimension the components that could beat
    v there while holding the other thresholds are reached with
    probability below nu. A probability threshold of 0 is never a
    Pareto point, because some reward threshold can always be raised
    for free.
    """
    nu = _check_nu(nu)
    if len(v) != rewards.dimension:
        raise ValueError(
            f"threshold has {len(v)} components, model has {rewards.dimension}"
        )
    if start is None:
        start = mdp.initial
    s0 = mdp.state_index[start]
    mecs = maximal_end_components(mdp)
    union = set()
    for ec in mecs:
        if _good_witness(mdp, rewards, ec, v) is not None:
            union.update(ec.states)
    best = _reach_value(mdp, union, s0)
    if best != nu:
        return False
    for i in range(rewards.dimension):
        raised = set()
        for ec in mecs:
            if _improvable(mdp, rewards, ec, v, i):
                raised.update(ec.states)
        if _reach_value(mdp, raised, s0) >= nu:
            return False
    return True


def _improvable(mdp, rewards, ec, v, dim) -> bool:
    """Can the component beat v strictly in one dimension, meeting the rest?"""
    prog, xvar = _local_program(mdp, rewards, ec, v)
    objective = {}
    for j, a in enumerate(ec.actions):
        r = rewards.vectors[a][dim]
        if r != 0:
            objective[xvar[j]] = r
    prog.set_objective(objective, lp_mod.MAXIMIZE)
    outcome = lp_mod.solve_optimize(prog)
    if outcome.status == lp_mod.INFEASIBLE:
        return False
    assert outcome.status == lp_mod.OPTIMAL, "unit mass bounds the objective"
    return outcome.objective_value > rat(v[dim])


@dataclass
class SatisfactionParetoSample:
    epsilon: object
    magnitude: object  # reward magnitude bound that caps the grid
    points: list  # maximal achievable (nu, v...) grid vectors, sorted


def approximate_pareto_satisfaction(mdp, rewards, epsilon, start=None, budget=10**6):
    """Grid approximation of the satisfaction Pareto surface.

    Decides achievability of every grid vector (nu, v) with spacing
    epsilon, nu ranging over [0, 1] and v over the reward magnitude
    box, and keeps the maximal achievable ones. Every achievable
    combination is dominated by some returned point up to epsilon per
    coordinate. Goodness of a component depends only on v and the
    best probability only on the good union, so both are cached.
    Errors out when the grid would exceed budget points.
    """
    eps = rat(epsilon)
    if eps <= 0:
        raise ValueError("epsilon must be positive")
    if start is None:
        start = mdp.initial
    s0 = mdp.state_index[start]
    magnitude = rewards.max_abs()
    k = rewards.dimension
    half_levels = int(magnitude / eps)  # floor for nonnegative values
    levels = [eps * ell for ell in range(-half_levels, half_levels + 1)]
    nu_levels = [eps * ell for ell in range(int(1 / eps) + 1)]
    total = len(nu_levels) * len(levels) ** k
    if total > budget:
        raise ValueError(f"grid needs {total} points, budget is {budget}")
    mecs = maximal_end_components(mdp)
    reach_of = {}
    achievable = []
    for point in itertools.product(levels, repeat=k):
        mask = 0
        union = set()
        for m, ec in enumerate(mecs):
            if _good_witness(mdp, rewards, ec, point) is not None:
                mask |= 1 << m
                union.update(ec.states)
        if mask not in reach_of:
            reach_of[mask] = _reach_value(mdp, union, s0)
        rho = reach_of[mask]
        best_nu = max(lev for lev in nu_levels if lev <= rho)
        achievable.append((best_nu,) + point)
    return SatisfactionParetoSample(eps, magnitude, dominance_maximal(achievable))


# ----------------------------------------------------------------------
# Phase schedules: driving frequencies to the target almost surely


def _quantile_order_index(runs, level, miss):
    """Index of the order statistic bounding a quantile from above.

    Smallest j such that the j-th smallest of `runs` independent samples
    exceeds the level-quantile with probability at least 1 - miss;
    capped at `runs` when the sample is too small for the requested
    confidence, which makes the cap a best-effort bound.
    """
    level = rat(level)
    threshold = ONE - rat(miss)
    cdf = ZERO
    for m in range(runs):
        cdf += rat(math.comb(runs, m)) * level**m * (ONE - level) ** (runs - m)
        if cdf >= threshold:
            return m + 1
    return runs


def _estimate_kappa(mdp, strategy, target, phase_no, seed, runs, window):
    """Monte-Carlo stabilization horizon for one phase strategy.

    Simulates the product chain and records, per run, the first step
    after which every running action frequency stays within 2^-phase_no
    of its target for the rest of the window. Returns the per-run
    horizons, each at least 1 and censored at the window length.
    """
    chain = product_chain(mdp, strategy)
    indicator = RewardModel(
        [act.name for act in mdp.actions],
        [
            [ONE if b == a else ZERO for b in range(mdp.n_actions)]
            for a in range(mdp.n_actions)
        ],
    )
    succ_idx, succ_cum, loc_rew, init_idx, init_cum = _chain_tables(
        mdp, indicator, chain
    )
    goal = np.array([float(q) for q in target])
    tol = 0.5 ** phase_no
    draws = np.stack(
        [
            _substream(seed, (phase_no << 32) | run).random(window + 1)
            for run in range(runs)
        ]
    )
    loc = init_idx[np.argmax(init_cum >= draws[:, :1], axis=1)]
    counts = np.zeros((runs, mdp.n_actions))
    last_bad = np.zeros(runs, dtype=np.int64)
    for t in range(1, window + 1):
        counts += loc_rew[loc]
        off = np.abs(counts / t - goal).max(axis=1) > tol
        last_bad[off] = t
        rows = succ_cum[loc]
        step = np.argmax(rows >= draws[:, t : t + 1], axis=1)
        loc = succ_idx[loc, step]
    return np.minimum(last_bad + 1, window)


def build_phase_schedule(
    mdp, xbar, phases, seed, runs=64, window=20000, miss=rat(1, 20)
):
    """Schedule of memoryless phases whose frequencies converge to xbar.

    The model must be a single end component and xbar a flow-invariant
    unit-mass frequency target. Phase i plays xbar nudged by 2^-(i+2)
    toward a strictly positive vector, so every phase is recurrent over
    the whole component and its frequencies sit within 2^-(i+2) of the
    target. Phase lengths come from estimated stabilization horizons
    kappa_i (a Monte-Carlo quantile at level 1 - 2^-i with one-sided
    confidence 1 - miss, censored at the window) stretched so each
    phase also outweighs everything before it; the result passes
    PhaseSchedule.invariant_violations by construction. The estimate is
    deterministic given the seed.
    """
    if phases < 1:
        raise ValueError("at least one phase required")
    if not is_single_end_component(mdp):
        raise ValueError("model must be a single end component")
    xbar = [rat(q) for q in xbar]
    if len(xbar) != mdp.n_actions:
        raise ValueError("one target frequency per action required")
    if sum(xbar, ZERO) != 1:
        raise ValueError("target frequencies must sum to 1")
    memoryless_from_frequencies(mdp, xbar)  # rejects bad sign or flow

    prime = _positive_frequencies(mdp)
    strategies = []
    kappas = []
    for i in range(1, phases + 1):
        scale = rat(1, 1 << (i + 2))
        z = [xbar[a] + scale * prime[a] for a in range(mdp.n_actions)]
        strategies.append(memoryless_from_frequencies(mdp, z))
        horizons = _estimate_kappa(
            mdp, strategies[-1], xbar, i, seed, runs, window
        )
        order = _quantile_order_index(runs, ONE - rat(1, 1 << i), miss)
        kappas.append(int(np.sort(horizons)[order - 1]))

    lengths = []
    start_offset = 0
    for pos in range(phases):
        i = pos + 1
        need = max(kappas[pos], start_offset * (1 << i))
        if pos + 1 < phases:
            need = max(need, kappas[pos + 1] * (1 << i))
        lengths.append(need)
        start_offset += need
    return PhaseSchedule(
        [
            Phase(strategy, length, kappa)
            for strategy, length, kappa in zip(strategies, lengths, kappas)
        ],
        target=xbar,
    )
