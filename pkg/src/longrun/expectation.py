"""Expectation objectives for multiple long-run average rewards.

The core object is one linear feasibility system over exact rationals.
Its x part is a long-run frequency assignment over actions and its y
part transports the initial distribution into the end components, so a
threshold vector v is achievable in expectation exactly when the system
is feasible. Witness strategies, Pareto-point checks and the grid
approximation of the Pareto surface are all built from that system.

One deliberate deviation from the obvious formulation: the unit-mass
normalization ranges only over states inside maximal end components.
Letting every state carry stop mass would accept vectors that no
strategy achieves when rewards are negative, because mass could
"retire" in transient states and dodge its long-run reward. Restricting
the normalization closes that hole and is otherwise equivalent.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from . import lp as lp_mod
from .graph import maximal_end_components
from .rationals import ONE, ZERO, rat
from .strategy import StochasticUpdateStrategy


def _flow_rows(mdp, prog, var_of, source_index):
    """Add the transport rows: out-mass plus stop-mass minus in-mass
    equals the initial indicator, one row per state.

    var_of maps ("flow", action index) and ("stop", state index) to LP
    variable ids; used for both the y system and the hat-y system.
    """
    for s in range(mdp.n_states):
        coeffs = {}
        for a in mdp.enabled[s]:
            coeffs[var_of["flow", a]] = coeffs.get(var_of["flow", a], ZERO) + ONE
        for a in range(mdp.n_actions):
            for t, p in mdp.succ[a]:
                if t == s:
                    key = var_of["flow", a]
                    coeffs[key] = coeffs.get(key, ZERO) - p
        key = var_of["stop", s]
        coeffs[key] = coeffs.get(key, ZERO) + ONE
        rhs = ONE if s == source_index else ZERO
        prog.add_constraint(coeffs, lp_mod.EQUAL, rhs)


def build_achievability_system(mdp, rewards, v, start=None, mecs=None):
    """The feasibility system deciding achievability of v in expectation.

    Returns (program, mecs, x_vars) with x_vars the per-action LP
    variable indices of the frequency part. Variables: ys:<state> (stop
    mass), ya:<action> (transport frequency), xa:<action> (long-run
    frequency).
    Constraint groups, in order: one transport row per state, the
    unit-mass normalization over end-component states, one mass match
    per MEC, one frequency-invariance row per state, one reward
    threshold row per dimension.
    """
    if start is None:
        start = mdp.initial
    s0 = mdp.state_index[start]
    if len(v) != rewards.dimension:
        raise ValueError(f"threshold has {len(v)} components, model has {rewards.dimension}")
    if mecs is None:
        mecs = maximal_end_components(mdp)
    prog = lp_mod.LinearProgram()
    ys = [prog.add_variable(f"ys:{name}") for name in mdp.states]
    ya = [prog.add_variable(f"ya:{act.name}") for act in mdp.actions]
    xa = [prog.add_variable(f"xa:{act.name}") for act in mdp.actions]

    var_of = {}
    for s in range(mdp.n_states):
        var_of["stop", s] = ys[s]
    for a in range(mdp.n_actions):
        var_of["flow", a] = ya[a]
    _flow_rows(mdp, prog, var_of, s0)

    in_mec = sorted({s for ec in mecs for s in ec.states})
    prog.add_constraint({ys[s]: ONE for s in in_mec}, lp_mod.EQUAL, ONE)

    for ec in mecs:
        coeffs = {ys[s]: ONE for s in ec.states}
        for a in ec.actions:
            coeffs[xa[a]] = -ONE
        prog.add_constraint(coeffs, lp_mod.EQUAL, ZERO)

    for s in range(mdp.n_states):
        coeffs = {}
        for a in mdp.enabled[s]:
            coeffs[xa[a]] = coeffs.get(xa[a], ZERO) + ONE
        for a in range(mdp.n_actions):
            for t, p in mdp.succ[a]:
                if t == s:
                    coeffs[xa[a]] = coeffs.get(xa[a], ZERO) - p
        prog.add_constraint(coeffs, lp_mod.EQUAL, ZERO)

    for i in range(rewards.dimension):
        coeffs = {}
        for a in range(mdp.n_actions):
            r = rewards.vectors[a][i]
            if r != 0:
                coeffs[xa[a]] = r
        prog.add_constraint(coeffs, lp_mod.GREATER_EQUAL, rat(v[i]))
    return prog, mecs, xa


def _frequencies(mdp, assignment):
    return [assignment[f"xa:{act.name}"] for act in mdp.actions]


def decide_achievable_expectation(mdp, rewards, v, start=None, mecs=None):
    """Is there a strategy whose expected mean payoff dominates v?

    Returns (True, x) with x the witnessing per-action long-run
    frequency vector, or (False, None).
    """
    prog, _, _ = build_achievability_system(mdp, rewards, v, start, mecs)
    outcome = lp_mod.solve_feasible(prog)
    if outcome.status != lp_mod.FEASIBLE:
        return False, None
    return True, _frequencies(mdp, outcome.assignment)


def synthesize_expectation_strategy(mdp, rewards, v, start=None):
    """Two-memory strategy achieving expectation at least v, built from a
    witness frequency vector.

    Memory m1 transports the initial mass into the support components
    with the hat-y moves and flips to m2 at state t with the stop-mass
    share of t; memory m2 plays the frequency-proportional moves
    forever. Raises ValueError when v is not achievable.
    """
    if start is None:
        start = mdp.initial
    ok, xbar = decide_achievable_expectation(mdp, rewards, v, start)
    if not ok:
        raise ValueError("threshold vector is not achievable in expectation")
    support = [a for a in range(mdp.n_actions) if xbar[a] > 0]
    comps = maximal_end_components(mdp, allowed_actions=support)
    state_mass = [ZERO] * mdp.n_states
    for s in range(mdp.n_states):
        state_mass[s] = sum((xbar[a] for a in mdp.enabled[s]), ZERO)

    prog = lp_mod.LinearProgram()
    ys = [prog.add_variable(f"ys:{name}") for name in mdp.states]
    ya = [prog.add_variable(f"ya:{act.name}") for act in mdp.actions]
    var_of = {}
    for s in range(mdp.n_states):
        var_of["stop", s] = ys[s]
    for a in range(mdp.n_actions):
        var_of["flow", a] = ya[a]
    _flow_rows(mdp, prog, var_of, mdp.state_index[start])
    for ec in comps:
        weight = sum((state_mass[s] for s in ec.states), ZERO)
        prog.add_constraint({ys[s]: ONE for s in ec.states}, lp_mod.EQUAL, weight)
    outcome = lp_mod.solve_feasible(prog)
    assert outcome.status == lp_mod.FEASIBLE, "transport system must be feasible"
    yhat_s = [outcome.assignment[f"ys:{name}"] for name in mdp.states]
    yhat_a = [outcome.assignment[f"ya:{act.name}"] for act in mdp.actions]

    m1, m2 = "m1", "m2"
    next_move = {}
    for s in range(mdp.n_states):
        s_name = mdp.states[s]
        denom = sum((yhat_a[a] for a in mdp.enabled[s]), ZERO)
        if denom > 0:
            next_move[s_name, m1] = {
                mdp.actions[a].name: yhat_a[a] / denom
                for a in mdp.enabled[s]
                if yhat_a[a] > 0
            }
        else:
            share = rat(1, len(mdp.enabled[s]))
            next_move[s_name, m1] = {mdp.actions[a].name: share for a in mdp.enabled[s]}
        if state_mass[s] > 0:
            next_move[s_name, m2] = {
                mdp.actions[a].name: xbar[a] / state_mass[s]
                for a in mdp.enabled[s]
                if xbar[a] > 0
            }
        else:
            share = rat(1, len(mdp.enabled[s]))
            next_move[s_name, m2] = {mdp.actions[a].name: share for a in mdp.enabled[s]}

    def switch_share(t):
        denom = yhat_s[t] + sum((yhat_a[a] for a in mdp.enabled[t]), ZERO)
        if denom == 0:
            return ZERO
        return yhat_s[t] / denom

    memory_update = {}
    for a in range(mdp.n_actions):
        a_name = mdp.actions[a].name
        for t, _ in mdp.succ[a]:
            p = switch_share(t)
            if p > 0:
                dist = {m2: p}
                if p != 1:
                    dist[m1] = ONE - p
                memory_update[a_name, mdp.states[t], m1] = dist

    p0 = switch_share(mdp.state_index[start])
    alpha = {}
    if p0 != 1:
        alpha[m1] = ONE - p0
    if p0 > 0:
        alpha[m2] = p0
    return StochasticUpdateStrategy([m1, m2], alpha, next_move, memory_update)


def decide_pareto_point_expectation(mdp, rewards, v, start=None) -> bool:
    """Is v an achievable point with no achievable point above it?

    Achievability is checked by feasibility; non-dominance by maximizing
    the summed reward surplus over the system at v, which equals the
    component sum of v exactly when v sits on the Pareto surface.
    """
    prog, _, x_vars = build_achievability_system(mdp, rewards, v, start)
    objective = {}
    for a in range(mdp.n_actions):
        total = sum(rewards.vectors[a], ZERO)
        if total != 0:
            objective[x_vars[a]] = total
    prog.set_objective(objective, lp_mod.MAXIMIZE)
    outcome = lp_mod.solve_optimize(prog)
    if outcome.status == lp_mod.INFEASIBLE:
        return False
    assert outcome.status == lp_mod.OPTIMAL, "objective is bounded by unit mass"
    return outcome.objective_value == sum((rat(q) for q in v), ZERO)


@dataclass
class ParetoSample:
    epsilon: object
    magnitude: object  # reward magnitude bound that caps the grid
    points: list  # maximal achievable grid vectors, sorted ascending


def approximate_pareto_expectation(mdp, rewards, epsilon, start=None, budget=10**6):
    """Grid approximation of the expectation Pareto surface.

    Decides achievability of every grid vector with spacing epsilon
    inside the reward magnitude box and keeps the maximal achievable
    ones. Every achievable vector is dominated by some returned point up
    to epsilon per coordinate. Errors out when the grid would exceed
    budget points.
    """
    eps = rat(epsilon)
    if eps <= 0:
        raise ValueError("epsilon must be positive")
    magnitude = rewards.max_abs()
    k = rewards.dimension
    half_levels = int(magnitude / eps)  # floor for nonnegative values
    levels = [eps * ell for ell in range(-half_levels, half_levels + 1)]
    total = len(levels) ** k
    if total > budget:
        raise ValueError(f"grid needs {total} points, budget is {budget}")
    mecs = maximal_end_components(mdp)
    achievable = []
    for point in itertools.product(levels, repeat=k):
        ok, _ = decide_achievable_expectation(mdp, rewards, point, start, mecs)
        if ok:
            achievable.append(point)
    return ParetoSample(eps, magnitude, dominance_maximal(achievable))


def dominance_maximal(points):
    """Prune vectors dominated by another one; exact comparisons."""
    kept = []
    for p in sorted(points, reverse=True):
        if not any(all(kq >= pq for kq, pq in zip(q, p)) for q in kept):
            kept.append(p)
    return sorted(kept)
