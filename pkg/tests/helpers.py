"""Shared generators and oracles for the test suite.

Random model construction keeps all probabilities rational with a small
common denominator so that exact arithmetic stays cheap, and rewards in
[-1, 1] so that Monte Carlo comparisons have tame variance.
"""

import random
from fractions import Fraction

from longrun.model import Action, Mdp, RewardModel
from longrun.rationals import rat, ONE


def _random_dist(rng, targets, denom=8):
    """Probability vector over targets with denominator denom."""
    weights = [rng.randrange(1, denom) for _ in targets]
    total = sum(weights)
    return {t: rat(w, total) for t, w in zip(targets, weights)}


def random_mdp(rng, n_states, k=2, extra_actions=2, reward_denom=4):
    """Random MDP plus k reward functions.

    Every state gets one action leading somewhere random, so the model
    has no dead ends; extra actions per state add nondeterminism.
    Rewards are rationals in [-1, 1].
    """
    states = [f"s{i}" for i in range(n_states)]
    actions = []
    for i, s in enumerate(states):
        n_here = 1 + rng.randrange(extra_actions + 1)
        for j in range(n_here):
            n_succ = 1 + rng.randrange(min(3, n_states))
            targets = rng.sample(states, n_succ)
            actions.append(Action(f"a{i}_{j}", s, _random_dist(rng, targets)))
    mdp = Mdp(states, states[0], actions)
    names = [f"r{d + 1}" for d in range(k)]
    vectors = [
        [rat(rng.randrange(-reward_denom, reward_denom + 1), reward_denom) for _ in range(k)]
        for _ in actions
    ]
    return mdp, RewardModel(names, vectors)


def random_strongly_connected_mdp(rng, n_states, k=2, extra_actions=1, reward_denom=4):
    """Random MDP whose full state/action set is one end component.

    A deterministic ring of actions guarantees strong connectivity, and
    every further action keeps all states reachable from each other, so
    the model is a single MEC.
    """
    states = [f"s{i}" for i in range(n_states)]
    actions = []
    for i, s in enumerate(states):
        ring = {states[(i + 1) % n_states]: ONE}
        actions.append(Action(f"ring{i}", s, ring))
        for j in range(rng.randrange(extra_actions + 1)):
            n_succ = 1 + rng.randrange(min(3, n_states))
            targets = rng.sample(states, n_succ)
            actions.append(Action(f"a{i}_{j}", s, _random_dist(rng, targets)))
    mdp = Mdp(states, states[0], actions)
    names = [f"r{d + 1}" for d in range(k)]
    vectors = [
        [rat(rng.randrange(-reward_denom, reward_denom + 1), reward_denom) for _ in range(k)]
        for _ in actions
    ]
    return mdp, RewardModel(names, vectors)


def random_memoryless(rng, mdp, denom=6):
    """Full-support randomized memoryless strategy for mdp."""
    from longrun.strategy import MemorylessStrategy

    choices = {}
    for i, s in enumerate(mdp.states):
        names = [mdp.actions[j].name for j in mdp.enabled[i]]
        choices[s] = _random_dist(rng, names, denom)
    return MemorylessStrategy(choices)


def solve_lp_by_vertices(lp):
    """Brute-force LP oracle: enumerate basic solutions exactly.

    Every constraint (and every sign restriction) is treated as a
    hyperplane; all n-subsets are intersected by Gaussian elimination
    over Fraction, feasible intersection points are collected, and the
    best objective value among them is returned as (status, value).
    Sound for programs whose feasible region is bounded, where the
    optimum sits on a vertex and infeasibility means no vertex at all.
    """
    import itertools

    from longrun import lp as lp_mod

    def frac(q):
        # Fraction(mpq) would keep gmpy2 integer components inside the
        # Fraction, which breaks later mixed comparisons; force ints.
        return Fraction(int(q.numerator), int(q.denominator))

    n = len(lp.names)
    rows = []
    for coeffs, rel, rhs in lp.constraints:
        vec = [frac(coeffs.get(i, 0)) for i in range(n)]
        rows.append((vec, rel, frac(rhs)))
    for i, nn in enumerate(lp.nonneg):
        if nn:
            vec = [Fraction(0)] * n
            vec[i] = Fraction(1)
            rows.append((vec, lp_mod.GREATER_EQUAL, Fraction(0)))

    obj, direction = lp.objective
    cvec = [frac(obj.get(i, 0)) for i in range(n)]

    def feasible(point):
        for vec, rel, rhs in rows:
            lhs = sum(a * x for a, x in zip(vec, point))
            if rel == lp_mod.LESS_EQUAL and lhs > rhs:
                return False
            if rel == lp_mod.GREATER_EQUAL and lhs < rhs:
                return False
            if rel == lp_mod.EQUAL and lhs != rhs:
                return False
        return True

    best = None
    for subset in itertools.combinations(range(len(rows)), n):
        mat = [list(rows[i][0]) for i in subset]
        rhs = [rows[i][2] for i in subset]
        point = _gauss(mat, rhs)
        if point is None or not feasible(point):
            continue
        value = sum(c * x for c, x in zip(cvec, point))
        if best is None:
            best = value
        elif direction == lp_mod.MAXIMIZE:
            best = max(best, value)
        else:
            best = min(best, value)
    if best is None:
        return lp_mod.INFEASIBLE, None
    return lp_mod.OPTIMAL, best


def _gauss(mat, rhs):
    """Solve a square exact system; None when singular."""
    n = len(rhs)
    for col in range(n):
        pivot = next((r for r in range(col, n) if mat[r][col] != 0), None)
        if pivot is None:
            return None
        mat[col], mat[pivot] = mat[pivot], mat[col]
        rhs[col], rhs[pivot] = rhs[pivot], rhs[col]
        inv = mat[col][col]
        for r in range(n):
            if r == col or mat[r][col] == 0:
                continue
            factor = mat[r][col] / inv
            for c in range(col, n):
                mat[r][c] -= factor * mat[col][c]
            rhs[r] -= factor * rhs[col]
    return [rhs[i] / mat[i][i] for i in range(n)]
