"""Graph analyses: end components, chain structure, reachability.

Everything here works on dense integer indices (state index, action
index, chain location index) and is deterministic: neighbor lists are
visited in index order and results come out sorted. The SCC routine is
an iterative Tarjan so deep models cannot hit the recursion limit.
"""

from __future__ import annotations

from typing import NamedTuple

from . import lp as lp_mod
from .model import Mdp, RewardModel
from .rationals import ONE, ZERO, rat


def strongly_connected_components(succ):
    """Tarjan over an adjacency-list digraph, without recursion.

    succ[v] is an iterable of successor vertex ids. Returns a list of
    components (each sorted ascending) in reverse topological order:
    a component is emitted before any component with an edge into it.
    """
    n = len(succ)
    index = [-1] * n
    low = [0] * n
    onstack = [False] * n
    stack = []
    comps = []
    counter = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        while work:
            v, pi = work[-1]
            if pi == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                onstack[v] = True
            descended = False
            neighbors = succ[v]
            for i in range(pi, len(neighbors)):
                w = neighbors[i]
                if index[w] == -1:
                    work[-1] = (v, i + 1)
                    work.append((w, 0))
                    descended = True
                    break
                if onstack[w] and index[w] < low[v]:
                    low[v] = index[w]
            if descended:
                continue
            work.pop()
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    onstack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                comp.sort()
                comps.append(comp)
            if work:
                u = work[-1][0]
                if low[v] < low[u]:
                    low[u] = low[v]
    return comps


class EndComponent(NamedTuple):
    states: tuple  # sorted state indices
    actions: tuple  # sorted action indices


def _is_end_component(mdp, states, actions) -> bool:
    """Check the defining invariants for a candidate (T, B)."""
    if not actions:
        return False
    t_set = set(states)
    if {mdp.src[a] for a in actions} - t_set:
        return False
    for a in actions:
        for t, _ in mdp.succ[a]:
            if t not in t_set:
                return False
    # Strong connectivity of (T, B): one SCC that covers T. Closure
    # makes the singleton case automatic (its actions are self-loops).
    order = {s: i for i, s in enumerate(states)}
    adj = [[] for _ in states]
    for a in actions:
        s = order[mdp.src[a]]
        for t, _ in mdp.succ[a]:
            j = order[t]
            if j not in adj[s]:
                adj[s].append(j)
    for row in adj:
        row.sort()
    comps = strongly_connected_components(adj)
    return len(comps) == 1 and len(comps[0]) == len(states)


def enumerate_end_components(mdp, max_actions: int = 20):
    """All end components, by exhausting action subsets.

    Exponential in the number of actions, so refuses models above
    max_actions. Components are listed in subset-mask order.
    """
    if mdp.n_actions > max_actions:
        raise ValueError(
            f"model has {mdp.n_actions} actions, enumeration bound is {max_actions}"
        )
    out = []
    for mask in range(1, 1 << mdp.n_actions):
        actions = [a for a in range(mdp.n_actions) if mask >> a & 1]
        states = sorted({mdp.src[a] for a in actions})
        if _is_end_component(mdp, states, actions):
            out.append(EndComponent(tuple(states), tuple(actions)))
    return out


def maximal_end_components(mdp, allowed_actions=None):
    """MEC decomposition, optionally restricted to an action subset.

    Iteratively drops actions that leave their SCC and states left with
    no action, until stable. Returns EndComponents sorted by smallest
    state index; distinct MECs are disjoint.
    """
    n = mdp.n_states
    if allowed_actions is None:
        alive_a = set(range(mdp.n_actions))
    else:
        alive_a = set(allowed_actions)
    alive_s = set(range(n))
    while True:
        alive_a = {
            a
            for a in alive_a
            if mdp.src[a] in alive_s and all(t in alive_s for t, _ in mdp.succ[a])
        }
        adj = [[] for _ in range(n)]
        for a in sorted(alive_a):
            s = mdp.src[a]
            for t, _ in mdp.succ[a]:
                if t not in adj[s]:
                    adj[s].append(t)
        for row in adj:
            row.sort()
        comps = strongly_connected_components(adj)
        comp_id = [0] * n
        for cid, comp in enumerate(comps):
            for v in comp:
                comp_id[v] = cid
        next_a = {
            a
            for a in alive_a
            if all(comp_id[t] == comp_id[mdp.src[a]] for t, _ in mdp.succ[a])
        }
        next_s = {mdp.src[a] for a in next_a}
        if next_a == alive_a and next_s == alive_s:
            break
        alive_a, alive_s = next_a, next_s

    by_comp = {}
    for a in sorted(alive_a):
        by_comp.setdefault(comp_id[mdp.src[a]], []).append(a)
    mecs = []
    for cid, actions in by_comp.items():
        states = sorted({mdp.src[a] for a in actions})
        mecs.append(EndComponent(tuple(states), tuple(actions)))
    mecs.sort(key=lambda ec: ec.states[0])
    return mecs


def restrict(mdp, rewards, ec: EndComponent):
    """Sub-model induced by an end component.

    State and action declaration orders are inherited; the initial
    state is the component member with the smallest index. Raises
    ValueError when (states, actions) is not an end component.
    """
    if not _is_end_component(mdp, list(ec.states), list(ec.actions)):
        raise ValueError("not an end component of this model")
    states = [mdp.states[i] for i in ec.states]
    actions = [mdp.actions[a] for a in sorted(ec.actions)]
    vectors = [rewards.vectors[a] for a in sorted(ec.actions)]
    sub = Mdp(states, states[0], actions)
    return sub, RewardModel(rewards.names, vectors)


class MarkovChain:
    """Finite Markov chain with exact transition probabilities.

    locations: hashable labels, one per location.
    transitions[i]: list of (location index, probability), sorted by
    index, positive entries only, summing to exactly 1.
    initial: same shape, the entry distribution.
    """

    def __init__(self, locations, transitions, initial):
        self.locations = list(locations)
        self.transitions = [sorted(row, key=lambda jp: jp[0]) for row in transitions]
        self.initial = sorted(initial, key=lambda jp: jp[0])
        if len(self.transitions) != len(self.locations):
            raise ValueError("one transition row per location required")
        for i, row in enumerate(self.transitions):
            total = rat(0)
            for j, p in row:
                if not 0 <= j < len(self.locations):
                    raise ValueError(f"bad successor index {j} in row {i}")
                if p <= 0:
                    raise ValueError(f"non-positive probability in row {i}")
                total += p
            if total != 1:
                raise ValueError(f"row {i} sums to {total}, not 1")
        total = rat(0)
        for j, p in self.initial:
            if not 0 <= j < len(self.locations):
                raise ValueError(f"bad initial index {j}")
            if p <= 0:
                raise ValueError("non-positive initial probability")
            total += p
        if total != 1:
            raise ValueError(f"initial distribution sums to {total}, not 1")

    @property
    def n_locations(self) -> int:
        return len(self.locations)

    def __repr__(self):
        return f"MarkovChain({self.n_locations} locations)"


def bottom_components(chain: MarkovChain):
    """Closed SCCs of the chain, sorted by smallest location index."""
    adj = [[j for j, _ in row] for row in chain.transitions]
    comps = strongly_connected_components(adj)
    out = []
    for comp in comps:
        members = set(comp)
        if all(j in members for v in comp for j in adj[v]):
            out.append(comp)
    out.sort(key=lambda c: c[0])
    return out


def max_reachability(mdp, target):
    """Exact maximal probabilities of reaching a state set, with witness.

    Returns (values, choice): values[s] is the optimal reachability
    probability from s, choice[s] an action index of a deterministic
    memoryless strategy attaining it from every state. States that
    cannot reach the target get probability 0 first, which pins the LP
    optimum to the actual value vector; witness actions are then picked
    along descending distance-to-target so the strategy cannot stall in
    value-preserving cycles.
    """
    target = set(target)
    if not target:
        raise ValueError("empty target set")
    n = mdp.n_states
    rev = [[] for _ in range(n)]
    for a in range(mdp.n_actions):
        s = mdp.src[a]
        for t, _ in mdp.succ[a]:
            rev[t].append(s)
    can_reach = set(target)
    frontier = sorted(target)
    while frontier:
        nxt = []
        for t in frontier:
            for s in rev[t]:
                if s not in can_reach:
                    can_reach.add(s)
                    nxt.append(s)
        frontier = sorted(nxt)
    zero = [s for s in range(n) if s not in can_reach]

    values = [ZERO] * n
    for f in target:
        values[f] = ONE
    undecided = sorted(can_reach - target)
    if undecided:
        prog = lp_mod.LinearProgram()
        var = {}
        for s in undecided:
            var[s] = prog.add_variable(f"val:{mdp.states[s]}")
        for s in undecided:
            for a in mdp.enabled[s]:
                coeffs = {var[s]: ONE}
                const = ZERO
                for t, p in mdp.succ[a]:
                    if t in target:
                        const += p
                    elif t in var:
                        coeffs[var[t]] = coeffs.get(var[t], ZERO) - p
                prog.add_constraint(coeffs, lp_mod.GREATER_EQUAL, const)
        prog.set_objective({var[s]: ONE for s in undecided}, lp_mod.MINIMIZE)
        outcome = lp_mod.solve_optimize(prog)
        assert outcome.status == lp_mod.OPTIMAL
        for s in undecided:
            values[s] = outcome.assignment[f"val:{mdp.states[s]}"]

    choice = [mdp.enabled[s][0] for s in range(n)]
    dist = {f: 0 for f in target}
    pending = set(undecided)
    optimal = {}
    for s in undecided:
        opts = []
        for a in mdp.enabled[s]:
            got = sum((p * values[t] for t, p in mdp.succ[a]), ZERO)
            if got == values[s]:
                opts.append(a)
        optimal[s] = opts
    while pending:
        best = None  # (successor layer, state, action)
        for s in sorted(pending):
            for a in optimal[s]:
                layers = [dist[t] for t, _ in mdp.succ[a] if t in dist]
                if layers:
                    cand = (min(layers), s, a)
                    if best is None or cand < best:
                        best = cand
        if best is None:
            raise RuntimeError("witness extraction stalled")
        layer, s, a = best
        dist[s] = layer + 1
        choice[s] = a
        pending.remove(s)
    # zero-value states keep their default action; any choice is optimal
    return values, choice


def is_single_end_component(mdp) -> bool:
    """True when the whole model (all states, all actions) is one EC."""
    return _is_end_component(
        mdp, list(range(mdp.n_states)), list(range(mdp.n_actions))
    )
