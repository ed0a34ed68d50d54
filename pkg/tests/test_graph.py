import itertools
import os
import random

import pytest

from helpers import random_mdp
from longrun.graph import (
    EndComponent,
    MarkovChain,
    bottom_components,
    enumerate_end_components,
    is_single_end_component,
    max_reachability,
    maximal_end_components,
    restrict,
    strongly_connected_components,
)
from longrun.model import load_model
from longrun.rationals import rat, ONE, ZERO
from longrun.strategy import MemorylessStrategy, product_chain

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")


def fixture(name):
    return load_model(os.path.join(FIXTURES, name))


def oracle_is_ec(mdp, states, actions):
    """Test-local end component check, straight from the definition.

    (T, B) qualifies when B is nonempty, every action in B starts in T
    and stays in T with probability 1, and the induced directed graph on
    T is strongly connected.
    """
    if not actions:
        return False
    t_set = set(states)
    for a in actions:
        if mdp.src[a] not in t_set:
            return False
        if any(t not in t_set for t, _ in mdp.succ[a]):
            return False
    # Reachability in both directions between every pair of states.
    adj = {s: set() for s in states}
    for a in actions:
        adj[mdp.src[a]].update(t for t, _ in mdp.succ[a])
    for s in states:
        seen = {s}
        stack = [s]
        while stack:
            for t in adj[stack.pop()]:
                if t not in seen:
                    seen.add(t)
                    stack.append(t)
        if seen != t_set:
            return False
    return True


def brute_force_ecs(mdp):
    """All end components by subset scan over the action set."""
    found = set()
    for r in range(1, mdp.n_actions + 1):
        for combo in itertools.combinations(range(mdp.n_actions), r):
            states = tuple(sorted({mdp.src[a] for a in combo}))
            if oracle_is_ec(mdp, states, combo):
                found.add((states, combo))
    return found


def test_scc_on_known_graph():
    # 0 -> 1 -> 2 -> 0 and 3 -> 4, 4 -> 4
    comps = strongly_connected_components([[1], [2], [0], [4], [4]])
    assert sorted(tuple(sorted(c)) for c in comps) == [(0, 1, 2), (3,), (4,)]


def test_running_fixture_end_components():
    mdp, _ = fixture("two_mec.json")
    ecs = enumerate_end_components(mdp)
    assert len(ecs) == 4
    assert {(ec.states, ec.actions) for ec in ecs} == brute_force_ecs(mdp)


def test_running_fixture_mecs():
    mdp, _ = fixture("two_mec.json")
    mecs = maximal_end_components(mdp)
    idx = mdp.state_index
    aidx = mdp.action_index
    expect = {
        ((idx["s2"],), (aidx["a3"],)),
        ((idx["s3"], idx["s4"]), (aidx["a4"], aidx["a5"], aidx["a6"])),
    }
    assert {(m.states, m.actions) for m in mecs} == expect


def test_mecs_are_maximal_and_disjoint_on_random_models():
    rng = random.Random(17)
    for _ in range(40):
        mdp, _ = random_mdp(rng, n_states=rng.randrange(2, 6))
        if mdp.n_actions > 12:
            continue
        all_ecs = brute_force_ecs(mdp)
        mecs = {(m.states, m.actions) for m in maximal_end_components(mdp)}
        assert mecs <= all_ecs
        # each EC is contained in some MEC, and no MEC contains another
        for states, actions in all_ecs:
            assert any(
                set(states) <= set(ms) and set(actions) <= set(ma)
                for ms, ma in mecs
            )
        for a, b in itertools.permutations(mecs, 2):
            assert not set(a[0]) & set(b[0])


def test_restrict_running_fixture():
    mdp, rewards = fixture("two_mec.json")
    big = max(maximal_end_components(mdp), key=lambda m: len(m.states))
    sub, sub_rewards = restrict(mdp, rewards, big)
    assert sub.states == ["s3", "s4"]
    assert sub.initial == "s3"
    assert [a.name for a in sub.actions] == ["a4", "a5", "a6"]
    assert sub_rewards.vectors == [rewards.vectors[3], rewards.vectors[4], rewards.vectors[5]]
    assert is_single_end_component(sub)
    with pytest.raises(ValueError, match="not an end component"):
        restrict(mdp, rewards, EndComponent((0,), (0,)))


def test_is_single_end_component():
    mdp, _ = fixture("toggle_loops.json")
    assert is_single_end_component(mdp)
    mdp2, _ = fixture("two_mec.json")
    assert not is_single_end_component(mdp2)


def test_max_reachability_running_fixture():
    mdp, _ = fixture("two_mec.json")
    idx = mdp.state_index

    values, choice = max_reachability(mdp, [idx["s2"]])
    assert [values[idx[s]] for s in ["s1", "s2", "s3", "s4"]] == [ONE, ONE, ZERO, ZERO]
    assert mdp.actions[choice[idx["s1"]]].name == "a1"

    values, _ = max_reachability(mdp, [idx["s3"]])
    assert values[idx["s1"]] == rat(1, 2)
    assert values[idx["s2"]] == ZERO
    assert values[idx["s3"]] == ONE
    assert values[idx["s4"]] == ONE


def test_max_reachability_witness_attains_value():
    """The returned choice must actually reach the target at the LP value."""
    rng = random.Random(99)
    from longrun.verify import reach_probability

    for _ in range(25):
        mdp, _ = random_mdp(rng, n_states=rng.randrange(2, 7))
        target = [rng.randrange(mdp.n_states)]
        values, choice = max_reachability(mdp, target)
        sigma = MemorylessStrategy(
            {mdp.states[s]: {mdp.actions[choice[s]].name: ONE} for s in range(mdp.n_states)}
        )
        for s in range(mdp.n_states):
            chain = product_chain(mdp, sigma, start=mdp.states[s])
            goal = [
                i
                for i, loc in enumerate(chain.locations)
                if loc[0] in {mdp.states[t] for t in target}
            ]
            got = reach_probability(chain, goal) if goal else ZERO
            assert got == values[s], (s, got, values[s])


def test_max_reachability_rejects_empty_target():
    mdp, _ = fixture("two_mec.json")
    with pytest.raises(ValueError, match="empty target"):
        max_reachability(mdp, [])


def test_bottom_components():
    chain = MarkovChain(
        ["x", "y", "z"],
        [
            [(0, rat(1, 2)), (1, rat(1, 4)), (2, rat(1, 4))],
            [(1, ONE)],
            [(2, ONE)],
        ],
        [(0, ONE)],
    )
    bsccs = bottom_components(chain)
    assert sorted(tuple(b) for b in bsccs) == [(1,), (2,)]


def test_enumerate_refuses_oversized_models():
    rng = random.Random(3)
    mdp, _ = random_mdp(rng, n_states=8, extra_actions=2)
    while mdp.n_actions <= 20:
        mdp, _ = random_mdp(rng, n_states=9, extra_actions=2)
    with pytest.raises(ValueError):
        enumerate_end_components(mdp)
