"""End-to-end acceptance checks, one test per numbered criterion.

Each test prints a single "criterion N: PASS" line when its assertions
hold, so `pytest -v -s tests/test_acceptance.py` reads as a checklist.
All comparisons are exact unless a tolerance is part of the criterion.
"""

import itertools
import os
import random
import time

import numpy as np

from helpers import (
    random_mdp,
    random_memoryless,
    random_strongly_connected_mdp,
    solve_lp_by_vertices,
)
from longrun import lp as lp_mod
from longrun.expectation import (
    approximate_pareto_expectation,
    decide_achievable_expectation,
    decide_pareto_point_expectation,
    synthesize_expectation_strategy,
)
from longrun.graph import (
    enumerate_end_components,
    maximal_end_components,
    restrict,
)
from longrun.model import load_model
from longrun.rationals import rat, ONE, ZERO
from longrun.satisfaction import (
    build_phase_schedule,
    decide_achievable_satisfaction,
    decide_pareto_point_satisfaction,
    synthesize_satisfaction_strategy,
)
from longrun.strategy import (
    MemorylessStrategy,
    StochasticUpdateStrategy,
    load_strategy,
    validate_strategy,
)
from longrun.verify import (
    evaluate,
    exact_satisfaction_probability,
    simulate,
)

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")

CURVE_A = (rat(3, 52), rat(22, 13))
CURVE_B = (ZERO, rat(2))


def fixture(name):
    return load_model(os.path.join(FIXTURES, name))


def report(num, text):
    print(f"criterion {num}: PASS - {text}")


def test_criterion_01_component_counts():
    t0 = time.monotonic()
    mdp, _ = fixture("two_mec.json")
    mecs = maximal_end_components(mdp)
    ecs = enumerate_end_components(mdp)
    elapsed = time.monotonic() - t0
    assert len(mecs) == 2
    assert len(ecs) == 4
    assert elapsed < 1.0
    report(1, f"2 MECs, 4 end components in {elapsed:.3f}s")


def test_criterion_02_exact_expectation_of_reference_strategy():
    t0 = time.monotonic()
    mdp, rewards = fixture("two_mec.json")
    sigma = load_strategy(os.path.join(FIXTURES, "running_strategy.json"))
    expectation = evaluate(mdp, rewards, sigma).expectation
    elapsed = time.monotonic() - t0
    assert expectation == CURVE_A
    assert elapsed < 1.0
    report(2, f"expectation (3/52, 22/13) exact in {elapsed:.3f}s")


def test_criterion_03_expectation_decisions():
    mdp, rewards = fixture("two_mec.json")
    assert decide_achievable_expectation(mdp, rewards, list(CURVE_A))[0]
    assert decide_achievable_expectation(mdp, rewards, list(CURVE_B))[0]
    bumped = [CURVE_A[0] + rat(1, 100), CURVE_A[1]]
    assert not decide_achievable_expectation(mdp, rewards, bumped)[0]
    assert decide_pareto_point_expectation(mdp, rewards, list(CURVE_A))
    assert decide_pareto_point_expectation(mdp, rewards, list(CURVE_B))
    assert not decide_pareto_point_expectation(mdp, rewards, [ZERO, ONE])
    report(3, "achievability and surface membership, zero tolerance")


def test_criterion_04_synthesis_dominates_threshold():
    t0 = time.monotonic()
    checked = 0
    for name, v in [
        ("two_mec.json", list(CURVE_A)),
        ("two_mec.json", list(CURVE_B)),
        ("split_loops.json", [rat(1, 2), rat(1, 2)]),
    ]:
        mdp, rewards = fixture(name)
        sigma = synthesize_expectation_strategy(mdp, rewards, v)
        assert validate_strategy(mdp, sigma) == []
        got = evaluate(mdp, rewards, sigma).expectation
        assert all(g >= vi for g, vi in zip(got, v))
        checked += 1

    rng = random.Random(2024)
    for _ in range(100):
        mdp, rewards = random_mdp(rng, n_states=rng.randrange(5, 11), k=2)
        v = list(evaluate(mdp, rewards, random_memoryless(rng, mdp)).expectation)
        sigma = synthesize_expectation_strategy(mdp, rewards, v)
        assert validate_strategy(mdp, sigma) == []
        got = evaluate(mdp, rewards, sigma).expectation
        assert all(g >= vi for g, vi in zip(got, v))
        checked += 1
    elapsed = time.monotonic() - t0
    assert elapsed < 60.0
    report(4, f"{checked} syntheses dominate their thresholds in {elapsed:.1f}s")


def test_criterion_05_memoryless_insufficiency():
    mdp, rewards = fixture("split_loops.json")
    target = [rat(1, 2), rat(1, 2)]
    assert decide_achievable_expectation(mdp, rewards, target)[0]

    pure_values = set()
    names = {s: [mdp.actions[a].name for a in mdp.enabled[i]] for i, s in enumerate(mdp.states)}
    for combo in itertools.product(*(names[s] for s in mdp.states)):
        sigma = MemorylessStrategy.pure(dict(zip(mdp.states, combo)))
        pure_values.add(evaluate(mdp, rewards, sigma).expectation)
    assert pure_values == {(ONE, ZERO), (ZERO, ONE)}

    sigma = synthesize_expectation_strategy(mdp, rewards, target)
    assert evaluate(mdp, rewards, sigma).expectation == (rat(1, 2), rat(1, 2))
    report(5, "pure memoryless hits only the corners; two memories hit (1/2, 1/2)")


def test_criterion_06_satisfaction_decisions():
    mdp, rewards = fixture("two_mec.json")
    v_loop = [ZERO, rat(2)]
    v_pair = [rat(3, 13), rat(10, 13)]
    assert decide_achievable_satisfaction(mdp, rewards, ONE, v_loop)
    assert decide_achievable_satisfaction(mdp, rewards, rat(1, 2), v_loop)
    assert not decide_achievable_satisfaction(mdp, rewards, rat(3, 5), v_pair)
    assert decide_pareto_point_satisfaction(mdp, rewards, ONE, v_loop)
    assert not decide_pareto_point_satisfaction(mdp, rewards, rat(1, 2), v_loop)
    assert not decide_pareto_point_satisfaction(mdp, rewards, ONE, [ZERO, ONE])
    report(6, "satisfaction decisions and surface membership, zero tolerance")


def test_criterion_07_epsilon_witness_contract():
    mdp, rewards = fixture("two_mec.json")
    nu = rat(1, 2)
    v = [rat(3, 13), rat(10, 13)]
    eps = rat(1, 100)
    sigma = synthesize_satisfaction_strategy(mdp, rewards, nu, v, eps)
    assert validate_strategy(mdp, sigma) == []
    relaxed = [q - eps for q in v]
    got = exact_satisfaction_probability(mdp, rewards, sigma, relaxed)
    assert got >= nu - eps
    report(7, f"exact witness probability {got} >= {nu - eps}")


def test_criterion_08_single_component_correspondence():
    checked = mismatches = 0
    rng = random.Random(31)

    def check(mdp, rewards, samples):
        nonlocal checked, mismatches
        for _ in range(samples):
            if rng.random() < 0.5:
                v = list(evaluate(mdp, rewards, random_memoryless(rng, mdp)).expectation)
            else:
                v = [rat(rng.randrange(-4, 5), 4) for _ in range(rewards.dimension)]
            left = decide_achievable_expectation(mdp, rewards, v)[0]
            right = decide_achievable_satisfaction(mdp, rewards, ONE, v)
            checked += 1
            if left != right:
                mismatches += 1

    for name in ["two_mec.json", "split_loops.json", "toggle_loops.json"]:
        mdp, rewards = fixture(name)
        for mec in maximal_end_components(mdp):
            sub, sub_rewards = restrict(mdp, rewards, mec)
            check(sub, sub_rewards, 20)

    for _ in range(50):
        mdp, rewards = random_strongly_connected_mdp(rng, n_states=rng.randrange(2, 6))
        check(mdp, rewards, 20)

    assert mismatches == 0
    report(8, f"{checked} thresholds, expectation and sure satisfaction agree")


def test_criterion_09_lp_solver_against_vertex_enumeration():
    rng = random.Random(929)
    agreements = 0
    for _ in range(200):
        n = rng.randrange(1, 7)
        prog = lp_mod.LinearProgram()
        for i in range(n):
            prog.add_variable(f"x{i}")
        prog.add_constraint({i: 1 for i in range(n)}, lp_mod.LESS_EQUAL, rng.randrange(2, 8))
        for _ in range(rng.randrange(1, 4)):
            coeffs = {i: rat(rng.randrange(-3, 4)) for i in range(n)}
            rel = rng.choice([lp_mod.LESS_EQUAL, lp_mod.GREATER_EQUAL, lp_mod.EQUAL])
            prog.add_constraint(coeffs, rel, rat(rng.randrange(-4, 7), rng.randrange(1, 3)))
        prog.set_objective(
            {i: rat(rng.randrange(-5, 6)) for i in range(n)},
            rng.choice([lp_mod.MAXIMIZE, lp_mod.MINIMIZE]),
        )
        got = lp_mod.solve_optimize(prog)
        want_status, want_value = solve_lp_by_vertices(prog)
        assert got.status == want_status, prog.dump()
        if want_status == lp_mod.OPTIMAL:
            assert got.objective_value == want_value, prog.dump()
        agreements += 1
    report(9, f"{agreements} programs, simplex equals vertex enumeration exactly")


def test_criterion_10_grid_covers_the_surface():
    t0 = time.monotonic()
    mdp, rewards = fixture("two_mec.json")
    eps = rat(1, 13)
    sample = approximate_pareto_expectation(mdp, rewards, eps)
    for curve in [CURVE_A, CURVE_B]:
        assert any(
            all(p[d] >= curve[d] - eps for d in range(2)) for p in sample.points
        ), curve
    for p in sample.points:
        assert decide_achievable_expectation(mdp, rewards, list(p))[0]
    elapsed = time.monotonic() - t0
    assert elapsed < 30.0
    report(
        10,
        f"{len(sample.points)} grid points cover both curve points in {elapsed:.1f}s",
    )


def test_criterion_11_phase_schedule_beats_every_finite_memory_strategy():
    mdp, rewards = fixture("toggle_loops.json")
    target = [rat(1, 2), ZERO, rat(1, 2), ZERO]
    goal = (rat(1, 2), rat(1, 2))

    sched = build_phase_schedule(
        mdp, target, phases=6, seed=11, runs=32, window=200
    )
    assert sched.invariant_violations() == []
    result = simulate(mdp, rewards, sched, horizon=sched.total, runs=200, seed=2024)
    share = result.threshold_frequency([rat(45, 100), rat(45, 100)])
    assert share >= 0.95

    # No 1- or 2-memory deterministic-update strategy does it at all.
    states = list(mdp.states)
    acts = {s: [mdp.actions[a].name for a in mdp.enabled[i]] for i, s in enumerate(states)}
    nonzero = 0
    total = 0
    for combo in itertools.product(*(acts[s] for s in states)):
        sigma = MemorylessStrategy.pure(dict(zip(states, combo)))
        total += 1
        if exact_satisfaction_probability(mdp, rewards, sigma, goal) != ZERO:
            nonzero += 1

    mems = ["m1", "m2"]
    arrivals = sorted(
        {(act.name, t) for act in mdp.actions for t in act.dist},
    )
    slots = [(a, s, m) for (a, s) in arrivals for m in mems]
    nm_slots = [(s, m) for s in states for m in mems]
    for nm_combo in itertools.product(*(acts[s] for (s, _) in nm_slots)):
        nxt = {key: {a: ONE} for key, a in zip(nm_slots, nm_combo)}
        for up_combo in itertools.product(mems, repeat=len(slots)):
            upd = {slot: {m: ONE} for slot, m in zip(slots, up_combo)}
            for init in mems:
                sigma = StochasticUpdateStrategy(mems, {init: ONE}, nxt, upd)
                total += 1
                if exact_satisfaction_probability(mdp, rewards, sigma, goal) != ZERO:
                    nonzero += 1
    assert total == 4 + 8192
    assert nonzero == 0
    report(
        11,
        f"schedule reaches (0.45, 0.45) in {share:.0%} of runs; "
        f"all {total} finite-memory strategies stay at probability 0",
    )


def test_criterion_12_monte_carlo_against_exact_evaluator():
    rng = random.Random(1205)
    worst = 0.0
    for _ in range(5):
        mdp, rewards = random_mdp(rng, n_states=rng.randrange(3, 7))
        for _ in range(2):
            sigma = random_memoryless(rng, mdp)
            exact = evaluate(mdp, rewards, sigma).expectation
            result = simulate(mdp, rewards, sigma, horizon=10**5, runs=10**4, seed=77)
            emp = result.empirical_mean()
            gap = max(abs(e - float(q)) for e, q in zip(emp, exact))
            worst = max(worst, gap)
            assert gap < 0.05, (gap, exact, emp)
    report(12, f"10 strategies, worst empirical gap {worst:.4f} < 0.05")
