"""Exact strategy evaluation and seeded Monte Carlo simulation.

The exact side works on the finite product chain of a model and a
finite-memory strategy: bottom components, absorption probabilities and
stationary distributions are all computed with rational Gaussian
elimination, so reported expectations and satisfaction probabilities
are exact.

The simulation side is floating point by design. Every run r draws its
randomness from its own counter-based substream (Philox keyed by
(seed, r)), which makes results deterministic for a fixed seed,
independent of chunking and of how many runs execute. Two engines
exist: a per-step engine for finite-memory strategies and a dwell-
compression engine for phase schedules, whose phases can be too long to
step through one transition at a time. The engines consume their
substreams in different orders, so they are deterministic individually
but not interchangeable.

When numba is importable the inner loops run as compiled kernels; a
plain numpy/python path with identical semantics is kept both as a
fallback and as a cross-check target for the kernels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graph import MarkovChain, bottom_components
from .rationals import ONE, ZERO, format_rational, rat
from .strategy import (
    MemorylessStrategy,
    PhaseSchedule,
    StochasticUpdateStrategy,
    product_chain,
)

try:
    import numba
except ImportError:  # pragma: no cover - the numpy path covers the logic
    numba = None

# Tests flip this to exercise the fallback path; None means "numba not
# installed" and also forces the fallback.
USE_NUMBA = numba is not None

_STREAM_BLOCK = 65536


def _gauss_solve(matrix, rhs_columns):
    """Solve A X = B exactly; B is given and returned column-wise."""
    n = len(matrix)
    m = len(rhs_columns)
    aug = [list(matrix[r]) + [col[r] for col in rhs_columns] for r in range(n)]
    for c in range(n):
        piv = -1
        for r in range(c, n):
            if aug[r][c] != 0:
                piv = r
                break
        if piv < 0:
            raise ValueError("singular linear system")
        if piv != c:
            aug[c], aug[piv] = aug[piv], aug[c]
        inv = ONE / aug[c][c]
        aug[c] = [a * inv for a in aug[c]]
        prow = aug[c]
        for r in range(n):
            if r != c and aug[r][c] != 0:
                f = aug[r][c]
                aug[r] = [a - f * p for a, p in zip(aug[r], prow)]
    return [[aug[r][n + j] for r in range(n)] for j in range(m)]


def _prob_matrix(chain: MarkovChain) -> dict:
    out = {}
    for i, row in enumerate(chain.transitions):
        for j, p in row:
            out[(i, j)] = p
    return out


def chain_absorption(chain: MarkovChain):
    """Bottom components and the probability of settling in each.

    Returns (components, reach) with reach aligned to the component
    list; reach sums to 1.
    """
    comps = bottom_components(chain)
    loc2comp = {}
    for d, comp in enumerate(comps):
        for v in comp:
            loc2comp[v] = d
    transient = [i for i in range(chain.n_locations) if i not in loc2comp]
    z = None
    if transient:
        tpos = {t: i for i, t in enumerate(transient)}
        prob = _prob_matrix(chain)
        matrix = []
        for t in transient:
            row = [ZERO] * len(transient)
            row[tpos[t]] = ONE
            for u in transient:
                p = prob.get((t, u))
                if p is not None:
                    row[tpos[u]] = row[tpos[u]] - p
            matrix.append(row)
        rhs = []
        for d, comp in enumerate(comps):
            members = set(comp)
            col = []
            for t in transient:
                col.append(
                    sum((p for j, p in chain.transitions[t] if j in members), ZERO)
                )
            rhs.append(col)
        z = _gauss_solve(matrix, rhs)
        tindex = tpos
    reach = [ZERO] * len(comps)
    for i, p in chain.initial:
        if i in loc2comp:
            reach[loc2comp[i]] += p
        else:
            for d in range(len(comps)):
                reach[d] += p * z[d][tindex[i]]
    return comps, reach


def stationary_distribution(chain: MarkovChain, component):
    """Exact stationary distribution of one bottom component."""
    pos = {v: i for i, v in enumerate(component)}
    n = len(component)
    prob = _prob_matrix(chain)
    matrix = [[ZERO] * n for _ in range(n)]
    for u in component:
        for v, p in chain.transitions[u]:
            matrix[pos[v]][pos[u]] += p
    for v in range(n):
        matrix[v][v] -= ONE
    matrix[n - 1] = [ONE] * n
    rhs = [[ZERO] * (n - 1) + [ONE]]
    sol = _gauss_solve(matrix, rhs)[0]
    return sol  # aligned with the component order


def reach_probability(chain: MarkovChain, targets) -> object:
    """Exact probability of ever visiting a location set."""
    targets = set(targets)
    if not targets:
        raise ValueError("empty target set")
    n = chain.n_locations
    rev = [[] for _ in range(n)]
    for i, row in enumerate(chain.transitions):
        for j, _ in row:
            rev[j].append(i)
    can = set(targets)
    frontier = sorted(targets)
    while frontier:
        nxt = []
        for t in frontier:
            for s in rev[t]:
                if s not in can:
                    can.add(s)
                    nxt.append(s)
        frontier = sorted(nxt)
    undecided = sorted(can - targets)
    values = {t: ONE for t in targets}
    if undecided:
        pos = {u: i for i, u in enumerate(undecided)}
        matrix = []
        rhs_col = []
        for u in undecided:
            row = [ZERO] * len(undecided)
            row[pos[u]] = ONE
            const = ZERO
            for j, p in chain.transitions[u]:
                if j in targets:
                    const += p
                elif j in pos:
                    row[pos[j]] = row[pos[j]] - p
            matrix.append(row)
            rhs_col.append(const)
        sol = _gauss_solve(matrix, [rhs_col])[0]
        for u in undecided:
            values[u] = sol[pos[u]]
    total = ZERO
    for i, p in chain.initial:
        total += p * values.get(i, ZERO)
    return total


@dataclass
class BsccReport:
    locations: list  # (state, memory, action) labels
    reach_probability: object
    stationary: list  # probabilities aligned with locations
    mean_payoff: tuple


@dataclass
class EvaluationReport:
    expectation: tuple
    bsccs: list
    chain: MarkovChain

    def satisfaction_probability(self, v):
        """Exact probability that the long-run average meets v."""
        total = ZERO
        for rep in self.bsccs:
            if all(m >= vi for m, vi in zip(rep.mean_payoff, v)):
                total += rep.reach_probability
        return total

    def to_dict(self) -> dict:
        return {
            "locations": self.chain.n_locations,
            "expectation": [format_rational(q) for q in self.expectation],
            "bsccs": [
                {
                    "locations": [
                        {"state": s, "memory": m, "action": a}
                        for s, m, a in rep.locations
                    ],
                    "reachProbability": format_rational(rep.reach_probability),
                    "stationary": [format_rational(q) for q in rep.stationary],
                    "meanPayoff": [format_rational(q) for q in rep.mean_payoff],
                }
                for rep in self.bsccs
            ],
        }


def evaluate(mdp, rewards, strategy, start=None) -> EvaluationReport:
    """Exact long-run evaluation of a finite-memory strategy.

    Builds the product chain, then per bottom component the reach
    probability, stationary distribution and mean payoff vector. The
    report's expectation is the reach-weighted mean payoff.
    """
    chain = product_chain(mdp, strategy, start)
    comps, reach = chain_absorption(chain)
    k = rewards.dimension
    reports = []
    expectation = [ZERO] * k
    for d, comp in enumerate(comps):
        pi = stationary_distribution(chain, comp)
        mean = [ZERO] * k
        for v, pv in zip(comp, pi):
            _, _, a_name = chain.locations[v]
            vec = rewards.vectors[mdp.action_index[a_name]]
            for i in range(k):
                mean[i] += pv * vec[i]
        reports.append(
            BsccReport(
                locations=[chain.locations[v] for v in comp],
                reach_probability=reach[d],
                stationary=pi,
                mean_payoff=tuple(mean),
            )
        )
        for i in range(k):
            expectation[i] += reach[d] * mean[i]
    return EvaluationReport(tuple(expectation), reports, chain)


def exact_satisfaction_probability(mdp, rewards, strategy, v, start=None):
    return evaluate(mdp, rewards, strategy, start).satisfaction_probability(v)


# ----------------------------------------------------------------------
# Monte Carlo simulation


@dataclass
class SimulationResult:
    checkpoints: list
    averages: np.ndarray  # (runs, len(checkpoints), k) float64
    reward_names: list

    @property
    def final_averages(self) -> np.ndarray:
        return self.averages[:, -1, :]

    def empirical_mean(self) -> np.ndarray:
        return self.final_averages.mean(axis=0)

    def threshold_frequency(self, v) -> float:
        """Fraction of runs whose final average dominates v (as floats)."""
        bound = np.array([float(q) for q in v])
        hits = np.all(self.final_averages >= bound, axis=1)
        return float(hits.mean())

    def to_csv(self) -> str:
        cols = ",".join(self.reward_names)
        lines = [f"run,step,{cols}"]
        runs = self.averages.shape[0]
        for r in range(runs):
            for c, step in enumerate(self.checkpoints):
                vals = ",".join(repr(float(x)) for x in self.averages[r, c])
                lines.append(f"{r},{step},{vals}")
        return "\n".join(lines) + "\n"


def _substream(seed: int, run: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=[seed, run]))


def _chain_tables(mdp, rewards, chain: MarkovChain):
    """Dense float tables for the per-step engine."""
    n = chain.n_locations
    degree = max(len(row) for row in chain.transitions)
    succ_idx = np.zeros((n, degree), dtype=np.int64)
    succ_cum = np.ones((n, degree), dtype=np.float64)
    for i, row in enumerate(chain.transitions):
        acc = 0.0
        for col, (j, p) in enumerate(row):
            acc += float(p)
            succ_idx[i, col] = j
            succ_cum[i, col] = acc
        succ_cum[i, len(row) - 1] = 1.0  # guard against float drift
        succ_idx[i, len(row):] = row[-1][0]
    k = rewards.dimension
    loc_rew = np.zeros((n, k), dtype=np.float64)
    for i, (_, _, a_name) in enumerate(chain.locations):
        vec = rewards.vectors[mdp.action_index[a_name]]
        loc_rew[i] = [float(q) for q in vec]
    init_idx = np.array([j for j, _ in chain.initial], dtype=np.int64)
    init_cum = np.cumsum([float(p) for _, p in chain.initial])
    init_cum[-1] = 1.0
    return succ_idx, succ_cum, loc_rew, init_idx, init_cum


def _steps_numpy(loc, acc, comp, U, succ_idx, succ_cum, loc_rew, n, n_draws):
    """Reference semantics for the per-step kernel (vector per run lane)."""
    for i in range(n):
        rew = loc_rew[loc]
        y = rew - comp
        tmp = acc + y
        comp[:] = (tmp - acc) - y
        acc[:] = tmp
        if i < n_draws:
            u = U[:, i]
            rows = succ_cum[loc]
            pick = np.argmax(rows >= u[:, None], axis=1)
            loc[:] = succ_idx[loc, pick]


if numba is not None:

    @numba.njit(parallel=True, cache=False)
    def _steps_kernel(loc, acc, comp, U, succ_idx, succ_cum, loc_rew, n, n_draws):
        runs = loc.shape[0]
        k = acc.shape[1]
        degree = succ_cum.shape[1]
        for r in numba.prange(runs):
            cur = loc[r]
            for i in range(n):
                for d in range(k):
                    y = loc_rew[cur, d] - comp[r, d]
                    tmp = acc[r, d] + y
                    comp[r, d] = (tmp - acc[r, d]) - y
                    acc[r, d] = tmp
                if i < n_draws:
                    u = U[r, i]
                    j = 0
                    while j < degree - 1 and succ_cum[cur, j] < u:
                        j += 1
                    cur = succ_idx[cur, j]
            loc[r] = cur

else:  # pragma: no cover
    _steps_kernel = None


def _simulate_finite_memory(mdp, rewards, strategy, horizon, runs, seed, start, checkpoints):
    chain = product_chain(mdp, strategy, start)
    succ_idx, succ_cum, loc_rew, init_idx, init_cum = _chain_tables(mdp, rewards, chain)
    k = rewards.dimension
    gens = [_substream(seed, r) for r in range(runs)]

    u0 = np.array([g.random() for g in gens])
    loc = init_idx[np.argmax(init_cum >= u0[:, None], axis=1)]
    acc = np.zeros((runs, k))
    comp = np.zeros((runs, k))
    averages = np.zeros((runs, len(checkpoints), k))

    stepper = _steps_kernel if (USE_NUMBA and _steps_kernel is not None) else _steps_numpy
    chunk = 1024
    t = 0
    U = np.empty((runs, chunk))
    for c, cp in enumerate(checkpoints):
        while t < cp:
            n = min(chunk, cp - t)
            n_draws = n - 1 if t + n == horizon else n
            for r in range(runs):
                U[r, :n_draws] = gens[r].random(n_draws)
            stepper(loc, acc, comp, U, succ_idx, succ_cum, loc_rew, n, n_draws)
            t += n
        averages[:, c, :] = acc / t
    return SimulationResult(list(checkpoints), averages, list(rewards.names))


def _schedule_tables(mdp, rewards, schedule: PhaseSchedule):
    """Dense float tables for the dwell-compression engine.

    Locations are action indices (an action pins its source state).
    Per phase: the action-choice distribution at each state, the
    self-loop probability of each location, and the renormalized exit
    distribution of each location.
    """
    n_states = mdp.n_states
    n_act = mdp.n_actions
    n_phases = len(schedule.phases)
    k = rewards.dimension
    amax = max(len(acts) for acts in mdp.enabled)

    choice_idx = np.zeros((n_phases, n_states, amax), dtype=np.int64)
    choice_cum = np.ones((n_phases, n_states, amax), dtype=np.float64)
    p_stay = np.zeros((n_phases, n_act), dtype=np.float64)
    exits = []  # per phase: list over actions of [(loc, prob)]
    for ph, phase in enumerate(schedule.phases):
        xi = phase.strategy
        for s in range(n_states):
            dist = xi.choices[mdp.states[s]]
            acc = 0.0
            col = 0
            for a in mdp.enabled[s]:
                w = dist.get(mdp.actions[a].name, ZERO)
                if w > 0:
                    acc += float(w)
                    choice_idx[ph, s, col] = a
                    choice_cum[ph, s, col] = acc
                    col += 1
            if col == 0:
                raise ValueError(
                    f"phase {ph + 1} has no enabled choice at state {mdp.states[s]!r}"
                )
            choice_cum[ph, s, col - 1] = 1.0
            choice_idx[ph, s, col:] = choice_idx[ph, s, col - 1]
        phase_exits = []
        for a in range(n_act):
            xi_dist = {}
            arcs = {}
            for t, p in mdp.succ[a]:
                dist = xi.choices[mdp.states[t]]
                for b in mdp.enabled[t]:
                    w = dist.get(mdp.actions[b].name, ZERO)
                    if w > 0:
                        arcs[b] = arcs.get(b, ZERO) + p * w
            stay = arcs.pop(a, ZERO)
            p_stay[ph, a] = float(stay)
            rest = sum(arcs.values(), ZERO)
            if rest > 0:
                phase_exits.append(
                    [(b, q / rest) for b, q in sorted(arcs.items())]
                )
            else:
                phase_exits.append([(a, ONE)])  # absorbing; never drawn
        exits.append(phase_exits)

    dmax = max(max(len(e) for e in phase_exits) for phase_exits in exits)
    exit_idx = np.zeros((n_phases, n_act, dmax), dtype=np.int64)
    exit_cum = np.ones((n_phases, n_act, dmax), dtype=np.float64)
    for ph, phase_exits in enumerate(exits):
        for a, lst in enumerate(phase_exits):
            acc = 0.0
            for col, (b, q) in enumerate(lst):
                acc += float(q)
                exit_idx[ph, a, col] = b
                exit_cum[ph, a, col] = acc
            exit_cum[ph, a, len(lst) - 1] = 1.0
            exit_idx[ph, a, len(lst):] = exit_idx[ph, a, len(lst) - 1]

    loc_rew = np.array(
        [[float(q) for q in vec] for vec in rewards.vectors], dtype=np.float64
    )
    loc_state = np.array(mdp.src, dtype=np.int64)
    return choice_idx, choice_cum, p_stay, exit_idx, exit_cum, loc_rew, loc_state


_NEED_REFILL = 0
_DONE = 1


def _jumps_python(st, acc, comp, out, buf, tables, barriers, bar_cp, bar_switch, horizon):
    """One run of the dwell engine until the buffer runs dry.

    st = [t, cur, dwell_left, phase, bar_idx, ptr]; dwell_left == -1
    means an endless dwell (absorbing location). Mirrors _jumps_kernel
    statement by statement.
    """
    choice_idx, choice_cum, p_stay, exit_idx, exit_cum, loc_rew, loc_state = tables
    t, cur, dwell_left, phase, bar_idx, ptr = st
    k = acc.shape[0]
    while t < horizon:
        if ptr + 3 > buf.shape[0]:
            st[:] = (t, cur, dwell_left, phase, bar_idx, ptr)
            return _NEED_REFILL
        stop = barriers[bar_idx]
        room = stop - t
        if dwell_left == 0:
            u1 = buf[ptr]
            ptr += 1
            p = p_stay[phase, cur]
            if p <= 0.0:
                dwell_left = 1
            elif p >= 1.0 or u1 <= 0.0:
                dwell_left = -1
            else:
                dwell_left = int(math.log(u1) / math.log(p)) + 1
        if dwell_left == -1 or dwell_left > room:
            take = room
            if dwell_left != -1:
                dwell_left -= take
            exits = False
        else:
            take = dwell_left
            dwell_left = 0
            exits = True
        for d in range(k):
            y = take * loc_rew[cur, d] - comp[d]
            tmp = acc[d] + y
            comp[d] = (tmp - acc[d]) - y
            acc[d] = tmp
        t += take
        if exits:
            u2 = buf[ptr]
            ptr += 1
            j = 0
            dmax = exit_cum.shape[2]
            while j < dmax - 1 and exit_cum[phase, cur, j] < u2:
                j += 1
            cur = exit_idx[phase, cur, j]
        if t == stop:
            if bar_cp[bar_idx] >= 0:
                for d in range(k):
                    out[bar_cp[bar_idx], d] = acc[d] / t
            if bar_switch[bar_idx] >= 0:
                phase = bar_switch[bar_idx]
                dwell_left = 0
                u3 = buf[ptr]
                ptr += 1
                s = loc_state[cur]
                j = 0
                amax = choice_cum.shape[2]
                while j < amax - 1 and choice_cum[phase, s, j] < u3:
                    j += 1
                cur = choice_idx[phase, s, j]
            bar_idx += 1
    st[:] = (t, cur, dwell_left, phase, bar_idx, ptr)
    return _DONE


if numba is not None:

    @numba.njit(cache=False)
    def _jumps_kernel(
        st,
        acc,
        comp,
        out,
        buf,
        choice_idx,
        choice_cum,
        p_stay,
        exit_idx,
        exit_cum,
        loc_rew,
        loc_state,
        barriers,
        bar_cp,
        bar_switch,
        horizon,
    ):
        t, cur, dwell_left, phase, bar_idx, ptr = (
            st[0],
            st[1],
            st[2],
            st[3],
            st[4],
            st[5],
        )
        k = acc.shape[0]
        while t < horizon:
            if ptr + 3 > buf.shape[0]:
                st[0] = t
                st[1] = cur
                st[2] = dwell_left
                st[3] = phase
                st[4] = bar_idx
                st[5] = ptr
                return 0
            stop = barriers[bar_idx]
            room = stop - t
            if dwell_left == 0:
                u1 = buf[ptr]
                ptr += 1
                p = p_stay[phase, cur]
                if p <= 0.0:
                    dwell_left = 1
                elif p >= 1.0 or u1 <= 0.0:
                    dwell_left = -1
                else:
                    dwell_left = np.int64(math.log(u1) / math.log(p)) + 1
            if dwell_left == -1 or dwell_left > room:
                take = room
                if dwell_left != -1:
                    dwell_left -= take
                exits = False
            else:
                take = dwell_left
                dwell_left = 0
                exits = True
            for d in range(k):
                y = take * loc_rew[cur, d] - comp[d]
                tmp = acc[d] + y
                comp[d] = (tmp - acc[d]) - y
                acc[d] = tmp
            t += take
            if exits:
                u2 = buf[ptr]
                ptr += 1
                j = 0
                dmax = exit_cum.shape[2]
                while j < dmax - 1 and exit_cum[phase, cur, j] < u2:
                    j += 1
                cur = exit_idx[phase, cur, j]
            if t == stop:
                if bar_cp[bar_idx] >= 0:
                    for d in range(k):
                        out[bar_cp[bar_idx], d] = acc[d] / t
                if bar_switch[bar_idx] >= 0:
                    phase = bar_switch[bar_idx]
                    dwell_left = 0
                    u3 = buf[ptr]
                    ptr += 1
                    s = loc_state[cur]
                    j = 0
                    amax = choice_cum.shape[2]
                    while j < amax - 1 and choice_cum[phase, s, j] < u3:
                        j += 1
                    cur = choice_idx[phase, s, j]
                bar_idx += 1
        st[0] = t
        st[1] = cur
        st[2] = dwell_left
        st[3] = phase
        st[4] = bar_idx
        st[5] = ptr
        return 1

else:  # pragma: no cover
    _jumps_kernel = None


def _simulate_schedule(mdp, rewards, schedule, horizon, runs, seed, start, checkpoints):
    tables = _schedule_tables(mdp, rewards, schedule)
    choice_idx, choice_cum = tables[0], tables[1]
    k = rewards.dimension
    start_idx = mdp.state_index[start]

    starts = schedule.boundaries  # N_1 .. N_{P+1}
    switch_at = {}
    for i in range(1, len(schedule.phases)):
        if 0 < starts[i] < horizon:
            switch_at[starts[i]] = i
    barrier_steps = sorted(set(checkpoints) | set(switch_at) | {horizon})
    barriers = np.array(barrier_steps, dtype=np.int64)
    bar_cp = np.array(
        [checkpoints.index(b) if b in checkpoints else -1 for b in barrier_steps],
        dtype=np.int64,
    )
    bar_switch = np.array(
        [switch_at.get(b, -1) for b in barrier_steps], dtype=np.int64
    )

    averages = np.zeros((runs, len(checkpoints), k))
    use_kernel = USE_NUMBA and _jumps_kernel is not None
    for r in range(runs):
        gen = _substream(seed, r)
        u0 = gen.random()
        j = int(np.argmax(choice_cum[0, start_idx] >= u0))
        cur = int(choice_idx[0, start_idx, j])
        st = np.array([0, cur, 0, 0, 0, _STREAM_BLOCK], dtype=np.int64)
        acc = np.zeros(k)
        comp = np.zeros(k)
        out = averages[r]
        buf = np.empty(_STREAM_BLOCK)
        while True:
            if st[5] + 3 > buf.shape[0]:
                buf = gen.random(_STREAM_BLOCK)
                st[5] = 0
            if use_kernel:
                done = _jumps_kernel(
                    st, acc, comp, out, buf, *tables, barriers, bar_cp, bar_switch, horizon
                )
            else:
                done = _jumps_python(
                    st, acc, comp, out, buf, tables, barriers, bar_cp, bar_switch, horizon
                )
            if done == _DONE:
                break
    return SimulationResult(list(checkpoints), averages, list(rewards.names))


def simulate(
    mdp,
    rewards,
    strategy,
    horizon: int,
    runs: int,
    seed: int,
    start=None,
    checkpoints=None,
):
    """Seeded Monte Carlo estimate of running average rewards.

    Returns a SimulationResult holding the per-run prefix averages at
    each requested checkpoint (the horizon is always one). Results are
    deterministic for a fixed seed; run r is unaffected by the presence
    of other runs.
    """
    if horizon <= 0:
        raise ValueError("horizon must be positive")
    if runs <= 0:
        raise ValueError("runs must be positive")
    if start is None:
        start = mdp.initial
    if start not in mdp.state_index:
        raise ValueError(f"unknown start state: {start!r}")
    if checkpoints is None:
        if isinstance(strategy, PhaseSchedule):
            checkpoints = sorted(
                {b for b in strategy.boundaries[1:] if 0 < b <= horizon} | {horizon}
            )
        else:
            checkpoints = [horizon]
    else:
        checkpoints = sorted(set(int(c) for c in checkpoints))
        if any(c <= 0 or c > horizon for c in checkpoints):
            raise ValueError("checkpoints must lie in [1, horizon]")
        if checkpoints[-1] != horizon:
            checkpoints.append(horizon)

    if isinstance(strategy, PhaseSchedule):
        return _simulate_schedule(
            mdp, rewards, strategy, horizon, runs, seed, start, checkpoints
        )
    if isinstance(strategy, MemorylessStrategy):
        strategy = strategy.as_stochastic_update()
    if not isinstance(strategy, StochasticUpdateStrategy):
        raise TypeError("strategy must be finite-memory or a phase schedule")
    return _simulate_finite_memory(
        mdp, rewards, strategy, horizon, runs, seed, start, checkpoints
    )
