"""Finite-memory strategies and the product chain they induce.

A stochastic-update strategy is a triple (next_move, memory_update,
alpha) over a finite memory set. Everything is keyed by state, action
and memory *names* so strategies serialize naturally; index translation
happens only when building the product chain. Memory updates default to
keeping the current memory, so only non-identity entries need to be
present. A memoryless strategy is the singleton-memory special case and
gets its own lighter class.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .graph import MarkovChain
from .rationals import (
    ONE,
    RationalSyntaxError,
    ZERO,
    format_rational,
    parse_rational,
    rat,
)


class StrategyError(ValueError):
    """Malformed or semantically invalid strategy input."""


class StochasticUpdateStrategy:
    def __init__(self, memory, alpha, next_move, memory_update=None):
        self.memory = list(memory)
        self.alpha = {m: rat(p) for m, p in alpha.items()}
        self.next_move = {
            key: {a: rat(p) for a, p in dist.items()} for key, dist in next_move.items()
        }
        self.memory_update = {
            key: {m: rat(p) for m, p in dist.items()}
            for key, dist in (memory_update or {}).items()
        }

    def update_dist(self, action, state, mem):
        """Memory distribution after executing action and landing in state."""
        return self.memory_update.get((action, state, mem), {mem: ONE})

    def __eq__(self, other):
        if not isinstance(other, StochasticUpdateStrategy):
            return NotImplemented
        return (
            self.memory == other.memory
            and self.alpha == other.alpha
            and self.next_move == other.next_move
            and self.memory_update == other.memory_update
        )

    def __repr__(self):
        return f"StochasticUpdateStrategy({len(self.memory)} memory elements)"


class MemorylessStrategy:
    """state name -> distribution over enabled action names."""

    def __init__(self, choices):
        self.choices = {
            s: {a: rat(p) for a, p in dist.items()} for s, dist in choices.items()
        }

    @classmethod
    def pure(cls, mapping):
        """Deterministic strategy from a state -> action mapping."""
        return cls({s: {a: ONE} for s, a in mapping.items()})

    def as_stochastic_update(self, mem_label: str = "m"):
        return StochasticUpdateStrategy(
            [mem_label],
            {mem_label: ONE},
            {(s, mem_label): dict(dist) for s, dist in self.choices.items()},
        )

    def __eq__(self, other):
        if not isinstance(other, MemorylessStrategy):
            return NotImplemented
        return self.choices == other.choices

    def __repr__(self):
        return f"MemorylessStrategy({len(self.choices)} states)"


def validate_strategy(mdp, strategy) -> list:
    """Violation list for a strategy against a model; empty means valid."""
    if isinstance(strategy, MemorylessStrategy):
        strategy = strategy.as_stochastic_update()
    problems = []
    mems = set(strategy.memory)
    if len(mems) != len(strategy.memory):
        problems.append("duplicate memory labels")
    if not strategy.memory:
        problems.append("empty memory set")

    total = ZERO
    for m, p in strategy.alpha.items():
        if m not in mems:
            problems.append(f"initial distribution mentions unknown memory {m!r}")
            continue
        if p <= 0:
            problems.append(f"non-positive initial probability for memory {m!r}")
        total += p
    if total != 1:
        problems.append(f"initial memory distribution sums to {total}, not 1")

    for (s, m), dist in strategy.next_move.items():
        where = f"next move at ({s!r}, {m!r})"
        if s not in mdp.state_index:
            problems.append(f"{where}: unknown state")
            continue
        if m not in mems:
            problems.append(f"{where}: unknown memory")
        enabled = {mdp.actions[a].name for a in mdp.enabled[mdp.state_index[s]]}
        total = ZERO
        for a, p in dist.items():
            if a not in enabled:
                problems.append(f"{where}: action {a!r} is not enabled at {s!r}")
            if p <= 0:
                problems.append(f"{where}: non-positive probability for {a!r}")
            total += p
        if total != 1:
            problems.append(f"{where}: probabilities sum to {total}, not 1")

    for (a, s, m), dist in strategy.memory_update.items():
        where = f"memory update at ({a!r}, {s!r}, {m!r})"
        if a not in mdp.action_index:
            problems.append(f"{where}: unknown action")
        if s not in mdp.state_index:
            problems.append(f"{where}: unknown state")
        if m not in mems:
            problems.append(f"{where}: unknown memory")
        total = ZERO
        for m2, p in dist.items():
            if m2 not in mems:
                problems.append(f"{where}: unknown target memory {m2!r}")
            if p <= 0:
                problems.append(f"{where}: non-positive probability for {m2!r}")
            total += p
        if total != 1:
            problems.append(f"{where}: probabilities sum to {total}, not 1")
    return problems


def product_chain(mdp, strategy, start=None) -> MarkovChain:
    """Finite chain over locations (state, memory, action) induced by a
    strategy.

    A location means "sitting in state s with memory m, committed to
    action a". Zero-probability arcs are never created and only
    locations reachable from the initial distribution exist. Location
    labels are (state name, memory name, action name) triples; discovery
    is breadth-first in (memory, action) index order, so the layout is
    deterministic.
    """
    if isinstance(strategy, MemorylessStrategy):
        strategy = strategy.as_stochastic_update()
    if start is None:
        start = mdp.initial
    if start not in mdp.state_index:
        raise StrategyError(f"unknown start state: {start!r}")
    mem_order = {m: i for i, m in enumerate(strategy.memory)}

    def moves(s_name, m_name):
        dist = strategy.next_move.get((s_name, m_name))
        if dist is None:
            raise StrategyError(f"strategy has no move at ({s_name!r}, {m_name!r})")
        out = []
        for a_idx in mdp.enabled[mdp.state_index[s_name]]:
            a_name = mdp.actions[a_idx].name
            w = dist.get(a_name, ZERO)
            if w > 0:
                out.append((a_idx, a_name, w))
        return out

    index = {}
    labels = []
    initial = []
    for m_name in strategy.memory:
        pm = strategy.alpha.get(m_name, ZERO)
        if pm <= 0:
            continue
        for a_idx, a_name, w in moves(start, m_name):
            loc = (start, m_name, a_name)
            if loc not in index:
                index[loc] = len(labels)
                labels.append(loc)
            initial.append((index[loc], pm * w))

    queue = list(range(len(labels)))
    rows = {}
    while queue:
        i = queue.pop(0)
        s_name, m_name, a_name = labels[i]
        a_idx = mdp.action_index[a_name]
        arcs = {}
        for t_idx, p in mdp.succ[a_idx]:
            t_name = mdp.states[t_idx]
            for m2, q in sorted(
                strategy.update_dist(a_name, t_name, m_name).items(),
                key=lambda mq: mem_order.get(mq[0], len(mem_order)),
            ):
                if q <= 0:
                    continue
                if m2 not in mem_order:
                    raise StrategyError(f"memory update targets unknown memory {m2!r}")
                for b_idx, b_name, w in moves(t_name, m2):
                    loc = (t_name, m2, b_name)
                    if loc not in index:
                        index[loc] = len(labels)
                        labels.append(loc)
                        queue.append(index[loc])
                    j = index[loc]
                    arcs[j] = arcs.get(j, ZERO) + p * q * w
        rows[i] = sorted(arcs.items())

    transitions = [rows[i] for i in range(len(labels))]
    merged = {}
    for j, p in initial:
        merged[j] = merged.get(j, ZERO) + p
    return MarkovChain(labels, transitions, sorted(merged.items()))


def memoryless_from_frequencies(mdp, x) -> MemorylessStrategy:
    """Memoryless strategy playing action a at s with probability
    proportional to x[a].

    x must be a nonnegative per-action vector that is invariant under
    the transition flow: for every state, mass flowing in equals mass
    flowing out. States with zero outgoing mass get the uniform choice.
    """
    if len(x) != mdp.n_actions:
        raise ValueError("one frequency per action required")
    for a, q in enumerate(x):
        if q < 0:
            raise ValueError(f"negative frequency for action {mdp.actions[a].name!r}")
    for s in range(mdp.n_states):
        inflow = ZERO
        for a in range(mdp.n_actions):
            if x[a] == 0:
                continue
            for t, p in mdp.succ[a]:
                if t == s:
                    inflow += x[a] * p
        outflow = sum((x[a] for a in mdp.enabled[s]), ZERO)
        if inflow != outflow:
            raise ValueError(
                f"frequencies are not flow-invariant at state {mdp.states[s]!r}"
            )
    choices = {}
    for s in range(mdp.n_states):
        total = sum((x[a] for a in mdp.enabled[s]), ZERO)
        if total == 0:
            share = rat(1, len(mdp.enabled[s]))
            choices[mdp.states[s]] = {
                mdp.actions[a].name: share for a in mdp.enabled[s]
            }
        else:
            choices[mdp.states[s]] = {
                mdp.actions[a].name: x[a] / total
                for a in mdp.enabled[s]
                if x[a] > 0
            }
    return MemorylessStrategy(choices)


@dataclass
class Phase:
    strategy: MemorylessStrategy
    length: int
    kappa: int


class PhaseSchedule:
    """Piecewise-memoryless strategy with geometrically tightening phases.

    Phase i (counting from 1) plays its memoryless strategy for length_i
    steps; when the last phase ends, its strategy simply keeps playing.
    kappa_i records the estimated per-phase stabilization horizon that
    the length was derived from. The intended shape is: phase i keeps
    every running action frequency within 2^-i of the target with
    probability at least 1 - 2^-i once kappa_i steps have passed, and
    the lengths are large enough that earlier phases stop mattering.
    """

    def __init__(self, phases, target):
        self.phases = list(phases)
        self.target = list(target)

    @property
    def boundaries(self):
        """Cumulative phase start offsets [0, n1, n1+n2, ...]; the last
        entry is the total schedule length."""
        out = [0]
        for ph in self.phases:
            out.append(out[-1] + ph.length)
        return out

    @property
    def total(self) -> int:
        return self.boundaries[-1]

    def invariant_violations(self) -> list:
        """Check the length conditions tying phases together.

        For phase i (1-based, start offset N_i): length_i >= kappa_i,
        N_i <= length_i * 2^-i, and kappa_{i+1} <= length_i * 2^-i when
        a next phase exists. All checks are exact integer arithmetic.
        """
        problems = []
        bounds = self.boundaries
        for pos, ph in enumerate(self.phases):
            i = pos + 1
            if ph.length < ph.kappa:
                problems.append(f"phase {i}: length {ph.length} < kappa {ph.kappa}")
            if bounds[pos] * (1 << i) > ph.length:
                problems.append(
                    f"phase {i}: start offset {bounds[pos]} exceeds length*2^-{i}"
                )
            if pos + 1 < len(self.phases):
                nxt = self.phases[pos + 1].kappa
                if nxt * (1 << i) > ph.length:
                    problems.append(
                        f"phase {i}: next kappa {nxt} exceeds length*2^-{i}"
                    )
        return problems

    def __repr__(self):
        return f"PhaseSchedule({len(self.phases)} phases, {self.total} steps)"


def strategy_to_json(strategy) -> str:
    """Serialize either strategy kind; parse round-trips exactly."""
    if isinstance(strategy, MemorylessStrategy):
        strategy = strategy.as_stochastic_update()
    doc = {
        "memory": list(strategy.memory),
        "initial": {
            m: format_rational(p) for m, p in sorted(strategy.alpha.items())
        },
        "nextMove": [
            {
                "state": s,
                "memory": m,
                "choice": {a: format_rational(p) for a, p in sorted(dist.items())},
            }
            for (s, m), dist in sorted(strategy.next_move.items())
        ],
        "memoryUpdate": [
            {
                "action": a,
                "state": s,
                "memory": m,
                "update": {m2: format_rational(p) for m2, p in sorted(dist.items())},
            }
            for (a, s, m), dist in sorted(strategy.memory_update.items())
        ],
    }
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def strategy_from_json(text: str) -> StochasticUpdateStrategy:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise StrategyError(
            f"JSON syntax error at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    if not isinstance(doc, dict):
        raise StrategyError("top level must be an object")
    extra = set(doc) - {"memory", "initial", "nextMove", "memoryUpdate"}
    if extra:
        raise StrategyError(f"unknown top-level keys: {sorted(extra)}")
    try:
        memory = doc["memory"]
        initial = doc["initial"]
        raw_moves = doc.get("nextMove", [])
        raw_updates = doc.get("memoryUpdate", [])
    except KeyError as exc:
        raise StrategyError(f"missing key {exc.args[0]!r}") from exc
    if not isinstance(memory, list) or not all(isinstance(m, str) for m in memory):
        raise StrategyError("memory must be a list of strings")

    def dist_of(obj, where):
        if not isinstance(obj, dict):
            raise StrategyError(f"{where}: must be an object")
        out = {}
        for key, val in obj.items():
            try:
                out[key] = parse_rational(val)
            except (RationalSyntaxError, TypeError) as exc:
                raise StrategyError(f"{where}: bad probability for {key!r}: {exc}") from exc
        return out

    alpha = dist_of(initial, "initial")
    next_move = {}
    for pos, entry in enumerate(raw_moves):
        where = f"nextMove[{pos}]"
        if not isinstance(entry, dict) or set(entry) != {"state", "memory", "choice"}:
            raise StrategyError(f"{where}: needs exactly state, memory, choice")
        key = (entry["state"], entry["memory"])
        if key in next_move:
            raise StrategyError(f"{where}: duplicate entry for {key!r}")
        next_move[key] = dist_of(entry["choice"], where)
    memory_update = {}
    for pos, entry in enumerate(raw_updates):
        where = f"memoryUpdate[{pos}]"
        if not isinstance(entry, dict) or set(entry) != {
            "action",
            "state",
            "memory",
            "update",
        }:
            raise StrategyError(f"{where}: needs exactly action, state, memory, update")
        key = (entry["action"], entry["state"], entry["memory"])
        if key in memory_update:
            raise StrategyError(f"{where}: duplicate entry for {key!r}")
        memory_update[key] = dist_of(entry["update"], where)
    return StochasticUpdateStrategy(memory, alpha, next_move, memory_update)


def load_strategy(path) -> StochasticUpdateStrategy:
    with open(path, "r", encoding="utf-8") as fh:
        return strategy_from_json(fh.read())
