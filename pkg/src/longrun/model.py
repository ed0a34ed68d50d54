"""MDP and reward data model, plus the JSON file format.

A model is a finite MDP where every action is enabled at exactly one
state, together with k reward functions over actions. All probabilities
and rewards are exact rationals. States and actions keep their
declaration order and get dense integer indices in that order, which is
what makes every algorithm in the package deterministic.
"""

from __future__ import annotations

import json
from typing import NamedTuple

from .rationals import Rat, RationalSyntaxError, format_rational, parse_rational, rat


class ModelError(ValueError):
    """Malformed or semantically invalid model input."""


class Action(NamedTuple):
    name: str
    source: str
    dist: dict  # successor state name -> Rat


class Mdp:
    """Finite MDP with action-indexed transition structure.

    states: declared state names, in order.
    initial: name of the initial state.
    actions: list of Action, in declaration order.

    Derived (set in __init__): state_index, action_index, enabled[s] =
    action indices available at state s, src[j] = source state index of
    action j, succ[j] = [(state index, probability)] sorted by state
    index, restricted to declared successor states.

    Construction only rejects problems that would break indexing
    (duplicate names, unknown initial or source state); everything else
    is left for validate() so that it can report all violations at once.
    """

    def __init__(self, states, initial, actions):
        self.states = list(states)
        self.initial = initial
        self.actions = list(actions)

        self.state_index = {s: i for i, s in enumerate(self.states)}
        if len(self.state_index) != len(self.states):
            raise ModelError("duplicate state identifiers")
        if not self.states:
            raise ModelError("model has no states")
        if initial not in self.state_index:
            raise ModelError(f"unknown initial state: {initial!r}")

        self.action_index = {}
        for j, act in enumerate(self.actions):
            if act.name in self.action_index:
                raise ModelError(f"duplicate action name: {act.name!r}")
            self.action_index[act.name] = j

        self.enabled = [[] for _ in self.states]
        self.src = []
        self.succ = []
        for j, act in enumerate(self.actions):
            if act.source not in self.state_index:
                raise ModelError(
                    f"action {act.name!r} declared at unknown state {act.source!r}"
                )
            i = self.state_index[act.source]
            self.enabled[i].append(j)
            self.src.append(i)
            pairs = [
                (self.state_index[t], p)
                for t, p in act.dist.items()
                if t in self.state_index
            ]
            pairs.sort(key=lambda tp: tp[0])
            self.succ.append(pairs)

    @property
    def n_states(self) -> int:
        return len(self.states)

    @property
    def n_actions(self) -> int:
        return len(self.actions)

    @property
    def initial_index(self) -> int:
        return self.state_index[self.initial]

    def __eq__(self, other):
        if not isinstance(other, Mdp):
            return NotImplemented
        return (
            self.states == other.states
            and self.initial == other.initial
            and self.actions == other.actions
        )

    def __repr__(self):
        return f"Mdp({self.n_states} states, {self.n_actions} actions, initial={self.initial!r})"


class RewardModel:
    """k named reward functions, one rational vector per action.

    vectors[j] is the reward vector of the action with index j in the
    accompanying Mdp; alignment by index is the caller's contract.
    """

    def __init__(self, names, vectors):
        self.names = list(names)
        self.vectors = [tuple(v) for v in vectors]

    @property
    def dimension(self) -> int:
        return len(self.names)

    def max_abs(self):
        """Largest absolute reward value over all actions and dimensions."""
        best = rat(0)
        for vec in self.vectors:
            for q in vec:
                if abs(q) > best:
                    best = abs(q)
        return best

    def __eq__(self, other):
        if not isinstance(other, RewardModel):
            return NotImplemented
        return self.names == other.names and self.vectors == other.vectors

    def __repr__(self):
        return f"RewardModel(names={self.names!r}, {len(self.vectors)} actions)"


def validate(mdp: Mdp, rewards: RewardModel) -> list:
    """Return a list of human-readable violations; empty means valid.

    Checks: every state has an enabled action, distributions have known
    successor states, positive probabilities, and sum exactly to 1, and
    every action carries one reward per declared reward name.
    """
    problems = []
    for i, s in enumerate(mdp.states):
        if not mdp.enabled[i]:
            problems.append(f"state {s!r} has no enabled action")
    for act in mdp.actions:
        total = rat(0)
        for t, p in act.dist.items():
            if t not in mdp.state_index:
                problems.append(
                    f"action {act.name!r} has unknown successor state {t!r}"
                )
                continue
            if p <= 0:
                problems.append(
                    f"action {act.name!r} has non-positive probability {format_rational(p)} to {t!r}"
                )
            total += p
        if total != 1:
            problems.append(
                f"distribution of action {act.name!r} sums to {format_rational(total)}, not 1"
            )
    if len(rewards.vectors) != mdp.n_actions:
        problems.append(
            f"reward table has {len(rewards.vectors)} rows for {mdp.n_actions} actions"
        )
    k = rewards.dimension
    for act, vec in zip(mdp.actions, rewards.vectors):
        if len(vec) != k:
            problems.append(
                f"action {act.name!r} has {len(vec)} rewards for {k} reward names"
            )
    return problems


def _expect(doc, key, kind, where):
    if key not in doc:
        raise ModelError(f"{where}: missing key {key!r}")
    val = doc[key]
    if not isinstance(val, kind):
        raise ModelError(f"{where}: key {key!r} must be {kind.__name__}")
    return val


def parse_model(text: str):
    """Parse a model document; returns (Mdp, RewardModel).

    Raises ModelError with a position or location hint for syntax
    problems and with the full violation list for semantic ones.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelError(
            f"JSON syntax error at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    if not isinstance(doc, dict):
        raise ModelError("top level must be an object")
    extra = set(doc) - {"states", "initial", "rewardNames", "actions"}
    if extra:
        raise ModelError(f"unknown top-level keys: {sorted(extra)}")

    states = _expect(doc, "states", list, "model")
    for s in states:
        if not isinstance(s, str):
            raise ModelError(f"state identifiers must be strings, got {s!r}")
    initial = _expect(doc, "initial", str, "model")
    reward_names = _expect(doc, "rewardNames", list, "model")
    for n in reward_names:
        if not isinstance(n, str):
            raise ModelError(f"reward names must be strings, got {n!r}")
    if len(set(reward_names)) != len(reward_names):
        raise ModelError("duplicate reward names")

    actions = []
    vectors = []
    raw_actions = _expect(doc, "actions", list, "model")
    for pos, entry in enumerate(raw_actions):
        where = f"actions[{pos}]"
        if not isinstance(entry, dict):
            raise ModelError(f"{where}: must be an object")
        bad = set(entry) - {"name", "from", "to", "rewards"}
        if bad:
            raise ModelError(f"{where}: unknown keys: {sorted(bad)}")
        name = _expect(entry, "name", str, where)
        source = _expect(entry, "from", str, where)
        to = _expect(entry, "to", dict, where)
        dist = {}
        for t, p in to.items():
            try:
                dist[t] = parse_rational(p)
            except (RationalSyntaxError, TypeError) as exc:
                raise ModelError(f"{where} ({name!r}): bad probability for {t!r}: {exc}") from exc
        raw_rew = _expect(entry, "rewards", list, where)
        vec = []
        for d, q in enumerate(raw_rew):
            try:
                vec.append(parse_rational(q))
            except (RationalSyntaxError, TypeError) as exc:
                raise ModelError(f"{where} ({name!r}): bad reward [{d}]: {exc}") from exc
        actions.append(Action(name, source, dist))
        vectors.append(tuple(vec))

    mdp = Mdp(states, initial, actions)
    rewards = RewardModel(reward_names, vectors)
    problems = validate(mdp, rewards)
    if problems:
        raise ModelError("invalid model: " + "; ".join(problems))
    return mdp, rewards


def serialize_model(mdp: Mdp, rewards: RewardModel) -> str:
    """Canonical JSON for (mdp, rewards); parse_model round-trips exactly."""
    order = mdp.state_index
    doc = {
        "states": list(mdp.states),
        "initial": mdp.initial,
        "rewardNames": list(rewards.names),
        "actions": [
            {
                "name": act.name,
                "from": act.source,
                "to": {
                    t: format_rational(act.dist[t])
                    for t in sorted(act.dist, key=lambda u: order.get(u, len(order)))
                },
                "rewards": [format_rational(q) for q in vec],
            }
            for act, vec in zip(mdp.actions, rewards.vectors)
        ],
    }
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def load_model(path):
    """Read and parse a model file."""
    with open(path, "r", encoding="utf-8") as fh:
        return parse_model(fh.read())


def parse_vector(text: str, dimension=None):
    """Parse a comma-separated vector of rational literals.

    Used for CLI threshold arguments; surrounding whitespace around each
    component is tolerated, anything else follows parse_rational.
    """
    parts = [p.strip() for p in text.split(",")]
    vec = tuple(parse_rational(p) for p in parts)
    if dimension is not None and len(vec) != dimension:
        raise ModelError(f"expected {dimension} components, got {len(vec)}")
    return vec


def format_vector(vec) -> str:
    return ",".join(format_rational(q) for q in vec)
