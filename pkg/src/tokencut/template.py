"""Process templates: the local automaton every process runs.

Actions are strings.  Internal actions are plain names; sending and
receiving are written ``snd:<direction>`` and ``rcv:<direction>``.  A
direction-unaware template has a single direction on each side, named
``any`` by default, and may be written with the bare shorthands ``snd`` and
``rcv``.
"""
import json
from collections import deque
from dataclasses import dataclass, field
from typing import Optional

from .lts import Lts, find_cycle_within

UNAWARE = "any"
SEND_ONLY = "send-only"
RECEIVE_ONLY = "receive-only"
NEITHER = "neither"


def snd(d=UNAWARE):
    return f"snd:{d}"


def rcv(d=UNAWARE):
    return f"rcv:{d}"


def action_kind(action: str):
    """Split an action into ``(kind, name)`` with kind in snd/rcv/int."""
    if action.startswith("snd:"):
        return "snd", action[4:]
    if action.startswith("rcv:"):
        return "rcv", action[4:]
    return "int", action


@dataclass(frozen=True)
class Violation:
    rule: str
    message: str
    witness: tuple = ()


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def rules(self):
        return {v.rule for v in self.violations}

    def __str__(self):
        if self.ok:
            return "ok"
        return "\n".join(f"[{v.rule}] {v.message}" for v in self.violations)


@dataclass(frozen=True)
class ProcessTemplate:
    states: tuple
    token_states: frozenset
    initial_with_token: str
    initial_without_token: str
    internal_actions: frozenset
    snd_directions: frozenset
    rcv_directions: frozenset
    transitions: tuple
    labels: dict = field(compare=False, default_factory=dict)
    name: str = field(compare=False, default="")

    @property
    def direction_aware(self) -> bool:
        return len(self.snd_directions) > 1 or len(self.rcv_directions) > 1

    @property
    def non_token_states(self) -> frozenset:
        return frozenset(self.states) - self.token_states

    def label(self, q) -> frozenset:
        return frozenset(self.labels.get(q, ()))

    def propositions(self) -> frozenset:
        out = set()
        for props in self.labels.values():
            out.update(props)
        return frozenset(out)

    def outgoing(self, q):
        return [(a, t) for (s, a, t) in self.transitions if s == q]

    def as_lts(self) -> Lts:
        """The template as a bare LTS rooted at both initial states."""
        actions = set(self.internal_actions)
        actions.update(snd(d) for d in self.snd_directions)
        actions.update(rcv(d) for d in self.rcv_directions)
        actions.update(a for (_, a, _) in self.transitions)
        return Lts(tuple(self.states),
                   frozenset({self.initial_with_token, self.initial_without_token}),
                   frozenset(actions), tuple(self.transitions),
                   {q: self.label(q) for q in self.states})

    def show_action(self, action: str) -> str:
        kind, name = action_kind(action)
        if kind != "int" and not self.direction_aware:
            return kind
        return action


def make_template(states, token_states, initial, transitions, *, internal_actions=("tau",),
                  snd_directions=(UNAWARE,), rcv_directions=(UNAWARE,), labels=None,
                  name="") -> ProcessTemplate:
    """Build a template, expanding bare ``snd``/``rcv`` shorthands."""
    snd_directions = frozenset(snd_directions)
    rcv_directions = frozenset(rcv_directions)
    norm = []
    for (s, a, t) in transitions:
        if a in ("snd", "rcv"):
            dirs = snd_directions if a == "snd" else rcv_directions
            if len(dirs) != 1:
                raise ValueError(f"bare {a!r} is ambiguous with directions {sorted(dirs)}")
            a = f"{a}:{next(iter(dirs))}"
        norm.append((s, a, t))
    it, inn = initial
    return ProcessTemplate(tuple(states), frozenset(token_states), it, inn,
                           frozenset(internal_actions), snd_directions, rcv_directions,
                           tuple(sorted(set(norm))),
                           {q: frozenset(v) for q, v in (labels or {}).items()}, name)


def validate_template(t: ProcessTemplate, *, relaxed=False, all_states=False) -> ValidationReport:
    """Check the token-passing restrictions on a template.

    Rules: ``i`` (partition), ``ii`` (initial states), ``iii`` (sends go from
    token to non-token states), ``iv`` (receives go back), ``v`` (internal
    moves keep the token), ``vi`` (every state has a successor) and ``vii``
    (no internal-only cycle reachable from the initial states).  With
    ``relaxed`` rule ``vii`` only asks that token states can reach a send and
    non-token states a receive.  With ``all_states`` the cycle check covers
    unreachable states too.
    """
    out = []
    states = set(t.states)
    T, N = t.token_states, states - t.token_states
    if not t.token_states <= states:
        out.append(Violation("i", "token states are not a subset of the states",
                             tuple(sorted(t.token_states - states))))
    if not T or not N:
        out.append(Violation("i", "token and non-token states must both be non-empty"))
    if t.initial_with_token not in T:
        out.append(Violation("ii", "the initial token state is not a token state",
                             (t.initial_with_token,)))
    if t.initial_without_token not in N:
        out.append(Violation("ii", "the initial non-token state is a token state or unknown",
                             (t.initial_without_token,)))
    if not t.internal_actions or not t.snd_directions or not t.rcv_directions:
        out.append(Violation("actions", "action and direction sets must be non-empty"))
    for (s, a, d) in t.transitions:
        if s not in states or d not in states:
            out.append(Violation("actions", f"transition {(s, a, d)} uses an unknown state", (s, d)))
            continue
        kind, name = action_kind(a)
        if kind == "snd":
            if name not in t.snd_directions:
                out.append(Violation("actions", f"unknown send direction {name!r}", (s,)))
            if not (s in T and d in N):
                out.append(Violation("iii", f"send {s} -{a}-> {d} must go from T to N", (s, d)))
        elif kind == "rcv":
            if name not in t.rcv_directions:
                out.append(Violation("actions", f"unknown receive direction {name!r}", (s,)))
            if not (s in N and d in T):
                out.append(Violation("iv", f"receive {s} -{a}-> {d} must go from N to T", (s, d)))
        else:
            if name not in t.internal_actions:
                out.append(Violation("actions", f"unknown internal action {name!r}", (s,)))
            if (s in T) != (d in T):
                out.append(Violation("v", f"internal {s} -{a}-> {d} changes token possession", (s, d)))
    sources = {s for (s, _, _) in t.transitions}
    for q in t.states:
        if q not in sources:
            out.append(Violation("vi", f"state {q} has no outgoing transition", (q,)))
    if all(s in states and d in states for (s, _, d) in t.transitions):
        out.extend(_check_alternation(t, relaxed, all_states))
    return ValidationReport(tuple(out))


def _check_alternation(t, relaxed, all_states):
    if relaxed:
        out = []
        for q in t.states:
            goal = "snd" if q in t.token_states else "rcv"
            if not _reaches_kind(t, q, goal):
                out.append(Violation("vii", f"state {q} cannot reach a {goal} transition", (q,)))
        return out
    lts = Lts.build(t.states, t.states[:1], t.transitions)
    start = t.states if all_states else [
        q for q in (t.initial_with_token, t.initial_without_token) if q in t.states]
    reach = {lts.states[i] for i in lts.reachable(start)}
    cyc = find_cycle_within(lts, t.internal_actions, reach)
    if cyc is not None:
        return [Violation("vii", "internal-only cycle " + " -> ".join(map(str, cyc)), tuple(cyc))]
    return []


def _reaches_kind(t, q, kind):
    seen, queue = {q}, deque([q])
    while queue:
        s = queue.popleft()
        for a, d in t.outgoing(s):
            if action_kind(a)[0] == kind:
                return True
            if d not in seen:
                seen.add(d)
                queue.append(d)
    return False


def classify_state(t: ProcessTemplate, q) -> str:
    """``send-only``, ``receive-only`` or ``neither``."""
    if q not in t.states:
        raise KeyError(f"unknown state {q!r}")
    kinds = {action_kind(a)[0] for a, _ in t.outgoing(q)}
    if kinds == {"snd"}:
        return SEND_ONLY
    if kinds == {"rcv"}:
        return RECEIVE_ONLY
    return NEITHER


def priming_path(t: ProcessTemplate, q, goal: str) -> Optional[list]:
    """Shortest internal path from ``q`` to a ``goal``-classified state.

    Returns the visited states including ``q`` (so ``[q]`` when ``q``
    already qualifies), or ``None`` if no such path exists.
    """
    if q not in t.states:
        raise KeyError(f"unknown state {q!r}")
    if goal == SEND_ONLY and q not in t.token_states:
        raise ValueError("send-only goal needs a token state")
    if goal == RECEIVE_ONLY and q in t.token_states:
        raise ValueError("receive-only goal needs a non-token state")
    if goal not in (SEND_ONLY, RECEIVE_ONLY):
        raise ValueError(f"unknown goal {goal!r}")
    parent = {q: None}
    queue = deque([q])
    while queue:
        s = queue.popleft()
        if classify_state(t, s) == goal:
            path = []
            while s is not None:
                path.append(s)
                s = parent[s]
            return path[::-1]
        for a, d in t.outgoing(s):
            if action_kind(a)[0] == "int" and d not in parent:
                parent[d] = s
                queue.append(d)
    return None


# ---------------------------------------------------------------- catalogue

def _shuttle():
    return make_template(["t", "n"], ["t"], ("t", "n"),
                         [("t", "snd", "n"), ("n", "rcv", "t")], name="shuttle")


def _mutex():
    # the holder may enter the critical section; crit is left only by sending
    return make_template(
        ["n", "t", "crit"], ["t", "crit"], ("t", "n"),
        [("n", "rcv", "t"), ("t", "enter", "crit"), ("t", "snd", "n"), ("crit", "snd", "n")],
        internal_actions=("enter",), labels={"crit": {"crit"}}, name="mutex")


def _worker():
    # internal choices on both sides of the partition
    return make_template(
        ["t0", "w", "n0", "n1"], ["t0", "w"], ("t0", "n0"),
        [("n0", "rcv", "t0"), ("n1", "rcv", "t0"), ("n1", "nap", "n0"),
         ("t0", "work", "w"), ("t0", "snd", "n1"), ("w", "snd", "n1")],
        internal_actions=("work", "nap"),
        labels={"w": {"work"}, "n1": {"rest"}}, name="worker")


def _cw_shuttle():
    # direction-aware: sends only clockwise, accepts from either side
    return make_template(
        ["t", "n"], ["t"], ("t", "n"),
        [("t", "snd:cw", "n"), ("n", "rcv:cw", "t"), ("n", "rcv:ccw", "t")],
        snd_directions=("cw", "ccw"), rcv_directions=("cw", "ccw"), name="cw-shuttle")


def _bidir_shuttle():
    return make_template(
        ["t", "n"], ["t"], ("t", "n"),
        [("t", "snd:cw", "n"), ("t", "snd:ccw", "n"),
         ("n", "rcv:cw", "t"), ("n", "rcv:ccw", "t")],
        snd_directions=("cw", "ccw"), rcv_directions=("cw", "ccw"), name="bidir-shuttle")


BUILTIN_TEMPLATES = {
    "shuttle": _shuttle,
    "mutex": _mutex,
    "worker": _worker,
    "cw-shuttle": _cw_shuttle,
    "bidir-shuttle": _bidir_shuttle,
}


def builtin_template(name: str) -> ProcessTemplate:
    try:
        return BUILTIN_TEMPLATES[name]()
    except KeyError:
        raise ValueError(f"unknown template {name!r}; choose from {sorted(BUILTIN_TEMPLATES)}") from None


# ---------------------------------------------------------------------- JSON

def template_from_json(doc) -> ProcessTemplate:
    """Build a template from a parsed JSON document (or a JSON string)."""
    if isinstance(doc, str):
        doc = json.loads(doc)
    try:
        init = doc["initial"]
        if len(init) != 2:
            raise ValueError("'initial' needs exactly two entries: [token state, non-token state]")
        return make_template(
            doc["states"], doc["token_states"], tuple(init),
            [tuple(tr) for tr in doc["transitions"]],
            internal_actions=doc.get("internal_actions", ["tau"]),
            snd_directions=doc.get("snd_directions", [UNAWARE]),
            rcv_directions=doc.get("rcv_directions", [UNAWARE]),
            labels=doc.get("labels", {}), name=doc.get("name", ""))
    except KeyError as exc:
        raise ValueError(f"template document is missing field {exc.args[0]!r}") from None


def template_to_json(t: ProcessTemplate) -> dict:
    return {
        "name": t.name,
        "states": list(t.states),
        "token_states": sorted(t.token_states),
        "initial": [t.initial_with_token, t.initial_without_token],
        "internal_actions": sorted(t.internal_actions),
        "snd_directions": sorted(t.snd_directions),
        "rcv_directions": sorted(t.rcv_directions),
        "transitions": [list(tr) for tr in t.transitions],
        "labels": {q: sorted(v) for q, v in sorted(t.labels.items()) if v},
    }


def load_template(source: str) -> ProcessTemplate:
    """A builtin name or a path to a JSON template file."""
    if source in BUILTIN_TEMPLATES:
        return builtin_template(source)
    if source.endswith(".json"):
        with open(source) as fh:
            return template_from_json(json.load(fh))
    return builtin_template(source)
