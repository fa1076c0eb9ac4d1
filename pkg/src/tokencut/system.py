"""Composition of a template over a topology into a token-passing system."""
from collections import deque
from dataclasses import dataclass
from typing import NamedTuple

from .lts import Lts, find_cycle_within
from .template import (ProcessTemplate, RECEIVE_ONLY, SEND_ONLY, action_kind,
                       classify_state, priming_path, validate_template)
from .topology import Topology, check_tuple, validate_topology

TOK = "tok"


@dataclass(frozen=True)
class SystemLts:
    """The reachable part of the composed system.

    States are tuples of local template states; ``state[v - 1]`` is the
    local state of vertex ``v``.  Global atoms are ``p_v`` for local
    propositions and ``tok_v`` for the token holder.
    """

    lts: Lts
    template: ProcessTemplate
    topology: Topology

    @property
    def states(self):
        return self.lts.states

    @property
    def initial(self):
        return next(iter(self.lts.initial))

    def token_position(self, s) -> int:
        return token_position(s, self.template)

    def internal_actions(self) -> frozenset:
        return self.lts.actions - {TOK}

    def __len__(self):
        return len(self.lts)


def token_position(s, template: ProcessTemplate) -> int:
    """The unique vertex whose local state holds the token."""
    holders = [v for v, q in enumerate(s, start=1) if q in template.token_states]
    if len(holders) != 1:
        raise ValueError(f"global state {s} has {len(holders)} token holders")
    return holders[0]


def _direction_plan(t: ProcessTemplate, g: Topology):
    """Map each edge to the (snd action, rcv action) pairs that move the token along it."""
    if not t.direction_aware:
        (ds,), (dr,) = t.snd_directions, t.rcv_directions
        return {e: [(f"snd:{ds}", f"rcv:{dr}")] for e in g.edges}
    if not g.labeled:
        raise ValueError("a direction-aware template needs a direction-labeled topology")
    plan = {}
    for e in g.edges:
        pairs = []
        for ds, dr in g.edge_directions(e):
            if ds not in t.snd_directions or dr not in t.rcv_directions:
                raise ValueError(f"edge {e} uses directions ({ds}, {dr}) unknown to the template")
            pairs.append((f"snd:{ds}", f"rcv:{dr}"))
        plan[e] = pairs
    return plan


def build_system(t: ProcessTemplate, g: Topology, *, check=True) -> SystemLts:
    """Build the reachable fragment of the composed system by BFS."""
    if check:
        rep = validate_template(t)
        if not rep.ok:
            raise ValueError(f"invalid template:\n{rep}")
        rep = validate_topology(g)
        if not rep.ok:
            raise ValueError(f"invalid topology:\n{rep}")
    plan = _direction_plan(t, g)
    by_state = {}
    for (s, a, d) in t.transitions:
        by_state.setdefault(s, {}).setdefault(a, []).append(d)
    internal = {q: [(a, d) for a, ds in acts.items() if action_kind(a)[0] == "int" for d in ds]
                for q, acts in by_state.items()}
    out_edges = g.succ_map()

    init = tuple(t.initial_with_token if v == g.initial else t.initial_without_token
                 for v in g.vertices)
    seen = {init: None}
    order = [init]
    trans = []
    queue = deque([init])
    while queue:
        s = queue.popleft()
        succs = []
        for v in g.vertices:
            for a, d in internal.get(s[v - 1], ()):
                succs.append((a, s[:v - 1] + (d,) + s[v:]))
        v = token_position(s, t)
        for w in out_edges[v]:
            for sa, ra in plan[(v, w)]:
                for p in by_state.get(s[v - 1], {}).get(sa, ()):
                    for q in by_state.get(s[w - 1], {}).get(ra, ()):
                        nxt = list(s)
                        nxt[v - 1], nxt[w - 1] = p, q
                        succs.append((TOK, tuple(nxt)))
        for a, nxt in succs:
            trans.append((s, a, nxt))
            if nxt not in seen:
                seen[nxt] = None
                order.append(nxt)
                queue.append(nxt)
    labeling = {s: _global_label(s, t) for s in order}
    actions = frozenset(t.internal_actions) | {TOK}
    lts = Lts(tuple(order), frozenset({init}), actions, tuple(dict.fromkeys(trans)), labeling)
    return SystemLts(lts, t, g)


def _global_label(s, t):
    out = set()
    for v, q in enumerate(s, start=1):
        out.update(f"{p}_{v}" for p in t.label(q))
        if q in t.token_states:
            out.add(f"{TOK}_{v}")
    return frozenset(out)


class ProjectedAtoms:
    """Proposition universe of a projection: ``p@i`` for any ``p`` and ``1 <= i <= k``."""

    def __init__(self, k):
        self.k = k

    def __contains__(self, atom):
        prop, sep, idx = atom.partition("@")
        return bool(sep) and idx.isdigit() and 1 <= int(idx) <= self.k

    def __iter__(self):
        return iter(())


def project(sys: SystemLts, gbar) -> Lts:
    """Relabel ``sys`` so only the tracked vertices' atoms remain, as ``p@position``."""
    gbar = check_tuple(sys.topology, gbar)
    t = sys.template
    labeling = {}
    for s in sys.lts.states:
        out = set()
        for i, v in enumerate(gbar, start=1):
            q = s[v - 1]
            out.update(f"{p}@{i}" for p in t.label(q))
            if q in t.token_states:
                out.add(f"{TOK}@{i}")
        labeling[s] = frozenset(out)
    lts = sys.lts.relabel(labeling)
    object.__setattr__(lts, "atoms", ProjectedAtoms(len(gbar)))
    return lts


def every_cycle_passes_token(sys: SystemLts) -> bool:
    """True iff no reachable cycle consists of internal transitions only."""
    return find_cycle_within(sys.lts, sys.internal_actions(), sys.lts.initial) is None


class StatePath(NamedTuple):
    states: list
    actions: list


def token_pushing_path(sys: SystemLts, s, path, p, q, gbar=()) -> StatePath:
    """Move the token from ``path[0]`` to ``path[-1]`` along ``path``.

    Vertex ``path[0]`` ends in ``p`` after its send, vertex ``path[-1]`` ends
    in ``q`` after its receive, and every vertex off the path keeps its
    local state.  Raises ``ValueError`` naming the first hypothesis that does
    not hold.
    """
    t, g = sys.template, sys.topology
    if t.direction_aware:
        raise ValueError("token pushing is only defined for direction-unaware templates")
    path = list(path)
    gbar = tuple(gbar)
    if len(path) < 2:
        raise ValueError("path needs at least two vertices")
    if len(set(path)) != len(path):
        raise ValueError("path is not simple")
    for a, b in zip(path, path[1:]):
        if (a, b) not in g.edges:
            raise ValueError(f"path uses a missing edge {(a, b)}")
    s = tuple(s)
    if token_position(s, t) != path[0]:
        raise ValueError("clause i: the token is not at the first path vertex")
    (ds,), (dr,) = t.snd_directions, t.rcv_directions
    sa, ra = f"snd:{ds}", f"rcv:{dr}"
    if (s[path[0] - 1], sa, p) not in t.transitions:
        raise ValueError(f"clause ii: no send from {s[path[0] - 1]} to {p}")
    if (s[path[-1] - 1], ra, q) not in t.transitions:
        raise ValueError(f"clause iii: no receive from {s[path[-1] - 1]} to {q}")
    for v in g.vertices:
        if v in (path[0], path[-1]) or v in gbar:
            continue
        if classify_state(t, s[v - 1]) != RECEIVE_ONLY:
            raise ValueError(f"clause iv: vertex {v} is not receive-only")

    def first(state, action):
        return sorted(d for (x, a, d) in t.transitions if x == state and a == action)[0]

    states, actions = [s], []
    cur = list(s)
    for step, (v, w) in enumerate(zip(path, path[1:])):
        if step > 0:
            # the relay primes itself, then forwards
            for nxt in priming_path(t, cur[v - 1], SEND_ONLY)[1:]:
                act = next(a for (x, a, d) in t.transitions if x == cur[v - 1] and d == nxt
                           and action_kind(a)[0] == "int")
                cur[v - 1] = nxt
                states.append(tuple(cur))
                actions.append(act)
            send_to = first(cur[v - 1], sa)
        else:
            send_to = p
        recv_to = q if w == path[-1] else first(cur[w - 1], ra)
        cur[v - 1], cur[w - 1] = send_to, recv_to
        states.append(tuple(cur))
        actions.append(TOK)
    return StatePath(states, actions)
