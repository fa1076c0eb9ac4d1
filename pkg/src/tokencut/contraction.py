"""Vertex markings, the suffix order, and d-contractions of topologies.

``mu_0(v)`` is the label of ``v`` in the graph LTS: ``{i}`` when ``v`` is
the ``i``-th tracked vertex, else ``{}``.  ``mu_d(v)`` collects, over all
paths from ``v`` that reach a tracked vertex without passing another one
first, the destuttered sequence of ``mu_(d-1)`` values along the path.
Vertices with equal ``mu_d`` are merged to form the d-contraction.
"""
from collections import deque
from dataclasses import dataclass, field

from .lts import Lts
from .topology import Topology, check_tuple


class ChainViolation(AssertionError):
    pass


class Marking:
    """An immutable depth-tagged marking value.

    ``value`` is a frozenset of ints at depth 0 and a frozenset of words
    (tuples of depth ``d-1`` markings) above.
    """

    __slots__ = ("depth", "value", "_hash", "_canon")

    def __init__(self, depth, value):
        self.depth = depth
        self.value = frozenset(value)
        self._hash = hash((depth, self.value))
        self._canon = None

    def __eq__(self, other):
        if self is other:
            return True
        return (isinstance(other, Marking) and self._hash == other._hash
                and self.depth == other.depth and self.value == other.value)

    def __hash__(self):
        return self._hash

    def canonical(self) -> str:
        """Sorted recursive serialization; equal markings serialize identically."""
        if self._canon is None:
            if self.depth == 0:
                body = ",".join(str(i) for i in sorted(self.value))
            else:
                words = sorted("[" + ",".join(m.canonical() for m in w) + "]" for w in self.value)
                body = ",".join(words)
            self._canon = f"{self.depth}{{{body}}}"
        return self._canon

    def __lt__(self, other):
        return self.canonical() < other.canonical()

    def __repr__(self):
        return f"Marking({self.canonical()})"

    def digest(self, length=8) -> str:
        import hashlib
        return hashlib.sha1(self.canonical().encode()).hexdigest()[:length]


def is_suffix(x, y) -> bool:
    return len(x) <= len(y) and tuple(y[len(y) - len(x):]) == tuple(x)


def suffix_leq(X, Y) -> bool:
    """Every word of ``X`` is a suffix of some word of ``Y``."""
    return all(any(is_suffix(x, y) for y in Y) for x in X)


def marking_leq(a: Marking, b: Marking) -> bool:
    """The order on markings of one depth.

    At depth 0, ``{i}`` lies below ``{}`` and labels are otherwise only
    related to themselves; above, it is :func:`suffix_leq`.
    """
    if a.depth != b.depth:
        raise ValueError("markings of different depths are incomparable")
    if a.depth == 0:
        return a == b or (bool(a.value) and not b.value)
    return suffix_leq(a.value, b.value)


def mark_all(g: Topology, gbar, d: int, check_chains=True) -> list:
    """``[mu_0, ..., mu_d]``, each a dict vertex -> :class:`Marking`."""
    gbar = check_tuple(g, gbar)
    if d < 0:
        raise ValueError("depth must be non-negative")
    pos = {v: i + 1 for i, v in enumerate(gbar)}
    succ = g.succ_map()
    levels = [{v: Marking(0, {pos[v]} if v in pos else ()) for v in g.vertices}]
    for depth in range(1, d + 1):
        prev = levels[-1]
        bound = len(set(prev.values())) + 1
        cur = {}
        for v in g.vertices:
            if v in pos:
                cur[v] = Marking(depth, {(prev[v],)})
                continue
            words = set()
            start = (v, (prev[v],))
            seen = {start}
            queue = deque([start])
            while queue:
                u, word = queue.popleft()
                for w in succ[u]:
                    m = prev[w]
                    nw = word if m == word[-1] else word + (m,)
                    if len(nw) > bound:
                        raise ChainViolation(f"marking chain longer than {bound} at vertex {v}")
                    if w in pos:
                        words.add(nw)
                    elif (w, nw) not in seen:
                        seen.add((w, nw))
                        queue.append((w, nw))
            cur[v] = Marking(depth, words)
        if check_chains:
            for v, m in cur.items():
                _check_chain(m, prev[v])
        levels.append(cur)
    return levels


def _check_chain(m: Marking, own: Marking):
    for word in m.value:
        if not word or word[0] != own:
            raise ChainViolation(f"word {word} does not start with the vertex's own marking")
        for a, b in zip(word, word[1:]):
            if a == b or not marking_leq(b, a):
                raise ChainViolation("word is not a strictly decreasing chain")


def mark(g: Topology, gbar, d: int) -> dict:
    return mark_all(g, gbar, d)[-1]


@dataclass(frozen=True)
class ContractionLts:
    """Quotient of the graph LTS by equal depth-``d`` markings."""

    depth: int
    nodes: tuple
    edges: frozenset
    initial: Marking
    labels: dict = field(compare=False)
    members: dict = field(compare=False)

    def key(self):
        """Identity used for comparisons.

        Self-loops on untracked classes are dropped: they only add stuttering
        on vertices with an empty label, which the logic cannot observe on
        fair paths.
        """
        return (frozenset(self.nodes), self.core_edges(), self.initial)

    def shape_key(self):
        return (frozenset(self.nodes), self.core_edges())

    def core_edges(self) -> frozenset:
        return frozenset((a, b) for (a, b) in self.edges if a != b or self.labels[a])

    def self_loops(self) -> set:
        return {a for (a, b) in self.edges if a == b}

    def as_lts(self) -> Lts:
        trans = tuple(sorted((a, "e", b) for (a, b) in self.edges))
        return Lts(tuple(self.nodes), frozenset({self.initial}), frozenset({"e"}), trans,
                   dict(self.labels))

    def class_of(self, v) -> Marking:
        for m, vs in self.members.items():
            if v in vs:
                return m
        raise KeyError(v)

    def to_json(self):
        return {
            "depth": self.depth,
            "initial": self.initial.digest(),
            "classes": [{"id": m.digest(), "label": sorted(self.labels[m]),
                         "members": list(self.members[m]), "marking": m.canonical()}
                        for m in self.nodes],
            "edges": sorted([a.digest(), b.digest()] for (a, b) in self.edges),
        }


def contract(g: Topology, gbar, d: int) -> ContractionLts:
    levels = mark_all(g, gbar, d)
    return contraction_from_levels(g, levels, d)


def contraction_from_levels(g: Topology, levels, d: int) -> ContractionLts:
    mu, mu0 = levels[d], levels[0]
    members = {}
    for v in g.vertices:
        members.setdefault(mu[v], []).append(v)
    nodes = tuple(sorted(members))
    edges = frozenset((mu[u], mu[w]) for (u, w) in g.edges)
    labels = {m: mu0[vs[0]].value for m, vs in members.items()}
    return ContractionLts(d, nodes, edges, mu[g.initial], labels,
                          {m: tuple(vs) for m, vs in members.items()})


def equivalent_graphs(g, gbar, g2, gbar2, d) -> bool:
    if len(tuple(gbar)) != len(tuple(gbar2)):
        raise ValueError("index tuples must have the same length")
    return contract(g, gbar, d).key() == contract(g2, gbar2, d).key()


def x_reachable(g: Topology, gbar, v) -> set:
    """Vertices reachable from ``v`` along paths whose earlier vertices avoid ``gbar``."""
    tracked = set(gbar)
    succ = g.succ_map()
    seen = {v}
    queue = deque([v])
    while queue:
        u = queue.popleft()
        if u in tracked:
            continue
        for w in succ[u]:
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return seen


# ------------------------------------------------------ stutter bisimulation

def stutter_bisim_equivalent(a: Lts, b: Lts, divergence=True) -> bool:
    """Initial states of ``a`` and ``b`` are stuttering bisimilar.

    Partition refinement on the disjoint union.  With ``divergence`` (the
    default) blocks are also split by whether a state can stay in its block
    forever, and deadlocked states are kept apart, which is what makes the
    equivalence preserve CTL* without next.  ``divergence=False`` gives the
    divergence-blind variant.
    """
    states = [(0, s) for s in a.states] + [(1, s) for s in b.states]
    idx = {s: i for i, s in enumerate(states)}
    succ = [[] for _ in states]
    for tag, lts in ((0, a), (1, b)):
        for (x, _, y) in lts.transitions:
            succ[idx[(tag, x)]].append(idx[(tag, y)])
    label = [a.labeling[s] if t == 0 else b.labeling[s] for (t, s) in states]
    pred = [[] for _ in states]
    for i, out in enumerate(succ):
        for j in out:
            pred[j].append(i)

    block = {}
    for i in range(len(states)):
        key = (label[i], divergence and not succ[i])
        block.setdefault(key, len(block))
    part = [block[(label[i], divergence and not succ[i])] for i in range(len(states))]

    def reach_within(members, targets):
        hit = {i for i in members if any(j in targets for j in succ[i])}
        queue = deque(hit)
        while queue:
            j = queue.popleft()
            for i in pred[j]:
                if i in members and i not in hit:
                    hit.add(i)
                    queue.append(i)
        return hit

    def divergent(members):
        from .checker import _tarjan
        inner = {i: [j for j in succ[i] if j in members] for i in members}
        cyc = set()
        for comp in _tarjan(sorted(members), inner):
            if len(comp) > 1 or comp[0] in inner[comp[0]]:
                cyc.update(comp)
        return reach_within(members, cyc) | cyc

    changed = True
    while changed:
        changed = False
        groups = {}
        for i, p in enumerate(part):
            groups.setdefault(p, set()).add(i)
        for p, members in groups.items():
            splitters = [set(c) for q, c in groups.items() if q != p]
            if divergence:
                splitters.append(None)
            for c in splitters:
                sub = divergent(members) if c is None else reach_within(members, c)
                if sub and sub != members:
                    new = max(part) + 1
                    for i in sub:
                        part[i] = new
                    changed = True
                    break
            if changed:
                break
    init_a = {part[idx[(0, s)]] for s in a.initial}
    init_b = {part[idx[(1, s)]] for s in b.initial}
    return init_a == init_b
