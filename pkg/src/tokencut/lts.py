"""Labeled transition systems and word utilities.

An :class:`Lts` is a finite, immutable graph with labeled states. The
destutter helpers operate on plain sequences whose letters only need to
support equality.
"""
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence


@dataclass(frozen=True)
class Lts:
    """A finite labeled transition system.

    ``labeling`` maps every state to a frozenset of atom names.  ``atoms``
    optionally declares the proposition universe; when it is ``None`` every
    atom is admissible and simply false where it does not label a state.
    """

    states: tuple
    initial: frozenset
    actions: frozenset
    transitions: tuple
    labeling: dict = field(compare=False)
    atoms: Optional[frozenset] = None

    def __post_init__(self):
        index = {s: i for i, s in enumerate(self.states)}
        if len(index) != len(self.states):
            raise ValueError("duplicate state identifiers")
        if not self.initial:
            raise ValueError("an LTS needs at least one initial state")
        for s in self.initial:
            if s not in index:
                raise ValueError(f"initial state {s!r} is not a state")
        succ = [[] for _ in self.states]
        for (src, act, dst) in self.transitions:
            if src not in index or dst not in index:
                raise ValueError(f"transition {(src, act, dst)!r} leaves the state set")
            if act not in self.actions:
                raise ValueError(f"unknown action {act!r}")
            succ[index[src]].append((act, index[dst]))
        for s in self.states:
            if s not in self.labeling:
                raise ValueError(f"state {s!r} has no label")
        object.__setattr__(self, "_index", index)
        object.__setattr__(self, "_succ", tuple(tuple(x) for x in succ))

    @classmethod
    def build(cls, states, initial, transitions, labeling=None, atoms=None):
        """Convenience constructor that infers the action set."""
        states = tuple(states)
        transitions = tuple(transitions)
        labeling = dict(labeling or {})
        for s in states:
            labeling[s] = frozenset(labeling.get(s, ()))
        actions = frozenset(a for (_, a, _) in transitions) or frozenset({"tau"})
        return cls(states, frozenset(initial), actions, transitions, labeling,
                   None if atoms is None else frozenset(atoms))

    def __len__(self):
        return len(self.states)

    def index(self, s) -> int:
        return self._index[s]

    def successors(self, i: int):
        """Successor ``(action, index)`` pairs of the state with index ``i``."""
        return self._succ[i]

    def label(self, s) -> frozenset:
        return self.labeling[s]

    def relabel(self, labeling: dict, atoms=None) -> "Lts":
        """Same graph, new labeling (used for projections)."""
        return Lts(self.states, self.initial, self.actions, self.transitions,
                   labeling, None if atoms is None else frozenset(atoms))

    def reachable(self, start: Iterable, allowed=None) -> set:
        """Indices reachable from the states in ``start``.

        Only transitions whose action is in ``allowed`` are followed, unless
        ``allowed`` is ``None``.
        """
        seen = {self._index[s] for s in start}
        queue = deque(seen)
        while queue:
            i = queue.popleft()
            for act, j in self._succ[i]:
                if allowed is not None and act not in allowed:
                    continue
                if j not in seen:
                    seen.add(j)
                    queue.append(j)
        return seen


def destutter(w: Sequence) -> list:
    """Drop consecutive repeated letters: ``[a, a, b, b, a] -> [a, b, a]``."""
    out = []
    for letter in w:
        if not out or out[-1] != letter:
            out.append(letter)
    return out


def destutter_positions(w: Sequence) -> list:
    """Return ``[pos_0, pos_1, ..., pos_m]`` for ``m = len(destutter(w))``.

    ``pos_0`` is 0 and ``pos_i`` is the largest (1-based) prefix length whose
    destuttered form equals the first ``i`` letters of ``destutter(w)``, i.e.
    the last position of the ``i``-th block of equal letters.
    """
    positions = [0]
    for j in range(1, len(w) + 1):
        if j == len(w) or w[j] != w[j - 1]:
            positions.append(j)
    return positions


def destutter_partition_witness(w: Sequence, w2: Sequence):
    """Block decompositions showing ``destutter(w) == destutter(w2)``.

    Returns a pair of lists of blocks (each block a list of 1-based
    positions) such that block ``i`` of ``w`` and block ``i`` of ``w2`` hold
    the same letter, or ``None`` when the destuttered words differ.
    """
    if destutter(w) != destutter(w2):
        return None

    def blocks(word):
        pos = destutter_positions(word)
        return [list(range(pos[i] + 1, pos[i + 1] + 1)) for i in range(len(pos) - 1)]

    return blocks(w), blocks(w2)


def find_cycle_within(lts: Lts, allowed, start) -> Optional[list]:
    """Find a cycle that uses only ``allowed`` actions and is reachable from ``start``.

    Reachability is computed over the same restricted transitions.  The
    cycle is returned as a list of states whose last element repeats the
    first, e.g. ``[s, s]`` for a self-loop.  ``None`` means the restricted
    reachable subgraph is acyclic.
    """
    allowed = frozenset(allowed)
    roots = sorted(lts.reachable(start, allowed))
    WHITE, GREY, BLACK = 0, 1, 2
    colour = {}
    for root in roots:
        if colour.get(root, WHITE) != WHITE:
            continue
        stack = [(root, iter(lts.successors(root)))]
        path = [root]
        colour[root] = GREY
        while stack:
            node, it = stack[-1]
            advanced = False
            for act, nxt in it:
                if act not in allowed:
                    continue
                c = colour.get(nxt, WHITE)
                if c == GREY:
                    cyc = path[path.index(nxt):] + [nxt]
                    return [lts.states[i] for i in cyc]
                if c == WHITE:
                    colour[nxt] = GREY
                    stack.append((nxt, iter(lts.successors(nxt))))
                    path.append(nxt)
                    advanced = True
                    break
            if not advanced:
                colour[node] = BLACK
                stack.pop()
                path.pop()
    return None
