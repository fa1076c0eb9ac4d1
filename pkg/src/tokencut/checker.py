"""Explicit-state CTL* (without next) model checking with optional fairness.

``E phi`` is decided by replacing the maximal state subformulas of ``phi``
with their satisfaction sets, translating the remaining LTL skeleton into a
generalized Büchi automaton and searching the product with the LTS for a
reachable fair accepting cycle.  ``A phi`` is evaluated as ``not E not phi``.

Only infinite paths count; a state without any infinite (fair) path
satisfies no ``E`` formula and every ``A`` formula.
"""
from collections import deque
from dataclasses import dataclass
from typing import Optional

from .formula import (And, Atom, Exists, FalseF, Finally, Forall, Globally, Implies, Node, Not,
                      Or, TrueF, Until, is_state)


class UnknownAtomError(ValueError):
    pass


# --------------------------------------------------------------- fairness

@dataclass(frozen=True)
class FairnessSpec:
    """Fairness as a list of state sets, each to be visited infinitely often."""
    mode: str = "none"
    constraints: tuple = ()

    @classmethod
    def none(cls):
        return cls("none", ())

    @classmethod
    def token_global(cls, system):
        """The token visits every vertex infinitely often."""
        sets = {v: set() for v in system.topology.vertices}
        for s in system.states:
            sets[system.token_position(s)].add(s)
        return cls("token-global", tuple(frozenset(sets[v]) for v in sorted(sets)))

    @classmethod
    def from_sets(cls, sets, mode="token-global"):
        return cls(mode, tuple(frozenset(x) for x in sets))


def fairness_for(fair, system=None) -> FairnessSpec:
    """Accept ``"token"``/``"token-global"``/``"none"``/``None`` or a ready :class:`FairnessSpec`."""
    if isinstance(fair, FairnessSpec):
        return fair
    if fair in (None, "none"):
        return FairnessSpec.none()
    if fair in ("token", "token-global"):
        if system is None:
            raise ValueError("token fairness needs a composed system")
        return FairnessSpec.token_global(system)
    raise ValueError(f"unknown fairness {fair!r}")


# ------------------------------------------------------------ LTL skeleton

def _core(node, leaves, untils, leaf_of):
    """Compile a path formula into nested tuples over leaves and untils.

    ``leaf_of(node)`` decides whether ``node`` is treated as an opaque leaf
    and returns its key.
    """
    key = leaf_of(node)
    if key is not None:
        if key not in leaves:
            leaves[key] = len(leaves)
        return ("leaf", leaves[key])
    if isinstance(node, TrueF):
        return ("true",)
    if isinstance(node, FalseF):
        return ("false",)
    if isinstance(node, Not):
        return ("not", _core(node.arg, leaves, untils, leaf_of))
    if isinstance(node, And):
        return ("and", _core(node.left, leaves, untils, leaf_of),
                _core(node.right, leaves, untils, leaf_of))
    if isinstance(node, Or):
        return ("or", _core(node.left, leaves, untils, leaf_of),
                _core(node.right, leaves, untils, leaf_of))
    if isinstance(node, Implies):
        return ("or", ("not", _core(node.left, leaves, untils, leaf_of)),
                _core(node.right, leaves, untils, leaf_of))
    if isinstance(node, Finally):
        return _until(("true",), _core(node.arg, leaves, untils, leaf_of), untils)
    if isinstance(node, Globally):
        inner = ("not", _core(node.arg, leaves, untils, leaf_of))
        return ("not", _until(("true",), inner, untils))
    if isinstance(node, Until):
        return _until(_core(node.left, leaves, untils, leaf_of),
                      _core(node.right, leaves, untils, leaf_of), untils)
    raise ValueError(f"unexpected node {node!r} in a path formula")


def _until(lhs, rhs, untils):
    pair = (lhs, rhs)
    if pair not in untils:
        untils[pair] = len(untils)
    return ("until", untils[pair])


def _evaluate(expr, letter, assign):
    tag = expr[0]
    if tag == "leaf":
        return (letter >> expr[1]) & 1 == 1
    if tag == "until":
        return (assign >> expr[1]) & 1 == 1
    if tag == "true":
        return True
    if tag == "false":
        return False
    if tag == "not":
        return not _evaluate(expr[1], letter, assign)
    if tag == "and":
        return _evaluate(expr[1], letter, assign) and _evaluate(expr[2], letter, assign)
    return _evaluate(expr[1], letter, assign) or _evaluate(expr[2], letter, assign)


class BuchiAutomaton:
    """Generalized Büchi automaton for an LTL formula without next.

    A state is a bitmask ``A`` that guesses, for every until subformula,
    whether it holds at the current position.  Letters are bitmasks over
    the leaves.  The automaton reads the letter of the current position
    while in a state: a run ``A0 A1 ...`` on ``s0 s1 ...`` needs ``A0`` in
    ``initial(s0)``, ``A(i+1)`` in ``successors(Ai, si)`` and
    ``consistent(s(i+1), A(i+1))``.  Acceptance set ``j`` holds at
    ``(A, s)`` when until ``j`` is not guessed true or its right side holds.
    """

    def __init__(self, formula, leaf_of=None):
        if leaf_of is None:
            def leaf_of(node):
                return node.name if isinstance(node, Atom) else None
        leaves, untils = {}, {}
        self.top = _core(formula, leaves, untils, leaf_of)
        self.leaf_keys = list(leaves)
        self.untils = list(untils)
        self._info = {}

    @property
    def n_untils(self):
        return len(self.untils)

    @property
    def n_acceptance(self):
        return len(self.untils)

    def info(self, letter, assign):
        """``(consistent, fixed_mask, fixed_values, accepting_bits, top_value)``."""
        key = (letter, assign)
        got = self._info.get(key)
        if got is not None:
            return got
        consistent = True
        fixed_mask = fixed_vals = acc = 0
        for j, (lhs, rhs) in enumerate(self.untils):
            held = (assign >> j) & 1
            r = _evaluate(rhs, letter, assign)
            if r:
                if not held:
                    consistent = False
                    break
                acc |= 1 << j
                continue
            if _evaluate(lhs, letter, assign):
                fixed_mask |= 1 << j
                fixed_vals |= held << j
                if not held:
                    acc |= 1 << j
            else:
                if held:
                    consistent = False
                    break
                acc |= 1 << j
        top = consistent and _evaluate(self.top, letter, assign)
        got = (consistent, fixed_mask, fixed_vals, acc, top)
        self._info[key] = got
        return got

    def consistent(self, letter, assign):
        return self.info(letter, assign)[0]

    def initial(self, letter):
        return [a for a in range(1 << self.n_untils) if self.info(letter, a)[4]]

    def successors(self, assign, letter):
        ok, mask, vals, _, _ = self.info(letter, assign)
        if not ok:
            return []
        free = [j for j in range(self.n_untils) if not (mask >> j) & 1]
        out = []
        for bits in range(1 << len(free)):
            b = vals
            for i, j in enumerate(free):
                if (bits >> i) & 1:
                    b |= 1 << j
            out.append(b)
        return out

    def accepting(self, j, assign, letter):
        return (self.info(letter, assign)[3] >> j) & 1 == 1

    def explicit(self):
        """Enumerate the states reachable over all letters.

        Returns ``(states, transitions)`` where ``transitions`` maps
        ``(state, letter)`` to the list of successors consistent with some
        next letter.
        """
        letters = range(1 << len(self.leaf_keys))
        start = {a for x in letters for a in self.initial(x)}
        seen, queue, trans = set(start), deque(start), {}
        while queue:
            a = queue.popleft()
            for x in letters:
                succ = [b for b in self.successors(a, x)
                        if any(self.consistent(y, b) for y in letters)]
                if succ:
                    trans[(a, x)] = succ
                for b in succ:
                    if b not in seen:
                        seen.add(b)
                        queue.append(b)
        return seen, trans

    def accepts(self, stem, cycle):
        """Language membership of the word ``stem cycle^omega`` (letters as bitmasks)."""
        from .lts import Lts
        word = list(stem) + list(cycle)
        states = list(range(len(word)))
        trans = [(i, "e", i + 1) for i in range(len(word) - 1)] + [(len(word) - 1, "e", len(stem))]
        lts = Lts.build(states, [0], trans, {i: {f"#{i}"} for i in states})
        letter_of = [word[i] for i in states]
        good = _good_states(lts, self, letter_of, [])
        return 0 in good


def ltl_to_buchi(formula) -> BuchiAutomaton:
    """Automaton over plain atoms; letters are bitmasks over ``leaf_keys``."""
    return BuchiAutomaton(formula)


# ----------------------------------------------------------------- product

def _tarjan(nodes, succ):
    """Strongly connected components (iterative Tarjan)."""
    index, low, on, stack, comps = {}, {}, set(), [], []
    counter = 0
    for root in nodes:
        if root in index:
            continue
        work = [(root, iter(succ[root]))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on.add(root)
        while work:
            v, it = work[-1]
            pushed = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on.add(w)
                    work.append((w, iter(succ[w])))
                    pushed = True
                    break
                if w in on and index[w] < low[v]:
                    low[v] = index[w]
            if pushed:
                continue
            work.pop()
            if work:
                u = work[-1][0]
                if low[v] < low[u]:
                    low[u] = low[v]
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                comps.append(comp)
    return comps


class _Product:
    def __init__(self, lts, aut, letters, fair_sets, starts):
        self.lts, self.aut, self.letters = lts, aut, letters
        self.fair_sets = fair_sets
        succ = {}
        queue = deque()
        for node in starts:
            if node not in succ:
                succ[node] = None
                queue.append(node)
        while queue:
            node = queue.popleft()
            s, a = node
            out = []
            for _, t in lts.successors(s):
                for b in aut.successors(a, letters[s]):
                    if aut.consistent(letters[t], b):
                        nxt = (t, b)
                        out.append(nxt)
                        if nxt not in succ:
                            succ[nxt] = None
                            queue.append(nxt)
            succ[node] = out
        self.succ = succ
        self.n_acc = aut.n_acceptance + len(fair_sets)
        self.accepting_components = []
        comp_of = {}
        for comp in _tarjan(list(succ), succ):
            members = set(comp)
            if len(comp) == 1 and comp[0] not in succ[comp[0]]:
                continue
            if self._covers(comp):
                self.accepting_components.append(members)
                for node in comp:
                    comp_of[node] = members
        self.comp_of = comp_of
        pred = {node: [] for node in succ}
        for node, out in succ.items():
            for nxt in out:
                pred[nxt].append(node)
        good = set(comp_of)
        queue = deque(good)
        while queue:
            node = queue.popleft()
            for p in pred[node]:
                if p not in good:
                    good.add(p)
                    queue.append(p)
        self.good = good

    def acc_mask(self, node):
        s, a = node
        mask = self.aut.info(self.letters[s], a)[3]
        shift = self.aut.n_acceptance
        for j, fs in enumerate(self.fair_sets):
            if s in fs:
                mask |= 1 << (shift + j)
        return mask

    def _covers(self, comp):
        full = (1 << self.n_acc) - 1
        mask = 0
        for node in comp:
            mask |= self.acc_mask(node)
            if mask == full:
                return True
        return mask == full

    def lasso(self, start):
        """Stem and cycle (as product nodes) of an accepting run from ``start``."""
        target = set(self.comp_of)
        parent = {start: None}
        queue = deque([start])
        hit = None
        while queue:
            node = queue.popleft()
            if node in target:
                hit = node
                break
            for nxt in self.succ[node]:
                if nxt not in parent and nxt in self.good:
                    parent[nxt] = node
                    queue.append(nxt)
        if hit is None:
            return None
        stem = []
        node = hit
        while node is not None:
            stem.append(node)
            node = parent[node]
        stem.reverse()
        comp = self.comp_of[hit]
        cycle = [hit]
        cur = hit
        needed = [j for j in range(self.n_acc)]
        for j in needed:
            if (self.acc_mask(cur) >> j) & 1:
                continue
            cur_path = self._bfs_in(comp, cur, lambda n, j=j: (self.acc_mask(n) >> j) & 1)
            cycle.extend(cur_path[1:])
            cur = cycle[-1]
        back = self._bfs_in(comp, cur, lambda n: n == hit)
        cycle.extend(back[1:-1])
        return stem[:-1], cycle

    def _bfs_in(self, comp, src, goal):
        """Shortest non-empty path inside ``comp`` from ``src`` to a ``goal`` node."""
        parent = {}
        queue = deque()
        for nxt in self.succ[src]:
            if nxt in comp and nxt not in parent:
                parent[nxt] = None
                queue.append(nxt)
        while queue:
            node = queue.popleft()
            if goal(node):
                path = [node]
                while parent[path[-1]] is not None:
                    path.append(parent[path[-1]])
                return [src] + path[::-1]
            for nxt in self.succ[node]:
                if nxt in comp and nxt not in parent:
                    parent[nxt] = node
                    queue.append(nxt)
        raise AssertionError("component search failed")


def _good_states(lts, aut, letters, fair_sets):
    starts = [(s, a) for s in range(len(lts)) for a in aut.initial(letters[s])]
    prod = _Product(lts, aut, letters, fair_sets, starts)
    return {s for (s, a) in starts if (s, a) in prod.good}


# --------------------------------------------------------------- CTL*

class _Checker:
    def __init__(self, lts, fair: FairnessSpec):
        self.lts = lts
        self.all = frozenset(range(len(lts)))
        self.fair_sets = [frozenset(lts.index(s) for s in fs if s in lts._index)
                          for fs in fair.constraints]
        self.memo = {}

    def atom(self, name):
        if self.lts.atoms is not None and name not in self.lts.atoms:
            raise UnknownAtomError(f"atom {name!r} is not in the proposition universe")
        return frozenset(i for i, s in enumerate(self.lts.states) if name in self.lts.labeling[s])

    def sat(self, node) -> frozenset:
        got = self.memo.get(node)
        if got is not None:
            return got
        if isinstance(node, TrueF):
            res = self.all
        elif isinstance(node, FalseF):
            res = frozenset()
        elif isinstance(node, Atom):
            res = self.atom(node.name)
        elif isinstance(node, Not):
            res = self.all - self.sat(node.arg)
        elif isinstance(node, And):
            res = self.sat(node.left) & self.sat(node.right)
        elif isinstance(node, Or):
            res = self.sat(node.left) | self.sat(node.right)
        elif isinstance(node, Implies):
            res = (self.all - self.sat(node.left)) | self.sat(node.right)
        elif isinstance(node, Exists):
            res = self.exists(node.arg)
        elif isinstance(node, Forall):
            res = self.all - self.exists(Not(node.arg))
        else:
            raise ValueError(f"{type(node).__name__} is a path operator outside A/E")
        self.memo[node] = res
        return res

    def automaton(self, path):
        def leaf_of(node):
            return node if is_state(node) else None
        aut = BuchiAutomaton(path, leaf_of)
        sats = [self.sat(k) for k in aut.leaf_keys]
        letters = []
        for i in range(len(self.lts)):
            x = 0
            for j, ss in enumerate(sats):
                if i in ss:
                    x |= 1 << j
            letters.append(x)
        return aut, letters

    def exists(self, path) -> frozenset:
        aut, letters = self.automaton(path)
        return frozenset(_good_states(self.lts, aut, letters, self.fair_sets))

    def witness(self, path, state_index):
        aut, letters = self.automaton(path)
        starts = [(state_index, a) for a in aut.initial(letters[state_index])]
        prod = _Product(self.lts, aut, letters, self.fair_sets, starts)
        for node in starts:
            if node in prod.good:
                stem, cycle = prod.lasso(node)
                return ([self.lts.states[s] for s, _ in stem],
                        [self.lts.states[s] for s, _ in cycle])
        return None


def _as_fairness(fair):
    if fair is None:
        return FairnessSpec.none()
    if isinstance(fair, FairnessSpec):
        return fair
    if fair == "none":
        return FairnessSpec.none()
    raise ValueError("pass a FairnessSpec; token fairness needs the composed system")


def satisfying_states(lts, f: Node, fair=None) -> set:
    c = _Checker(lts, _as_fairness(fair))
    return {lts.states[i] for i in c.sat(f)}


def check(lts, f: Node, fair=None) -> bool:
    """``lts`` satisfies the closed state formula ``f`` in every initial state."""
    if not is_state(f):
        raise ValueError("check expects a state formula; wrap path formulas in A or E")
    c = _Checker(lts, _as_fairness(fair))
    good = c.sat(f)
    return all(lts.index(s) in good for s in lts.initial)


@dataclass
class Lasso:
    stem: list
    cycle: list

    def to_json(self, show=str):
        return {"stem": [show(s) for s in self.stem], "cycle": [show(s) for s in self.cycle]}


def counterexample(lts, f: Node, fair=None) -> Optional[Lasso]:
    """A lasso refuting ``f`` when ``f`` is ``A phi`` (or ``!E phi``) and fails."""
    if isinstance(f, Forall):
        path = Not(f.arg)
    elif isinstance(f, Not) and isinstance(f.arg, Exists):
        path = f.arg.arg
    else:
        return None
    c = _Checker(lts, _as_fairness(fair))
    for s in sorted(lts.initial, key=lts.index):
        got = c.witness(path, lts.index(s))
        if got is not None:
            return Lasso(*got)
    return None


def witness(lts, f: Node, fair=None) -> Optional[Lasso]:
    """A lasso satisfying the path formula of ``f = E phi`` from an initial state."""
    if not isinstance(f, Exists):
        return None
    c = _Checker(lts, _as_fairness(fair))
    for s in sorted(lts.initial, key=lts.index):
        got = c.witness(f.arg, lts.index(s))
        if got is not None:
            return Lasso(*got)
    return None
