"""Brute-force LTL oracle: enumerate lassos and evaluate formulas on them directly.

It shares no code with the automaton-based checker and serves as its
reference on small systems.
"""
from .formula import (And, Atom, FalseF, Finally, Globally, Implies, Not, Or, TrueF, Until)

MAX_STATES = 12


class OracleBoundError(ValueError):
    pass


def evaluate_lasso(f, labels, loop_start):
    """Truth values of LTL formula ``f`` at every position of a lasso word.

    ``labels[i]`` is the set of atoms true at position ``i``; after the last
    position the word continues at ``loop_start``.
    """
    n = len(labels)
    nxt = list(range(1, n)) + [loop_start]
    memo = {}

    def until(lhs, rhs):
        val = [False] * n
        changed = True
        while changed:
            changed = False
            for i in range(n - 1, -1, -1):
                v = rhs[i] or (lhs[i] and val[nxt[i]])
                if v and not val[i]:
                    val[i] = True
                    changed = True
        return val

    def ev(g):
        got = memo.get(id(g))
        if got is not None:
            return got[1]
        if isinstance(g, TrueF):
            res = [True] * n
        elif isinstance(g, FalseF):
            res = [False] * n
        elif isinstance(g, Atom):
            res = [g.name in labels[i] for i in range(n)]
        elif isinstance(g, Not):
            res = [not x for x in ev(g.arg)]
        elif isinstance(g, And):
            res = [a and b for a, b in zip(ev(g.left), ev(g.right))]
        elif isinstance(g, Or):
            res = [a or b for a, b in zip(ev(g.left), ev(g.right))]
        elif isinstance(g, Implies):
            res = [(not a) or b for a, b in zip(ev(g.left), ev(g.right))]
        elif isinstance(g, Until):
            res = until(ev(g.left), ev(g.right))
        elif isinstance(g, Finally):
            res = until([True] * n, ev(g.arg))
        elif isinstance(g, Globally):
            res = [not x for x in until([True] * n, [not y for y in ev(g.arg)])]
        else:
            raise ValueError(f"{type(g).__name__} is not an LTL operator")
        memo[id(g)] = (g, res)
        return res

    return ev(f)


def lassos(lts, start, max_stem, max_cycle):
    """Yield ``(path, loop_start)`` for every lasso from ``start`` within the bounds."""
    limit = max_stem + max_cycle
    path = [lts.index(start)]
    stack = [iter(lts.successors(path[0]))]
    succ_sets = [set(j for _, j in lts.successors(i)) for i in range(len(lts))]

    def closings():
        last = succ_sets[path[-1]]
        for j, s in enumerate(path):
            if s in last and j <= max_stem and len(path) - j <= max_cycle:
                yield j

    for j in closings():
        yield path, j
    while stack:
        try:
            _, nxt = next(stack[-1])
        except StopIteration:
            stack.pop()
            path.pop()
            continue
        if len(path) >= limit:
            continue
        path.append(nxt)
        stack.append(iter(lts.successors(nxt)))
        for j in closings():
            yield path, j


def oracle_check(lts, f, fair=None, max_stem=None, max_cycle=None) -> bool:
    """Every initial state has a fair lasso satisfying the LTL formula ``f``.

    This is the verdict of ``E f`` for the automaton-based checker.  The
    default bounds are ``|S|`` for the stem and ``2|S|`` for the cycle, so a
    ``False`` answer means no witness exists within those bounds.
    """
    if len(lts) > MAX_STATES:
        raise OracleBoundError(f"{len(lts)} states is beyond the oracle bound of {MAX_STATES}; "
                               "use the model checker instead")
    n = len(lts)
    max_stem = n if max_stem is None else max_stem
    max_cycle = 2 * n if max_cycle is None else max_cycle
    fair_sets = []
    if fair is not None:
        fair_sets = [frozenset(lts.index(s) for s in fs) for fs in fair.constraints]
    labels = [lts.labeling[s] for s in lts.states]
    cache = {}
    for s0 in lts.initial:
        found = False
        for path, j in lassos(lts, s0, max_stem, max_cycle):
            cycle = set(path[j:])
            if any(not (cycle & fs) for fs in fair_sets):
                continue
            key = (tuple(labels[i] for i in path), j)
            ok = cache.get(key)
            if ok is None:
                ok = evaluate_lasso(f, key[0], j)[0]
                cache[key] = ok
            if ok:
                found = True
                break
        if not found:
            return False
    return True
