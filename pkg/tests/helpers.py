"""Random instance generators shared by the test modules."""
import random

from tokencut.lts import Lts
from tokencut.topology import Topology


def random_lts(rng, max_states=5, props="pq"):
    """Small LTS with out-degree 1 or 2; occasionally one state is a deadlock."""
    n = rng.randint(1, max_states)
    trans = []
    for s in range(n):
        for t in rng.sample(range(n), rng.randint(1, min(2, n))):
            trans.append((s, "a", t))
    if rng.random() < 0.2 and len(trans) > 1:
        trans.pop(rng.randrange(len(trans)))
    lab = {s: {a for a in props if rng.random() < 0.5} for s in range(n)}
    return Lts.build(range(n), [0], trans, lab)


def random_partition_fairness(rng, lts):
    from tokencut.checker import FairnessSpec
    blocks = [set(), set()]
    for s in lts.states:
        blocks[rng.randrange(2)].add(s)
    return FairnessSpec.from_sets([b for b in blocks if b])


def random_topology(rng, n, p=0.35):
    edges = frozenset((u, w) for u in range(1, n + 1) for w in range(1, n + 1)
                      if u != w and rng.random() < p)
    return Topology(n, edges, 1, name=f"random:{n}")


def random_strong_topology(rng, n, p=0.3):
    """Random strongly connected digraph: a shuffled Hamiltonian cycle plus extra edges."""
    order = list(range(1, n + 1))
    rng.shuffle(order)
    edges = {(a, b) for a, b in zip(order, order[1:] + order[:1]) if a != b}
    for u in range(1, n + 1):
        for w in range(1, n + 1):
            if u != w and rng.random() < p:
                edges.add((u, w))
    return Topology(n, frozenset(edges), 1, name=f"strong:{n}")


def stutter_expand(lts, rng):
    """Insert a fresh copy of one state along each of its incoming edges."""
    s = rng.choice(lts.states)
    copy = ("copy", s)
    trans = []
    for (a, act, b) in lts.transitions:
        trans.append((a, act, copy if b == s else b))
    trans.append((copy, "a", s))
    lab = dict(lts.labeling)
    lab[copy] = lts.labeling[s]
    init = [copy if x == s else x for x in lts.initial]
    return Lts.build(list(lts.states) + [copy], init, trans, lab)


def rng_for(seed):
    return random.Random(seed)
