"""Named and random formula generators."""
import random

from .formula import (And, Atom, Exists, FALSE, Finally, Forall, Formula, Globally, Implies,
                      Not, Or, Quantifier, TRUE, Until)


def tok(x):
    return Atom("tok", x)


def gen_phi_k(k: int) -> Formula:
    """Some k distinct vertices form a directed cycle the token runs around.

    The body is ``E F (tok@x1 & (tok@x1 U (tok@x2 & (tok@x2 U ... (tok@xk U tok@x1)))))``:
    the token sits at x1, its next holder is x2, and so on, and the holder
    after xk is x1 again.
    """
    if k < 2:
        raise ValueError("phi_k needs k >= 2")
    xs = [f"x{i}" for i in range(1, k + 1)]
    chain = Until(tok(xs[-1]), tok(xs[0]))
    for x in reversed(xs[:-1]):
        chain = Until(tok(x), And(tok(xs[xs.index(x) + 1]), chain))
    body = Exists(Finally(And(tok(xs[0]), chain)))
    prefix = tuple(Quantifier("exists", x, distinct=True) for x in xs)
    return Formula(prefix, body)


def adj(a, b):
    """``a`` and ``b`` are neighbours on the token's route, in either order.

    ``G(tok@b -> tok@b U tok@a) | G(tok@a -> tok@a U tok@b)``: whenever one
    of them holds the token, the other is the next holder.
    """
    return Or(Globally(Implies(tok(b), Until(tok(b), tok(a)))),
              Globally(Implies(tok(a), Until(tok(a), tok(b)))))


def gen_adj_formula() -> Formula:
    """There are i, j such that every k is adjacent to i or to j.

    Holds on uni-rings of size at most 6 and fails from size 7 on.
    """
    prefix = (Quantifier("exists", "i"), Quantifier("exists", "j"), Quantifier("forall", "k"))
    body = Forall(Or(adj("k", "i"), adj("k", "j")))
    return Formula(prefix, body)


def random_formula(k: int, d: int, size: int = 6, seed=None, props=("tok",),
                   kinds=None) -> Formula:
    """A random prenex formula with ``k`` distinct variables and depth at most ``d``.

    ``size`` bounds the number of operators.  ``kinds`` fixes the prefix
    kinds (a string of ``a``/``e``); otherwise they are drawn at random.
    """
    rng = random.Random(seed)
    xs = [f"x{i}" for i in range(1, k + 1)]
    if kinds is None:
        kinds = "".join(rng.choice("ae") for _ in xs)
    prefix = tuple(Quantifier("forall" if c == "a" else "exists", x, distinct=True)
                   for c, x in zip(kinds, xs))
    body = random_body(rng, xs, d, size, props)
    return Formula(prefix, body)


def random_body(rng, indices, d, size, props=("tok",)):
    """Random state formula over ``p@i`` atoms for ``i`` in ``indices``."""
    budget = [max(size, 0)]

    def leaf():
        if indices and rng.random() < 0.85:
            return Atom(rng.choice(props), rng.choice(indices))
        return rng.choice([TRUE, FALSE])

    def state(depth):
        if budget[0] <= 0:
            return leaf()
        r = rng.random()
        if depth > 0 and r < 0.55:
            budget[0] -= 1
            return rng.choice([Exists, Forall])(path(depth - 1))
        if r < 0.7:
            budget[0] -= 1
            return Not(state(depth))
        if r < 0.85:
            budget[0] -= 1
            return rng.choice([And, Or, Implies])(state(depth), state(depth))
        return leaf()

    def path(depth):
        if budget[0] <= 0:
            return state(depth)
        r = rng.random()
        budget[0] -= 1
        if r < 0.3:
            return Until(path(depth), path(depth))
        if r < 0.45:
            return Finally(path(depth))
        if r < 0.6:
            return Globally(path(depth))
        if r < 0.7:
            return Not(path(depth))
        if r < 0.8:
            return rng.choice([And, Or])(path(depth), path(depth))
        budget[0] += 1
        return state(depth)

    return state(d)


def random_ltl(rng, atoms, size):
    """Random LTL formula (no path quantifiers) with at most ``size`` operators."""
    if size <= 0 or rng.random() < 0.2:
        return Atom(rng.choice(atoms)) if rng.random() < 0.9 else TRUE
    r = rng.random()
    if r < 0.25:
        left = rng.randint(0, size - 1)
        return Until(random_ltl(rng, atoms, left), random_ltl(rng, atoms, size - 1 - left))
    if r < 0.4:
        return Finally(random_ltl(rng, atoms, size - 1))
    if r < 0.55:
        return Globally(random_ltl(rng, atoms, size - 1))
    if r < 0.7:
        return Not(random_ltl(rng, atoms, size - 1))
    left = rng.randint(0, size - 1)
    op = rng.choice([And, Or, Implies])
    return op(random_ltl(rng, atoms, left), random_ltl(rng, atoms, size - 1 - left))
