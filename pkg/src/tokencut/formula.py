"""Abstract syntax for prenex indexed CTL* without next.

Bodies are trees of the node classes below.  Inside a quantified formula an
:class:`Atom` carries an index variable name; after instantiation it carries
a 1-based position, and prints as ``p@1``.  Plain atoms with no index are
allowed in closed formulas over arbitrary LTSs.
"""
from dataclasses import dataclass
from itertools import permutations
from typing import Optional, Union

from .topology import Topology


class Node:
    __slots__ = ()


@dataclass(frozen=True)
class TrueF(Node):
    pass


@dataclass(frozen=True)
class FalseF(Node):
    pass


@dataclass(frozen=True)
class Atom(Node):
    prop: str
    index: Union[str, int, None] = None

    @property
    def name(self) -> str:
        return self.prop if self.index is None else f"{self.prop}@{self.index}"


@dataclass(frozen=True)
class Eq(Node):
    left: str
    right: str


@dataclass(frozen=True)
class Not(Node):
    arg: Node


@dataclass(frozen=True)
class And(Node):
    left: Node
    right: Node


@dataclass(frozen=True)
class Or(Node):
    left: Node
    right: Node


@dataclass(frozen=True)
class Implies(Node):
    left: Node
    right: Node


@dataclass(frozen=True)
class Until(Node):
    left: Node
    right: Node


@dataclass(frozen=True)
class Finally(Node):
    arg: Node


@dataclass(frozen=True)
class Globally(Node):
    arg: Node


@dataclass(frozen=True)
class Exists(Node):
    """Path quantifier E."""
    arg: Node


@dataclass(frozen=True)
class Forall(Node):
    """Path quantifier A."""
    arg: Node


TRUE, FALSE = TrueF(), FalseF()
BINARY = (And, Or, Implies, Until)
UNARY = (Not, Finally, Globally, Exists, Forall)
TEMPORAL = (Until, Finally, Globally)


@dataclass(frozen=True)
class Quantifier:
    kind: str  # "forall" or "exists"
    var: str
    distinct: bool = False
    edge_of: Optional[str] = None


@dataclass(frozen=True)
class Formula:
    prefix: tuple
    body: Node

    @property
    def variables(self):
        return tuple(q.var for q in self.prefix)


@dataclass(frozen=True)
class FormulaProfile:
    k: int
    d: int
    alternating: bool


# ---------------------------------------------------------------- traversal

def children(node):
    if isinstance(node, BINARY):
        return (node.left, node.right)
    if isinstance(node, UNARY):
        return (node.arg,)
    return ()


def rebuild(node, kids):
    if isinstance(node, BINARY):
        return type(node)(*kids)
    if isinstance(node, UNARY):
        return type(node)(kids[0])
    return node


def walk(node):
    yield node
    for c in children(node):
        yield from walk(c)


def depth(node) -> int:
    """Nesting depth of path quantifiers."""
    below = max((depth(c) for c in children(node)), default=0)
    return below + 1 if isinstance(node, (Exists, Forall)) else below


def is_state(node) -> bool:
    """True when no temporal operator occurs outside a path quantifier."""
    if isinstance(node, TEMPORAL):
        return False
    if isinstance(node, (Exists, Forall)):
        return True
    return all(is_state(c) for c in children(node))


def atoms_of(node) -> set:
    return {n.name for n in walk(node) if isinstance(n, Atom)}


def profile(f) -> FormulaProfile:
    if isinstance(f, Node):
        return FormulaProfile(0, depth(f), False)
    kinds = {q.kind for q in f.prefix}
    return FormulaProfile(len(f.prefix), depth(f.body), len(kinds) > 1)


# ------------------------------------------------------------------ printing

def print_body(node) -> str:
    if isinstance(node, TrueF):
        return "true"
    if isinstance(node, FalseF):
        return "false"
    if isinstance(node, Atom):
        return node.name
    if isinstance(node, Eq):
        return f"({node.left} = {node.right})"
    if isinstance(node, Not):
        return "!" + print_body(node.arg)
    if isinstance(node, Finally):
        return "F " + print_body(node.arg)
    if isinstance(node, Globally):
        return "G " + print_body(node.arg)
    if isinstance(node, Exists):
        return "E " + print_body(node.arg)
    if isinstance(node, Forall):
        return "A " + print_body(node.arg)
    op = {And: "&", Or: "|", Implies: "->", Until: "U"}[type(node)]
    return f"({print_body(node.left)} {op} {print_body(node.right)})"


def print_formula(f) -> str:
    if isinstance(f, Node):
        return print_body(f)
    parts = []
    for q in f.prefix:
        s = f"{q.kind} {q.var}"
        if q.distinct:
            s += " distinct"
        if q.edge_of is not None:
            s += f" in E({q.edge_of})"
        parts.append(s)
    return " ".join(parts + [".", print_body(f.body)])


# ------------------------------------------------------------- instantiation

def substitute(body: Node, env: dict) -> Node:
    """Replace index variables by positions and resolve ``x = y`` atoms.

    ``env`` maps each variable to a pair ``(vertex, position)``.
    """
    if isinstance(body, Atom):
        if body.index is None or isinstance(body.index, int):
            return body
        return Atom(body.prop, env[body.index][1])
    if isinstance(body, Eq):
        return TRUE if env[body.left][0] == env[body.right][0] else FALSE
    kids = children(body)
    if not kids:
        return body
    return rebuild(body, tuple(substitute(c, env) for c in kids))


@dataclass(frozen=True)
class Plan:
    """Evaluation plan: ``and``/``or`` over children, or a ``leaf``.

    A leaf pairs an index tuple (distinct vertices, by position) with the
    closed body to check on the corresponding projection.
    """
    kind: str
    children: tuple = ()
    gbar: tuple = ()
    body: Optional[Node] = None

    def leaves(self):
        if self.kind == "leaf":
            yield self
        for c in self.children:
            yield from c.leaves()

    def evaluate(self, leaf_value) -> bool:
        """Short-circuit evaluation with ``leaf_value(plan_leaf) -> bool``."""
        if self.kind == "leaf":
            return leaf_value(self)
        if self.kind == "and":
            return all(c.evaluate(leaf_value) for c in self.children)
        return any(c.evaluate(leaf_value) for c in self.children)


def instantiate(f: Formula, g: Topology) -> Plan:
    """Expand the quantifier prefix over the vertices of ``g``."""
    succ = g.succ_map()

    def expand(i, assignment):
        if i == len(f.prefix):
            return _leaf(f, assignment)
        q = f.prefix[i]
        if q.edge_of is not None:
            candidates = succ[assignment[q.edge_of]]
        else:
            candidates = list(g.vertices)
        if q.distinct:
            used = set(assignment.values())
            candidates = [v for v in candidates if v not in used]
        kids = []
        for v in candidates:
            assignment[q.var] = v
            kids.append(expand(i + 1, assignment))
            del assignment[q.var]
        return Plan("and" if q.kind == "forall" else "or", tuple(kids))

    return expand(0, {})


def _leaf(f, assignment):
    gbar, env = [], {}
    for q in f.prefix:
        v = assignment[q.var]
        if v not in gbar:
            gbar.append(v)
        env[q.var] = (v, gbar.index(v) + 1)
    return Plan("leaf", gbar=tuple(gbar), body=substitute(f.body, env))


def closed_body(f: Formula) -> Node:
    """The body with variable ``x_j`` mapped to position ``j`` (all distinct)."""
    env = {q.var: (i, i) for i, q in enumerate(f.prefix, start=1)}
    return substitute(f.body, env)


def tuples(n: int, k: int):
    """All k-tuples of distinct vertices of an n-vertex topology."""
    return permutations(range(1, n + 1), k)
