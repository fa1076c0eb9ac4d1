"""Checking prenex indexed formulas on a composed system.

The quantifier prefix is expanded over the topology; each leaf is a closed
body checked on the projection to the leaf's index tuple.
"""
from dataclasses import dataclass, field
from typing import Optional

from .checker import Lasso, check, counterexample, fairness_for
from .contraction import contract
from .formula import Formula, Forall, instantiate
from .system import SystemLts, build_system, project


@dataclass
class IndexedResult:
    holds: bool
    leaves_checked: int = 0
    deciding: list = field(default_factory=list)
    counterexample: Optional[tuple] = None  # (gbar, body, Lasso)

    def __bool__(self):
        return self.holds


class LeafCache:
    """Leaf verdicts memoized by ``(gbar, body)``.

    With ``depth`` set, leaves are keyed by the depth-``depth`` contraction of
    the tuple instead, so equivalent tuples share one model-checking run.
    """

    def __init__(self, system: SystemLts, fair, depth=None):
        self.system = system
        self.fair = fairness_for(fair, system)
        self.depth = depth
        self.values = {}
        self.runs = 0

    def key(self, gbar, body):
        if self.depth is None:
            return (gbar, body)
        return (contract(self.system.topology, gbar, self.depth).key(), body)

    def __call__(self, gbar, body) -> bool:
        key = self.key(gbar, body)
        got = self.values.get(key)
        if got is None:
            self.runs += 1
            got = check(project(self.system, gbar), body, self.fair)
            self.values[key] = got
        return got


def check_indexed(template, topology, f: Formula, fair="token", *, system=None,
                  reuse_depth=None, evidence=False):
    """Decide ``f`` on the system of ``template`` over ``topology``.

    Returns a bool, or an :class:`IndexedResult` when ``evidence`` is set.
    ``reuse_depth`` shares leaf verdicts between tuples with equal
    contractions at that depth (only sound when it is at least the formula's
    nesting depth).
    """
    if system is None:
        system = build_system(template, topology)
    cache = LeafCache(system, fair, reuse_depth)
    plan = instantiate(f, topology)
    deciding = []

    def leaf_value(leaf):
        v = cache(leaf.gbar, leaf.body)
        deciding.append((leaf.gbar, v))
        return v

    holds = plan.evaluate(leaf_value)
    if not evidence:
        return holds
    res = IndexedResult(holds, cache.runs, deciding)
    if not holds and deciding:
        gbar, v = deciding[-1]
        leaf = next(l for l in plan.leaves() if l.gbar == gbar)
        if not v and isinstance(leaf.body, Forall):
            lasso = counterexample(project(system, gbar), leaf.body, cache.fair)
            if lasso is not None:
                res.counterexample = (gbar, leaf.body, lasso)
    return res


def lasso_json(system: SystemLts, lasso: Lasso):
    return lasso.to_json(lambda s: " / ".join(str(q) for q in s))
