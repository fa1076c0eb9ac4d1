"""Parameterized model checking over topology families.

Three drivers:

* ``solve_pmcp(mode="cutoff")`` checks every family member up to the
  family's cutoff, which decides the question for non-alternating prefixes.
* ``solve_pmcp(mode="sweep")`` checks members up to a bound and can only
  refute.
* ``decompose`` groups quantifier leaves by their contraction, checks one
  realizing system per group and evaluates the resulting Boolean skeleton
  for each size.
"""
import hashlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

from .contraction import contract
from .formula import Formula, instantiate, profile
from .indexed import LeafCache, check_indexed, lasso_json
from .system import build_system
from .topology import MIN_SIZE, Topology, make_family

FAMILIES = ("ring", "biring", "clique", "star")
YES, NO, UNKNOWN = "Yes", "No", "Unknown"


@dataclass(frozen=True)
class Family:
    """A structural family by name, or an explicit list of topologies."""
    kind: str
    members: tuple = ()

    def member(self, n: int) -> Topology:
        if self.kind == "explicit":
            for g in self.members:
                if g.n == n:
                    return g
            raise KeyError(f"no member of size {n}")
        return make_family(self.kind, n)

    def sizes(self, hi: int):
        if self.kind == "explicit":
            return sorted({g.n for g in self.members if g.n <= hi})
        return list(range(MIN_SIZE[self.kind], hi + 1))


def as_family(family) -> Family:
    if isinstance(family, Family):
        return family
    if family in FAMILIES:
        return Family(family)
    if isinstance(family, (list, tuple)):
        return Family("explicit", tuple(family))
    raise ValueError(f"unknown family {family!r}; expected one of {', '.join(FAMILIES)}")


@dataclass
class Verdict:
    answer: str
    bound: Optional[int] = None
    evidence: dict = field(default_factory=dict)
    per_size: dict = field(default_factory=dict)
    counterexample: Optional[dict] = None

    def __post_init__(self):
        if self.answer == NO and self.counterexample is None and "failing_size" not in self.evidence:
            raise ValueError("a No verdict needs evidence")

    @property
    def is_yes(self):
        return self.answer == YES

    def exit_code(self) -> int:
        return {YES: 0, NO: 1, UNKNOWN: 3}[self.answer]

    def __str__(self):
        return self.answer if self.answer != UNKNOWN else f"UnknownUpTo({self.bound})"


def cutoff_for(family, k: int, alternating: bool = False) -> Optional[int]:
    """Cutoff for non-alternating ``k``-indexed formulas, or ``None``."""
    fam = as_family(family)
    if fam.kind == "explicit":
        raise ValueError("explicit families have no cutoff; use decomposition or a sweep")
    if alternating:
        return None
    if fam.kind in ("ring", "biring"):
        return 2 * k
    return k + 1


def _check_size(args):
    kind, members, n, template, f, fair = args
    g = Family(kind, members).member(n)
    system = build_system(template, g)
    res = check_indexed(template, g, f, fair, system=system, evidence=True)
    cex = None
    if not res.holds and res.counterexample is not None:
        gbar, body, lasso = res.counterexample
        cex = {"size": n, "gbar": list(gbar), "lasso": lasso_json(system, lasso)}
    elif not res.holds:
        cex = {"size": n, "deciding": [[list(gb), v] for gb, v in res.deciding[-3:]]}
    return n, res.holds, cex


def _map(fn, items, jobs):
    if jobs and jobs > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def solve_pmcp(family, template, f: Formula, mode="cutoff", bound=None, fair="token",
               jobs=1) -> Verdict:
    fam = as_family(family)
    prof = profile(f)
    if mode == "cutoff":
        if template.direction_aware:
            raise ValueError("direction-aware templates have no cutoff; use a sweep")
        c = cutoff_for(fam, prof.k, prof.alternating)
        if c is None:
            raise ValueError("alternating prefixes have no cutoff; use sweep or decomposition")
        hi = max(c, MIN_SIZE[fam.kind])
    elif mode == "sweep":
        if bound is None:
            raise ValueError("sweep mode needs a bound")
        c, hi = None, bound
    else:
        raise ValueError(f"unknown mode {mode!r}")
    sizes = fam.sizes(hi)
    results = _map(_check_size, [(fam.kind, fam.members, n, template, f, fair) for n in sizes], jobs)
    per_size = {n: ok for n, ok, _ in results}
    for n, ok, cex in sorted(results, key=lambda r: r[0]):
        if not ok:
            return Verdict(NO, hi, {"mode": mode, "failing_size": n}, per_size, cex)
    if mode == "cutoff":
        return Verdict(YES, c, {"mode": "cutoff", "cutoff": c,
                                "justification": f"{fam.kind} cutoff for {prof.k}-indexed "
                                                 "non-alternating formulas"}, per_size)
    return Verdict(UNKNOWN, hi, {"mode": "sweep", "bound": hi}, per_size)


# ------------------------------------------------------------ contractions

@dataclass
class Enumeration:
    sets: dict
    realizers: dict
    n0: Optional[int]
    size_bound: int

    @property
    def stabilized(self) -> bool:
        """The set is constant on at least two consecutive sizes at the end."""
        return self.n0 is not None and self.n0 < self.size_bound

    def shapes(self, n):
        return {(nodes, edges) for (nodes, edges, _init) in self.sets[n]}

    def to_json(self):
        return {"sizes": {str(n): len(s) for n, s in sorted(self.sets.items())},
                "n0": self.n0, "stabilized": self.stabilized,
                "representatives": len(self.realizers)}


def stabilization_point(values: dict) -> Optional[int]:
    """Least ``n`` with ``values[m] == values[max]`` for every ``m >= n``."""
    sizes = sorted(values)
    if not sizes:
        return None
    last = values[sizes[-1]]
    n0 = sizes[-1]
    for n in reversed(sizes):
        if values[n] != last:
            break
        n0 = n
    return n0


def enumerate_contractions(family, k: int, d: int, size_bound: int) -> Enumeration:
    from .formula import tuples
    fam = as_family(family)
    sets, realizers = {}, {}
    for n in fam.sizes(size_bound):
        g = fam.member(n)
        keys = set()
        for gbar in tuples(n, k):
            key = contract(g, gbar, d).key()
            keys.add(key)
            realizers.setdefault(key, (n, gbar))
        sets[n] = frozenset(keys)
    return Enumeration(sets, realizers, stabilization_point(sets), size_bound)


# ------------------------------------------------------------ decomposition

@dataclass
class Decomposition:
    representatives: dict          # leaf id -> (size, gbar, body)
    skeletons: dict                # size -> canonical Boolean skeleton
    leaf_values: dict              # leaf id -> bool
    n0: Optional[int]
    verdict: Verdict

    def digest(self) -> str:
        text = "\n".join(f"{i}:{n}:{list(gb)}:{b!r}"
                         for i, (n, gb, b) in sorted(self.representatives.items()))
        return hashlib.sha1(text.encode()).hexdigest()[:12]


def _skeleton(plan, leaf_id):
    """Canonical form: leaves become ids, same-kind nesting is flattened."""
    if plan.kind == "leaf":
        return leaf_id(plan)
    parts = set()
    for c in plan.children:
        s = _skeleton(c, leaf_id)
        if isinstance(s, tuple) and s[0] == plan.kind:
            parts.update(s[1])
        else:
            parts.add(s)
    if len(parts) == 1:
        return parts.pop()
    return (plan.kind, frozenset(parts))


def _eval_skeleton(s, value):
    if not isinstance(s, tuple):
        return value[s]
    kind, parts = s
    if kind == "and":
        return all(_eval_skeleton(p, value) for p in parts)
    return any(_eval_skeleton(p, value) for p in parts)


def decompose(family, template, f: Formula, d: Optional[int] = None, size_bound: int = 8,
              fair="token") -> Decomposition:
    """Evaluate ``f`` over the family through contraction representatives.

    Each quantifier leaf ``(gbar, body)`` of each size is identified by the
    depth-``d`` contraction of ``gbar``; one system per identifier is checked.
    The per-size Boolean skeleton over identifiers must stabilize before
    ``size_bound``, otherwise the verdict is Unknown.
    """
    fam = as_family(family)
    prof = profile(f)
    d = prof.d if d is None else d
    if d < prof.d:
        raise ValueError(f"depth {d} is below the formula's nesting depth {prof.d}")
    ids, reps = {}, {}

    def leaf_id(leaf, g, n):
        key = (contract(g, leaf.gbar, d).key(), leaf.body)
        if key not in ids:
            ids[key] = len(ids)
            reps[ids[key]] = (n, leaf.gbar, leaf.body)
        return ids[key]

    skeletons = {}
    for n in fam.sizes(size_bound):
        g = fam.member(n)
        skeletons[n] = _skeleton(instantiate(f, g), lambda leaf: leaf_id(leaf, g, n))

    values, systems = {}, {}
    for i, (n, gbar, body) in sorted(reps.items()):
        if n not in systems:
            systems[n] = LeafCache(build_system(template, fam.member(n)), fair)
        values[i] = systems[n](gbar, body)

    per_size = {n: _eval_skeleton(s, values) for n, s in skeletons.items()}
    n0 = stabilization_point(skeletons)
    evidence = {"mode": "decomposition", "depth": d, "n0": n0, "leaves": len(reps)}
    failing = [n for n, ok in sorted(per_size.items()) if not ok]
    if failing:
        evidence["failing_size"] = failing[0]
        verdict = Verdict(NO, size_bound, evidence, per_size)
    elif n0 is None or n0 >= size_bound:
        verdict = Verdict(UNKNOWN, size_bound, evidence, per_size)
    else:
        evidence["justification"] = (f"skeleton constant for sizes {n0}..{size_bound} "
                                     "(empirical stabilization)")
        verdict = Verdict(YES, size_bound, evidence, per_size)
    return Decomposition(reps, skeletons, values, n0, verdict)


def report_json(verdict: Verdict, family, k, d, decomposition: Optional[Decomposition] = None):
    fam = as_family(family)
    out = {
        "mode": verdict.evidence.get("mode"),
        "family": fam.kind,
        "k": k,
        "d": d,
        "cutoff_or_bound": verdict.bound,
        "answer": str(verdict),
        "per_size_verdicts": {str(n): v for n, v in sorted(verdict.per_size.items())},
        "evidence": verdict.evidence,
    }
    if verdict.counterexample is not None:
        out["counterexample"] = verdict.counterexample
    if decomposition is not None:
        out["representatives_digest"] = decomposition.digest()
    return out
