"""Acceptance suite: ten end-to-end criteria, one pass/fail line each.

Run with ``pytest tests/test_acceptance.py -v`` (the lines appear in the
terminal summary) or directly with ``python tests/test_acceptance.py``.
"""
import itertools
import os
import random
import sys
import time

import networkx as nx
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from helpers import random_lts, random_partition_fairness, random_strong_topology, random_topology  # noqa: E402
from tokencut.checker import FairnessSpec, check  # noqa: E402
from tokencut.cm import SAMPLE_MACHINES, cm_to_biring, never_halts_formula, reference_halts  # noqa: E402
from tokencut.contraction import (_check_chain, contract, equivalent_graphs, mark_all,  # noqa: E402
                                  marking_leq, x_reachable)
from tokencut.formula import Exists  # noqa: E402
from tokencut.generators import gen_adj_formula, gen_phi_k, random_body, random_ltl  # noqa: E402
from tokencut.indexed import check_indexed  # noqa: E402
from tokencut.lts import destutter  # noqa: E402
from tokencut.oracle import oracle_check  # noqa: E402
from tokencut.parser import parse_formula  # noqa: E402
from tokencut.pmcp import NO, YES, solve_pmcp  # noqa: E402
from tokencut.system import build_system, every_cycle_passes_token, project  # noqa: E402
from tokencut.template import builtin_template  # noqa: E402
from tokencut.topology import make_biring, make_clique, make_family, make_ring, make_star  # noqa: E402

RESULTS = {}


def record(num, title, ok, detail, started, limit):
    took = time.time() - started
    in_time = took <= limit
    status = "PASS" if ok and in_time else "FAIL"
    line = f"[{status}] criterion {num:>2}: {title}: {detail} ({took:.1f}s, limit {limit}s)"
    RESULTS[num] = line
    print(line)
    return ok and in_time


# ------------------------------------------------------------ 1

def criterion_1():
    t0 = time.time()
    shuttle = builtin_template("shuttle")
    f = gen_adj_formula()
    r6 = check_indexed(shuttle, make_ring(6), f)
    r7 = check_indexed(shuttle, make_ring(7), f)
    return record(1, "adjacency formula on rings", r6 is True and r7 is False,
                  f"ring 6 -> {r6}, ring 7 -> {r7}", t0, 10)


# ------------------------------------------------------------ 2

def ring_shaped(c):
    """Every class has one successor besides itself and the successors form one cycle."""
    succ = {}
    for (a, b) in c.edges:
        if a != b:
            succ.setdefault(a, set()).add(b)
    if len(c.nodes) == 1:
        return not succ
    if any(len(succ.get(m, ())) != 1 for m in c.nodes):
        return False
    start = c.nodes[0]
    seen, m = [], start
    while m not in seen:
        seen.append(m)
        m = next(iter(succ[m]))
    return m == start and len(seen) == len(c.nodes)


def hub_loops_ok(c):
    for m in c.nodes:
        members = c.members[m]
        if c.labels[m]:
            if len(members) != 1 or m in c.self_loops():
                return False
        elif (m in c.self_loops()) != (len(members) > 1):
            return False
    return True


def criterion_2():
    t0 = time.time()
    bad, total = [], 0
    for k in (1, 2, 3):
        for d in (1, 2, 3):
            for n in range(2 * k, 13):
                g = make_ring(n)
                for gbar in itertools.permutations(g.vertices, k):
                    c = contract(g, gbar, d)
                    total += 1
                    if len(c.nodes) > 2 * k or not ring_shaped(c) or not hub_loops_ok(c):
                        bad.append((n, gbar, d))
    return record(2, "ring contractions", not bad,
                  f"{total} contractions, {len(bad)} violations", t0, 30)


# ------------------------------------------------------------ 3

def criterion_3():
    t0 = time.time()
    clique_bad, star_sizes, total = [], {}, 0
    for k in (1, 2, 3):
        for d in (1, 2, 3):
            for n in range(k + 1, 9):
                gc, gs = make_clique(n), make_star(n)
                for gbar in itertools.permutations(range(1, n + 1), k):
                    total += 1
                    if len(contract(gc, gbar, d).nodes) != k + 1:
                        clique_bad.append((n, gbar, d))
                    m = len(contract(gs, gbar, d).nodes)
                    star_sizes[k] = max(star_sizes.get(k, 0), m)
    star_ok = all(star_sizes[k] <= k + 1 for k in star_sizes)
    stars = ", ".join(f"k={k}: max {m}" for k, m in sorted(star_sizes.items()))
    return record(3, "clique and star contractions", not clique_bad and star_ok,
                  f"{total} tuples, clique mismatches {len(clique_bad)}, star classes {stars}",
                  t0, 30)


# ------------------------------------------------------------ 4

def equivalent_pairs(rng, d, k, want):
    """Pairs of distinct (topology, tuple) inputs with equal depth-d contractions."""
    buckets = {}
    pairs = []
    tries = 0
    while len(pairs) < want and tries < 20000:
        tries += 1
        g = random_strong_topology(rng, rng.randint(2, 6), p=rng.choice([0.1, 0.25, 0.5]))
        if g.n < k:
            continue
        gbar = tuple(rng.sample(list(g.vertices), k))
        key = contract(g, gbar, d).key()
        for (g2, gbar2) in buckets.get(key, []):
            if (g2, gbar2) != (g, gbar):
                pairs.append((g, gbar, g2, gbar2))
                break
        buckets.setdefault(key, []).append((g, gbar))
    return pairs


def criterion_4():
    t0 = time.time()
    rng = random.Random(2024)
    templates = [(builtin_template("shuttle"), ("tok",)), (builtin_template("mutex"), ("tok", "crit"))]
    pairs = []
    for i in range(50):
        d, k = (1, 2)[i % 2], 1 + (i // 2) % 2
        pairs += [(d,) + p for p in equivalent_pairs(rng, d, k, 1)]
    checked = disagree = 0
    for (d, g, gbar, g2, gbar2) in pairs:
        assert equivalent_graphs(g, gbar, g2, gbar2, d)
        for tmpl, props in templates:
            s1, s2 = build_system(tmpl, g), build_system(tmpl, g2)
            p1, p2 = project(s1, gbar), project(s2, gbar2)
            f1, f2 = FairnessSpec.token_global(s1), FairnessSpec.token_global(s2)
            for _ in range(30):
                body = random_body(rng, list(range(1, len(gbar) + 1)), d, rng.randint(2, 7), props)
                checked += 1
                if check(p1, body, f1) != check(p2, body, f2):
                    disagree += 1
    ok = len(pairs) == 50 and disagree == 0
    return record(4, "verdicts agree on equivalent topologies", ok,
                  f"{len(pairs)} pairs, {checked} checks, {disagree} disagreements", t0, 300)


# ------------------------------------------------------------ 5

SUITE_FORMULAS = [
    "forall i . A G A F tok@i",
    "forall i . A G (tok@i -> A F !tok@i)",
    "exists i . E F crit@i",
    "exists i . E F work@i",
    "forall i . A G (rest@i -> !tok@i)",
    "forall i j distinct . A G !(tok@i & tok@j)",
    "forall i j distinct . A G (tok@i -> A F tok@j)",
    "exists i j distinct . E (tok@i U tok@j)",
    "exists i j distinct . E F (tok@i & E F tok@j)",
    "forall i . A G E F tok@i",
    "forall i j distinct . E F (tok@i & E (tok@i U tok@j))",
    "exists i j distinct . A G (tok@i -> A F tok@j)",
    "forall i j distinct . A G (crit@i -> !crit@j)",
]


def criterion_5():
    t0 = time.time()
    formulas = [parse_formula(t) for t in SUITE_FORMULAS] + [gen_phi_k(2)]
    templates = ["shuttle", "mutex", "worker"]
    runs = mismatches = 0
    answers = {YES: 0, NO: 0}
    for name in templates:
        t = builtin_template(name)
        for kind in ("ring", "clique", "star"):
            for f in formulas:
                cut = solve_pmcp(kind, t, f)
                sweep = solve_pmcp(kind, t, f, mode="sweep", bound=cut.bound + 3)
                runs += 1
                answers[cut.answer] += 1
                if (cut.answer == NO) != (sweep.answer == NO):
                    mismatches += 1
    return record(5, "cutoff verdicts match sweeps to cutoff+3", mismatches == 0,
                  f"{len(formulas)} formulas x {len(templates)} templates x 3 families = {runs} "
                  f"runs ({answers[YES]} Yes, {answers[NO]} No), {mismatches} mismatches", t0, 600)


# ------------------------------------------------------------ 6

def has_reachable_cycle(g, m):
    dg = nx.DiGraph()
    dg.add_nodes_from(g.vertices)
    dg.add_edges_from(g.edges)
    reach = nx.descendants(dg, g.initial) | {g.initial}
    return any(len(c) == m and c[0] in reach for c in nx.simple_cycles(dg, length_bound=m))


def criterion_6():
    t0 = time.time()
    rng = random.Random(66)
    shuttle = builtin_template("shuttle")
    cases = mismatches = positives = 0
    for i in range(30):
        g = random_topology(rng, rng.randint(2, 6), p=rng.choice([0.2, 0.35, 0.5]))
        for m in (2, 3):
            if m > g.n:
                continue
            got = check_indexed(shuttle, g, gen_phi_k(m), fair="none")
            want = has_reachable_cycle(g, m)
            cases += 1
            positives += want
            mismatches += got != want
    return record(6, "cycle formulas match a cycle finder", mismatches == 0,
                  f"30 topologies, {cases} cases ({positives} with cycles), {mismatches} mismatches",
                  t0, 120)


# ------------------------------------------------------------ 7

def criterion_7():
    t0 = time.time()
    rng = random.Random(77)
    cases = mismatches = fair_cases = 0
    for i in range(600):
        m = random_lts(rng, 5)
        f = random_ltl(rng, ["p", "q"], rng.randint(1, 6))
        fair = random_partition_fairness(rng, m) if i % 2 else None
        fair_cases += fair is not None
        cases += 1
        mismatches += check(m, Exists(f), fair) != oracle_check(m, f, fair)
    return record(7, "model checker matches lasso oracle", cases >= 500 and mismatches == 0,
                  f"{cases} cases ({fair_cases} with fairness), {mismatches} mismatches", t0, 300)


# ------------------------------------------------------------ 8

def criterion_8():
    t0 = time.time()
    rng = random.Random(88)
    identity_bad = 0
    for _ in range(1000):
        a = [rng.choice("ab") for _ in range(rng.randint(0, 6))]
        b = [rng.choice("abc") for _ in range(rng.randint(0, 6))]
        identity_bad += destutter(a + destutter(b)) != destutter(a + b)
    mono_pairs = mono_bad = chain_words = chain_bad = 0
    for _ in range(30):
        g = random_topology(rng, rng.randint(2, 7), p=rng.choice([0.2, 0.35, 0.5]))
        gbar = tuple(rng.sample(list(g.vertices), rng.randint(1, min(3, g.n))))
        levels = mark_all(g, gbar, 3, check_chains=False)
        for d in range(1, 4):
            for v in g.vertices:
                m = levels[d][v]
                chain_words += len(m.value)
                try:
                    _check_chain(m, levels[d - 1][v])
                except AssertionError:
                    chain_bad += 1
                for u in x_reachable(g, gbar, v):
                    mono_pairs += 1
                    mono_bad += not marking_leq(levels[d - 1][u], levels[d - 1][v])
    ok = identity_bad == 0 and mono_bad == 0 and chain_bad == 0
    return record(8, "destuttering, monotonicity and chains", ok,
                  f"identity {identity_bad}/1000 violations; monotonicity {mono_bad}/{mono_pairs} "
                  f"gbar-avoiding pairs; chains {chain_bad} bad of {chain_words} words", t0, 120)


# ------------------------------------------------------------ 9

def criterion_9():
    t0 = time.time()
    f = never_halts_formula()
    cases = mismatches = 0
    for name, cm in sorted(SAMPLE_MACHINES.items()):
        for n in (2, 3, 4):
            b = cm_to_biring(cm, n)
            got = check_indexed(b.template, b.topology, f)
            cases += 1
            mismatches += got != (not reference_halts(cm, n - 1))
    return record(9, "counter machine simulation matches reference", mismatches == 0,
                  f"{len(SAMPLE_MACHINES)} machines x 3 sizes, {mismatches} mismatches", t0, 600)


# ------------------------------------------------------------ 10

def suite_systems():
    for name in ("shuttle", "mutex", "worker"):
        for kind in ("ring", "clique", "star"):
            for n in range(2, 6):
                yield builtin_template(name), make_family(kind, n)
    for name in ("cw-shuttle", "bidir-shuttle"):
        for n in range(2, 6):
            yield builtin_template(name), make_biring(n)
    for cm in SAMPLE_MACHINES.values():
        for n in (2, 3, 4):
            b = cm_to_biring(cm, n)
            yield b.template, b.topology


def criterion_10():
    t0 = time.time()
    systems = states = holder_bad = cycle_bad = 0
    for t, g in suite_systems():
        s = build_system(t, g)
        systems += 1
        for st in s.states:
            states += 1
            holder_bad += sum(q in t.token_states for q in st) != 1
        cycle_bad += not every_cycle_passes_token(s)
    return record(10, "single token holder and token-passing cycles",
                  holder_bad == 0 and cycle_bad == 0,
                  f"{systems} systems, {states} states, {holder_bad} bad states, "
                  f"{cycle_bad} systems with token-free cycles", t0, 60)


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6,
            criterion_7, criterion_8, criterion_9, criterion_10]


@pytest.mark.parametrize("criterion", CRITERIA, ids=[f"criterion_{i}" for i in range(1, 11)])
def test_acceptance(criterion):
    assert criterion()


if __name__ == "__main__":
    results = [c() for c in CRITERIA]
    print(f"{sum(results)}/{len(results)} criteria passed")
    sys.exit(0 if all(results) else 1)
