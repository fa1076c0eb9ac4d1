import pytest

from tokencut.formula import Forall
from tokencut.generators import gen_adj_formula, gen_phi_k
from tokencut.indexed import check_indexed, lasso_json
from tokencut.parser import parse_formula
from tokencut.system import build_system
from tokencut.template import builtin_template
from tokencut.topology import make_clique, make_ring, make_star

shuttle = builtin_template("shuttle")
mutex = builtin_template("mutex")


@pytest.mark.parametrize("n, expected", [(4, True), (6, True), (7, False)])
def test_adjacency_formula_on_rings(n, expected):
    assert check_indexed(shuttle, make_ring(n), gen_adj_formula()) is expected


def test_mutual_exclusion():
    f = parse_formula("forall i j distinct . A G !(tok@i & tok@j)")
    for g in (make_ring(4), make_clique(3), make_star(4)):
        assert check_indexed(mutex, g, f)
        assert check_indexed(mutex, g, parse_formula("forall i . A G (crit@i -> tok@i)"))


def test_fair_liveness():
    f = parse_formula("forall i . A G A F tok@i")
    assert check_indexed(shuttle, make_ring(4), f)
    # the shuttle ring has a single run, so fairness changes nothing
    assert check_indexed(shuttle, make_ring(4), f, fair="none")
    assert check_indexed(mutex, make_clique(3), parse_formula("forall i . A F tok@i"))


def test_phi_k_detects_cycles():
    assert check_indexed(shuttle, make_ring(3), gen_phi_k(3), fair="none")
    assert not check_indexed(shuttle, make_ring(4), gen_phi_k(3), fair="none")
    assert check_indexed(shuttle, make_clique(3), gen_phi_k(2), fair="none")
    assert not check_indexed(shuttle, make_ring(3), gen_phi_k(2), fair="none")


def test_evidence_and_counterexample():
    g = make_ring(3)
    res = check_indexed(shuttle, g, parse_formula("forall i . A G !tok@i"), evidence=True)
    assert not res and res.holds is False
    gbar, body, lasso = res.counterexample
    assert isinstance(body, Forall) and gbar == (1,)
    s = build_system(shuttle, g)
    run = lasso.stem + lasso.cycle
    assert run[0] == s.initial
    doc = lasso_json(s, lasso)
    assert (doc["stem"] + doc["cycle"])[0] == "t / n / n"
    ok = check_indexed(shuttle, g, parse_formula("forall i . A G F tok@i"), evidence=True)
    assert ok and ok.counterexample is None and ok.leaves_checked == 3


def test_reuse_depth_shares_leaves():
    f = parse_formula("forall i j distinct . A G (tok@i -> A F tok@j)")
    g = make_ring(7)
    plain = check_indexed(shuttle, g, f, evidence=True)
    shared = check_indexed(shuttle, g, f, evidence=True, reuse_depth=1)
    assert plain.holds == shared.holds
    assert shared.leaves_checked < plain.leaves_checked


def test_prebuilt_system_is_used():
    g = make_ring(3)
    s = build_system(mutex, g)
    f = parse_formula("exists i . E F crit@i")
    assert check_indexed(mutex, g, f, system=s)
