import json

import pytest

from tokencut.cm import (FAIL, HALT, SAMPLE_MACHINES, CounterMachine, Instruction, cm_from_json,
                         cm_reference_run, cm_template, cm_to_biring, cm_to_json, load_cm,
                         never_halts_formula, reference_halts)
from tokencut.indexed import check_indexed
from tokencut.system import build_system
from tokencut.template import validate_template


def test_reference_run_counts_up_and_down():
    tr = cm_reference_run(SAMPLE_MACHINES["count-two"], 2, 50)
    assert tr.halted and not tr.stuck
    assert tr.steps[:3] == [("q0", 0, 0), ("q1", 1, 0), ("q2", 2, 0)]
    assert tr.steps[-1] == ("h", 0, 0)


def test_reference_run_overflow_and_underflow():
    tr = cm_reference_run(SAMPLE_MACHINES["count-two"], 1, 20)
    assert not tr.halted and tr.stuck and len(tr.steps) == 20
    bad = cm_reference_run(SAMPLE_MACHINES["bad-dec"], 3, 10)
    assert bad.stuck and not bad.halted
    with pytest.raises(ValueError):
        cm_reference_run(SAMPLE_MACHINES["loop"], 1, 0)


@pytest.mark.parametrize("name, bound, halts", [
    ("loop", 3, False), ("halt-now", 1, True), ("count-two", 1, False), ("count-two", 2, True),
    ("transfer", 2, False), ("transfer", 3, True), ("bad-dec", 3, False),
    ("two-counters", 1, False), ("two-counters", 2, True),
])
def test_reference_halts(name, bound, halts):
    assert reference_halts(SAMPLE_MACHINES[name], bound) is halts


def test_json_round_trip(tmp_path):
    for cm in SAMPLE_MACHINES.values():
        assert cm_from_json(json.dumps(cm_to_json(cm))) == cm
    p = tmp_path / "m.json"
    p.write_text(json.dumps(cm_to_json(SAMPLE_MACHINES["transfer"])))
    assert load_cm(str(p)).program == SAMPLE_MACHINES["transfer"].program


def test_machine_validation():
    with pytest.raises(ValueError):
        Instruction("jump", None, "q")
    with pytest.raises(ValueError):
        Instruction("inc", 3, "q")
    with pytest.raises(ValueError):
        Instruction("tz", 1, "q")
    with pytest.raises(ValueError):
        CounterMachine("q0", "h", {"q0": Instruction("goto", None, "nowhere")})
    with pytest.raises(ValueError):
        CounterMachine("q0", "h", {"q0": Instruction("goto", None, "h"),
                                   "h": Instruction("goto", None, "h")})
    with pytest.raises(ValueError):
        CounterMachine("q|0", "h", {"q|0": Instruction("goto", None, "h")})


@pytest.mark.parametrize("name", sorted(SAMPLE_MACHINES))
def test_template_is_valid(name):
    t = cm_template(SAMPLE_MACHINES[name])
    assert validate_template(t).ok
    assert t.direction_aware
    assert any(HALT in t.label(q) for q in t.states)
    assert not any(FAIL in t.label(q) for q in t.states)


def test_size_guard():
    cm = SAMPLE_MACHINES["loop"]
    with pytest.raises(ValueError):
        cm_to_biring(cm, 1)
    with pytest.raises(ValueError):
        cm_to_biring(cm, 7)
    assert cm_to_biring(cm, 7, max_n=None).topology.n == 7


@pytest.mark.parametrize("name", sorted(SAMPLE_MACHINES))
@pytest.mark.parametrize("n", [2, 3, 4])
def test_simulation_matches_reference(name, n):
    cm = SAMPLE_MACHINES[name]
    b = cm_to_biring(cm, n)
    s = build_system(b.template, b.topology)
    never = check_indexed(b.template, b.topology, never_halts_formula(), system=s)
    assert never is (not reference_halts(cm, n - 1))
