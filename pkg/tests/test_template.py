import json
import random

import pytest

from tokencut.template import (BUILTIN_TEMPLATES, NEITHER, RECEIVE_ONLY, SEND_ONLY, action_kind,
                               builtin_template, classify_state, load_template, make_template,
                               priming_path, template_from_json, template_to_json,
                               validate_template)


def two_state(**kw):
    return make_template(["t", "n"], ["t"], ("t", "n"), [("t", "snd", "n"), ("n", "rcv", "t")], **kw)


def test_two_state_template_ok():
    assert validate_template(two_state()).ok


def test_internal_loop_on_initial_violates_alternation():
    t = make_template(["t", "n"], ["t"], ("t", "n"),
                      [("t", "tau", "t"), ("n", "rcv", "t")])
    rep = validate_template(t)
    assert "vii" in rep.rules()


def test_internal_loop_with_exit_is_still_reported():
    # an infinite internal suffix exists even if a send is also possible
    t = make_template(["t", "n"], ["t"], ("t", "n"),
                      [("t", "tau", "t"), ("t", "snd", "n"), ("n", "rcv", "t")])
    assert "vii" in validate_template(t).rules()
    assert validate_template(t, relaxed=True).ok


def test_send_between_non_token_states():
    t = make_template(["t", "n", "m"], ["t"], ("t", "n"),
                      [("t", "snd", "n"), ("n", "snd", "m"), ("m", "rcv", "t"), ("n", "rcv", "t")])
    assert "iii" in validate_template(t).rules()


def test_other_rules():
    t = make_template(["t", "n"], ["t"], ("n", "t"), [("t", "snd", "n")])
    assert {"ii", "vi"} <= validate_template(t).rules()
    t = make_template(["t", "n"], ["t"], ("t", "n"),
                      [("t", "snd", "n"), ("n", "rcv", "t"), ("n", "tau", "t")])
    assert "v" in validate_template(t).rules()
    t = make_template(["t", "n"], ["t"], ("t", "n"), [("t", "rcv", "n"), ("n", "rcv", "t")])
    assert "iv" in validate_template(t).rules()


def test_unreachable_internal_cycle_only_with_all_states():
    t = make_template(["t", "n", "x"], ["t", "x"], ("t", "n"),
                      [("t", "snd", "n"), ("n", "rcv", "t"), ("x", "tau", "x")])
    assert validate_template(t).ok
    assert "vii" in validate_template(t, all_states=True).rules()


def test_classify():
    t = two_state()
    assert classify_state(t, "t") == SEND_ONLY
    assert classify_state(t, "n") == RECEIVE_ONLY
    m = builtin_template("mutex")
    assert classify_state(m, "t") == NEITHER
    with pytest.raises(KeyError):
        classify_state(t, "zzz")


def test_priming_paths():
    t = two_state()
    assert priming_path(t, "t", SEND_ONLY) == ["t"]
    assert priming_path(t, "n", RECEIVE_ONLY) == ["n"]
    t2 = make_template(["t1", "t2", "n"], ["t1", "t2"], ("t1", "n"),
                       [("t1", "a", "t2"), ("t1", "snd", "n"), ("t2", "snd", "n"), ("n", "rcv", "t1")],
                       internal_actions=("a",))
    assert priming_path(t2, "t1", SEND_ONLY) == ["t1", "t2"]
    with pytest.raises(ValueError):
        priming_path(t, "n", SEND_ONLY)


def test_builtins():
    t = builtin_template("shuttle")
    assert t == two_state()
    m = builtin_template("mutex")
    assert validate_template(m).ok
    assert m.label("crit") == {"crit"} and "crit" in m.token_states
    assert {action_kind(a)[0] for a, _ in m.outgoing("crit")} == {"snd"}
    with pytest.raises(ValueError):
        builtin_template("bogus")


@pytest.mark.parametrize("name", sorted(BUILTIN_TEMPLATES))
def test_builtin_properties(name):
    t = builtin_template(name)
    assert validate_template(t).ok
    # every state can prime for its side
    for q in t.states:
        goal = SEND_ONLY if q in t.token_states else RECEIVE_ONLY
        path = priming_path(t, q, goal)
        assert path is not None and path[0] == q
        assert classify_state(t, path[-1]) == goal
    # random walks alternate snd and rcv
    rng = random.Random(name)
    for _ in range(20):
        q, last = rng.choice(t.states), None
        for _ in range(30):
            a, q = rng.choice(t.outgoing(q))
            kind = action_kind(a)[0]
            if kind != "int":
                assert kind != last
                last = kind


def test_json_round_trip(tmp_path):
    m = builtin_template("worker")
    doc = template_to_json(m)
    assert template_from_json(json.dumps(doc)) == m
    p = tmp_path / "w.json"
    p.write_text(json.dumps(doc))
    assert load_template(str(p)) == m


def test_direction_shorthand():
    with pytest.raises(ValueError):
        make_template(["t", "n"], ["t"], ("t", "n"), [("t", "snd", "n")],
                      snd_directions=("cw", "ccw"))
    t = builtin_template("cw-shuttle")
    assert t.direction_aware and validate_template(t).ok
    assert two_state().show_action("snd:any") == "snd"
