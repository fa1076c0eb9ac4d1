"""Bounded simulation of two-counter machines on bi-directional rings.

The process at the initial token vertex acts as the controller; every other
process is a memory cell holding one bit per counter, so ``n - 1`` cells
store counter values up to ``n - 1``.  All processes run the same template.

Commands are numbered ``0 inc1, 1 dec1, 2 tz1, 3 inc2, 4 dec2, 5 tz2``.
Controller and cells share a command pointer ``cur``.

* A *rotation round*: the controller sends the token ``cw``; every cell
  advances its pointer and forwards it ``cw``; when the token comes back
  the controller advances too.  Gotos, halting and the failure loop use
  rotation rounds.
* An *execution round*: once ``cur`` names the wanted command the
  controller sends ``ccw``.  The first cell able to execute it does so and
  returns the token ``cw`` (success).  Cells that cannot execute forward it
  ``ccw`` and wait; if the token reaches the controller ``ccw`` nobody
  could execute it.  Waiting cells forward the next ``cw`` token without
  advancing their pointer.
* ``tz c`` succeeds when some cell has its ``c`` bit set (counter non-zero).
  On failure the controller runs one ``cw`` round to release the waiting
  cells and then takes the zero branch.
* A failed ``inc`` (all bits set) or ``dec`` (no bit set) sends the
  controller into a loop of rotation rounds that never halts.
"""
import json
from dataclasses import dataclass, field
from typing import Optional

from .template import make_template, rcv, snd
from .topology import make_biring

CW, CCW = "cw", "ccw"
COMMANDS = {("inc", 1): 0, ("dec", 1): 1, ("tz", 1): 2, ("inc", 2): 3, ("dec", 2): 4, ("tz", 2): 5}
HALT = "HALT"
FAIL = "!fail"
MAX_N = 6


@dataclass(frozen=True)
class Instruction:
    op: str                     # inc, dec, tz or goto
    counter: Optional[int] = None
    target: str = ""
    alt: Optional[str] = None   # non-zero branch of tz

    def __post_init__(self):
        if self.op not in ("inc", "dec", "tz", "goto"):
            raise ValueError(f"unknown instruction {self.op!r}")
        if self.op != "goto" and self.counter not in (1, 2):
            raise ValueError("counter must be 1 or 2")
        if self.op == "tz" and self.alt is None:
            raise ValueError("tz needs a zero target and a non-zero target")


@dataclass(frozen=True)
class CounterMachine:
    initial: str
    halt: str
    program: dict = field(hash=False)
    name: str = ""

    def __post_init__(self):
        if self.halt in self.program:
            raise ValueError("the halting state has no instruction")
        known = set(self.program) | {self.halt}
        if self.initial not in known:
            raise ValueError(f"unknown initial state {self.initial!r}")
        for q, ins in self.program.items():
            for t in (ins.target, ins.alt):
                if t is not None and t not in known:
                    raise ValueError(f"instruction at {q!r} jumps to unknown state {t!r}")
        for q in known:
            if "|" in q or q.startswith("!"):
                raise ValueError(f"state name {q!r} may not contain '|' or start with '!'")

    @property
    def states(self):
        return sorted(self.program) + [self.halt]


def cm_from_json(doc) -> CounterMachine:
    """``{"initial", "halt", "program": {q: [op, counter?, target, alt?]}}``."""
    if isinstance(doc, str):
        doc = json.loads(doc)
    prog = {}
    for q, ins in doc["program"].items():
        op = ins[0]
        if op == "goto":
            prog[q] = Instruction("goto", None, ins[1])
        elif op == "tz":
            prog[q] = Instruction("tz", int(ins[1]), ins[2], ins[3])
        else:
            prog[q] = Instruction(op, int(ins[1]), ins[2])
    return CounterMachine(doc["initial"], doc["halt"], prog, doc.get("name", ""))


def cm_to_json(cm: CounterMachine) -> dict:
    prog = {}
    for q, ins in sorted(cm.program.items()):
        if ins.op == "goto":
            prog[q] = ["goto", ins.target]
        elif ins.op == "tz":
            prog[q] = ["tz", ins.counter, ins.target, ins.alt]
        else:
            prog[q] = [ins.op, ins.counter, ins.target]
    return {"name": cm.name, "initial": cm.initial, "halt": cm.halt, "program": prog}


def load_cm(path) -> CounterMachine:
    with open(path) as fh:
        return cm_from_json(json.load(fh))


# ------------------------------------------------------------ reference run

@dataclass
class Trace:
    steps: list          # (state, c1, c2)
    halted: bool
    stuck: bool = False  # a failed inc/dec put the machine into its loop


def _step(cm, q, c, bound):
    """Next configuration, or ``None`` when a failed command loops forever."""
    ins = cm.program[q]
    c = list(c)
    if ins.op == "goto":
        return ins.target, tuple(c)
    i = ins.counter - 1
    if ins.op == "inc":
        if c[i] >= bound:
            return None
        c[i] += 1
        return ins.target, tuple(c)
    if ins.op == "dec":
        if c[i] == 0:
            return None
        c[i] -= 1
        return ins.target, tuple(c)
    return (ins.target if c[i] == 0 else ins.alt), tuple(c)


def cm_reference_run(cm: CounterMachine, counter_bound: int, max_steps: int) -> Trace:
    """Direct interpretation with counters capped at ``counter_bound``."""
    if counter_bound < 0 or max_steps <= 0:
        raise ValueError("bounds must be positive")
    q, c = cm.initial, (0, 0)
    steps = [(q, 0, 0)]
    stuck = False
    while len(steps) < max_steps:
        if q == cm.halt:
            return Trace(steps, True)
        nxt = None if stuck else _step(cm, q, c, counter_bound)
        if nxt is None:
            stuck = True
        else:
            q, c = nxt
        steps.append((q, *c))
    return Trace(steps, q == cm.halt, stuck)


def reference_halts(cm: CounterMachine, counter_bound: int) -> bool:
    """Exact answer over the finite configuration space."""
    q, c = cm.initial, (0, 0)
    seen = set()
    while q != cm.halt:
        if (q, c) in seen:
            return False
        seen.add((q, c))
        nxt = _step(cm, q, c, counter_bound)
        if nxt is None:
            return False
        q, c = nxt
    return True


# ------------------------------------------------------------ simulation

def _c(q, cur, mode):
    return f"C|{q}|{cur}|{mode}"


def _m(b1, b2, cmd, mode):
    return f"M|{b1}|{b2}|{cmd}|{mode}"


def _execute(op, c, bits):
    """New bits after a successful command, or ``None`` if the cell cannot do it."""
    b = list(bits)
    i = c - 1
    if op == "inc" and b[i] == 0:
        b[i] = 1
        return tuple(b)
    if op == "dec" and b[i] == 1:
        b[i] = 0
        return tuple(b)
    if op == "tz" and b[i] == 1:
        return tuple(b)
    return None


def cm_template(cm: CounterMachine):
    states, token, trans, labels = [], set(), [], {}

    def add(s, is_token):
        states.append(s)
        if is_token:
            token.add(s)

    by_code = {v: k for k, v in COMMANDS.items()}
    ctl = cm.states + [FAIL]
    for q in ctl:
        for cur in range(6):
            nxt = (cur + 1) % 6
            for mode, is_token in (("T", True), ("rot", False), ("exec", False),
                                   ("tzack", True), ("tzwait", False)):
                add(_c(q, cur, mode), is_token)
                if q == cm.halt:
                    labels[_c(q, cur, mode)] = {HALT}
            ins = cm.program.get(q)
            t, rot = _c(q, cur, "T"), _c(q, cur, "rot")
            wanted = None if ins is None or ins.op == "goto" else COMMANDS[(ins.op, ins.counter)]
            if wanted == cur:
                trans.append((t, snd(CCW), _c(q, cur, "exec")))
            else:
                trans.append((t, snd(CW), rot))
            after = ins.target if ins is not None and ins.op == "goto" else q
            trans.append((rot, rcv(CW), _c(after, nxt, "T")))
            ex = _c(q, cur, "exec")
            if ins is not None and wanted is not None:
                success = ins.alt if ins.op == "tz" else ins.target
                trans.append((ex, rcv(CW), _c(success, cur, "T")))
                if ins.op == "tz":
                    trans.append((ex, rcv(CCW), _c(q, cur, "tzack")))
                else:
                    trans.append((ex, rcv(CCW), _c(FAIL, cur, "T")))
            else:
                trans.append((ex, rcv(CW), t))
            trans.append((_c(q, cur, "tzack"), snd(CW), _c(q, cur, "tzwait")))
            zero = ins.target if ins is not None and ins.op == "tz" else q
            trans.append((_c(q, cur, "tzwait"), rcv(CW), _c(zero, cur, "T")))
    for b1 in (0, 1):
        for b2 in (0, 1):
            for cmd in range(6):
                idle, wait = _m(b1, b2, cmd, "idle"), _m(b1, b2, cmd, "wait")
                fwd_cw, fwd_ccw = _m(b1, b2, cmd, "cw"), _m(b1, b2, cmd, "ccw")
                add(idle, False)
                add(wait, False)
                add(fwd_cw, True)
                add(fwd_ccw, True)
                trans.append((idle, rcv(CW), _m(b1, b2, (cmd + 1) % 6, "cw")))
                op, c = by_code[cmd]
                done = _execute(op, c, (b1, b2))
                if done is None:
                    trans.append((idle, rcv(CCW), fwd_ccw))
                else:
                    trans.append((idle, rcv(CCW), _m(*done, cmd, "cw")))
                trans.append((fwd_cw, snd(CW), idle))
                trans.append((fwd_ccw, snd(CCW), wait))
                trans.append((wait, rcv(CW), fwd_cw))
                trans.append((wait, rcv(CCW), fwd_ccw))
    return make_template(states, token, (_c(cm.initial, 0, "T"), _m(0, 0, 0, "idle")), trans,
                         internal_actions=("tau",), snd_directions=(CW, CCW),
                         rcv_directions=(CW, CCW), labels=labels,
                         name=f"cm:{cm.name}" if cm.name else "cm")


@dataclass
class SimBundle:
    template: object
    topology: object
    halt_atom: str = HALT


def cm_to_biring(cm: CounterMachine, n: int, *, max_n=MAX_N) -> SimBundle:
    if n < 2:
        raise ValueError("the simulation needs n >= 2")
    if max_n is not None and n > max_n:
        raise ValueError(f"n = {n} exceeds the size guard {max_n}; pass max_n=None to override")
    return SimBundle(cm_template(cm), make_biring(n))


def never_halts_formula():
    from .parser import parse_formula
    return parse_formula(f"forall i . A G !{HALT}@i")


# ------------------------------------------------------------ sample machines

def _cm(name, initial, halt, prog):
    return cm_from_json({"name": name, "initial": initial, "halt": halt, "program": prog})


SAMPLE_MACHINES = {
    "loop": _cm("loop", "q0", "h", {"q0": ["goto", "q0"]}),
    "count-two": _cm("count-two", "q0", "h", {
        "q0": ["inc", 1, "q1"], "q1": ["inc", 1, "q2"],
        "q2": ["tz", 1, "h", "q3"], "q3": ["dec", 1, "q2"]}),
    "halt-now": _cm("halt-now", "q0", "h", {"q0": ["goto", "h"]}),
    "transfer": _cm("transfer", "q0", "h", {
        "q0": ["inc", 1, "q1"], "q1": ["inc", 1, "q2"], "q2": ["inc", 1, "q3"],
        "q3": ["tz", 1, "h", "q4"], "q4": ["dec", 1, "q5"], "q5": ["inc", 2, "q3"]}),
    "bad-dec": _cm("bad-dec", "q0", "h", {"q0": ["inc", 2, "q1"], "q1": ["dec", 1, "h"]}),
    "two-counters": _cm("two-counters", "q0", "h", {
        "q0": ["inc", 1, "q1"], "q1": ["inc", 2, "q2"], "q2": ["inc", 2, "q3"],
        "q3": ["dec", 2, "q4"], "q4": ["tz", 2, "q0", "h"]}),
}
