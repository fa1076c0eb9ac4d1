"""Command-line front end.

Exit codes: 0 yes/true/ok, 1 no/false/violation, 2 usage or input error,
3 unknown.
"""
import argparse
import json
import os
import sys

from . import __version__

EXIT_YES, EXIT_NO, EXIT_ERROR, EXIT_UNKNOWN = 0, 1, 2, 3


class CliError(Exception):
    pass


def _tuple(text):
    if not text:
        return ()
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise CliError(f"bad index tuple {text!r}; expected e.g. 1,5") from None


def _emit(args, human, doc):
    if args.json:
        print(json.dumps(doc, indent=2, sort_keys=True, default=str))
    else:
        print(human)


def _read_formula(args):
    if getattr(args, "formula", None) and getattr(args, "formula_file", None):
        raise CliError("give either --formula or --formula-file, not both")
    if getattr(args, "formula_file", None):
        with open(args.formula_file) as fh:
            text = fh.read()
    elif getattr(args, "formula", None):
        text = args.formula
    else:
        raise CliError("a formula is required (--formula or --formula-file)")
    lines = [ln.split("#", 1)[0] for ln in text.splitlines()]
    return " ".join(ln for ln in lines if ln.strip()).strip()


def _write(path, text):
    with open(path, "w") as fh:
        fh.write(text)


def _show_state(s):
    return " / ".join(map(str, s)) if isinstance(s, tuple) else str(s)


# ------------------------------------------------------------------ commands

def cmd_validate(args):
    from .template import load_template, validate_template
    from .topology import parse_topology, validate_topology
    if not args.template and not args.topology:
        raise CliError("validate needs --template and/or --topology")
    reports = {}
    if args.template:
        reports["template"] = validate_template(load_template(args.template),
                                                relaxed=args.relaxed, all_states=args.all_states)
    if args.topology:
        reports["topology"] = validate_topology(parse_topology(args.topology))
    ok = all(r.ok for r in reports.values())
    human = "\n".join(f"{k}: {r}" for k, r in reports.items())
    doc = {k: {"ok": r.ok, "violations": [{"rule": v.rule, "message": v.message,
                                          "witness": [str(w) for w in v.witness]}
                                         for v in r.violations]}
           for k, r in reports.items()}
    _emit(args, human, doc)
    return EXIT_YES if ok else EXIT_NO


def cmd_build(args):
    from .system import TOK, build_system
    from .template import load_template
    from .topology import parse_topology
    system = build_system(load_template(args.template), parse_topology(args.topology))
    lts = system.lts
    tok = sum(1 for (_, a, _) in lts.transitions if a == TOK)
    doc = {"states": len(lts), "transitions": len(lts.transitions),
           "token_transitions": tok, "internal_transitions": len(lts.transitions) - tok,
           "initial": [_show_state(s) for s in sorted(lts.initial)]}
    if args.dot:
        from .dot import system_to_dot
        _write(args.dot, system_to_dot(system))
        doc["dot"] = args.dot
    human = "\n".join(f"{k}: {v}" for k, v in doc.items())
    _emit(args, human, doc)
    return EXIT_YES


def cmd_contract(args):
    from .contraction import contract
    from .topology import parse_topology
    g = parse_topology(args.topology)
    c = contract(g, _tuple(args.tuple), args.d)
    if args.dot:
        from .dot import contraction_to_dot
        _write(args.dot, contraction_to_dot(c))
    lines = [f"{len(c.nodes)} classes at depth {args.d}"]
    ids = {m: i for i, m in enumerate(c.nodes)}
    for m in c.nodes:
        tag = " (initial)" if m == c.initial else ""
        loop = " loop" if m in c.self_loops() else ""
        lines.append(f"  c{ids[m]} {m.digest()} members={list(c.members[m])} "
                     f"label={sorted(c.labels[m])}{loop}{tag}")
    for (a, b) in sorted(c.edges, key=lambda e: (ids[e[0]], ids[e[1]])):
        if a != b:
            lines.append(f"  c{ids[a]} -> c{ids[b]}")
    _emit(args, "\n".join(lines), c.to_json())
    return EXIT_YES


def cmd_equiv(args):
    from .contraction import equivalent_graphs
    from .topology import parse_topology
    ok = equivalent_graphs(parse_topology(args.topology), _tuple(args.tuple),
                           parse_topology(args.topology2), _tuple(args.tuple2), args.d)
    _emit(args, str(ok).lower(), {"equivalent": ok, "d": args.d})
    return EXIT_YES if ok else EXIT_NO


def cmd_check(args):
    from .checker import check, counterexample, fairness_for
    from .indexed import check_indexed, lasso_json
    from .parser import parse_body, parse_formula
    from .system import build_system, project
    from .template import load_template
    from .topology import parse_topology
    t, g = load_template(args.template), parse_topology(args.topology)
    system = build_system(t, g)
    text = _read_formula(args)
    doc = {"template": t.name, "topology": str(g), "fair": args.fair}
    if args.tuple is not None:
        gbar = _tuple(args.tuple)
        body = parse_body(text)
        lts = project(system, gbar)
        fair = fairness_for(args.fair, system)
        holds = check(lts, body, fair)
        cex = None if holds else counterexample(lts, body, fair)
        if cex is not None:
            doc["counterexample"] = {"gbar": list(gbar), "lasso": lasso_json(system, cex)}
    else:
        f = parse_formula(text)
        res = check_indexed(t, g, f, args.fair, system=system, evidence=True)
        holds = res.holds
        doc["leaves_checked"] = res.leaves_checked
        if res.counterexample is not None:
            gbar, _, lasso = res.counterexample
            doc["counterexample"] = {"gbar": list(gbar), "lasso": lasso_json(system, lasso)}
    doc["holds"] = holds
    human = str(holds).lower()
    if "counterexample" in doc:
        cex = doc["counterexample"]
        human += (f"\ncounterexample for tuple {tuple(cex['gbar'])}:"
                  f"\n  stem:  {' ; '.join(cex['lasso']['stem']) or '-'}"
                  f"\n  cycle: {' ; '.join(cex['lasso']['cycle'])}")
    _emit(args, human, doc)
    return EXIT_YES if holds else EXIT_NO


def cmd_pmcp(args):
    from .formula import profile
    from .parser import parse_formula
    from .pmcp import decompose, enumerate_contractions, report_json, solve_pmcp
    from .template import load_template
    if args.enumerate:
        if args.k is None or args.bound is None:
            raise CliError("--enumerate needs --k and --bound")
        e = enumerate_contractions(args.family, args.k, args.d or 1, args.bound)
        doc = e.to_json()
        human = "\n".join([f"n={n}: {c} contractions" for n, c in doc["sizes"].items()]
                          + [f"stabilizes at n0={e.n0}" if e.stabilized
                             else f"no stabilization up to {args.bound}"])
        _emit(args, human, doc)
        return EXIT_YES if e.stabilized else EXIT_UNKNOWN
    t = load_template(args.template)
    f = parse_formula(_read_formula(args))
    prof = profile(f)
    if args.k is not None and args.k != prof.k:
        raise CliError(f"--k {args.k} does not match the formula's {prof.k} variables")
    dec = None
    if args.mode == "decompose":
        dec = decompose(args.family, t, f, args.d, args.bound or 8, args.fair)
        verdict = dec.verdict
    else:
        verdict = solve_pmcp(args.family, t, f, args.mode, args.bound, args.fair, args.jobs)
    doc = report_json(verdict, args.family, prof.k, args.d if args.d is not None else prof.d, dec)
    lines = [str(verdict)]
    if verdict.evidence.get("cutoff") is not None:
        lines.append(f"cutoff {verdict.evidence['cutoff']}")
    lines += [f"  n={n}: {'holds' if v else 'fails'}" for n, v in sorted(verdict.per_size.items())]
    _emit(args, "\n".join(lines), doc)
    return verdict.exit_code()


def cmd_gen_formula(args):
    from .formula import print_formula, profile
    from .generators import gen_adj_formula, gen_phi_k
    if args.name == "phi-k":
        f = gen_phi_k(args.k)
    else:
        f = gen_adj_formula()
    text = print_formula(f)
    p = profile(f)
    _emit(args, text, {"formula": text, "k": p.k, "d": p.d, "alternating": p.alternating})
    return EXIT_YES


def cmd_demo_cm(args):
    from .cm import SAMPLE_MACHINES, cm_to_biring, load_cm, never_halts_formula, reference_halts
    from .indexed import check_indexed, lasso_json
    from .system import build_system
    if os.path.exists(args.program):
        cm = load_cm(args.program)
    elif args.program in SAMPLE_MACHINES:
        cm = SAMPLE_MACHINES[args.program]
    else:
        raise CliError(f"no program file or sample named {args.program!r}; "
                       f"samples: {', '.join(sorted(SAMPLE_MACHINES))}")
    bundle = cm_to_biring(cm, args.n, max_n=None if args.force else 6)
    system = build_system(bundle.template, bundle.topology)
    res = check_indexed(bundle.template, bundle.topology, never_halts_formula(), "token",
                        system=system, evidence=True)
    ref = not reference_halts(cm, args.n - 1)
    doc = {"program": cm.name, "n": args.n, "states": len(system),
           "never_halts": res.holds, "reference_never_halts": ref}
    human = [f"system states: {len(system)}",
             f"forall i . A G !HALT@i: {str(res.holds).lower()}",
             f"reference run with counters up to {args.n - 1}: "
             + ("never halts" if ref else "halts")]
    if res.counterexample is not None:
        gbar, _, lasso = res.counterexample
        doc["witness"] = {"gbar": list(gbar), "lasso": lasso_json(system, lasso)}
        human.append(f"halting run (tracked vertex {gbar[0]}):")
        human += ["  " + s for s in doc["witness"]["lasso"]["stem"]]
        human.append("  loop: " + " ; ".join(doc["witness"]["lasso"]["cycle"]))
    _emit(args, "\n".join(human), doc)
    return EXIT_YES if res.holds else EXIT_NO


# ------------------------------------------------------------------ parser

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print JSON reports")

    p = argparse.ArgumentParser(prog="tokencut", description="Token-passing system verification.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("validate", parents=[common], help="validate a template and/or topology")
    s.add_argument("--template")
    s.add_argument("--topology")
    s.add_argument("--relaxed", action="store_true")
    s.add_argument("--all-states", action="store_true")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("build", parents=[common], help="compose a system and print statistics")
    s.add_argument("--template", required=True)
    s.add_argument("--topology", required=True)
    s.add_argument("--dot")
    s.set_defaults(func=cmd_build)

    s = sub.add_parser("contract", parents=[common], help="d-contraction of a topology")
    s.add_argument("--topology", required=True)
    s.add_argument("--tuple", required=True)
    s.add_argument("--d", type=int, default=1)
    s.add_argument("--dot")
    s.set_defaults(func=cmd_contract)

    s = sub.add_parser("equiv", parents=[common], help="compare two contractions")
    s.add_argument("--topology", required=True)
    s.add_argument("--tuple", required=True)
    s.add_argument("--topology2", required=True)
    s.add_argument("--tuple2", required=True)
    s.add_argument("--d", type=int, default=1)
    s.set_defaults(func=cmd_equiv)

    s = sub.add_parser("check", parents=[common], help="model-check an indexed formula")
    s.add_argument("--template", required=True)
    s.add_argument("--topology", required=True)
    s.add_argument("--formula")
    s.add_argument("--formula-file")
    s.add_argument("--tuple", help="check a closed body on the projection to this tuple")
    s.add_argument("--fair", choices=("token", "none"), default="token")
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("pmcp", parents=[common], help="parameterized check over a family")
    s.add_argument("--family", required=True, choices=("ring", "biring", "clique", "star"))
    s.add_argument("--template", default="shuttle")
    s.add_argument("--formula")
    s.add_argument("--formula-file")
    s.add_argument("--k", type=int)
    s.add_argument("--d", type=int)
    s.add_argument("--mode", choices=("cutoff", "sweep", "decompose"), default="cutoff")
    s.add_argument("--bound", type=int)
    s.add_argument("--fair", choices=("token", "none"), default="token")
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--enumerate", action="store_true",
                   help="report contraction-set stabilization instead of checking")
    s.set_defaults(func=cmd_pmcp)

    s = sub.add_parser("gen-formula", parents=[common], help="print a named formula")
    s.add_argument("name", choices=("phi-k", "adj"))
    s.add_argument("--k", type=int, default=2)
    s.set_defaults(func=cmd_gen_formula)

    s = sub.add_parser("demo-cm", parents=[common], help="two-counter machine on a bi-ring")
    s.add_argument("--program", required=True, help="JSON program file or sample name")
    s.add_argument("--n", type=int, default=3)
    s.add_argument("--force", action="store_true", help="lift the n <= 6 guard")
    s.set_defaults(func=cmd_demo_cm)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except (CliError, ValueError, KeyError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {msg}", file=sys.stderr)
        return EXIT_ERROR


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
