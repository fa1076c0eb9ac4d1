"""Graphviz DOT output for LTSs, systems, topologies and contractions."""


def _q(s) -> str:
    return '"' + str(s).replace("\\", "\\\\").replace('"', '\\"') + '"'


def lts_to_dot(lts, name="lts", show=str) -> str:
    lines = [f"digraph {_q(name)} {{", "  rankdir=LR;"]
    for i, s in enumerate(lts.states):
        label = show(s)
        props = sorted(lts.labeling.get(s, ()))
        if props:
            label += "\\n" + ",".join(map(str, props))
        shape = "doublecircle" if s in lts.initial else "circle"
        lines.append(f"  n{i} [label={_q(label)}, shape={shape}];")
    for (a, act, b) in lts.transitions:
        lines.append(f"  n{lts.index(a)} -> n{lts.index(b)} [label={_q(act)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def system_to_dot(system, name="system") -> str:
    return lts_to_dot(system.lts, name, lambda s: " / ".join(map(str, s)))


def topology_to_dot(g, name="topology") -> str:
    lines = [f"digraph {_q(name)} {{"]
    for v in g.vertices:
        shape = "doublecircle" if v == g.initial else "circle"
        lines.append(f"  v{v} [label=\"{v}\", shape={shape}];")
    for (a, b) in sorted(g.edges):
        dirs = g.edge_directions((a, b))
        attr = f" [label={_q(','.join(s for s, _ in dirs))}]" if dirs else ""
        lines.append(f"  v{a} -> v{b}{attr};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def contraction_to_dot(c, name="contraction") -> str:
    """Nodes are captioned with their marking digest, members and label."""
    ids = {m: i for i, m in enumerate(c.nodes)}
    lines = [f"digraph {_q(name)} {{"]
    for m in c.nodes:
        members = ",".join(map(str, c.members[m]))
        lab = ",".join(map(str, sorted(c.labels[m])))
        caption = f"{m.digest()}\\n{{{members}}}" + (f"\\nlabel {lab}" if lab else "")
        shape = "doublecircle" if m == c.initial else "box"
        lines.append(f"  c{ids[m]} [label={_q(caption)}, shape={shape}];")
    for (a, b) in sorted(c.edges, key=lambda e: (ids[e[0]], ids[e[1]])):
        lines.append(f"  c{ids[a]} -> c{ids[b]};")
    lines.append("}")
    return "\n".join(lines) + "\n"
