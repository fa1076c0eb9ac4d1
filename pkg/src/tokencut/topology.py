"""Topologies: directed graphs over vertices 1..n with an initial token vertex."""
import json
from dataclasses import dataclass, field
from typing import Optional

from .lts import Lts
from .template import ValidationReport, Violation

FAMILIES = ("ring", "biring", "clique", "star")
MIN_SIZE = {"ring": 2, "biring": 2, "clique": 2, "star": 2}


@dataclass(frozen=True)
class Topology:
    n: int
    edges: frozenset
    initial: int = 1
    snd_labels: Optional[dict] = field(default=None, compare=False)
    rcv_labels: Optional[dict] = field(default=None, compare=False)
    name: str = field(default="", compare=False)

    @property
    def vertices(self):
        return range(1, self.n + 1)

    @property
    def labeled(self) -> bool:
        return self.snd_labels is not None or self.rcv_labels is not None

    def edge_directions(self, e) -> list:
        """The ``(snd, rcv)`` direction pairs carried by edge ``e``.

        An edge may carry several pairs, which stands for parallel edges.
        Unlabeled topologies carry none.
        """
        if not self.labeled:
            return []
        snd_d = self.snd_labels[e]
        rcv_d = self.rcv_labels[e]
        if isinstance(snd_d, str):
            return [(snd_d, rcv_d)]
        return list(zip(snd_d, rcv_d))

    def successors(self, v):
        return sorted(w for (u, w) in self.edges if u == v)

    def succ_map(self) -> dict:
        out = {v: [] for v in self.vertices}
        for (u, w) in sorted(self.edges):
            if u in out:
                out[u].append(w)
        return out

    def __str__(self):
        return self.name or f"topology(n={self.n}, |E|={len(self.edges)})"


def _check_size(kind, n):
    if n < MIN_SIZE[kind]:
        raise ValueError(f"{kind} needs at least {MIN_SIZE[kind]} vertices, got {n}")


def make_ring(n: int) -> Topology:
    """Uni-directional ring with edges i -> i+1 (mod n)."""
    _check_size("ring", n)
    return Topology(n, frozenset((i, i % n + 1) for i in range(1, n + 1)), 1, name=f"ring:{n}")


def make_biring(n: int) -> Topology:
    """Bi-directional ring; i -> i+1 edges are labeled cw, the reverse ones ccw."""
    _check_size("biring", n)
    snd_l, rcv_l = {}, {}
    for i in range(1, n + 1):
        j = i % n + 1
        snd_l[(i, j)] = rcv_l[(i, j)] = "cw"
        snd_l[(j, i)] = rcv_l[(j, i)] = "ccw"
    if n == 2:
        # both neighbours coincide, so each edge stands for a cw and a ccw edge
        snd_l = {(1, 2): ("cw", "ccw"), (2, 1): ("cw", "ccw")}
        rcv_l = dict(snd_l)
    return Topology(n, frozenset(snd_l), 1, snd_l, rcv_l, name=f"biring:{n}")


def make_clique(n: int) -> Topology:
    _check_size("clique", n)
    return Topology(n, frozenset((i, j) for i in range(1, n + 1) for j in range(1, n + 1) if i != j),
                    1, name=f"clique:{n}")


def make_star(n: int) -> Topology:
    """Hub 1 with edges both ways to every leaf; the token starts at the hub."""
    _check_size("star", n)
    edges = set()
    for leaf in range(2, n + 1):
        edges.add((1, leaf))
        edges.add((leaf, 1))
    return Topology(n, frozenset(edges), 1, name=f"star:{n}")


def make_lasso(cycle: int, tail: int) -> Topology:
    """A path of ``tail`` vertices leading into a ring of ``cycle`` vertices.

    The token starts at the free end of the tail (vertex 1).
    """
    if cycle < 2:
        raise ValueError("lasso cycle needs at least 2 vertices")
    n = cycle + tail
    edges = {(i, i + 1) for i in range(1, tail + 1)}
    ring = list(range(tail + 1, n + 1))
    for a, b in zip(ring, ring[1:] + ring[:1]):
        edges.add((a, b))
    return Topology(n, frozenset(edges), 1, name=f"lasso:{cycle}+{tail}")


def make_family(kind: str, n: int) -> Topology:
    makers = {"ring": make_ring, "biring": make_biring, "clique": make_clique, "star": make_star}
    if kind not in makers:
        raise ValueError(f"unknown family {kind!r}; choose from {list(FAMILIES)}")
    return makers[kind](n)


def validate_topology(g: Topology) -> ValidationReport:
    out = []
    if g.n < 1:
        out.append(Violation("size", "a topology needs at least one vertex"))
    if not 1 <= g.initial <= g.n:
        out.append(Violation("initial", f"initial vertex {g.initial} is not in 1..{g.n}", (g.initial,)))
    for (u, w) in sorted(g.edges):
        if u == w:
            out.append(Violation("self-loop", f"self-loop on vertex {u}", (u,)))
        if not (1 <= u <= g.n and 1 <= w <= g.n):
            out.append(Violation("range", f"edge {(u, w)} leaves 1..{g.n}", (u, w)))
    for side, labels in (("snd", g.snd_labels), ("rcv", g.rcv_labels)):
        if labels is None:
            continue
        missing = sorted(e for e in g.edges if e not in labels)
        if missing:
            out.append(Violation("labels", f"{side} labeling misses edges {missing}", tuple(missing)))
    if g.labeled and (g.snd_labels is None or g.rcv_labels is None):
        out.append(Violation("labels", "direction labels need both snd and rcv maps"))
    return ValidationReport(tuple(out))


def check_tuple(g: Topology, gbar) -> tuple:
    gbar = tuple(gbar)
    if len(set(gbar)) != len(gbar):
        raise ValueError(f"index tuple {gbar} has repeated vertices")
    for v in gbar:
        if not 1 <= v <= g.n:
            raise ValueError(f"vertex {v} is not in 1..{g.n}")
    return gbar


def graph_lts(g: Topology, gbar) -> Lts:
    """The topology as an LTS: vertex ``g_i`` is labeled ``{i}``, the rest ``{}``."""
    gbar = check_tuple(g, gbar)
    pos = {v: i + 1 for i, v in enumerate(gbar)}
    labeling = {v: frozenset({pos[v]}) if v in pos else frozenset() for v in g.vertices}
    trans = tuple(sorted((u, "e", w) for (u, w) in g.edges))
    return Lts(tuple(g.vertices), frozenset({g.initial}), frozenset({"e"}), trans, labeling)


# ----------------------------------------------------------------- IO

def topology_from_json(doc) -> Topology:
    if isinstance(doc, str):
        doc = json.loads(doc)
    try:
        n = int(doc["n"])
        edges = frozenset(tuple(e) for e in doc["edges"])
    except KeyError as exc:
        raise ValueError(f"topology document is missing field {exc.args[0]!r}") from None

    def labels(key):
        raw = doc.get(key)
        if raw is None:
            return None
        # either a list of [u, w, dir] triples or a {"u,w": dir} object
        def norm(d):
            return d if isinstance(d, str) else tuple(d)
        if isinstance(raw, dict):
            return {tuple(int(x) for x in k.split(",")): norm(v) for k, v in raw.items()}
        return {(int(u), int(w)): norm(d) for (u, w, d) in raw}

    return Topology(n, edges, int(doc.get("initial", 1)), labels("snd_labels"),
                    labels("rcv_labels"), name=doc.get("name", ""))


def topology_to_json(g: Topology) -> dict:
    doc = {"n": g.n, "edges": [list(e) for e in sorted(g.edges)], "initial": g.initial}
    if g.snd_labels is not None:
        doc["snd_labels"] = [[u, w, d if isinstance(d, str) else list(d)]
                             for (u, w), d in sorted(g.snd_labels.items())]
    if g.rcv_labels is not None:
        doc["rcv_labels"] = [[u, w, d if isinstance(d, str) else list(d)]
                             for (u, w), d in sorted(g.rcv_labels.items())]
    return doc


def parse_topology(source: str) -> Topology:
    """``ring:6``-style shorthand or a path to a JSON topology file."""
    if ":" in source and not source.endswith(".json"):
        kind, _, size = source.partition(":")
        try:
            n = int(size)
        except ValueError:
            raise ValueError(f"bad topology size in {source!r}") from None
        return make_family(kind, n)
    with open(source) as fh:
        return topology_from_json(json.load(fh))
