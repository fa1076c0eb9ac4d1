"""Recursive-descent parser for indexed CTL* formulas.

Grammar::

    formula    := quantblock* "." body
    quantblock := ("forall" | "exists") IDENT+ ["distinct"] ["in" "E" "(" IDENT ")"]
    body       := implies
    implies    := or ["->" implies]
    or         := and ("|" and)*
    and        := until ("&" until)*
    until      := unary ["U" until]
    unary      := ("!" | "A" | "E" | "F" | "G") unary | primary
    primary    := "true" | "false" | "(" body ")" | IDENT "@" IDENT | IDENT "=" IDENT

Unary operators bind tightest, so ``A p U q`` reads as ``(A p) U q``;
parenthesize path formulas under ``A``/``E``.
"""
import re

from .formula import (And, Atom, Eq, Exists, FALSE, Finally, Forall, Formula, Globally,
                      Implies, Not, Or, Quantifier, TRUE, Until, is_state, walk)

KEYWORDS = {"forall", "exists", "distinct", "in", "true", "false",
            "A", "E", "F", "G", "U", "X"}
TOKEN_RE = re.compile(r"\s*(?:(->)|([A-Za-z_][A-Za-z0-9_]*)|(\d+)|([()!&|@=.,]))")


class FormulaSyntaxError(ValueError):
    def __init__(self, message, pos=None):
        self.pos = pos
        super().__init__(message if pos is None else f"{message} (at offset {pos})")


def tokenize(text):
    out, pos = [], 0
    text = text.rstrip()
    while pos < len(text):
        m = TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", pos)
        start = m.start(m.lastindex)
        if m.group(1):
            out.append(("->", "->", start))
        elif m.group(2):
            word = m.group(2)
            out.append(("kw" if word in KEYWORDS else "id", word, start))
        elif m.group(3):
            out.append(("num", m.group(3), start))
        else:
            out.append((m.group(4), m.group(4), start))
        pos = m.end()
    out.append(("eof", "", len(text)))
    return out


class _Parser:
    def __init__(self, text, closed):
        self.toks = tokenize(text)
        self.i = 0
        self.closed = closed

    def peek(self, ahead=0):
        return self.toks[min(self.i + ahead, len(self.toks) - 1)]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def accept(self, value):
        if self.peek()[1] == value and self.peek()[0] != "id":
            return self.take()
        return None

    def expect(self, value):
        tok = self.peek()
        if tok[1] != value or tok[0] == "id":
            raise FormulaSyntaxError(f"expected {value!r}, found {tok[1] or 'end of input'!r}", tok[2])
        return self.take()

    def ident(self, what="identifier"):
        tok = self.peek()
        if tok[0] != "id":
            raise FormulaSyntaxError(f"expected {what}, found {tok[1] or 'end of input'!r}", tok[2])
        return self.take()[1]

    # -------------------------------------------------------------- prefix
    def prefix(self):
        quants = []
        while self.peek()[1] in ("forall", "exists") and self.peek()[0] == "kw":
            kind = self.take()[1]
            names = [self.ident("variable")]
            while self.peek()[0] == "id":
                names.append(self.take()[1])
            distinct = bool(self.accept("distinct"))
            edge_of = None
            if self.accept("in"):
                self.expect("E")
                self.expect("(")
                edge_of = self.ident("variable")
                self.expect(")")
            quants.extend(Quantifier(kind, n, distinct, edge_of) for n in names)
        return quants

    # ---------------------------------------------------------------- body
    def implies(self):
        left = self.disj()
        if self.accept("->"):
            return Implies(left, self.implies())
        return left

    def disj(self):
        node = self.conj()
        while self.accept("|"):
            node = Or(node, self.conj())
        return node

    def conj(self):
        node = self.until()
        while self.accept("&"):
            node = And(node, self.until())
        return node

    def until(self):
        left = self.unary()
        if self.accept("U"):
            return Until(left, self.until())
        return left

    def unary(self):
        tok = self.peek()
        if tok[0] == "kw" and tok[1] == "X":
            raise FormulaSyntaxError("the next operator X is not supported", tok[2])
        if tok[0] == "kw" and tok[1] in ("forall", "exists"):
            raise FormulaSyntaxError("quantifiers must all appear in the prefix", tok[2])
        ops = {"!": Not, "A": Forall, "E": Exists, "F": Finally, "G": Globally}
        if tok[1] in ops and tok[0] in ("!", "kw"):
            self.take()
            return ops[tok[1]](self.unary())
        return self.primary()

    def primary(self):
        tok = self.peek()
        if tok[0] == "kw" and tok[1] == "true":
            self.take()
            return TRUE
        if tok[0] == "kw" and tok[1] == "false":
            self.take()
            return FALSE
        if tok[0] == "(":
            self.take()
            node = self.implies()
            self.expect(")")
            return node
        if tok[0] == "id":
            name = self.take()[1]
            if self.accept("@"):
                idx = self.peek()
                if idx[0] == "num":
                    self.take()
                    return Atom(name, int(idx[1]))
                return Atom(name, self.ident("index variable"))
            if self.accept("="):
                return Eq(name, self.ident("index variable"))
            if self.closed:
                return Atom(name)
            raise FormulaSyntaxError(f"atom {name!r} needs an index, as in {name}@i", tok[2])
        raise FormulaSyntaxError(f"unexpected {tok[1] or 'end of input'!r}", tok[2])


def _check_body(body, bound, text):
    if not is_state(body):
        raise FormulaSyntaxError("temporal operators must appear under a path quantifier A or E")
    for node in walk(body):
        names = []
        if isinstance(node, Atom) and isinstance(node.index, str):
            names = [node.index]
        elif isinstance(node, Eq):
            names = [node.left, node.right]
        for n in names:
            if n not in bound:
                raise FormulaSyntaxError(f"unbound index variable {n!r}")


def parse_formula(text: str) -> Formula:
    """Parse a quantified formula ``quantblocks . body``."""
    p = _Parser(text, closed=False)
    quants = p.prefix()
    p.expect(".")
    body = p.implies()
    if p.peek()[0] != "eof":
        tok = p.peek()
        raise FormulaSyntaxError(f"unexpected {tok[1]!r} after the formula", tok[2])
    seen = []
    for q in quants:
        if q.var in seen:
            raise FormulaSyntaxError(f"variable {q.var!r} is bound twice")
        if q.edge_of is not None and q.edge_of not in seen:
            raise FormulaSyntaxError(f"E({q.edge_of}) refers to a variable not bound earlier")
        seen.append(q.var)
    _check_body(body, set(seen), text)
    for node in walk(body):
        if isinstance(node, Atom) and isinstance(node.index, int):
            raise FormulaSyntaxError("quantified formulas index atoms by variables, not numbers")
    return Formula(tuple(quants), body)


def parse_body(text: str, *, state=True):
    """Parse a closed body such as ``A G !(crit@1 & crit@2)`` or ``G p``.

    With ``state=False`` a bare path formula (LTL) is accepted.
    """
    p = _Parser(text, closed=True)
    body = p.implies()
    if p.peek()[0] != "eof":
        tok = p.peek()
        raise FormulaSyntaxError(f"unexpected {tok[1]!r} after the formula", tok[2])
    if state:
        _check_body(body, set(), text)
    else:
        for node in walk(body):
            if isinstance(node, Atom) and isinstance(node.index, str):
                raise FormulaSyntaxError(f"unbound index variable {node.index!r}")
    return body
