"""Text format for (control) networks: a tokenizer, a recursive-descent parser
and a printer whose output parses back to the same expression trees.

Example::

    ring Z6
    states z1 z2
    inputs u
    z1' = 4*z1^2 - z2 + u
    z2' = z1*z2

Literals are ring labels with ``0`` standing for the zero label ``k``; over
``Z_k`` that is exactly residue notation.  ``ring Z^6 @crt`` instead reads
literals as residues in ``Z_6`` and maps them to ``Z^6`` labels through the
Chinese-remainder isomorphism.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass
from typing import Callable

from .errors import DslError, RingError
from .poly import Add, Const, Ctrl, Mul, Neg, PolyExpr, Pow, Proj, Sub, Var
from .ring import (
    FiniteRing,
    crt_iso,
    enumerate_rings,
    load_ring,
    make_zk,
    product_of,
    prime_factors,
    z_kappa,
)

_TOKEN = re.compile(r"\s*(?:(?P<int>\d+)|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*^(),]))")


@dataclass(frozen=True)
class Token:
    kind: str  # 'int', 'ident', 'op', 'end'
    text: str
    col: int


def tokenize(text: str, line: int, col0: int = 1) -> list[Token]:
    pos = 0
    out = []
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            out.append(Token("end", "", col0 + pos))
            return out
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise DslError(f"unexpected character {text[pos]!r}", line, col0 + pos)
        kind = m.lastgroup
        start = m.start(kind)
        out.append(Token(kind, m.group(kind), col0 + start))
        pos = m.end()


class _ExprParser:
    """expr := term (('+'|'-') term)*; term := factor ('*' factor)*;
    factor := atom ['^' nat]; atom := ident | int | '-' atom | '(' expr ')' | proj(nat, expr)."""

    def __init__(self, tokens, line, resolve: Callable[[Token], PolyExpr], literal: Callable[[Token], PolyExpr], nfactors: int | None):
        self.toks = tokens
        self.i = 0
        self.line = line
        self.resolve = resolve
        self.literal = literal
        self.nfactors = nfactors

    def peek(self) -> Token:
        return self.toks[self.i]

    def take(self) -> Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, text: str) -> Token:
        t = self.take()
        if t.text != text:
            raise DslError(f"expected {text!r}, found {t.text or 'end of line'!r}", self.line, t.col)
        return t

    def parse(self) -> PolyExpr:
        e = self.expr()
        t = self.peek()
        if t.kind != "end":
            hint = " (use '*' for multiplication)" if t.kind in ("ident", "int") or t.text == "(" else ""
            raise DslError(f"unexpected {t.text!r}{hint}", self.line, t.col)
        return e

    def expr(self) -> PolyExpr:
        e = self.term()
        while self.peek().text in ("+", "-"):
            op = self.take().text
            r = self.term()
            e = Add(e, r) if op == "+" else Sub(e, r)
        return e

    def term(self) -> PolyExpr:
        e = self.factor()
        while self.peek().text == "*":
            self.take()
            e = Mul(e, self.factor())
        return e

    def factor(self) -> PolyExpr:
        base = self.atom()
        if self.peek().text == "^":
            self.take()
            t = self.take()
            if t.kind != "int" or int(t.text) < 1:
                raise DslError("exponent must be a positive integer", self.line, t.col)
            base = Pow(base, int(t.text))
            if self.peek().text == "^":
                raise DslError("chained '^' is ambiguous; add parentheses", self.line, self.peek().col)
        return base

    def atom(self) -> PolyExpr:
        t = self.take()
        if t.text == "-":
            return Neg(self.atom())
        if t.text == "(":
            e = self.expr()
            self.expect(")")
            return e
        if t.kind == "int":
            return self.literal(t)
        if t.kind == "ident":
            if t.text == "proj":
                self.expect("(")
                it = self.take()
                if it.kind != "int":
                    raise DslError("proj needs a factor index", self.line, it.col)
                i = int(it.text)
                if self.nfactors is None:
                    raise DslError("proj() needs a product ring", self.line, t.col)
                if not 1 <= i <= self.nfactors:
                    raise DslError(f"proj factor {i} outside [1, {self.nfactors}]", self.line, it.col)
                self.expect(",")
                e = self.expr()
                self.expect(")")
                return Proj(i, e)
            return self.resolve(t)
        raise DslError(f"expected an operand, found {t.text or 'end of line'!r}", self.line, t.col)


@dataclass
class RingSpec:
    ring: FiniteRing
    decl: str  # canonical declaration, always in label-literal form
    crt: bool = False


def resolve_ring(decl: str, base_dir: str | None = None, line: int | None = None, col: int | None = None) -> RingSpec:
    """Turn the text after ``ring`` into a ring."""
    words = decl.split()
    if not words:
        raise DslError("ring declaration is empty", line, col)
    crt = "@crt" in words[1:]
    extra = [w for w in words[1:] if w != "@crt"]
    if extra:
        raise DslError(f"unknown ring flag {extra[0]!r}", line, col)
    name = words[0]
    try:
        if name.startswith("file:"):
            path = name[5:]
            if base_dir and not os.path.isabs(path):
                path = os.path.join(base_dir, path)
            try:
                with open(path, encoding="utf-8") as fh:
                    ring = load_ring(fh.read())
            except OSError as exc:
                raise DslError(f"cannot read ring file {path!r}: {exc.strerror}", line, col) from None
        elif m := re.fullmatch(r"enum(\d+):(\d+)", name):
            k, idx = int(m.group(1)), int(m.group(2))
            if k > 7:
                raise DslError("enum rings are limited to k <= 7", line, col)
            rings = enumerate_rings(k)
            if not 1 <= idx <= len(rings):
                raise DslError(f"there are {len(rings)} rings of order {k}; index {idx} is out of range", line, col)
            ring = rings[idx - 1]
        elif m := re.fullmatch(r"Z\^(\d+)", name):
            ring = z_kappa(int(m.group(1)))
        elif re.fullmatch(r"Z\d+(xZ\d+)+", name):
            sizes = [int(s) for s in name[1:].split("xZ")]
            ring = product_of([make_zk(s) for s in sizes], name=name)
        elif m := re.fullmatch(r"Z(\d+)", name):
            ring = make_zk(int(m.group(1)))
        else:
            raise DslError(f"unknown ring {name!r}", line, col)
    except RingError as exc:
        raise DslError(str(exc), line, col) from None
    if crt:
        ps = prime_factors(ring.k)
        if len(set(ps)) != len(ps) or not ring.same_tables(z_kappa(ring.k)):
            raise DslError("@crt needs Z^kappa with squarefree kappa", line, col)
    return RingSpec(ring, name, crt)


def ring_declaration(ring: FiniteRing) -> str | None:
    """A declaration that reproduces ``ring``, if one of the built-in forms does."""
    if ring.factors is None:
        if ring.same_tables(make_zk(ring.k)):
            return f"Z{ring.k}"
        return None
    zk = z_kappa(ring.k)
    if ring.same_tables(zk) and ring.radix == zk.radix:
        return f"Z^{ring.k}"
    if all(f.same_tables(make_zk(f.k)) for f in ring.factors):
        return "x".join(f"Z{f.k}" for f in ring.factors)
    return None


def parse_network(text: str, base_dir: str | None = None, ring: FiniteRing | None = None):
    """Parse DSL text into a :class:`Network` or :class:`ControlNetwork`.

    A network with an ``inputs`` or ``outputs`` line is a control network.
    ``ring`` supplies the ring when the text has no ``ring`` line.
    """
    from .network import ControlNetwork, Network

    spec: RingSpec | None = None
    states: list[str] | None = None
    inputs: list[str] = []
    outputs: list[str] = []
    saw_io = False
    dyn: dict[str, tuple[str, int, int]] = {}
    outs: dict[str, tuple[str, int, int]] = {}
    ident = re.compile(r"[A-Za-z_][A-Za-z0-9_]*$")

    def names(rest: str, lineno: int, col: int, what: str) -> list[str]:
        got = rest.split()
        for g in got:
            if not ident.match(g) or g == "proj":
                raise DslError(f"bad {what} name {g!r}", lineno, col)
        return got

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        indent = len(line) - len(line.lstrip())
        body = line.strip()
        col = indent + 1
        head, _, rest = body.partition(" ")
        if head == "ring":
            if spec is not None:
                raise DslError("ring declared twice", lineno, col)
            spec = resolve_ring(rest.strip(), base_dir, lineno, col + 5)
            continue
        if head == "states":
            if states is not None:
                raise DslError("states declared twice", lineno, col)
            states = names(rest, lineno, col + 7, "state")
            continue
        if head in ("inputs", "outputs"):
            saw_io = True
            target = inputs if head == "inputs" else outputs
            if target:
                raise DslError(f"{head} declared twice", lineno, col)
            target.extend(names(rest, lineno, col + len(head) + 1, head[:-1]))
            continue
        if "=" not in body:
            raise DslError(f"expected a declaration or an equation, found {body!r}", lineno, col)
        lhs, _, rhs = body.partition("=")
        lhs_s = lhs.strip()
        rhs_col = col + len(lhs) + 1 + (len(rhs) - len(rhs.lstrip()))
        if lhs_s.endswith("'"):
            name = lhs_s[:-1].strip()
            if name in dyn:
                raise DslError(f"{name}' defined twice", lineno, col)
            dyn[name] = (rhs, lineno, rhs_col)
        else:
            if lhs_s in outs:
                raise DslError(f"{lhs_s} defined twice", lineno, col)
            outs[lhs_s] = (rhs, lineno, rhs_col)

    if spec is None and ring is not None:
        spec = RingSpec(ring, ring_declaration(ring) or "")
    if spec is None:
        raise DslError("missing 'ring' declaration", 1, 1)
    if not states:
        raise DslError("network declares no states", 1, 1)
    seen = set()
    for nm in states + inputs + outputs:
        if nm in seen:
            raise DslError(f"name {nm!r} declared more than once", 1, 1)
        seen.add(nm)
    for nm, (_, ln, c) in dyn.items():
        if nm not in states:
            raise DslError(f"{nm}' is not a declared state", ln, c)
    for nm, (_, ln, c) in outs.items():
        if nm not in outputs:
            raise DslError(f"{nm} is not a declared output (updates need a prime: {nm}')", ln, c)
    missing = [s for s in states if s not in dyn]
    if missing:
        raise DslError(f"no update equation for {', '.join(missing)}", 1, 1)
    missing = [o for o in outputs if o not in outs]
    if missing:
        raise DslError(f"no equation for output {', '.join(missing)}", 1, 1)

    R = spec.ring
    crt_map = crt_iso(R.k) if spec.crt else None
    nfactors = len(R.factors) if R.factors is not None else None
    svars = {nm: Var(i) for i, nm in enumerate(states, 1)}
    cvars = {nm: Ctrl(j) for j, nm in enumerate(inputs, 1)}

    def literal_for(lineno):
        def literal(tok: Token) -> PolyExpr:
            v = int(tok.text)
            if crt_map is not None:
                return Const(crt_map[(v % R.k or R.k) - 1])
            if not 0 <= v < R.k:
                raise DslError(f"constant {v} outside [0, {R.k - 1}]", lineno, tok.col)
            return Const(v if v else R.k)

        return literal

    def resolver(allow_ctrl: bool, lineno: int):
        def resolve(tok: Token) -> PolyExpr:
            if tok.text in svars:
                return svars[tok.text]
            if tok.text in cvars:
                if not allow_ctrl:
                    raise DslError(f"output equations cannot use input {tok.text!r}", lineno, tok.col)
                return cvars[tok.text]
            raise DslError(f"unknown identifier {tok.text!r}", lineno, tok.col)

        return resolve

    def parse_rhs(src, lineno, col, allow_ctrl):
        toks = tokenize(src.lstrip(), lineno, col)
        return _ExprParser(toks, lineno, resolver(allow_ctrl, lineno), literal_for(lineno), nfactors).parse()

    dynamics = [parse_rhs(*dyn[s], True) for s in states]
    out_exprs = [parse_rhs(*outs[o], False) for o in outputs]
    decl = spec.decl or ring_declaration(R)
    if saw_io:
        return ControlNetwork(R, dynamics, len(inputs), out_exprs, states, inputs, outputs, ring_decl=decl)
    return Network(R, dynamics, states, ring_decl=decl)


def parse_network_file(path: str):
    with open(path, encoding="utf-8") as fh:
        return parse_network(fh.read(), base_dir=os.path.dirname(os.path.abspath(path)))


# ---------------------------------------------------------------------------
# printing


def format_expr(e: PolyExpr, k: int, state_names, input_names=()) -> str:
    """Render with just enough parentheses that parsing gives back the same tree."""

    def lit(label: int) -> str:
        return "0" if label == k else str(label)

    def go(node: PolyExpr, level: int) -> str:
        # levels: 1 sum, 2 product, 3 power base is an atom, 4 atom
        if isinstance(node, Const):
            return lit(node.label)
        if isinstance(node, Var):
            return state_names[node.index - 1]
        if isinstance(node, Ctrl):
            return input_names[node.index - 1]
        if isinstance(node, Proj):
            return f"proj({node.factor}, {go(node.expr, 1)})"
        if isinstance(node, Neg):
            return "-" + go(node.expr, 4)
        if isinstance(node, Pow):
            s = f"{go(node.expr, 4)}^{node.exponent}"
            return s if level <= 3 else f"({s})"
        if isinstance(node, (Add, Sub)):
            op = " + " if isinstance(node, Add) else " - "
            s = go(node.left, 1) + op + go(node.right, 2)
            return s if level <= 1 else f"({s})"
        if isinstance(node, Mul):
            s = go(node.left, 2) + "*" + go(node.right, 3)
            return s if level <= 2 else f"({s})"
        raise TypeError(f"unknown node {node!r}")  # pragma: no cover

    return go(e, 1)


def format_network(net, ring_decl: str | None = None) -> str:
    """DSL text for ``net``; constants are written as labels (never ``@crt``)."""
    from .network import is_control

    decl = ring_decl or net.ring_decl or ring_declaration(net.ring)
    if decl is None:
        raise DslError(f"ring {net.ring.name!r} has no built-in declaration; save it and use ring file:<path>")
    decl = decl.replace("@crt", "").strip()
    k = net.ring.k
    lines = [f"ring {decl}", "states " + " ".join(net.state_names)]
    inputs = ()
    if is_control(net):
        inputs = net.input_names
        if net.m:
            lines.append("inputs " + " ".join(inputs))
        if net.p:
            lines.append("outputs " + " ".join(net.output_names))
        if not net.m and not net.p:
            lines.append("inputs")
    for name, e in zip(net.state_names, net.dynamics):
        lines.append(f"{name}' = {format_expr(e, k, net.state_names, inputs)}")
    if is_control(net):
        for name, e in zip(net.output_names, net.outputs):
            lines.append(f"{name} = {format_expr(e, k, net.state_names, inputs)}")
    return "\n".join(lines) + "\n"
