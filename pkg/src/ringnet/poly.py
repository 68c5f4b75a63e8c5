"""Polynomial expression trees over a finite ring and their evaluation.

Every constant is a ring label.  Evaluation works on 0-based label arrays so a
whole state space can be pushed through an expression in one pass.

``Proj(i, e)`` evaluates ``e`` in the ring, takes part ``i`` of the result and
lifts it back as ``n * 1`` where ``n`` is that part's residue.  An indicator
that is 1 or 0 in the factor therefore becomes the ring's 1 or 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterator, Sequence, Union

import numpy as np

from .errors import NotAProductRingError, RingError

__all__ = [
    "PolyExpr",
    "Const",
    "Var",
    "Ctrl",
    "Proj",
    "Neg",
    "Add",
    "Sub",
    "Mul",
    "Pow",
    "as_expr",
    "eval_poly",
    "eval_array",
    "walk",
    "variables",
    "controls",
    "constants",
    "map_consts",
    "has_proj",
    "sum_of",
    "product_of_terms",
    "proj_lift_table",
]


class PolyExpr:
    """Base node.  Arithmetic operators build trees; plain ints become ``Const``."""

    __slots__ = ()

    def __add__(self, other):
        return Add(self, as_expr(other))

    def __radd__(self, other):
        return Add(as_expr(other), self)

    def __sub__(self, other):
        return Sub(self, as_expr(other))

    def __rsub__(self, other):
        return Sub(as_expr(other), self)

    def __mul__(self, other):
        return Mul(self, as_expr(other))

    def __rmul__(self, other):
        return Mul(as_expr(other), self)

    def __neg__(self):
        return Neg(self)

    def __pow__(self, r: int):
        return Pow(self, int(r))

    def children(self) -> tuple["PolyExpr", ...]:
        return ()


@dataclass(frozen=True)
class Const(PolyExpr):
    label: int


@dataclass(frozen=True)
class Var(PolyExpr):
    index: int  # 1-based state index


@dataclass(frozen=True)
class Ctrl(PolyExpr):
    index: int  # 1-based input index


@dataclass(frozen=True)
class Proj(PolyExpr):
    factor: int
    expr: PolyExpr

    def children(self):
        return (self.expr,)


@dataclass(frozen=True)
class Neg(PolyExpr):
    expr: PolyExpr

    def children(self):
        return (self.expr,)


@dataclass(frozen=True)
class Add(PolyExpr):
    left: PolyExpr
    right: PolyExpr

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Sub(PolyExpr):
    left: PolyExpr
    right: PolyExpr

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Mul(PolyExpr):
    left: PolyExpr
    right: PolyExpr

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Pow(PolyExpr):
    expr: PolyExpr
    exponent: int

    def __post_init__(self):
        if self.exponent < 1:
            raise ValueError("exponents must be >= 1")

    def children(self):
        return (self.expr,)


ExprLike = Union[PolyExpr, int]


def as_expr(x: ExprLike) -> PolyExpr:
    if isinstance(x, PolyExpr):
        return x
    if isinstance(x, (int, np.integer)):
        return Const(int(x))
    raise TypeError(f"cannot use {type(x).__name__} in a polynomial")


def sum_of(terms: Sequence[PolyExpr]) -> PolyExpr:
    """Sum as a balanced tree, so long sums stay shallow for the recursive passes."""
    terms = list(terms)
    if not terms:
        raise ValueError("empty sum")
    if len(terms) <= 4:
        out = terms[0]
        for t in terms[1:]:
            out = Add(out, t)
        return out
    mid = len(terms) // 2
    return Add(sum_of(terms[:mid]), sum_of(terms[mid:]))


def product_of_terms(factors: Sequence[PolyExpr]) -> PolyExpr:
    factors = list(factors)
    if not factors:
        raise ValueError("empty product")
    out = factors[0]
    for f in factors[1:]:
        out = Mul(out, f)
    return out


def walk(e: PolyExpr) -> Iterator[PolyExpr]:
    stack = [e]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(node.children()))


def variables(e: PolyExpr) -> set[int]:
    return {n.index for n in walk(e) if isinstance(n, Var)}


def controls(e: PolyExpr) -> set[int]:
    return {n.index for n in walk(e) if isinstance(n, Ctrl)}


controls_of = controls  # alias for call sites where ``controls`` names an argument


def constants(e: PolyExpr) -> set[int]:
    return {n.label for n in walk(e) if isinstance(n, Const)}


def has_proj(e: PolyExpr) -> bool:
    return any(isinstance(n, Proj) for n in walk(e))


def map_consts(e: PolyExpr, f: Callable[[int], int]) -> PolyExpr:
    """Copy of ``e`` with every constant label replaced by ``f(label)``."""
    if isinstance(e, Const):
        return Const(f(e.label))
    if isinstance(e, (Var, Ctrl)):
        return e
    if isinstance(e, Neg):
        return Neg(map_consts(e.expr, f))
    if isinstance(e, Pow):
        return Pow(map_consts(e.expr, f), e.exponent)
    if isinstance(e, Proj):
        return Proj(e.factor, map_consts(e.expr, f))
    return type(e)(map_consts(e.left, f), map_consts(e.right, f))


# ---------------------------------------------------------------------------
# evaluation


def proj_lift_table(ring, i: int) -> np.ndarray:
    """0-based ring label of ``n * 1`` for each 0-based label of factor ``i``."""
    if ring.factors is None:
        raise NotAProductRingError(f"proj() needs a product ring, {ring.name or 'this ring'} has no factors")
    if not 1 <= i <= len(ring.factors):
        raise RingError(f"proj factor {i} outside [1, {len(ring.factors)}]")
    ki = ring.factors[i - 1].k
    out = np.empty(ki, dtype=np.int64)
    acc = ring.k - 1  # zero
    # label r of the factor has residue r mod ki, so label j (0-based) needs (j+1) mod ki ones
    multiples = [acc]
    for _ in range(ki - 1):
        acc = int(ring.add_t[acc, 0])
        multiples.append(acc)
    for j in range(ki):
        out[j] = multiples[(j + 1) % ki]
    return out


def eval_array(ring, e: PolyExpr, X: np.ndarray, U: np.ndarray | None = None) -> np.ndarray:
    """Evaluate on 0-based labels.  ``X`` is ``(n, N)``, ``U`` is ``(m, N)``; returns ``(N,)``."""
    N = X.shape[1] if X.ndim == 2 else (U.shape[1] if U is not None else 1)
    cache: dict = {}

    def go(node):
        key = id(node)
        if key in cache:
            return cache[key][1]
        if isinstance(node, Const):
            if not 1 <= node.label <= ring.k:
                raise RingError(f"constant label {node.label} outside [1, {ring.k}]")
            val = np.full(N, node.label - 1, dtype=np.int64)
        elif isinstance(node, Var):
            val = X[node.index - 1]
        elif isinstance(node, Ctrl):
            if U is None:
                raise RingError("expression uses a control but no control values were given")
            val = U[node.index - 1]
        elif isinstance(node, Neg):
            val = ring.neg_t[go(node.expr)]
        elif isinstance(node, Add):
            val = ring.add_t[go(node.left), go(node.right)]
        elif isinstance(node, Sub):
            val = ring.add_t[go(node.left), ring.neg_t[go(node.right)]]
        elif isinstance(node, Mul):
            val = ring.mul_t[go(node.left), go(node.right)]
        elif isinstance(node, Pow):
            base = go(node.expr)
            val = base
            for _ in range(node.exponent - 1):
                val = ring.mul_t[val, base]
        elif isinstance(node, Proj):
            from .ring import project_table

            lift = proj_lift_table(ring, node.factor)
            val = lift[project_table(ring, node.factor)[go(node.expr)]]
        else:  # pragma: no cover
            raise TypeError(f"unknown node {node!r}")
        # keep node alive so id() stays unique while cached
        cache[key] = (node, val)
        return val

    return np.broadcast_to(go(e), (N,)).copy()


def eval_poly(ring, expr: PolyExpr, state: Sequence[int] = (), controls: Sequence[int] = ()) -> int:
    """Value (a label) of ``expr`` at the given state and control labels."""
    X = np.asarray(list(state), dtype=np.int64).reshape(-1, 1) - 1
    U = np.asarray(list(controls), dtype=np.int64).reshape(-1, 1) - 1 if len(controls) else None
    for idx in variables(expr):
        if idx > X.shape[0]:
            raise RingError(f"state has {X.shape[0]} entries, expression needs x{idx}")
    for idx in controls_of(expr):
        if U is None or idx > U.shape[0]:
            raise RingError(f"expression needs control u{idx}")
    for v in list(state) + list(controls):
        if not 1 <= v <= ring.k:
            raise RingError(f"label {v} outside [1, {ring.k}]")
    if X.size == 0:
        X = np.zeros((0, 1), dtype=np.int64)
    return int(eval_array(ring, expr, X, U)[0]) + 1

