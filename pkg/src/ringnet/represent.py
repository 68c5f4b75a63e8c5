"""Field interpolation and the realization of arbitrary finite maps as networks over ``Z^kappa``.

Labels follow the usual convention: in ``Z_k`` label ``v`` stands for residue
``v mod k``, so label ``k`` is the residue 0.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import DimensionError, PreconditionError, RingError, VerificationError
from .network import Assr, Network, compile_assr, state_labels
from .poly import Const, PolyExpr, Proj, Sub, Var, product_of_terms, sum_of
from .ring import FiniteRing, embed, is_prime, z_kappa
from .stp import LogicalMatrix, stp


def _label(k: int, residue: int) -> int:
    return residue % k or k


@dataclass(frozen=True)
class IndexPolynomial:
    """``Gamma_alpha`` over ``Z_k``: 1 at residue ``alpha`` and 0 elsewhere."""

    k: int
    alpha: int
    expr: PolyExpr


def gamma_poly(k: int, alpha: int, arg: PolyExpr | None = None, const: Callable[[int], int] | None = None) -> IndexPolynomial:
    """Build ``prod_{j != alpha} (alpha - j)^-1 (x - j)`` with the inverses folded into one coefficient.

    ``arg`` replaces ``x`` (default ``Var(1)``).  ``const`` maps a ``Z_k``
    label to the label used in the expression; :func:`represent_network` uses
    it to place the coefficients inside one factor of a product ring.
    """
    if not is_prime(k):
        raise RingError(f"index polynomials need a prime field size, got {k}")
    if not 0 <= alpha < k:
        raise RingError(f"alpha must be a residue in [0, {k - 1}]")
    x = Var(1) if arg is None else arg
    lift = const or (lambda label: label)
    coeff = 1
    factors: list[PolyExpr] = []
    for j in range(k):
        if j == alpha:
            continue
        coeff = coeff * pow((alpha - j) % k, -1, k) % k
        factors.append(x if j == 0 else Sub(x, Const(lift(j))))
    if coeff != 1:
        factors.insert(0, Const(lift(coeff)))
    return IndexPolynomial(k, alpha, product_of_terms(factors))


def _table_values(k: int, table, d: int | None) -> tuple[int, np.ndarray]:
    """Normalize ``table`` to (arity, label array over argument tuples in mixed radix order)."""
    if isinstance(table, LogicalMatrix):
        if table.rows != k:
            raise DimensionError(f"table has {table.rows} rows, expected {k}")
        width = table.ncols
        d = round(np.log(width) / np.log(k)) if d is None else d
        if k**d != width:
            raise DimensionError(f"{width} columns is not {k}^{d}")
        return d, table.idx + 1
    if callable(table):
        if d is None:
            raise PreconditionError("a callable table needs its arity d")
        vals = [table(args) for args in itertools.product(range(1, k + 1), repeat=d)]
        return d, np.asarray(vals, dtype=np.int64)
    vals = np.asarray(list(table), dtype=np.int64)
    d = round(np.log(len(vals)) / np.log(k)) if d is None else d
    if k**d != len(vals):
        raise DimensionError(f"{len(vals)} values is not {k}^{d}")
    return d, vals


def interpolate_prime(k: int, table, d: int | None = None) -> PolyExpr:
    """Polynomial over ``Z_k`` equal to ``table`` at every point.

    ``table`` is a ``k x k^d`` logical matrix, a flat list of result labels,
    or a callable on label tuples (then ``d`` is required).  The result is the
    sum over argument tuples of ``Gamma(x_1) ... Gamma(x_d) * value``; zero
    values are left out.
    """
    if not is_prime(k):
        raise RingError(f"interpolation needs a prime field size, got {k}")
    d, vals = _table_values(k, table, d)
    if d < 1:
        raise PreconditionError("need at least one argument")
    if np.any((vals < 1) | (vals > k)):
        raise RingError("table values must be labels in [1, k]")
    gammas = [[gamma_poly(k, a, Var(v)).expr for a in range(k)] for v in range(1, d + 1)]
    terms = []
    for col, args in enumerate(itertools.product(range(1, k + 1), repeat=d)):
        value = int(vals[col])
        if value == k:
            continue
        parts = [gammas[v][a % k] for v, a in enumerate(args)]
        if value != 1:
            parts.append(Const(value))
        terms.append(product_of_terms(parts))
    return sum_of(terms) if terms else Const(k)


def adequate_set(k: int) -> tuple[LogicalMatrix, LogicalMatrix]:
    """Structure matrices ``(M_phi, M_gamma)`` of the binary/unary adequate pair for k-valued logic."""
    if k < 2:
        raise PreconditionError("k must be at least 2")
    M_sigma = LogicalMatrix(k, [j % k + 1 for j in range(1, k + 1)])
    blocks = [stp(LogicalMatrix(k, [max(i, j) for j in range(1, k + 1)]), M_sigma) for i in range(1, k + 1)]
    M_phi = LogicalMatrix(k, [c for b in blocks for c in b.cols])
    M_gamma = LogicalMatrix(k, [1] + list(range(1, k)))
    return M_phi, M_gamma


# ---------------------------------------------------------------------------
# representation theorem


@dataclass
class Representation:
    source: LogicalMatrix
    ring: FiniteRing
    network: Network
    assr: Assr

    @property
    def verified(self) -> bool:
        return self.assr.M == self.source


def selector(ring: FiniteRing, i: int, residue: int, v: int = 1) -> PolyExpr:
    """``Proj(i, Gamma_residue(x_v))``: the ring's 1 when part ``i`` of ``x_v`` is ``residue``, else 0."""
    ki = ring.factors[i - 1].k
    g = gamma_poly(ki, residue, Var(v), const=lambda c: embed(ring, c, i))
    return Proj(i, g.expr)


def _indicator(ring: FiniteRing, state: Sequence[int], cache: dict) -> list[PolyExpr]:
    """Factors of the product that is 1 exactly at the given label tuple."""
    out = []
    if ring.factors is None:
        k = ring.k
        for v, label in enumerate(state, 1):
            key = (v, 0, label)
            if key not in cache:
                cache[key] = gamma_poly(k, label % k, Var(v)).expr
            out.append(cache[key])
        return out
    from .ring import split_label

    for v, label in enumerate(state, 1):
        for i, part in enumerate(split_label(ring, label), 1):
            ki = ring.factors[i - 1].k
            key = (v, i, part)
            if key not in cache:
                cache[key] = selector(ring, i, part % ki, v)
            out.append(cache[key])
    return out


def _source_matrix(source, n):
    if isinstance(source, Network):
        if n is not None and n != source.n:
            raise PreconditionError("n disagrees with the network's node count")
        return compile_assr(source).M, source.ring.k, source.n
    if isinstance(source, Assr):
        return source.M, source.k, source.n
    if not isinstance(source, LogicalMatrix):
        source = list(source)
        source = LogicalMatrix(len(source), source)  # a plain list is the column list of a square map
    n = 1 if n is None else n
    if not source.is_square():
        raise DimensionError("a transition map must be square")
    kappa = round(source.rows ** (1.0 / n))
    if kappa**n != source.rows:
        raise DimensionError(f"{source.rows} states is not kappa^{n}")
    return source, kappa, n


def represent_network(source, n: int | None = None, kappa: int | None = None) -> Representation:
    """Realize a ``kappa``-valued map as a polynomial network over ``Z^kappa``.

    ``source`` is a square logical matrix (``n`` nodes, default 1), an
    :class:`Assr`, or any autonomous network whose ring has ``kappa``
    elements.  Node ``v`` gets ``sum_s [prod indicator(s)] * f_v(s)`` over
    the states ``s`` with ``f_v(s)`` nonzero, where each indicator is a
    ``proj`` of a field index polynomial.  The result is recompiled and must
    reproduce the source exactly.
    """
    M, k, n = _source_matrix(source, n)
    if kappa is not None and kappa != k:
        raise PreconditionError(f"source has {k}-valued nodes, not {kappa}")
    if k < 2:
        raise PreconditionError("kappa must be at least 2")
    ring = z_kappa(k)
    N = k**n
    cache: dict = {}
    indicators = [_indicator(ring, state_labels(s, k, n), cache) for s in range(1, N + 1)]
    targets = [state_labels(int(t) + 1, k, n) for t in M.idx]
    dyn = []
    for v in range(n):
        terms = []
        for s in range(N):
            value = targets[s][v]
            if value == ring.zero:
                continue
            parts = list(indicators[s])
            if value != ring.one:
                parts.append(Const(value))
            terms.append(product_of_terms(parts))
        dyn.append(sum_of(terms) if terms else Const(ring.zero))
    from .dsl import ring_declaration

    net = Network(ring, dyn, ring_decl=ring_declaration(ring))
    assr = compile_assr(net)
    rep = Representation(M, ring, net, assr)
    if not rep.verified:
        raise VerificationError("the represented network does not reproduce the source map")
    return rep
