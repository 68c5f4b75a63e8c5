"""Sub-networks over ideals, factor projections of networks over product rings,
product networks, the decomposition check, and linear networks over ``Z^kappa``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .dsl import ring_declaration
from .errors import AssrMismatchError, BudgetExceeded, NotAProductRingError, PreconditionError, RingError
from .network import (
    Assr,
    ControlNetwork,
    Network,
    check_budget,
    compile_assr,
    controllability,
    fixed_points,
    is_control,
    observability,
    reachable_from,
    stabilizable_to,
    state_index,
    state_labels,
    synchronizable,
    trajectory,
)
from .poly import Add, Const, Ctrl, Mul, Var, eval_array, has_proj, map_consts, sum_of
from .ring import (
    FiniteRing,
    Ideal,
    crt_residue_label,
    factor_projection_matrix,
    join_parts,
    product_ring,
    project,
    split_label,
    z_kappa,
)
from .stp import LogicalMatrix, identity, khatri_rao, kron, stp, stp_chain, stp_power


# ---------------------------------------------------------------------------
# ideals


def subnetwork_over_ideal(net: Network, S: Ideal) -> Network:
    """Replace every coefficient ``a`` by ``pi(phi(a))`` over the essential ring of S."""
    if S.phi is None:
        raise PreconditionError("the ideal is not proper (no phi), so no sub-network exists")
    if any(has_proj(e) for e in net.dynamics + tuple(net.outputs)):
        raise PreconditionError("sub-networks of networks with proj() atoms are not defined")
    f = lambda a: S.pi[S.phi[a]]
    dyn = [map_consts(e, f) for e in net.dynamics]
    decl = ring_declaration(S.essential)
    if is_control(net):
        return ControlNetwork(
            S.essential, dyn, net.m, [map_consts(e, f) for e in net.outputs],
            net.state_names, net.input_names, net.output_names, ring_decl=decl,
        )
    return Network(S.essential, dyn, net.state_names, ring_decl=decl)


def has_pure_control_term(net: Network) -> bool:
    """True unless every update vanishes at the zero state for every input."""
    if not is_control(net) or net.m == 0:
        return False
    k = net.ring.k
    width = net.m
    cols = k**width
    U = np.empty((width, cols), dtype=np.int64)
    c = np.arange(cols)
    for pos in range(width - 1, -1, -1):
        U[pos] = c % k
        c //= k
    X = np.full((net.n, cols), k - 1, dtype=np.int64)
    return any(np.any(eval_array(net.ring, e, X, U) != k - 1) for e in net.dynamics)


@dataclass(frozen=True)
class RestrictionTrace:
    holds: bool
    parent: list  # label tuples over R
    sub: list  # label tuples over the essential ring
    left_ideal_at: int | None = None

    def __bool__(self):
        return self.holds


def _control_tuple(u, k: int, m: int) -> tuple[int, ...]:
    if isinstance(u, (int, np.integer)):
        return state_labels(int(u), k, m)
    return tuple(u)


def ideal_restriction_trace(net: Network, S: Ideal, s0: Sequence[int], controls=None, steps: int = 10) -> RestrictionTrace:
    """Run ``net`` from ``s0`` and its sub-network from ``pi(s0)`` side by side."""
    R = net.ring
    if S.parent is not R and not S.parent.same_tables(R):
        raise PreconditionError("the ideal belongs to a different ring")
    s0 = tuple(s0)
    if len(s0) != net.n:
        raise PreconditionError(f"initial state needs {net.n} labels")
    if any(v not in S for v in s0):
        raise PreconditionError(f"initial state {s0} is not in S^{net.n}")
    us = []
    if is_control(net) and net.m:
        if controls is None or len(controls) < steps:
            raise PreconditionError(f"{steps} control values are required")
        us = [_control_tuple(u, R.k, net.m) for u in controls[:steps]]
        outside = any(v not in S for u in us for v in u)
        if outside and has_pure_control_term(net):
            raise PreconditionError("controls leave S and the network has a pure control term")
    sub = subnetwork_over_ideal(net, S)
    A = compile_assr(net)
    B = compile_assr(sub)
    to_sub = lambda labels: tuple(S.pi[v] for v in labels)
    ctrl_sub = [tuple(S.pi[S.phi[v]] for v in u) for u in us]
    zt = trajectory(A, s0, us if us else None, steps)
    xt = trajectory(B, to_sub(s0), ctrl_sub if us else None, steps)
    parent = [state_labels(z, R.k, net.n) for z in zt]
    subt = [state_labels(x, S.essential.k, net.n) for x in xt]
    for t, (z, x) in enumerate(zip(parent, subt)):
        if any(v not in S for v in z):
            return RestrictionTrace(False, parent, subt, t)
        if to_sub(z) != x:
            return RestrictionTrace(False, parent, subt)
    return RestrictionTrace(True, parent, subt)


def verify_ideal_restriction(net: Network, S: Ideal, s0: Sequence[int], controls=None, steps: int = 10) -> bool:
    """``pi(z(t, s0)) == x(t, pi(s0))`` for every ``t <= steps``.

    Precondition violations raise :class:`PreconditionError`; a trajectory that
    leaves S gives ``False``.
    """
    return ideal_restriction_trace(net, S, s0, controls, steps).holds


# ---------------------------------------------------------------------------
# factor projections


def _factors(ring: FiniteRing) -> tuple:
    if ring.factors is None:
        raise NotAProductRingError(f"{ring.name or 'ring'} is not a product ring")
    return ring.factors


def project_network(net: Network, i: int) -> Network:
    """The factor-``i`` network: every constant ``c`` becomes part ``i`` of ``c``."""
    factors = _factors(net.ring)
    if not 1 <= i <= len(factors):
        raise RingError(f"factor {i} outside [1, {len(factors)}]")
    if any(has_proj(e) for e in net.dynamics + tuple(net.outputs)):
        raise PreconditionError("proj() atoms mix factors and cannot be projected onto one factor")
    Ri = factors[i - 1]
    f = lambda c: project(net.ring, c, i)
    dyn = [map_consts(e, f) for e in net.dynamics]
    decl = ring_declaration(Ri)
    if is_control(net):
        return ControlNetwork(
            Ri, dyn, net.m, [map_consts(e, f) for e in net.outputs],
            net.state_names, net.input_names, net.output_names, ring_decl=decl,
        )
    return Network(Ri, dyn, net.state_names, ring_decl=decl)


def factor_state(ring: FiniteRing, z: int, n: int, i: int) -> int:
    """Factor-``i`` state index of the global state ``z`` of an ``n``-node network."""
    labels = state_labels(z, ring.k, n)
    return state_index([split_label(ring, v)[i - 1] for v in labels], ring.radix[i - 1])


def join_factor_states(ring: FiniteRing, states: Sequence[int], n: int) -> int:
    """Inverse of :func:`factor_state` over all factors at once."""
    per = [state_labels(s, size, n) for s, size in zip(states, ring.radix)]
    return state_index([join_parts(ring, [p[v] for p in per]) for v in range(n)], ring.k)


def _power_projection(ring: FiniteRing, i: int, count: int) -> LogicalMatrix:
    E = factor_projection_matrix(ring, i)
    out = E
    for _ in range(count - 1):
        out = kron(out, E)
    return out


@dataclass
class DecompositionReport:
    factor_networks: list
    factor_assrs: list
    combined: LogicalMatrix  # M* rebuilt from the factor ASSRs
    original: LogicalMatrix
    equal: bool
    verdicts: dict = field(default_factory=dict)

    @property
    def first_mismatch(self) -> int | None:
        bad = np.flatnonzero(self.combined.idx != self.original.idx)
        return int(bad[0]) + 1 if bad.size else None


def recombine(ring: FiniteRing, factor_assrs: Sequence[Assr], n: int, m: int) -> LogicalMatrix:
    """``M* = *_v *_i  M^(i)_v (E_i (x) ... (x) E_i)`` over nodes ``v`` and factors ``i``."""
    width = n + m
    lifts = [_power_projection(ring, i, width) for i in range(1, len(factor_assrs) + 1)]
    nodes = []
    for v in range(n):
        nodes.append(khatri_rao([stp(a.components[v], lift) for a, lift in zip(factor_assrs, lifts)]))
    return khatri_rao(nodes)


def verify_decomposition(net: Network, budget: int | None = None, cross_check: bool = False) -> DecompositionReport:
    """Compile ``net`` directly and through its factor networks and compare."""
    ring = net.ring
    factors = _factors(ring)
    original = compile_assr(net, budget, cross_check)
    fnets = [project_network(net, i) for i in range(1, len(factors) + 1)]
    fassrs = [compile_assr(f, budget, cross_check) for f in fnets]
    combined = recombine(ring, fassrs, net.n, net.m)
    verdicts: dict = {}
    if is_control(net):
        verdicts["factor_complete_controllability"] = [controllability(a).complete for a in fassrs]
    else:
        verdicts["factor_fixed_point_counts"] = [len(fixed_points(a.M)) for a in fassrs]
        verdicts["fixed_point_count"] = len(fixed_points(original.M))
    return DecompositionReport(fnets, fassrs, combined, original.transition, combined == original.transition, verdicts)


def trajectory_splits(net: Network, z0, steps: int = 20, controls=None) -> bool:
    """Check that ``z(t, z0)`` splits into the factor trajectories from the parts of ``z0``."""
    ring = net.ring
    factors = _factors(ring)
    A = compile_assr(net)
    zt = trajectory(A, z0, controls, steps)
    for i in range(1, len(factors) + 1):
        fa = compile_assr(project_network(net, i))
        start = factor_state(ring, zt[0], net.n, i)
        fu = None
        if controls is not None:
            fu = [factor_state(ring, _ctrl_index(ring, u, net.m), net.m, i) for u in controls[:steps]]
        xt = trajectory(fa, start, fu, steps)
        if [factor_state(ring, z, net.n, i) for z in zt] != xt:
            return False
    return True


def _ctrl_index(ring, u, m):
    return int(u) if isinstance(u, (int, np.integer)) else state_index(u, ring.k)


# ---------------------------------------------------------------------------
# product networks


def _block_embed(R1: FiniteRing, R2: FiniteRing, which: int, label: int) -> int:
    """Label of ``(a, 0)`` (``which=1``) or ``(0, b)`` (``which=2``) in ``R1 x R2``."""
    k1, k2 = R1.k, R2.k
    if which == 1:
        return label * k2  # (a - 1) k2 + k2
    return (k1 - 1) * k2 + label


def product_network(net1: Network, net2: Network) -> Network:
    """Network over ``R1 x R2`` whose trajectories split into those of ``net1`` and ``net2``.

    Node ``s`` gets ``e1 * p_s + e2 * q_s`` with ``e1 = (1, 0)``, ``e2 = (0, 1)``
    and the coefficients of ``p_s``, ``q_s`` embedded into their factor.
    """
    if net1.n != net2.n:
        raise PreconditionError(f"product networks pair nodes positionally; got {net1.n} and {net2.n} nodes")
    c1, c2 = is_control(net1), is_control(net2)
    if c1 != c2 or (c1 and (net1.m != net2.m or net1.p != net2.p)):
        raise PreconditionError("both networks need the same numbers of inputs and outputs")
    for e in net1.dynamics + net2.dynamics + tuple(net1.outputs) + tuple(net2.outputs):
        if has_proj(e):
            raise PreconditionError("proj() atoms are not supported in product networks")
    R1, R2 = net1.ring, net2.ring
    R = product_ring(R1, R2)
    e1 = Const(_block_embed(R1, R2, 1, 1))
    e2 = Const(_block_embed(R1, R2, 2, 1))

    def merge(p, q):
        pe = map_consts(p, lambda a: _block_embed(R1, R2, 1, a))
        qe = map_consts(q, lambda b: _block_embed(R1, R2, 2, b))
        return Add(Mul(e1, pe), Mul(e2, qe))

    dyn = [merge(p, q) for p, q in zip(net1.dynamics, net2.dynamics)]
    decl = ring_declaration(R)
    if c1:
        outs = [merge(p, q) for p, q in zip(net1.outputs, net2.outputs)]
        return ControlNetwork(R, dyn, net1.m, outs, net1.state_names, net1.input_names, net1.output_names, ring_decl=decl)
    return Network(R, dyn, net1.state_names, ring_decl=decl)


# ---------------------------------------------------------------------------
# combined control verdicts


@dataclass
class CombinedVerdict:
    query: str
    factor_verdicts: list
    combined: bool
    direct: bool | None
    cross_checked: bool
    details: dict = field(default_factory=dict)

    @property
    def agrees(self) -> bool | None:
        return None if self.direct is None else self.direct == self.combined


def _pairs_product(ring, n, factor_sets, sizes):
    """Global indistinguishable pairs from per-factor (diagonal-inclusive) relations."""
    N = ring.k**n
    maps = [np.array([factor_state(ring, z, n, i) for z in range(1, N + 1)]) - 1 for i in range(1, len(sizes) + 1)]
    D = np.ones((N, N), dtype=bool)
    for fmap, rel in zip(maps, factor_sets):
        D &= rel[np.ix_(fmap, fmap)]
    return [(int(i) + 1, int(j) + 1) for i, j in zip(*np.nonzero(D)) if i < j]


def combined_control_verdicts(
    cnet: ControlNetwork, query: str, z0=None, zd=None, budget: int | None = None, include_initial: bool = True
) -> CombinedVerdict:
    """Answer ``query`` through the factor networks and, when it fits, directly.

    ``query`` is ``controllable`` (complete, or from ``z0`` to ``zd``),
    ``stabilizable`` (to ``zd``), ``synchronizable`` or ``observable``.
    States may be global indices or label tuples.  ``include_initial`` is
    passed through to :func:`observability`.
    """
    ring = cnet.ring
    factors = _factors(ring)
    n = cnet.n
    fnets = [project_network(cnet, i) for i in range(1, len(factors) + 1)]
    fassrs = [compile_assr(f, budget) for f in fnets]

    def as_index(s):
        return None if s is None else (int(s) if isinstance(s, (int, np.integer)) else state_index(s, ring.k))

    z0i, zdi = as_index(z0), as_index(zd)
    details: dict = {}
    if query == "controllable":
        if (z0i is None) != (zdi is None):
            raise PreconditionError("give both z0 and zd, or neither")
        if z0i is None:
            fv = [controllability(a).complete for a in fassrs]
        else:
            fv = [
                factor_state(ring, zdi, n, i) in reachable_from(a, factor_state(ring, z0i, n, i))
                for i, a in enumerate(fassrs, 1)
            ]
    elif query == "stabilizable":
        if zdi is None:
            raise PreconditionError("stabilizable needs zd")
        fv = [stabilizable_to(a, factor_state(ring, zdi, n, i)) for i, a in enumerate(fassrs, 1)]
    elif query == "synchronizable":
        targets = [synchronizable(a, n, f.k) for a, f in zip(fassrs, factors)]
        fv = [bool(t) for t in targets]
        combos = []
        for pick in np.ndindex(*[len(t) for t in targets]) if all(targets) else []:
            combos.append((join_parts(ring, [targets[i][j][0] for i, j in enumerate(pick)]),) * n)
        details["targets"] = sorted(combos)
        if zdi is not None:
            fv = [
                state_labels(factor_state(ring, zdi, n, i), f.k, n) in t
                for i, (f, t) in enumerate(zip(factors, targets), 1)
            ]
    elif query == "observable":
        if cnet.p == 0:
            raise PreconditionError("observability needs outputs")
        rels = []
        fv = []
        for a in fassrs:
            obs = observability(a, a.output, budget=budget, include_initial=include_initial)
            fv.append(obs.observable)
            N = a.num_states
            rel = np.eye(N, dtype=bool)
            for i, j in obs.indistinguishable:
                rel[i - 1, j - 1] = rel[j - 1, i - 1] = True
            rels.append(rel)
            details.setdefault("factor_pairs", []).append(obs.indistinguishable)
        pairs = _pairs_product(ring, n, rels, ring.radix)
        details["pairs"] = pairs
        combined = not pairs
    else:
        raise PreconditionError(f"unknown query {query!r}")
    if query != "observable":
        combined = all(fv)

    direct = None
    cross = False
    try:
        A = compile_assr(cnet, budget)
        if query == "controllable":
            direct = controllability(A).complete if z0i is None else zdi in reachable_from(A, z0i)
        elif query == "stabilizable":
            direct = stabilizable_to(A, zdi)
        elif query == "synchronizable":
            direct_targets = synchronizable(A, n, ring.k)
            details["direct_targets"] = direct_targets
            direct = bool(direct_targets) if zdi is None else state_labels(zdi, ring.k, n) in direct_targets
        else:
            obs = observability(A, A.output, budget=budget, include_initial=include_initial)
            details["direct_pairs"] = obs.indistinguishable
            direct = obs.observable
        cross = True
    except BudgetExceeded as exc:
        details["not_cross_checked"] = str(exc)
    return CombinedVerdict(query, fv, combined, direct, cross, details)


# ---------------------------------------------------------------------------
# linear networks


def _as_matrix(rows, nrows=None, ncols=None, what="matrix") -> tuple[tuple[int, ...], ...]:
    if rows is None:
        return ()
    out = tuple(tuple(int(v) for v in r) for r in rows)
    if out and len({len(r) for r in out}) != 1:
        raise PreconditionError(f"{what} rows have different lengths")
    if nrows is not None and len(out) != nrows:
        raise PreconditionError(f"{what} needs {nrows} rows")
    if ncols is not None and out and len(out[0]) != ncols:
        raise PreconditionError(f"{what} needs {ncols} columns")
    return out


class LinearNetwork:
    """``x(t+1) = A x(t) + B u(t)``, ``y = C x`` with ring labels as entries."""

    def __init__(self, ring: FiniteRing, A, B=None, C=None):
        self.ring = ring
        self.A = _as_matrix(A, what="A")
        n = len(self.A)
        if n == 0 or len(self.A[0]) != n:
            raise PreconditionError("A must be a non-empty square matrix")
        self.B = _as_matrix(B, n, what="B") if B is not None else ()
        self.C = _as_matrix(C, None, n, what="C") if C is not None else ()
        for name, M in (("A", self.A), ("B", self.B), ("C", self.C)):
            for r in M:
                for v in r:
                    if not 1 <= v <= ring.k:
                        raise PreconditionError(f"{name} entry {v} is not a label in [1, {ring.k}]")

    @property
    def n(self) -> int:
        return len(self.A)

    @property
    def m(self) -> int:
        return len(self.B[0]) if self.B else 0

    @property
    def p(self) -> int:
        return len(self.C)

    @classmethod
    def from_residues(cls, kappa: int, A, B=None, C=None, ring: FiniteRing | None = None) -> "LinearNetwork":
        """Entries are residues mod ``kappa``; over ``Z^kappa`` they go through the CRT map."""
        if ring is None:
            ring = z_kappa(kappa)
        if ring.factors is not None:
            conv = lambda v: crt_residue_label(kappa, v)
        else:
            conv = lambda v: (v % kappa) or kappa
        tr = lambda M: None if M is None else [[conv(v) for v in r] for r in M]
        return cls(ring, tr(A), tr(B), tr(C))

    def residues(self, M) -> list[list[int]]:
        """Entries of ``M`` as residues (only meaningful for ``Z_k`` rings)."""
        k = self.ring.k
        return [[v % k for v in r] for r in M]

    def to_network(self) -> ControlNetwork:
        """The same system as a polynomial control network."""
        def row(coeffs, atom):
            terms = [Mul(Const(c), atom(j)) for j, c in enumerate(coeffs, 1)]
            return sum_of(terms)

        dyn = []
        for i in range(self.n):
            e = row(self.A[i], Var)
            if self.m:
                e = Add(e, row(self.B[i], Ctrl))
            dyn.append(e)
        outs = [row(r, Var) for r in self.C]
        return ControlNetwork(self.ring, dyn, self.m, outs, ring_decl=ring_declaration(self.ring))


def project_linear(lin: LinearNetwork, i: int) -> LinearNetwork:
    factors = _factors(lin.ring)
    if not 1 <= i <= len(factors):
        raise RingError(f"factor {i} outside [1, {len(factors)}]")
    pr = lambda M: [[project(lin.ring, v, i) for v in r] for r in M] if M else None
    return LinearNetwork(factors[i - 1], pr(lin.A), pr(lin.B), pr(lin.C))


def _row_map(ring: FiniteRing, coeffs: Sequence[int]) -> LogicalMatrix:
    """``Row(A) x = M_add^(n-1) (M_mul d^a1 x1)(M_mul d^a2 x2)...`` as one k x k^n matrix."""
    k = ring.k
    n = len(coeffs)
    scaled = []
    for j, a in enumerate(coeffs):
        sel = kron(kron(_ones(k**j), identity(k)), _ones(k ** (n - j - 1)))
        scaled.append(stp_chain(ring.mul, LogicalMatrix(k, [a]), sel))
    summed = khatri_rao(scaled)
    if n == 1:
        return summed
    return stp(stp_power(ring.add, n - 1), summed)


def _ones(n):
    from .stp import ones_row

    return ones_row(n)


def _linear_brute(lin: LinearNetwork):
    R = lin.ring
    k, n, m = R.k, lin.n, lin.m
    width = n + m
    cols = k**width
    digits = np.empty((width, cols), dtype=np.int64)
    c = np.arange(cols)
    for pos in range(width - 1, -1, -1):
        digits[pos] = c % k
        c //= k
    U, X = digits[:m], digits[m:]
    comps = []
    for i in range(n):
        acc = np.full(cols, k - 1, dtype=np.int64)
        for j in range(n):
            acc = R.add_t[acc, R.mul_t[lin.A[i][j] - 1, X[j]]]
        for j in range(m):
            acc = R.add_t[acc, R.mul_t[lin.B[i][j] - 1, U[j]]]
        comps.append(LogicalMatrix.from_index(k, acc))
    xs = digits[m:, : k**n]
    outs = []
    for r in lin.C:
        acc = np.full(xs.shape[1], k - 1, dtype=np.int64)
        for j in range(n):
            acc = R.add_t[acc, R.mul_t[r[j] - 1, xs[j]]]
        outs.append(LogicalMatrix.from_index(k, acc))
    return comps, outs


def linear_assr(lin: LinearNetwork, budget: int | None = None) -> Assr:
    """Row-wise ASSR ``L_i = M_add B_i (I (x) A_i)``, checked against direct matrix arithmetic."""
    R = lin.ring
    k, n, m = R.k, lin.n, lin.m
    check_budget(k ** (n + m), budget)
    comps = []
    for i in range(n):
        Ai = _row_map(R, lin.A[i])
        if m:
            Bi = _row_map(R, lin.B[i])
            comps.append(stp_chain(R.add, Bi, kron(identity(k**m), Ai)))
        else:
            comps.append(Ai)
    outs = [_row_map(R, r) for r in lin.C]
    bcomps, bouts = _linear_brute(lin)
    if tuple(comps) != tuple(bcomps) or tuple(outs) != tuple(bouts):
        raise AssrMismatchError("row-wise linear ASSR disagrees with direct evaluation")
    return Assr(khatri_rao(comps), tuple(comps), n, m, k, khatri_rao(outs) if outs else None, tuple(outs))


@dataclass
class LinearControllability:
    factor_networks: list
    factor_assrs: list
    factor_closures: list
    factor_verdicts: list
    combined: bool
    direct: bool | None
    cross_checked: bool

    @property
    def agrees(self):
        return None if self.direct is None else self.direct == self.combined


def linear_controllability(lin: LinearNetwork, budget: int | None = None) -> LinearControllability:
    factors = _factors(lin.ring)
    subs = [project_linear(lin, i) for i in range(1, len(factors) + 1)]
    assrs = [linear_assr(s, budget) for s in subs]
    ctrl = [controllability(a) for a in assrs]
    verdicts = [c.complete for c in ctrl]
    direct, cross = None, False
    try:
        direct = controllability(linear_assr(lin, budget)).complete
        cross = True
    except BudgetExceeded:
        pass
    return LinearControllability(subs, assrs, [c.C for c in ctrl], verdicts, all(verdicts), direct, cross)
