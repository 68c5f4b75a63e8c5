"""Polynomial (control) networks, their ASSR, and analyses on the ASSR.

States are encoded as global indices ``1..k^n`` with ``x_1`` most
significant; inputs likewise.  A control ASSR ``L`` has columns ordered
``(u, x)``: column ``(u-1) k^n + x`` holds the successor of state ``x`` under
input ``u``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import AssrMismatchError, BudgetExceeded, DimensionError, PreconditionError
from .poly import (
    Add,
    Const,
    Ctrl,
    Mul,
    Neg,
    PolyExpr,
    Pow,
    Proj,
    Sub,
    Var,
    eval_array,
    proj_lift_table,
    walk,
)
from .ring import FiniteRing, factor_projection_matrix
from .stp import (
    LogicalMatrix,
    bool_reachability_closure,
    bool_sum_slices,
    identity,
    kron,
    ones_row,
    power_reducing_matrix,
    set_reach_vector,
    stp,
    stp_chain,
    khatri_rao,
)

DEFAULT_BUDGET = 10**6


def default_budget() -> int:
    """Column budget: ``RINGNET_BUDGET`` if set, else one million."""
    env = os.environ.get("RINGNET_BUDGET")
    if env:
        try:
            value = int(env)
        except ValueError:
            raise PreconditionError(f"RINGNET_BUDGET must be an integer, got {env!r}") from None
        if value < 1:
            raise PreconditionError("RINGNET_BUDGET must be >= 1")
        return value
    return DEFAULT_BUDGET


def check_budget(needed: int, budget: int | None = None, what: str = "state space") -> None:
    budget = default_budget() if budget is None else budget
    if needed > budget:
        raise BudgetExceeded(needed, budget, what)


# ---------------------------------------------------------------------------
# network types


class Network:
    """``x_i(t+1) = p_i(x(t))`` over a finite ring."""

    m = 0

    def __init__(self, ring: FiniteRing, dynamics: Sequence[PolyExpr], state_names: Sequence[str] | None = None, ring_decl: str | None = None):
        self.ring = ring
        self.dynamics = tuple(dynamics)
        if not self.dynamics:
            raise PreconditionError("a network needs at least one node")
        self.state_names = tuple(state_names) if state_names else tuple(f"x{i}" for i in range(1, self.n + 1))
        if len(self.state_names) != self.n:
            raise PreconditionError("one state name per node is required")
        self.ring_decl = ring_decl
        self._validate()

    @property
    def n(self) -> int:
        return len(self.dynamics)

    @property
    def outputs(self) -> tuple:
        return ()

    @property
    def p(self) -> int:
        return len(self.outputs)

    def _validate(self) -> None:
        for i, e in enumerate(self.dynamics, 1):
            self._check_expr(e, f"node {i}", allow_ctrl=self.m > 0)

    def _check_expr(self, e: PolyExpr, where: str, allow_ctrl: bool) -> None:
        for node in walk(e):
            if isinstance(node, Var) and not 1 <= node.index <= self.n:
                raise PreconditionError(f"{where}: state x{node.index} outside [1, {self.n}]")
            if isinstance(node, Ctrl):
                if not allow_ctrl:
                    raise PreconditionError(f"{where}: controls are not allowed here")
                if not 1 <= node.index <= self.m:
                    raise PreconditionError(f"{where}: input u{node.index} outside [1, {self.m}]")
            if isinstance(node, Const) and not 1 <= node.label <= self.ring.k:
                raise PreconditionError(f"{where}: constant label {node.label} outside [1, {self.ring.k}]")
            if isinstance(node, Proj):
                if self.ring.factors is None:
                    raise PreconditionError(f"{where}: proj() needs a product ring")
                if not 1 <= node.factor <= len(self.ring.factors):
                    raise PreconditionError(f"{where}: proj factor {node.factor} out of range")

    def num_states(self) -> int:
        return self.ring.k ** self.n

    def with_ring(self, ring: FiniteRing, dynamics, ring_decl=None):
        return Network(ring, dynamics, self.state_names, ring_decl)

    def __repr__(self):
        return f"Network(ring={self.ring.name}, n={self.n})"


class ControlNetwork(Network):
    """``x(t+1) = p(x, u)``, ``y = xi(x)``."""

    def __init__(
        self,
        ring: FiniteRing,
        dynamics: Sequence[PolyExpr],
        m: int,
        outputs: Sequence[PolyExpr] = (),
        state_names=None,
        input_names=None,
        output_names=None,
        ring_decl: str | None = None,
    ):
        self.m = int(m)
        self._outputs = tuple(outputs)
        self.input_names = tuple(input_names) if input_names else tuple(f"u{j}" for j in range(1, self.m + 1))
        self.output_names = tuple(output_names) if output_names else tuple(f"y{j}" for j in range(1, len(self._outputs) + 1))
        super().__init__(ring, dynamics, state_names, ring_decl)
        if len(self.input_names) != self.m or len(self.output_names) != len(self._outputs):
            raise PreconditionError("names must match input and output counts")

    @property
    def outputs(self) -> tuple:
        return self._outputs

    def _validate(self) -> None:
        super()._validate()
        for j, e in enumerate(self._outputs, 1):
            self._check_expr(e, f"output {j}", allow_ctrl=False)

    def with_ring(self, ring, dynamics, outputs=None, ring_decl=None):
        return ControlNetwork(
            ring, dynamics, self.m, self.outputs if outputs is None else outputs,
            self.state_names, self.input_names, self.output_names, ring_decl,
        )

    def __repr__(self):
        return f"ControlNetwork(ring={self.ring.name}, n={self.n}, m={self.m}, p={self.p})"


def is_control(net) -> bool:
    return isinstance(net, ControlNetwork)


# ---------------------------------------------------------------------------
# state encoding


def state_index(labels: Sequence[int], k: int) -> int:
    """Global 1-based index of a label tuple (first entry most significant)."""
    g = 0
    for v in labels:
        if not 1 <= v <= k:
            raise PreconditionError(f"label {v} outside [1, {k}]")
        g = g * k + (v - 1)
    return g + 1


def state_labels(index: int, k: int, n: int) -> tuple[int, ...]:
    if not 1 <= index <= k**n:
        raise PreconditionError(f"state {index} outside [1, {k ** n}]")
    g = index - 1
    out = []
    for _ in range(n):
        out.append(g % k + 1)
        g //= k
    return tuple(reversed(out))


def _digits(count: int, k: int, width: int) -> np.ndarray:
    """``(width, count)`` array of 0-based base-``k`` digits, most significant first."""
    cols = np.arange(count, dtype=np.int64)
    out = np.empty((width, count), dtype=np.int64)
    for pos in range(width - 1, -1, -1):
        out[pos] = cols % k
        cols //= k
    return out


# ---------------------------------------------------------------------------
# ASSR


@dataclass(frozen=True)
class Assr:
    """Algebraic state-space form.

    ``transition`` is ``M`` (``k^n x k^n``) or ``L`` (``k^n x k^(m+n)``),
    ``components`` its per-node factors, ``output``/``output_components`` the
    matrix ``E`` and its rows (``None``/empty without outputs).
    """

    transition: LogicalMatrix
    components: tuple
    n: int
    m: int
    k: int
    output: LogicalMatrix | None = None
    output_components: tuple = ()

    @property
    def M(self) -> LogicalMatrix:
        return self.transition

    L = M

    @property
    def E(self) -> LogicalMatrix | None:
        return self.output

    @property
    def p(self) -> int:
        return len(self.output_components)

    @property
    def num_states(self) -> int:
        return self.k**self.n

    @property
    def num_inputs(self) -> int:
        return self.k**self.m


def _brute_components(ring: FiniteRing, exprs: Sequence[PolyExpr], n: int, m: int) -> tuple[LogicalMatrix, ...]:
    k = ring.k
    width = m + n
    digits = _digits(k**width, k, width)
    U = digits[:m] if m else None
    X = digits[m:]
    return tuple(LogicalMatrix.from_index(k, eval_array(ring, e, X, U)) for e in exprs)


class _Symbolic:
    """Structure matrices of sub-expressions built only from STP identities."""

    def __init__(self, ring: FiniteRing, n: int, m: int):
        self.ring = ring
        self.k = ring.k
        self.n, self.m = n, m
        self.width = n + m
        self.cols = self.k**self.width
        self._pow: dict[int, LogicalMatrix] = {1: identity(self.k)}

    def position(self, p: int) -> LogicalMatrix:
        """Selector of the ``p``-th factor of ``u_1..u_m x_1..x_n`` (1-based)."""
        k = self.k
        return kron(kron(ones_row(k ** (p - 1)), identity(k)), ones_row(k ** (self.width - p)))

    def power(self, r: int) -> LogicalMatrix:
        # Q_r x = x^r via Q_r = M_mul (Q_{r-1} (x) I_k) PR_k
        if r not in self._pow:
            prev = self.power(r - 1)
            self._pow[r] = stp_chain(self.ring.mul, kron(prev, identity(self.k)), power_reducing_matrix(self.k))
        return self._pow[r]

    def build(self, e: PolyExpr) -> LogicalMatrix:
        R = self.ring
        if isinstance(e, Const):
            return stp(LogicalMatrix(self.k, [e.label]), ones_row(self.cols))
        if isinstance(e, Var):
            return self.position(self.m + e.index)
        if isinstance(e, Ctrl):
            return self.position(e.index)
        if isinstance(e, Neg):
            return stp(R.neg, self.build(e.expr))
        if isinstance(e, Add):
            return stp(R.add, khatri_rao([self.build(e.left), self.build(e.right)]))
        if isinstance(e, Sub):
            return stp(R.add, khatri_rao([self.build(e.left), stp(R.neg, self.build(e.right))]))
        if isinstance(e, Mul):
            return stp(R.mul, khatri_rao([self.build(e.left), self.build(e.right)]))
        if isinstance(e, Pow):
            return stp(self.power(e.exponent), self.build(e.expr))
        if isinstance(e, Proj):
            lift = LogicalMatrix.from_index(self.k, proj_lift_table(R, e.factor))
            return stp_chain(lift, factor_projection_matrix(R, e.factor), self.build(e.expr))
        raise TypeError(f"unknown node {e!r}")  # pragma: no cover


def symbolic_components(ring: FiniteRing, exprs: Sequence[PolyExpr], n: int, m: int) -> tuple[LogicalMatrix, ...]:
    """Per-node structure matrices from STP rewriting alone (the cross-check path)."""
    sym = _Symbolic(ring, n, m)
    return tuple(sym.build(e) for e in exprs)


def _compile(ring, exprs, outputs, n, m, budget, cross_check) -> Assr:
    check_budget(ring.k ** (n + m), budget)
    comps = _brute_components(ring, exprs, n, m)
    out_comps = _brute_components(ring, outputs, n, 0) if outputs else ()
    if cross_check:
        sym = symbolic_components(ring, exprs, n, m)
        for i, (a, b) in enumerate(zip(comps, sym), 1):
            if a != b:
                bad = int(np.flatnonzero(a.idx != b.idx)[0]) + 1
                raise AssrMismatchError(f"node {i}: symbolic and evaluated ASSR differ first at column {bad}")
        if outputs:
            sym_out = symbolic_components(ring, outputs, n, 0)
            for j, (a, b) in enumerate(zip(out_comps, sym_out), 1):
                if a != b:
                    raise AssrMismatchError(f"output {j}: symbolic and evaluated ASSR differ")
    return Assr(
        transition=khatri_rao(comps),
        components=comps,
        n=n,
        m=m,
        k=ring.k,
        output=khatri_rao(out_comps) if out_comps else None,
        output_components=out_comps,
    )


def compile_assr(net: Network, budget: int | None = None, cross_check: bool = False) -> Assr:
    """ASSR by evaluating the network on every state.

    ``cross_check`` also builds every node matrix symbolically and raises
    :class:`AssrMismatchError` if the two differ.
    """
    if is_control(net):
        return compile_control_assr(net, budget, cross_check)
    return _compile(net.ring, net.dynamics, (), net.n, 0, budget, cross_check)


def compile_control_assr(cnet: ControlNetwork, budget: int | None = None, cross_check: bool = False) -> Assr:
    return _compile(cnet.ring, cnet.dynamics, cnet.outputs, cnet.n, cnet.m, budget, cross_check)


# ---------------------------------------------------------------------------
# trajectories


def _transition_of(obj, budget=None):
    if isinstance(obj, Assr):
        return obj
    if isinstance(obj, Network):
        return compile_assr(obj, budget)
    raise TypeError("expected an Assr or a network")


def _state_arg(x, k: int, n: int) -> int:
    if isinstance(x, (int, np.integer)):
        if not 1 <= x <= k**n:
            raise PreconditionError(f"state {x} outside [1, {k ** n}]")
        return int(x)
    labels = tuple(x)
    if len(labels) != n:
        raise PreconditionError(f"state needs {n} labels, got {len(labels)}")
    return state_index(labels, k)


def trajectory(obj, x0, controls: Sequence | None = None, steps: int = 10) -> list[int]:
    """States ``x(0), ..., x(steps)`` as global indices.

    ``x0`` and each control may be a global index or a label tuple.  For a
    control system ``controls`` needs at least ``steps`` entries.
    """
    assr = _transition_of(obj)
    k, n, m = assr.k, assr.n, assr.m
    N = k**n
    x = _state_arg(x0, k, n)
    if m:
        if controls is None or len(controls) < steps:
            raise PreconditionError(f"a control network needs {steps} control values, got {0 if controls is None else len(controls)}")
        us = [_state_arg(u, k, m) for u in controls[:steps]]
    elif controls:
        raise PreconditionError("controls given for an autonomous network")
    idx = assr.transition.idx
    out = [x]
    for t in range(steps):
        col = (us[t] - 1) * N + x if m else x
        x = int(idx[col - 1]) + 1
        out.append(x)
    return out


def label_trajectory(obj, x0, controls=None, steps: int = 10, n: int | None = None, k: int | None = None) -> list[tuple[int, ...]]:
    assr = _transition_of(obj)
    return [state_labels(s, assr.k, assr.n) for s in trajectory(assr, x0, controls, steps)]


# ---------------------------------------------------------------------------
# autonomous analyses


def _square(M: LogicalMatrix) -> LogicalMatrix:
    if isinstance(M, Assr):
        M = M.transition
    if not M.is_square():
        raise DimensionError(f"expected a square transition matrix, got {M.shape}")
    return M


def fixed_points(M) -> list[int]:
    M = _square(M)
    return (np.flatnonzero(M.idx == np.arange(M.ncols)) + 1).tolist()


@dataclass(frozen=True)
class Attractor:
    cycle: tuple[int, ...]  # starts at its smallest state
    basin_size: int  # states whose orbit ends in this cycle, cycle included

    @property
    def length(self) -> int:
        return len(self.cycle)


def attractors(M) -> list[Attractor]:
    """Cycles of the functional graph ``j -> M(j)`` with basin sizes, sorted by first state."""
    M = _square(M)
    succ = M.idx
    N = M.ncols
    owner = np.full(N, -1, dtype=np.int64)  # cycle id each state drains into
    cycles: list[list[int]] = []
    for start in range(N):
        if owner[start] >= 0:
            continue
        path, pos = [], {}
        x = start
        while owner[x] < 0 and x not in pos:
            pos[x] = len(path)
            path.append(x)
            x = int(succ[x])
        if owner[x] >= 0:
            cid = owner[x]
        else:
            cyc = path[pos[x]:]
            cid = len(cycles)
            cycles.append(cyc)
        owner[path] = cid
    sizes = np.bincount(owner, minlength=len(cycles))
    out = []
    for cid, cyc in enumerate(cycles):
        r = cyc.index(min(cyc))
        rot = cyc[r:] + cyc[:r]
        out.append(Attractor(tuple(s + 1 for s in rot), int(sizes[cid])))
    return sorted(out, key=lambda a: a.cycle[0])


# ---------------------------------------------------------------------------
# control analyses


def _control_matrix(L) -> LogicalMatrix:
    if isinstance(L, Assr):
        L = L.transition
    if L.ncols % L.rows:
        raise DimensionError(f"{L.shape} is not a control transition matrix")
    return L


def input_sum(L) -> np.ndarray:
    """Boolean ``M = sum_u L delta_u``: ``M[i, j]`` iff some input sends ``j`` to ``i``."""
    return bool_sum_slices(_control_matrix(L))


def control_fixed_points(L) -> list[int]:
    M = input_sum(L)
    return (np.flatnonzero(np.diag(M)) + 1).tolist()


@dataclass(frozen=True)
class Controllability:
    C: np.ndarray
    reachable: list  # globally reachable states
    complete: bool


def controllability(L) -> Controllability:
    C = bool_reachability_closure(input_sum(L))
    rows = (np.flatnonzero(C.all(axis=1)) + 1).tolist()
    return Controllability(C, rows, bool(C.all()))


def reachable_from(L, x0: int) -> list[int]:
    """States reachable from ``x0`` in one or more steps."""
    C = bool_reachability_closure(input_sum(L))
    return (np.flatnonzero(C[:, x0 - 1]) + 1).tolist()


def stabilizable_to(L, xd: int) -> bool:
    ctrl = controllability(L)
    return xd in ctrl.reachable and xd in control_fixed_points(L)


def synchronizable(L, n: int, k: int) -> list[tuple[int, ...]]:
    """Diagonal states ``(a, ..., a)`` the system can be stabilized to, as label tuples."""
    ctrl = controllability(L)
    fixed = set(control_fixed_points(L))
    reach = set(ctrl.reachable)
    out = []
    for a in range(1, k + 1):
        s = state_index([a] * n, k)
        if s in fixed and s in reach:
            out.append((a,) * n)
    return out


@dataclass(frozen=True)
class Observability:
    observable: bool
    indistinguishable: list  # pairs (i, j), i < j
    distinguishable: np.ndarray | None = None  # N x N boolean, the set-controllability row reshaped


def doubled_system(L) -> LogicalMatrix:
    """Pair system over ``w = (x-1) N + x*`` driven by one shared input."""
    L = _control_matrix(L)
    N = L.rows
    succ = L.idx.reshape(-1, N)
    pair = succ[:, :, None] * N + succ[:, None, :]
    return LogicalMatrix.from_index(N * N, pair.reshape(-1))


def observability(L, E, m: int | None = None, budget: int | None = None, include_initial: bool = True) -> Observability:
    """Distinguishability of state pairs through the doubled system.

    A pair is distinguishable when it already has differing outputs or some
    shared input sequence drives it into such a pair.  With
    ``include_initial=False`` only separations after at least one step count,
    which is the strict set-reachability row on its own.
    """
    if isinstance(L, Assr):
        if E is None:
            E = L.output
        L = L.transition
    L = _control_matrix(L)
    if E is None:
        raise PreconditionError("observability needs an output matrix")
    N = L.rows
    if E.ncols != N:
        raise DimensionError(f"output matrix has {E.ncols} columns for {N} states")
    check_budget(N * N * (L.ncols // N), budget, "doubled system")
    Psi = doubled_system(L)
    out = E.idx
    W = (out[:, None] != out[None, :]).reshape(-1)
    dist = set_reach_vector(Psi, W)
    if include_initial:
        dist = dist | W
    D = dist.reshape(N, N)
    pairs = [(int(i) + 1, int(j) + 1) for i, j in zip(*np.nonzero(~D)) if i < j]
    return Observability(not pairs, pairs, D)


def indistinguishable_matrix(L, E, budget=None, include_initial: bool = True) -> np.ndarray:
    """Boolean ``N x N`` matrix of indistinguishable pairs, diagonal included."""
    res = observability(L, E, budget=budget, include_initial=include_initial)
    N = (L.transition if isinstance(L, Assr) else L).rows
    D = np.eye(N, dtype=bool)
    for i, j in res.indistinguishable:
        D[i - 1, j - 1] = D[j - 1, i - 1] = True
    return D
