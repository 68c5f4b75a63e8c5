"""Finite commutative rings given by structure matrices.

Elements are labels ``1..k``.  Label ``1`` is the multiplicative identity and
label ``k`` the additive zero; for ``Z_k`` label ``v`` is residue ``v`` except
that label ``k`` is residue 0.  Product rings label their elements in mixed
radix, ``s = (i-1) k_2 + j`` for parts ``(i, j)``, extended positionally to
any number of factors.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field
from functools import cached_property, reduce
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import (
    DimensionError,
    EnumerationBudgetExceeded,
    NotAProductRingError,
    RingError,
)
from .stp import (
    LogicalMatrix,
    delta,
    identity,
    kron,
    ones_row,
    power_reducing_matrix,
    stp,
    stp_chain,
    swap_matrix,
)


# ---------------------------------------------------------------------------
# the ring type


@dataclass(frozen=True, eq=False)
class FiniteRing:
    """A finite ring by its structure matrices ``M_add``, ``M_mul``, ``M_neg``.

    ``add`` and ``mul`` are ``k x k^2`` logical matrices (column ``(a-1)k + b``
    holds ``a op b``), ``neg`` is ``k x k``.  ``factors`` is the flat tuple of
    factor rings when the ring was built as a product, ``None`` otherwise.
    """

    k: int
    add: LogicalMatrix
    mul: LogicalMatrix
    neg: LogicalMatrix
    name: str = ""
    factors: tuple | None = field(default=None)

    def __post_init__(self):
        k = self.k
        if k < 2:
            raise RingError("a ring needs at least two elements")
        for label, m, shape in (("add", self.add, (k, k * k)), ("mul", self.mul, (k, k * k)), ("neg", self.neg, (k, k))):
            if m.shape != shape:
                raise DimensionError(f"{label} must be {shape[0]}x{shape[1]}, got {m.shape[0]}x{m.shape[1]}")

    # 0-based lookup tables; these are what the evaluators index into
    @cached_property
    def add_t(self) -> np.ndarray:
        return self.add.idx.reshape(self.k, self.k)

    @cached_property
    def mul_t(self) -> np.ndarray:
        return self.mul.idx.reshape(self.k, self.k)

    @cached_property
    def neg_t(self) -> np.ndarray:
        return self.neg.idx

    @property
    def one(self) -> int:
        return 1

    @property
    def zero(self) -> int:
        return self.k

    def plus(self, a: int, b: int) -> int:
        return int(self.add_t[a - 1, b - 1]) + 1

    def times(self, a: int, b: int) -> int:
        return int(self.mul_t[a - 1, b - 1]) + 1

    def negate(self, a: int) -> int:
        return int(self.neg_t[a - 1]) + 1

    def minus(self, a: int, b: int) -> int:
        return self.plus(a, self.negate(b))

    @property
    def is_product(self) -> bool:
        return self.factors is not None

    def parts(self) -> tuple:
        """Factor rings for addressing; a non-product ring is its own single part."""
        return self.factors if self.factors is not None else (self,)

    @property
    def radix(self) -> tuple[int, ...]:
        return tuple(f.k for f in self.parts())

    def same_tables(self, other: "FiniteRing") -> bool:
        return self.k == other.k and self.add == other.add and self.mul == other.mul and self.neg == other.neg

    def __eq__(self, other):
        if not isinstance(other, FiniteRing):
            return NotImplemented
        return self.same_tables(other) and self.radix == other.radix

    def __hash__(self):
        return hash((self.k, self.add, self.mul, self.neg))

    def __repr__(self):
        return f"FiniteRing({self.name or 'unnamed'}, k={self.k})"


def negation_from_add(k: int, add: LogicalMatrix) -> LogicalMatrix:
    """Derive ``M_neg`` from ``M_add`` (the unique ``b`` with ``a + b = 0``)."""
    table = add.idx.reshape(k, k)
    hits = table == k - 1
    if not np.all(hits.sum(axis=1) == 1):
        raise RingError("addition table has no unique inverses")
    return LogicalMatrix.from_index(k, hits.argmax(axis=1))


def ring_from_tables(add, mul, neg=None, name: str = "", *, check: bool = True, factors=None) -> FiniteRing:
    """Build a ring from 1-based column lists or logical matrices.

    With ``check`` (the default) the axiom equations are verified and a
    :class:`RingError` names the failing ones.
    """
    add = _as_lm(add)
    k = add.rows
    mul = _as_lm(mul, k)
    neg = negation_from_add(k, add) if neg is None else _as_lm(neg, k)
    ring = FiniteRing(k, add, mul, neg, name, factors)
    if check:
        report = verify_ring(add, mul, neg)
        if not report.is_commutative_ring:
            raise RingError(f"tables fail ring axioms: {', '.join(report.failures())}")
    return ring


def _as_lm(m, k: int | None = None) -> LogicalMatrix:
    if isinstance(m, LogicalMatrix):
        return m
    m = list(m)
    if k is None:
        n = len(m)
        k = math.isqrt(n)
        if k * k != n:
            raise DimensionError(f"a k x k^2 table has k^2 entries; got {n}")
    return LogicalMatrix(k, m)


def make_zk(k: int) -> FiniteRing:
    """``Z_k`` with label ``v`` standing for residue ``v mod k``."""
    if k < 2:
        raise RingError("Z_k needs k >= 2")
    res = np.arange(1, k + 1) % k
    lab = lambda r: np.where(r % k == 0, k, r % k) - 1  # 0-based label of a residue
    add = lab(res[:, None] + res[None, :]).reshape(-1)
    mul = lab(res[:, None] * res[None, :]).reshape(-1)
    neg = lab(-res)
    return FiniteRing(k, LogicalMatrix.from_index(k, add), LogicalMatrix.from_index(k, mul), LogicalMatrix.from_index(k, neg), f"Z{k}")


# ---------------------------------------------------------------------------
# axiom verification


@dataclass(frozen=True)
class AxiomReport:
    add_commutative: bool
    add_associative: bool
    add_identity: bool
    add_inverse: bool
    mul_associative: bool
    mul_identity: bool
    distributive_left: bool
    distributive_right: bool
    mul_commutative: bool

    @property
    def is_commutative_ring(self) -> bool:
        return all(self.as_dict().values())

    def as_dict(self) -> dict[str, bool]:
        return dict(self.__dict__)

    def failures(self) -> list[str]:
        return [name for name, ok in self.as_dict().items() if not ok]


def verify_ring(add: LogicalMatrix, mul: LogicalMatrix, neg: LogicalMatrix) -> AxiomReport:
    """Check the ring axioms as matrix identities under the semi-tensor product."""
    k = add.rows
    if add.shape != (k, k * k) or mul.shape != (k, k * k) or neg.shape != (k, k):
        raise DimensionError(
            f"expected add, mul k x k^2 and neg k x k; got {add.shape}, {mul.shape}, {neg.shape}"
        )
    I = identity(k)
    W = swap_matrix(k, k)
    PR = power_reducing_matrix(k)
    I_k2 = identity(k * k)
    zero_map = LogicalMatrix(k, [k] * k)

    def assoc(M):
        return stp(M, M) == stp(M, kron(I, M))

    def unit(M, e):
        return stp(M, delta(k, e)) == I and stp_chain(M, W, delta(k, e)) == I

    # x y z -> x z y z  and  x y z -> x y x z
    spread_right = stp(kron(I, W), kron(I_k2, PR))
    spread_left = stp(kron(I, W), PR)
    two_products = stp(stp(add, mul), kron(I_k2, mul))
    return AxiomReport(
        add_commutative=add == stp(add, W),
        add_associative=assoc(add),
        add_identity=unit(add, k),
        add_inverse=stp_chain(add, kron(I, neg), PR) == zero_map,
        mul_associative=assoc(mul),
        mul_identity=unit(mul, 1),
        distributive_left=stp(mul, add) == stp(two_products, spread_right),
        distributive_right=stp(mul, kron(I, add)) == stp(two_products, spread_left),
        mul_commutative=mul == stp(mul, W),
    )


def verify(ring: FiniteRing) -> AxiomReport:
    return verify_ring(ring.add, ring.mul, ring.neg)


# ---------------------------------------------------------------------------
# enumeration


def _abelian_group_types(k: int) -> list[tuple[int, ...]]:
    """Cyclic-factor orders of every abelian group of order ``k`` (one per iso type)."""
    primes = _factorize(k)
    per_prime = []
    for p in sorted(set(primes)):
        e = primes.count(p)
        per_prime.append([tuple(p ** part for part in lam) for lam in _partitions(e)])
    return [tuple(itertools.chain.from_iterable(c)) for c in itertools.product(*per_prime)]


def _partitions(n: int, largest: int | None = None) -> Iterator[tuple[int, ...]]:
    largest = n if largest is None else largest
    if n == 0:
        yield ()
        return
    for first in range(min(n, largest), 0, -1):
        for rest in _partitions(n - first, first):
            yield (first,) + rest


def _group_tables(k: int, deadline: float | None) -> list[np.ndarray]:
    """All abelian group tables on 0-based labels with identity at ``k-1``."""
    seen: dict[bytes, np.ndarray] = {}
    for orders in _abelian_group_types(k):
        elems = list(itertools.product(*[range(o) for o in orders]))
        # canonical element index -> index; element 0 is the identity
        index = {e: i for i, e in enumerate(elems)}
        canon = np.array(
            [[index[tuple((a + b) % o for a, b, o in zip(x, y, orders))] for y in elems] for x in elems],
            dtype=np.int64,
        )
        for n, perm in enumerate(itertools.permutations(range(k - 1))):
            if deadline is not None and n % 256 == 0 and time.monotonic() > deadline:
                raise EnumerationBudgetExceeded(
                    "additive group search ran out of time", progress=f"group type {orders}, {n} relabelings"
                )
            relabel = np.empty(k, dtype=np.int64)
            relabel[0] = k - 1
            relabel[1:] = perm
            table = np.empty((k, k), dtype=np.int64)
            table[np.ix_(relabel, relabel)] = relabel[canon]
            seen.setdefault(table.tobytes(), table)
    return list(seen.values())


def _propagate(T: np.ndarray, A: np.ndarray) -> bool:
    """Fill multiplication entries forced by distributivity; False on contradiction.

    Uses ``a(b + b') = ab + ab'`` row by row, with symmetry, until nothing changes.
    """
    k = T.shape[0]
    changed = True
    while changed:
        changed = False
        for a in range(k):
            known = np.flatnonzero(T[a] >= 0)
            if known.size == k:
                # row complete: check it is an additive endomorphism
                if not np.array_equal(T[a][A], A[T[a][:, None], T[a][None, :]]):
                    return False
                continue
            for b in known:
                for b2 in known:
                    c = A[b, b2]
                    v = A[T[a, b], T[a, b2]]
                    if T[a, c] < 0:
                        if T[c, a] >= 0 and T[c, a] != v:
                            return False
                        T[a, c] = T[c, a] = v
                        changed = True
                    elif T[a, c] != v:
                        return False
    return True


def _mul_tables(A: np.ndarray, deadline: float | None) -> list[np.ndarray]:
    k = A.shape[0]
    T = np.full((k, k), -1, dtype=np.int64)
    T[0, :] = T[:, 0] = np.arange(k)
    T[k - 1, :] = T[:, k - 1] = k - 1
    out: list[np.ndarray] = []
    if not _propagate(T, A):
        return out

    def search(T):
        if deadline is not None and time.monotonic() > deadline:
            raise EnumerationBudgetExceeded("multiplication search ran out of time")
        free = np.argwhere(T < 0)
        if free.size == 0:
            r = np.arange(k)
            if np.array_equal(T[T[:, :, None], r[None, None, :]], T[r[:, None, None], T[None, :, :]]):
                out.append(T.copy())
            return
        a, b = free[0]
        for v in range(k):
            T2 = T.copy()
            T2[a, b] = T2[b, a] = v
            if _propagate(T2, A):
                search(T2)

    search(T)
    return out


def enumerate_rings(k: int, time_budget: float | None = None) -> list[FiniteRing]:
    """Every commutative ring on labels ``1..k`` with ``1`` the unit and ``k`` the zero.

    The result is sorted lexicographically by (add table, mul table).  On a
    time budget overrun :class:`EnumerationBudgetExceeded` carries the rings
    found so far.
    """
    if k < 2:
        raise RingError("rings need k >= 2")
    deadline = None if time_budget is None else time.monotonic() + time_budget
    found: list[tuple[np.ndarray, np.ndarray]] = []
    try:
        for A in _group_tables(k, deadline):
            for T in _mul_tables(A, deadline):
                found.append((A, T))
    except EnumerationBudgetExceeded as exc:
        partial = [_ring_from_01(k, A, T, f"partial{i + 1}") for i, (A, T) in enumerate(found)]
        raise EnumerationBudgetExceeded(str(exc), partial, exc.progress or f"{len(found)} rings so far") from None
    found.sort(key=lambda at: (tuple(at[0].reshape(-1)), tuple(at[1].reshape(-1))))
    return [_ring_from_01(k, A, T, f"R{k}.{i + 1}") for i, (A, T) in enumerate(found)]


def _ring_from_01(k, A, T, name) -> FiniteRing:
    add = LogicalMatrix.from_index(k, A.reshape(-1))
    return FiniteRing(k, add, LogicalMatrix.from_index(k, T.reshape(-1)), negation_from_add(k, add), name)


# ---------------------------------------------------------------------------
# isomorphisms


def find_isomorphisms(R: FiniteRing, S: FiniteRing) -> list[tuple[int, ...]]:
    """All bijections ``p`` (``p[a-1]`` is the image of label ``a``) carrying R's tables onto S's.

    Only bijections fixing ``1`` and the zero label are considered.
    """
    if R.k != S.k:
        return []
    k = R.k
    out = []
    for perm in itertools.permutations(range(1, k - 1)):
        p = np.array((0,) + perm + (k - 1,), dtype=np.int64)
        if np.array_equal(p[R.add_t], S.add_t[np.ix_(p, p)]) and np.array_equal(p[R.mul_t], S.mul_t[np.ix_(p, p)]):
            out.append(tuple((p + 1).tolist()))
    return out


def is_isomorphism(R: FiniteRing, S: FiniteRing, mapping: Sequence[int]) -> bool:
    p = np.asarray(mapping, dtype=np.int64) - 1
    if p.shape != (R.k,) or R.k != S.k or sorted(p.tolist()) != list(range(R.k)):
        return False
    return bool(
        np.array_equal(p[R.add_t], S.add_t[np.ix_(p, p)]) and np.array_equal(p[R.mul_t], S.mul_t[np.ix_(p, p)])
    )


def relabel_ring(R: FiniteRing, mapping: Sequence[int], name: str = "") -> FiniteRing:
    """Transport R's tables along the label bijection ``mapping``."""
    k = R.k
    p = np.asarray(mapping, dtype=np.int64) - 1
    inv = np.argsort(p)
    add = p[R.add_t[np.ix_(inv, inv)]].reshape(-1)
    mul = p[R.mul_t[np.ix_(inv, inv)]].reshape(-1)
    return ring_from_tables(LogicalMatrix.from_index(k, add), LogicalMatrix.from_index(k, mul), name=name or R.name)


# ---------------------------------------------------------------------------
# product rings


def product_ring(R1: FiniteRing, R2: FiniteRing, name: str | None = None) -> FiniteRing:
    """Direct product ``R1 x R2`` with mixed-radix labels."""
    k1, k2 = R1.k, R2.k
    route = kron(identity(k1), swap_matrix(k2, k1))  # a1 a2 b1 b2 -> a1 b1 a2 b2
    add = stp_chain(R1.add, kron(identity(k1 * k1), R2.add), route)
    mul = stp_chain(R1.mul, kron(identity(k1 * k1), R2.mul), route)
    neg = kron(R1.neg, R2.neg)
    if name is None:
        name = f"{R1.name}x{R2.name}"
    return FiniteRing(k1 * k2, add, mul, neg, name, tuple(R1.parts()) + tuple(R2.parts()))


def product_of(rings: Sequence[FiniteRing], name: str | None = None) -> FiniteRing:
    rings = list(rings)
    if len(rings) == 1:
        return rings[0]
    out = reduce(product_ring, rings)
    if name is not None:
        out = FiniteRing(out.k, out.add, out.mul, out.neg, name, out.factors)
    return out


def _factorize(n: int) -> list[int]:
    out, p = [], 2
    while p * p <= n:
        while n % p == 0:
            out.append(p)
            n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def prime_factors(kappa: int) -> list[int]:
    """Prime factors of ``kappa`` with multiplicity, ascending."""
    return _factorize(kappa)


def is_prime(n: int) -> bool:
    return n >= 2 and _factorize(n) == [n]


def z_kappa(kappa: int) -> FiniteRing:
    """Prime product ring ``Z^kappa = Z_p1 x ... x Z_ps`` with ascending factors."""
    if kappa < 2:
        raise RingError("kappa must be >= 2")
    ps = _factorize(kappa)
    if len(ps) == 1:
        return make_zk(kappa)
    return product_of([make_zk(p) for p in ps], name=f"Z^{kappa}")


def residue_to_label(k: int, v: int) -> int:
    """Label of residue ``v`` in ``Z_k`` (residue 0 is label ``k``)."""
    r = v % k
    return r if r else k


def label_to_residue(k: int, label: int) -> int:
    return label % k


def crt_iso(kappa: int) -> tuple[int, ...]:
    """Isomorphism ``Z_kappa -> Z^kappa`` for squarefree ``kappa``.

    Entry ``l-1`` is the ``Z^kappa`` label of the ``Z_kappa`` label ``l``; the
    image of residue ``v`` has parts ``v mod p_i``.
    """
    ps = _factorize(kappa)
    if len(set(ps)) != len(ps):
        raise RingError(f"{kappa} is not squarefree; Z_{kappa} and Z^{kappa} are not isomorphic")
    target = z_kappa(kappa)
    image = []
    for label in range(1, kappa + 1):
        v = label % kappa
        image.append(join_parts(target, [residue_to_label(p, v) for p in ps]))
    image = tuple(image)
    if not is_isomorphism(make_zk(kappa), target, image):  # pragma: no cover - CRT guarantees this
        raise RingError("residue map failed to transport the ring tables")
    return image


def crt_residue_label(kappa: int, v: int) -> int:
    """``Z^kappa`` label of residue ``v`` (squarefree ``kappa``)."""
    return crt_iso(kappa)[residue_to_label(kappa, v) - 1]


# ---------------------------------------------------------------------------
# element addressing


def _require_product(ring: FiniteRing) -> tuple:
    if ring.factors is None:
        raise NotAProductRingError(f"{ring.name or 'ring'} has no factor structure")
    return ring.factors


def split_label(ring: FiniteRing, label: int) -> tuple[int, ...]:
    """Mixed-radix parts of a label (works for a non-product ring as one part)."""
    if not 1 <= label <= ring.k:
        raise RingError(f"label {label} outside [1, {ring.k}]")
    g = label - 1
    parts = []
    for size in reversed(ring.radix):
        parts.append(g % size + 1)
        g //= size
    return tuple(reversed(parts))


def join_parts(ring: FiniteRing, parts: Sequence[int]) -> int:
    radix = ring.radix
    if len(parts) != len(radix):
        raise RingError(f"expected {len(radix)} parts, got {len(parts)}")
    g = 0
    for p, size in zip(parts, radix):
        if not 1 <= p <= size:
            raise RingError(f"part label {p} outside [1, {size}]")
        g = g * size + (p - 1)
    return g + 1


def _check_factor(ring: FiniteRing, i: int) -> int:
    factors = _require_product(ring)
    if not 1 <= i <= len(factors):
        raise RingError(f"factor index {i} outside [1, {len(factors)}]")
    return i


def project(ring: FiniteRing, x: int, i: int) -> int:
    """Part ``i`` (1-based) of the product-ring label ``x``."""
    _check_factor(ring, i)
    return split_label(ring, x)[i - 1]


def embed(ring: FiniteRing, xi: int, i: int) -> int:
    """Product-ring label whose part ``i`` is ``xi`` and whose other parts are zero."""
    _check_factor(ring, i)
    parts = [f.k for f in ring.factors]
    parts[i - 1] = xi
    return join_parts(ring, parts)


def factor_projection_matrix(ring: FiniteRing, i: int) -> LogicalMatrix:
    """``E_i = 1^T (x) I_{k_i} (x) 1^T``, so that ``E_i x`` is part ``i`` of ``x``."""
    _check_factor(ring, i)
    radix = ring.radix
    left = math.prod(radix[: i - 1])
    right = math.prod(radix[i:])
    return kron(kron(ones_row(left), identity(radix[i - 1])), ones_row(right))


def project_table(ring: FiniteRing, i: int) -> np.ndarray:
    """0-based part ``i`` of every 0-based label, as an index array."""
    return factor_projection_matrix(ring, i).idx


@dataclass(frozen=True)
class ElementAddress:
    ring: FiniteRing
    global_label: int
    parts: tuple[int, ...]


def address(ring: FiniteRing, label: int) -> ElementAddress:
    _require_product(ring)
    return ElementAddress(ring, label, split_label(ring, label))


# ---------------------------------------------------------------------------
# ideals


@dataclass(frozen=True, eq=False)
class Ideal:
    """An ideal with its own unit, its essential ring and the maps ``pi``, ``phi``.

    ``pi`` sends members to essential-ring labels; ``phi`` sends every parent
    label ``a`` to the member ``a * e`` (``e`` the ideal's unit), which
    satisfies ``a*s = phi(a)*s`` for all members ``s``.
    """

    parent: FiniteRing
    members: tuple[int, ...]
    identity: int
    essential: FiniteRing
    pi: dict
    phi: dict | None

    @property
    def size(self) -> int:
        return len(self.members)

    def pi_inverse(self) -> dict:
        return {v: s for s, v in self.pi.items()}

    def __contains__(self, label) -> bool:
        return label in self.pi

    def __repr__(self):
        return f"Ideal({self.parent.name}, {set(self.members)}, unit={self.identity}, essential={self.essential.name})"


def _ideal_unit(R: FiniteRing, members: Sequence[int]) -> int | None:
    for e in members:
        if e == R.zero:
            continue
        if all(R.times(e, s) == s for s in members):
            return e
    return None


def ideal_subsets(R: FiniteRing) -> list[frozenset]:
    """Every ideal of R as a label set, including ``{0}`` and ``R``."""
    principal = {frozenset(R.times(r, a) for r in range(1, R.k + 1)) for a in range(1, R.k + 1)}
    ideals = set(principal)
    frontier = set(principal)
    while frontier:
        new = set()
        for I in frontier:
            for J in ideals:
                s = frozenset(R.plus(a, b) for a in I for b in J)
                if s not in ideals:
                    new.add(s)
        ideals |= new
        frontier = new
    return sorted(ideals, key=lambda s: (len(s), sorted(s)))


def _induced_ring(R: FiniteRing, members: Sequence[int], unit: int) -> tuple[FiniteRing, dict]:
    """The ideal as a ring on labels 1..r with ``unit -> 1`` and ``0 -> r``."""
    others = [m for m in members if m not in (unit, R.zero)]
    order = [unit] + sorted(others) + [R.zero]
    pos = {m: i for i, m in enumerate(order)}
    r = len(order)
    add = [pos[R.plus(a, b)] for a in order for b in order]
    mul = [pos[R.times(a, b)] for a in order for b in order]
    ring = ring_from_tables(LogicalMatrix.from_index(r, add), LogicalMatrix.from_index(r, mul), name=f"{R.name}|S")
    return ring, {m: i + 1 for m, i in pos.items()}


_CANON_CACHE: dict[int, list[FiniteRing]] = {}


def _canonical_candidates(r: int) -> list[FiniteRing]:
    if r not in _CANON_CACHE:
        cands = [make_zk(r)]
        if not is_prime(r):
            cands.append(z_kappa(r))
            if r <= 7:
                cands.extend(enumerate_rings(r))
        _CANON_CACHE[r] = cands
    return _CANON_CACHE[r]


def essential_ring_of(R: FiniteRing, members: Sequence[int]) -> tuple[FiniteRing, dict]:
    """Canonical ring isomorphic to the ideal ``members`` and the isomorphism ``pi``.

    Candidates are tried in order ``Z_r``, ``Z^r``, then the enumerated rings
    of order ``r``; the induced labelling is the fallback.
    """
    members = sorted(members)
    unit = _ideal_unit(R, members)
    if unit is None:
        raise RingError(f"{set(members)} has no multiplicative unit, so it is not a sub-ring")
    if len(members) == R.k:
        return R, {m: m for m in members}
    induced, pos = _induced_ring(R, members, unit)
    for cand in _canonical_candidates(len(members)):
        isos = find_isomorphisms(induced, cand)
        if isos:
            iso = isos[0]
            return cand, {m: iso[p - 1] for m, p in pos.items()}
    return induced, pos


def make_ideal(R: FiniteRing, members: Iterable[int]) -> Ideal:
    """Validate ``members`` as an ideal with a unit and attach ``pi`` and ``phi``."""
    members = tuple(sorted(set(members)))
    mset = set(members)
    if not mset or not all(1 <= m <= R.k for m in members):
        raise RingError("ideal members must be labels of the ring")
    if any(R.plus(a, b) not in mset for a in members for b in members):
        raise RingError(f"{mset} is not closed under addition")
    if any(R.negate(a) not in mset for a in members):
        raise RingError(f"{mset} is not closed under negation")
    if any(R.times(r, s) not in mset for r in range(1, R.k + 1) for s in members):
        raise RingError(f"{mset} does not absorb products")
    unit = _ideal_unit(R, members)
    if unit is None:
        raise RingError(f"{mset} has no unit different from zero")
    ess, pi = essential_ring_of(R, members)
    phi = _find_phi(R, members)
    return Ideal(R, members, unit, ess, pi, phi)


def _find_phi(R: FiniteRing, members: Sequence[int]) -> dict | None:
    phi = {}
    for a in range(1, R.k + 1):
        target = [R.times(a, s) for s in members]
        for cand in members:
            if [R.times(cand, s) for s in members] == target:
                phi[a] = cand
                break
        else:
            return None
    return phi


def find_ideals(R: FiniteRing) -> list[Ideal]:
    """Every ideal of R that is a ring in its own right (has a unit other than zero)."""
    out = []
    for s in ideal_subsets(R):
        if _ideal_unit(R, sorted(s)) is not None:
            out.append(make_ideal(R, s))
    return out


def essential_ring(S: Ideal) -> tuple[FiniteRing, dict]:
    return S.essential, dict(S.pi)


@dataclass(frozen=True)
class ProperIdealMap:
    theta: dict  # parent label -> LogicalMatrix on essential labels
    phi: dict | None

    @property
    def is_proper(self) -> bool:
        return self.phi is not None


def proper_ideal_map(R: FiniteRing, S: Ideal) -> ProperIdealMap:
    """``Theta_a`` (``s -> a*s`` on S, in essential labels) for every ``a``, and ``phi``."""
    r = S.size
    inv = S.pi_inverse()
    theta = {}
    for a in range(1, R.k + 1):
        cols = [S.pi[R.times(a, inv[j])] for j in range(1, r + 1)]
        theta[a] = LogicalMatrix(r, cols)
    return ProperIdealMap(theta, _find_phi(R, S.members))


# ---------------------------------------------------------------------------
# text serialization


def dump_ring(ring: FiniteRing) -> str:
    lines = [f"ring k={ring.k} name={ring.name or 'R'}"]
    if ring.factors is not None and all(f.same_tables(make_zk(f.k)) for f in ring.factors):
        lines.append("factors=[" + ",".join(str(f.k) for f in ring.factors) + "]")
    for label, m in (("add", ring.add), ("mul", ring.mul), ("neg", ring.neg)):
        lines.append(f"{label}=[" + ",".join(map(str, m.cols)) + "]")
    return "\n".join(lines) + "\n"


def dump_rings(rings: Iterable[FiniteRing]) -> str:
    return "\n".join(dump_ring(r) for r in rings)


def load_rings(text: str, *, check: bool = True) -> list[FiniteRing]:
    """Parse one or more serialized ring blocks."""
    blocks: list[dict] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("ring "):
            header = {}
            for tok in line.split()[1:]:
                if "=" not in tok:
                    raise RingError(f"line {lineno}: malformed header token {tok!r}")
                key, val = tok.split("=", 1)
                header[key] = val
            if "k" not in header:
                raise RingError(f"line {lineno}: ring header needs k=")
            blocks.append({"k": int(header["k"]), "name": header.get("name", ""), "line": lineno})
            continue
        if not blocks or "=" not in line:
            raise RingError(f"line {lineno}: expected 'ring k=...' header or key=[...] line")
        key, val = (s.strip() for s in line.split("=", 1))
        if not (val.startswith("[") and val.endswith("]")):
            raise RingError(f"line {lineno}: {key} must be a bracketed list")
        try:
            blocks[-1][key] = [int(v) for v in val[1:-1].split(",") if v.strip()]
        except ValueError:
            raise RingError(f"line {lineno}: non-integer entry in {key}") from None
    rings = []
    for b in blocks:
        k = b["k"]
        missing = [key for key in ("add", "mul") if key not in b]
        if missing:
            raise RingError(f"ring at line {b['line']}: missing {', '.join(missing)}")
        try:
            add = LogicalMatrix(k, b["add"])
            mul = LogicalMatrix(k, b["mul"])
            neg = LogicalMatrix(k, b["neg"]) if "neg" in b else None
        except DimensionError as exc:
            raise RingError(f"ring at line {b['line']}: {exc}") from None
        factors = None
        if "factors" in b:
            sizes = b["factors"]
            if math.prod(sizes) != k:
                raise RingError(f"ring at line {b['line']}: factor sizes do not multiply to {k}")
            factors = tuple(make_zk(s) for s in sizes)
        ring = ring_from_tables(add, mul, neg, b["name"], check=check, factors=None)
        if factors is not None:
            # the factor list is only trusted when the tables really are that product
            expected = product_of(list(factors))
            if not expected.same_tables(ring):
                raise RingError(f"ring at line {b['line']}: tables are not the product of the listed factors")
            ring = FiniteRing(k, ring.add, ring.mul, ring.neg, ring.name, expected.factors)
        rings.append(ring)
    return rings


def load_ring(text: str) -> FiniteRing:
    rings = load_rings(text)
    if len(rings) != 1:
        raise RingError(f"expected exactly one ring, found {len(rings)}")
    return rings[0]
