"""Semi-tensor product toolbox over logical and Boolean matrices.

A logical matrix ``d_m[i_1, ..., i_n]`` is stored by its column indices only.
Public indices are 1-based (``cols``); the 0-based array ``idx`` is what the
arithmetic works on.  Boolean matrices are plain ``numpy`` arrays of dtype
``bool``.
"""

from __future__ import annotations

import math
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionError

__all__ = [
    "LogicalMatrix",
    "delta",
    "identity",
    "ones_row",
    "stp",
    "stp_chain",
    "stp_power",
    "kron",
    "swap_matrix",
    "power_reducing_matrix",
    "khatri_rao",
    "bool_product",
    "bool_sum_slices",
    "bool_reachability_closure",
    "set_reach_vector",
]


class LogicalMatrix:
    """Matrix whose every column is a canonical basis vector.

    ``LogicalMatrix(4, [1, 3, 2, 4])`` is ``d_4[1,3,2,4]``.
    """

    __slots__ = ("rows", "idx")

    def __init__(self, rows: int, cols: Iterable[int]):
        rows = int(rows)
        if rows < 1:
            raise DimensionError(f"rows must be positive, got {rows}")
        idx = np.asarray(list(cols) if not isinstance(cols, np.ndarray) else cols, dtype=np.int64) - 1
        self._init(rows, idx)

    def _init(self, rows: int, idx: np.ndarray) -> None:
        idx = np.ascontiguousarray(idx, dtype=np.int64).reshape(-1)
        if idx.size == 0:
            raise DimensionError("a logical matrix needs at least one column")
        if idx.min() < 0 or idx.max() >= rows:
            raise DimensionError(f"column index out of range [1, {rows}]")
        idx.flags.writeable = False
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "idx", idx)

    @classmethod
    def from_index(cls, rows: int, idx) -> "LogicalMatrix":
        """Build from 0-based column indices."""
        obj = cls.__new__(cls)
        obj._init(int(rows), np.asarray(idx))
        return obj

    @classmethod
    def from_dense(cls, dense) -> "LogicalMatrix":
        dense = np.asarray(dense)
        if dense.ndim != 2 or not np.all(dense.sum(axis=0) == 1) or not np.isin(dense, (0, 1)).all():
            raise DimensionError("dense matrix is not logical")
        return cls.from_index(dense.shape[0], dense.argmax(axis=0))

    def __setattr__(self, name, value):
        raise AttributeError("LogicalMatrix is immutable")

    @property
    def ncols(self) -> int:
        return int(self.idx.size)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.ncols)

    @property
    def cols(self) -> list[int]:
        return (self.idx + 1).tolist()

    def col(self, j: int) -> int:
        """1-based row index of the nonzero entry in 1-based column ``j``."""
        if not 1 <= j <= self.ncols:
            raise IndexError(f"column {j} out of range [1, {self.ncols}]")
        return int(self.idx[j - 1]) + 1

    def dense(self) -> np.ndarray:
        out = np.zeros(self.shape, dtype=np.int64)
        out[self.idx, np.arange(self.ncols)] = 1
        return out

    def to_bool(self) -> np.ndarray:
        return self.dense().astype(bool)

    def is_square(self) -> bool:
        return self.rows == self.ncols

    def trace(self) -> int:
        if not self.is_square():
            raise DimensionError("trace of a non-square matrix")
        return int(np.count_nonzero(self.idx == np.arange(self.ncols)))

    def block(self, j: int, width: int) -> "LogicalMatrix":
        """The ``j``-th (1-based) block of ``width`` consecutive columns, i.e. ``M delta^j``."""
        if self.ncols % width:
            raise DimensionError(f"{self.ncols} columns do not split into blocks of {width}")
        start = (j - 1) * width
        return LogicalMatrix.from_index(self.rows, self.idx[start:start + width])

    def __matmul__(self, other: "LogicalMatrix") -> "LogicalMatrix":
        return stp(self, other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, LogicalMatrix):
            return NotImplemented
        return self.rows == other.rows and np.array_equal(self.idx, other.idx)

    def __hash__(self) -> int:
        return hash((self.rows, self.idx.tobytes()))

    def __repr__(self) -> str:
        return f"d{self.rows}[{','.join(map(str, self.cols))}]"

    __str__ = __repr__

    @classmethod
    def parse(cls, text: str) -> "LogicalMatrix":
        """Inverse of ``repr``: ``'d4[1,3,2,4]'`` -> ``d_4[1,3,2,4]``."""
        s = text.strip().replace(" ", "")
        if not (s.startswith("d") and "[" in s and s.endswith("]")):
            raise ValueError(f"not delta notation: {text!r}")
        rows, body = s[1:-1].split("[", 1)
        return cls(int(rows), [int(c) for c in body.split(",") if c])


def delta(k: int, i: int) -> LogicalMatrix:
    """Column vector ``delta_k^i``."""
    return LogicalMatrix(k, [i])


def identity(n: int) -> LogicalMatrix:
    return LogicalMatrix.from_index(n, np.arange(n))


def ones_row(n: int) -> LogicalMatrix:
    """The 1 x n all-ones row (the dummy matrix ``1_n^T``)."""
    return LogicalMatrix.from_index(1, np.zeros(n, dtype=np.int64))


def stp(A: LogicalMatrix, B: LogicalMatrix) -> LogicalMatrix:
    """Left semi-tensor product ``(A kron I_{t/n})(B kron I_{t/p})``, ``t = lcm(n, p)``."""
    n, p = A.ncols, B.rows
    t = math.lcm(n, p)
    a, b = t // n, t // p
    # column c of (B kron I_b) sits at row B[c // b] * b + c % b,
    # column c' of (A kron I_a) sits at row A[c' // a] * a + c' % a
    c = np.arange(B.ncols * b)
    mid = B.idx[c // b] * b + c % b
    out = A.idx[mid // a] * a + mid % a
    return LogicalMatrix.from_index(A.rows * a, out)


def stp_chain(*ms: LogicalMatrix) -> LogicalMatrix:
    return reduce(stp, ms)


def stp_power(M: LogicalMatrix, r: int) -> LogicalMatrix:
    """``M^r`` under the semi-tensor product; ``r >= 1``."""
    if r < 1:
        raise ValueError("power must be >= 1")
    return reduce(stp, [M] * r)


def kron(A: LogicalMatrix, B: LogicalMatrix) -> LogicalMatrix:
    out = (A.idx[:, None] * B.rows + B.idx[None, :]).reshape(-1)
    return LogicalMatrix.from_index(A.rows * B.rows, out)


def swap_matrix(m: int, n: int) -> LogicalMatrix:
    """``W_[m,n]`` with ``W (x kron y) = y kron x`` for ``x`` in Delta_m, ``y`` in Delta_n."""
    if m < 1 or n < 1:
        raise DimensionError("swap matrix dimensions must be positive")
    c = np.arange(m * n)
    i, j = c // n, c % n
    return LogicalMatrix.from_index(m * n, j * m + i)


def power_reducing_matrix(n: int) -> LogicalMatrix:
    """``PR_n = diag(d_n^1, ..., d_n^n)`` (``n^2 x n``), so ``PR_n x = x^2`` for basis ``x``."""
    if n < 1:
        raise DimensionError("n must be positive")
    i = np.arange(n)
    return LogicalMatrix.from_index(n * n, i * n + i)


def khatri_rao(ms: Sequence[LogicalMatrix]) -> LogicalMatrix:
    """Column-wise semi-tensor product of equally wide logical matrices."""
    ms = list(ms)
    if not ms:
        raise DimensionError("khatri_rao needs at least one matrix")
    width = ms[0].ncols
    if any(m.ncols != width for m in ms):
        raise DimensionError("khatri_rao operands must have equal column counts")
    idx = ms[0].idx.copy()
    rows = ms[0].rows
    for m in ms[1:]:
        idx = idx * m.rows + m.idx
        rows *= m.rows
    return LogicalMatrix.from_index(rows, idx)


def bool_product(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Boolean semiring product; the float product stays exact for these sizes."""
    return (A.astype(np.float64) @ B.astype(np.float64)) > 0


def bool_sum_slices(L: LogicalMatrix) -> np.ndarray:
    """Boolean sum of the square slices ``L delta^u`` of a control transition matrix."""
    N = L.rows
    if L.ncols % N:
        raise DimensionError(f"{L.shape} is not a stack of {N}x{N} slices")
    out = np.zeros((N, N), dtype=bool)
    cols = np.tile(np.arange(N), L.ncols // N)
    out[L.idx, cols] = True
    return out


def bool_reachability_closure(M: np.ndarray) -> np.ndarray:
    """``C = M + M^(2) + ... + M^(N)`` over the Boolean semiring.

    ``C[i, j]`` is true iff there is a path of length 1..N from ``j`` to ``i``.
    """
    M = np.asarray(M, dtype=bool)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionError(f"closure needs a square matrix, got shape {M.shape}")
    C = M.copy()
    while True:
        # C <- C + C*C doubles the covered path length; stop once nothing new appears
        nxt = C | bool_product(C, C)
        if np.array_equal(nxt, C):
            return C
        C = nxt


def set_reach_vector(L: LogicalMatrix, target: np.ndarray) -> np.ndarray:
    """Row vector ``1_W^T (M + M^2 + ...)`` for ``M`` the Boolean sum of slices of ``L``.

    Entry ``j`` is true iff some state of ``target`` is reachable from ``j`` in
    at least one step.  Equivalent to multiplying the indicator into
    ``bool_reachability_closure`` without forming the dense closure.
    """
    N = L.rows
    succ = L.idx.reshape(-1, N)  # succ[u, j]: successor of state j under input u
    target = np.asarray(target, dtype=bool)
    hit = target[succ].any(axis=0)
    acc = hit.copy()
    while True:
        nxt = acc | acc[succ].any(axis=0)
        if np.array_equal(nxt, acc):
            return acc
        acc = nxt
