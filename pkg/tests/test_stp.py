import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ringnet.errors import DimensionError
from ringnet.stp import (
    LogicalMatrix,
    bool_product,
    bool_reachability_closure,
    bool_sum_slices,
    delta,
    identity,
    khatri_rao,
    kron,
    ones_row,
    power_reducing_matrix,
    set_reach_vector,
    stp,
    stp_chain,
    stp_power,
    swap_matrix,
)

from _oracles import basis, bool_closure_bfs, dense, dense_stp


@st.composite
def logical(draw, max_rows=6, max_cols=6, rows=None, cols=None):
    r = rows or draw(st.integers(1, max_rows))
    c = cols or draw(st.integers(1, max_cols))
    return LogicalMatrix(r, draw(st.lists(st.integers(1, r), min_size=c, max_size=c)))


# -- construction --------------------------------------------------------------


def test_delta_and_identity():
    assert delta(3, 2).cols == [2] and delta(3, 2).shape == (3, 1)
    assert identity(4).cols == [1, 2, 3, 4]
    assert ones_row(3).shape == (1, 3)


def test_column_range_enforced():
    with pytest.raises(DimensionError):
        LogicalMatrix(2, [1, 3])
    with pytest.raises(DimensionError):
        LogicalMatrix(2, [0])


def test_immutable():
    A = LogicalMatrix(2, [2, 1])
    with pytest.raises(AttributeError):
        A.rows = 3


def test_repr_parse_round_trip():
    A = LogicalMatrix(6, [4, 6, 1, 3, 2, 5])
    assert repr(A) == "d6[4,6,1,3,2,5]"
    assert LogicalMatrix.parse(repr(A)) == A


def test_dense_has_one_one_per_column():
    A = LogicalMatrix(5, [5, 1, 1, 3])
    D = A.dense()
    assert (D.sum(axis=0) == 1).all()
    assert (D == dense(5, [5, 1, 1, 3])).all()


# -- stp -----------------------------------------------------------------------


def test_stp_column_selection():
    assert stp(LogicalMatrix(2, [2, 1]), delta(2, 1)) == delta(2, 2)


def test_stp_of_vectors_is_kronecker():
    assert stp(delta(2, 1), delta(2, 2)) == delta(4, 2)


@settings(max_examples=100, deadline=None)
@given(logical(), logical(), logical())
def test_stp_associative_against_dense(A, B, C):
    left = stp(stp(A, B), C)
    right = stp(A, stp(B, C))
    assert left == right
    assert (left.dense() == dense_stp(dense_stp(A.dense(), B.dense()), C.dense())).all()


@settings(max_examples=100, deadline=None)
@given(logical(), logical())
def test_stp_matches_dense_definition(A, B):
    assert (stp(A, B).dense() == dense_stp(A.dense(), B.dense())).all()


@settings(max_examples=50, deadline=None)
@given(st.data())
def test_stp_reduces_to_composition(data):
    n = data.draw(st.integers(1, 6))
    A = data.draw(logical(cols=n))
    B = data.draw(logical(rows=n))
    assert stp(A, B).cols == [A.cols[c - 1] for c in B.cols]


def test_stp_chain_and_power():
    A = LogicalMatrix(2, [2, 1])
    assert stp_chain(A, A, A) == A
    assert stp_power(A, 2) == identity(2)
    with pytest.raises(ValueError):
        stp_power(A, 0)


# -- kron ----------------------------------------------------------------------


def test_kron_examples():
    assert kron(identity(2), identity(2)) == identity(4)
    assert kron(LogicalMatrix(2, [2, 1]), identity(2)) == LogicalMatrix(4, [3, 4, 1, 2])


@settings(max_examples=60, deadline=None)
@given(logical(4, 4), logical(4, 4), logical(4, 4))
def test_kron_associative_against_dense(A, B, C):
    out = kron(A, kron(B, C))
    assert out == kron(kron(A, B), C)
    assert (out.dense() == np.kron(np.kron(A.dense(), B.dense()), C.dense())).all()


# -- swap and power reducing ---------------------------------------------------


def test_swap_examples():
    assert swap_matrix(1, 3) == identity(3)
    assert swap_matrix(2, 2) == LogicalMatrix(4, [1, 3, 2, 4])


@pytest.mark.parametrize("m,n", list(itertools.product(range(1, 6), repeat=2)))
def test_swap_exchanges_factors_exhaustively(m, n):
    W = swap_matrix(m, n)
    for i in range(1, m + 1):
        for j in range(1, n + 1):
            assert stp(W, stp(delta(m, i), delta(n, j))) == stp(delta(n, j), delta(m, i))
    assert stp(W, swap_matrix(n, m)) == identity(m * n)
    # dense oracle: W (x kron y) = y kron x
    Wd = W.dense()
    for i in range(1, m + 1):
        for j in range(1, n + 1):
            assert (Wd @ np.kron(basis(m, i), basis(n, j)) == np.kron(basis(n, j), basis(m, i))).all()


def test_power_reducing_examples():
    assert power_reducing_matrix(2) == LogicalMatrix(4, [1, 4])
    assert power_reducing_matrix(3) == LogicalMatrix(9, [1, 5, 9])


@pytest.mark.parametrize("n", range(1, 9))
def test_power_reducing_exhaustive(n):
    # PR_n is n^2 x n, so the reduction reads x^2 = PR_n x (the form used when compiling powers)
    PR = power_reducing_matrix(n)
    assert PR.shape == (n * n, n)
    for i in range(1, n + 1):
        x = delta(n, i)
        assert stp(PR, x) == stp(x, x)
        assert (PR.dense() @ basis(n, i) == np.kron(basis(n, i), basis(n, i))).all()


# -- pseudo commutation: x M = (I_t kron M) x ----------------------------------


def _all_logical(rows, cols):
    for c in itertools.product(range(1, rows + 1), repeat=cols):
        yield LogicalMatrix(rows, c)


@pytest.mark.parametrize("t", range(1, 5))
def test_pseudo_commutation_exhaustive(t):
    for r in range(1, 4):
        for c in range(1, 4):
            for M in _all_logical(r, c):
                for i in range(1, t + 1):
                    x = delta(t, i)
                    assert stp(x, M) == stp(kron(identity(t), M), x)


# -- khatri rao ----------------------------------------------------------------


def test_khatri_rao_examples():
    assert khatri_rao([LogicalMatrix(2, [2, 1]), LogicalMatrix(2, [1, 2])]) == LogicalMatrix(4, [3, 2])
    A = LogicalMatrix(3, [1, 3, 2])
    assert khatri_rao([A]) == A


def test_khatri_rao_z4_product_example():
    M1 = LogicalMatrix(4, [4, 3, 2, 1, 3, 4, 1, 2, 2, 1, 4, 3, 1, 2, 3, 4])
    M2 = LogicalMatrix(4, [1] * 4 + [2] * 4 + [3] * 4 + [4] * 4)
    assert khatri_rao([M1, M2]) == LogicalMatrix(16, [13, 9, 5, 1, 10, 14, 2, 6, 7, 3, 15, 11, 4, 8, 12, 16])


def test_khatri_rao_rejects_width_mismatch():
    with pytest.raises(DimensionError):
        khatri_rao([LogicalMatrix(2, [1, 2]), LogicalMatrix(2, [1])])


@settings(max_examples=50, deadline=None)
@given(st.data())
def test_khatri_rao_column_is_stp_of_columns(data):
    w = data.draw(st.integers(1, 5))
    ms = data.draw(st.lists(logical(4, cols=w), min_size=1, max_size=3))
    K = khatri_rao(ms)
    for j in range(1, w + 1):
        col = delta(ms[0].rows, ms[0].col(j))
        for M in ms[1:]:
            col = stp(col, delta(M.rows, M.col(j)))
        assert K.col(j) == col.col(1)


# -- boolean closure -----------------------------------------------------------


def test_closure_zero():
    Z = np.zeros((4, 4), dtype=bool)
    assert not bool_reachability_closure(Z).any()


def test_closure_rejects_non_square():
    with pytest.raises(DimensionError):
        bool_reachability_closure(np.zeros((2, 3), dtype=bool))


def test_closure_of_linear_factor_matrices():
    # transition slices of the two factor systems of the linear Z^6 example
    L1 = LogicalMatrix(4, [4, 3, 1, 2, 2, 1, 3, 4])
    L2 = LogicalMatrix(9, [2, 4, 9, 3, 5, 7, 1, 6, 8, 1, 6, 8, 2, 4, 9, 3, 5, 7, 3, 5, 7, 1, 6, 8, 2, 4, 9])
    assert bool_reachability_closure(bool_sum_slices(L1)).all()
    assert bool_reachability_closure(bool_sum_slices(L2)).all()


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 8).flatmap(lambda n: st.lists(st.booleans(), min_size=n * n, max_size=n * n)))
def test_closure_against_bfs_and_idempotent(bits):
    n = int(round(len(bits) ** 0.5))
    M = np.array(bits, dtype=bool).reshape(n, n)
    C = bool_reachability_closure(M)
    assert (C == bool_closure_bfs(M)).all()
    assert (bool_reachability_closure(C) == C).all()
    assert (C >= M).all()


def test_bool_product_is_boolean():
    A = np.array([[1, 1], [0, 1]], dtype=bool)
    assert (bool_product(A, A) == np.array([[1, 1], [0, 1]], dtype=bool)).all()


def test_set_reach_vector_strict():
    # 1 -> 2 -> 3 -> 3 ; target {3}
    L = LogicalMatrix(3, [2, 3, 3])
    target = np.array([False, False, True])
    assert set_reach_vector(L, target).tolist() == [True, True, True]
    L = LogicalMatrix(3, [1, 3, 2])
    assert set_reach_vector(L, np.array([True, False, False])).tolist() == [True, False, False]
