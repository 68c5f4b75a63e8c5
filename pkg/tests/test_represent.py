import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ringnet.dsl import format_network, parse_network
from ringnet.errors import DimensionError, PreconditionError, RingError
from ringnet.network import compile_assr
from ringnet.poly import Add, Const, Mul, Neg, Pow, Proj, Sub, Var, eval_poly, walk
from ringnet.represent import adequate_set, gamma_poly, interpolate_prime, represent_network, selector
from ringnet.ring import make_zk, split_label, z_kappa
from ringnet.stp import LogicalMatrix

import golden as G

PRIMES = [2, 3, 5, 7]


def _degree(e, v):
    if isinstance(e, Var):
        return int(e.index == v)
    if isinstance(e, Const):
        return 0
    if isinstance(e, (Neg, Proj)):
        return _degree(e.expr, v)
    if isinstance(e, Pow):
        return e.exponent * _degree(e.expr, v)
    if isinstance(e, Mul):
        return _degree(e.left, v) + _degree(e.right, v)
    return max(_degree(e.left, v), _degree(e.right, v))


# -- index polynomials -----------------------------------------------------------------


def test_gamma_published_forms():  # [PAPER]
    assert gamma_poly(2, 1).expr == Var(1)
    assert gamma_poly(3, 1).expr == Mul(Mul(Const(2), Var(1)), Sub(Var(1), Const(2)))
    # over Z2 the zero indicator is x - 1
    assert gamma_poly(2, 0).expr == Sub(Var(1), Const(1))


@pytest.mark.parametrize("k", PRIMES)
def test_gamma_indicator(k):  # [DERIVED]
    R = make_zk(k)
    for a in range(k):
        g = gamma_poly(k, a).expr
        for x in range(1, k + 1):
            assert eval_poly(R, g, (x,)) == (1 if x % k == a else k)


@pytest.mark.parametrize("k", PRIMES)
def test_partition_of_unity(k):  # [DERIVED]
    R = make_zk(k)
    total = gamma_poly(k, 0).expr
    for a in range(1, k):
        total = Add(total, gamma_poly(k, a).expr)
    assert all(eval_poly(R, total, (x,)) == 1 for x in range(1, k + 1))


def test_gamma_errors():  # [TRIVIAL]
    with pytest.raises(RingError):
        gamma_poly(4, 1)
    with pytest.raises(RingError):
        gamma_poly(3, 3)


# -- interpolation -------------------------------------------------------------------------


@pytest.mark.parametrize("k", PRIMES)
def test_interpolate_gamma_table(k):  # [PAPER]
    M_gamma = adequate_set(k)[1]
    P = interpolate_prime(k, M_gamma)
    R = make_zk(k)
    assert [eval_poly(R, P, (x,)) for x in range(1, k + 1)] == list(M_gamma.cols)
    assert _degree(P, 1) <= k - 1


@pytest.mark.parametrize("k", PRIMES)
def test_interpolate_identity(k):  # [TRIVIAL]
    R = make_zk(k)
    P = interpolate_prime(k, list(range(1, k + 1)))
    assert all(eval_poly(R, P, (x,)) == x for x in range(1, k + 1))


def test_interpolate_z3_multiplication():  # [DERIVED]
    R = make_zk(3)
    P = interpolate_prime(3, R.mul)
    for x, y in itertools.product(range(1, 4), repeat=2):
        assert eval_poly(R, P, (x, y)) == R.times(x, y)
    assert _degree(P, 1) <= 2 and _degree(P, 2) <= 2


@pytest.mark.parametrize("k", [2, 3, 5])
def test_interpolate_adequate_phi(k):  # [DERIVED]
    R = make_zk(k)
    M_phi = adequate_set(k)[0]
    P = interpolate_prime(k, M_phi)
    for x, y in itertools.product(range(1, k + 1), repeat=2):
        assert eval_poly(R, P, (x, y)) == M_phi.cols[(x - 1) * k + y - 1]


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([2, 3, 5]), st.integers(1, 2), st.data())
def test_interpolate_random_tables(k, d, data):  # [DERIVED]
    vals = data.draw(st.lists(st.integers(1, k), min_size=k**d, max_size=k**d))
    P = interpolate_prime(k, vals)
    R = make_zk(k)
    for i, args in enumerate(itertools.product(range(1, k + 1), repeat=d)):
        assert eval_poly(R, P, args) == vals[i]
    assert all(_degree(P, v) <= k - 1 for v in range(1, d + 1))


def test_interpolate_callable():  # [DERIVED]
    R = make_zk(5)
    f = lambda args: R.plus(R.times(args[0], args[0]), args[1])
    P = interpolate_prime(5, f, d=2)
    for x, y in itertools.product(range(1, 6), repeat=2):
        assert eval_poly(R, P, (x, y)) == f((x, y))


def test_interpolate_errors():  # [TRIVIAL]
    with pytest.raises(RingError):
        interpolate_prime(4, [1, 2, 3, 4])
    with pytest.raises(DimensionError):
        interpolate_prime(3, [1, 2])
    with pytest.raises(RingError):
        interpolate_prime(3, [1, 2, 4])
    with pytest.raises(PreconditionError):
        interpolate_prime(3, lambda a: 1)


# -- adequate set ----------------------------------------------------------------------------


@pytest.mark.parametrize("k", range(2, 8))
def test_adequate_set_block_formula(k):  # [DERIVED]
    M_phi, M_gamma = adequate_set(k)
    assert M_phi.shape == (k, k * k) and M_gamma.shape == (k, k)
    sigma = lambda j: j % k + 1
    for i in range(1, k + 1):
        for j in range(1, k + 1):
            assert M_phi.cols[(i - 1) * k + j - 1] == max(i, sigma(j))
    assert list(M_gamma.cols) == [1] + list(range(1, k))
    assert M_gamma.cols[0] == 1


def test_adequate_set_small():  # [DERIVED]
    assert list(adequate_set(2)[1].cols) == [1, 1]
    assert list(adequate_set(3)[1].cols) == [1, 1, 2]
    assert list(adequate_set(3)[0].cols) == [2, 3, 1, 2, 3, 2, 3, 3, 3]


def test_adequate_set_generates_all_unary_maps():  # [DERIVED]
    # closure of {id} under phi and gamma reaches every map Z3 -> Z3
    k = 3
    M_phi, M_gamma = adequate_set(k)
    phi = lambda a, b: M_phi.cols[(a - 1) * k + b - 1]
    gam = lambda a: M_gamma.cols[a - 1]
    funcs = {tuple(range(1, k + 1))}
    while True:
        new = set(funcs)
        for f in funcs:
            new.add(tuple(gam(v) for v in f))
            for g in funcs:
                new.add(tuple(phi(a, b) for a, b in zip(f, g)))
        if new == funcs:
            break
        funcs = new
    assert len(funcs) == k**k


# -- selectors ---------------------------------------------------------------------------------


@pytest.mark.parametrize("kappa", [4, 6, 12])
def test_selector_exhaustive(kappa):  # [DERIVED]
    R = z_kappa(kappa)
    for i, F in enumerate(R.factors, 1):
        for residue in range(F.k):
            sel = selector(R, i, residue)
            for x in range(1, kappa + 1):
                want = R.one if split_label(R, x)[i - 1] % F.k == residue else R.zero
                assert eval_poly(R, sel, (x,)) == want


# -- representation theorem ------------------------------------------------------------------


def test_example_map_over_z6():  # [PAPER]
    rep = represent_network(LogicalMatrix(6, G.REPR_M))
    assert rep.verified
    assert list(rep.assr.M.cols) == G.REPR_M
    atoms = [n for n in walk(rep.network.dynamics[0]) if isinstance(n, Proj)]
    assert {a.factor for a in atoms} == {1, 2}


@pytest.mark.parametrize("kappa", [2, 3, 4, 5, 6])
def test_identity_map(kappa):  # [TRIVIAL]
    rep = represent_network(LogicalMatrix(kappa, list(range(1, kappa + 1))))
    assert rep.verified


@pytest.mark.parametrize("seed", range(30))
def test_random_maps_round_trip(seed):  # [DERIVED]
    rng = np.random.default_rng(seed)
    kappa = [4, 6][seed % 2]
    cols = rng.integers(1, kappa + 1, size=kappa).tolist()
    rep = represent_network(cols)
    assert list(compile_assr(rep.network).M.cols) == cols


@pytest.mark.parametrize("kappa,n", [(4, 2), (6, 2), (3, 2), (2, 3)])
def test_multi_node_maps(kappa, n):  # [DERIVED]
    rng = np.random.default_rng(kappa * 10 + n)
    N = kappa**n
    cols = rng.integers(1, N + 1, size=N).tolist()
    rep = represent_network(LogicalMatrix(N, cols), n=n)
    assert rep.network.n == n
    assert list(rep.assr.M.cols) == cols


def test_represent_a_network_over_another_ring():  # [DERIVED]
    # a 4-valued network over Z_4 becomes a network over Z^4 = Z2 x Z2 with the same map
    net = parse_network("ring Z4\nstates a b\na' = a*b + 1\nb' = a - b^2\n")
    rep = represent_network(net)
    assert rep.ring.radix == (2, 2)
    assert rep.assr.M == compile_assr(net).M


def test_representation_text_round_trip():  # [DERIVED]
    rep = represent_network(LogicalMatrix(6, G.REPR_M))
    again = parse_network(format_network(rep.network))
    assert compile_assr(again).M == rep.source


def test_represent_errors():  # [TRIVIAL]
    with pytest.raises(DimensionError):
        represent_network(LogicalMatrix(3, [1, 2, 3, 1]))
    with pytest.raises(DimensionError):
        represent_network(LogicalMatrix(5, [1, 2, 3, 4, 5]), n=2)
    with pytest.raises(PreconditionError):
        represent_network(LogicalMatrix(4, [1, 2, 3, 4]), kappa=2)
