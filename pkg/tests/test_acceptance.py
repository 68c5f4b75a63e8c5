"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line with its runtime.

Run ``python3 tests/test_acceptance.py`` for the bare report, or
``pytest tests/test_acceptance.py`` for the same checks under pytest.
"""

from __future__ import annotations

import itertools
import os
import sys
import time

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import golden as G
from _oracles import dense, dense_stp, oracle_transition, random_poly, ring_dicts

from ringnet.decompose import (
    LinearNetwork,
    combined_control_verdicts,
    ideal_restriction_trace,
    linear_assr,
    linear_controllability,
    project_linear,
    project_network,
    subnetwork_over_ideal,
    verify_decomposition,
)
from ringnet.dsl import parse_network
from ringnet.network import (
    Network,
    compile_assr,
    control_fixed_points,
    controllability,
    fixed_points,
    observability,
    stabilizable_to,
    synchronizable,
    trajectory,
)
from ringnet.poly import Add, eval_poly
from ringnet.represent import gamma_poly, represent_network
from ringnet.ring import enumerate_rings, make_ideal, make_zk, product_ring, z_kappa
from ringnet.stp import LogicalMatrix, delta, identity, kron, power_reducing_matrix, stp, swap_matrix


def _cols(M):
    return list(M.cols)


# -- the twelve criteria ------------------------------------------------------------------
# each returns a list of (label, ok) checks; the wrapper times it and prints one line


def c01_ring_enumeration():
    rings = enumerate_rings(4)
    got = {(tuple(R.add.cols), tuple(R.mul.cols)) for R in rings}
    want = {(tuple(a), tuple(m)) for a, m in G.ORDER4.values()}
    return [("six rings", len(rings) == 6), ("tables match R1..R6", got == want)], 60.0


def c02_zp_construction():
    Z5, Z6 = make_zk(5), make_zk(6)
    return [
        ("Z5 add", _cols(Z5.add) == G.Z5_ADD),
        ("Z5 mul", _cols(Z5.mul) == G.Z5_MUL),
        ("Z5 sub", [Z5.minus(a, b) for a in range(1, 6) for b in range(1, 6)] == G.Z5_SUB),
        ("Z5 neg", _cols(Z5.neg) == G.Z5_NEG),
        ("Z6 add", _cols(Z6.add) == G.Z6_ADD),
        ("Z6 mul", _cols(Z6.mul) == G.Z6_MUL),
        ("Z6 neg", _cols(Z6.neg) == G.Z6_NEG),
    ], 1.0


def c03_assr_golden():
    checks = []
    for name, src, want in (("Z5 M", G.Z5_NET, G.Z5_M), ("Z6 M", G.Z6_NET, G.Z6_M), ("Z^4 M", G.Z4_NET, G.Z4_M)):
        net = parse_network(src)
        M = _cols(compile_assr(net, cross_check=True).M)
        add, mul, neg = ring_dicts(net.ring)
        checks.append((name, M == want))
        checks.append((name + " = brute-force oracle", M == oracle_transition(net, add, mul, neg)))
    N = compile_assr(subnetwork_over_ideal(parse_network(G.Z6_NET), make_ideal(make_zk(6), {3, 6})))
    checks.append(("sub-network N = d4[1,4,2,4]", _cols(N.M) == G.SUB_N))
    return checks, 5.0


def c04_fixed_points():
    M5 = compile_assr(parse_network(G.Z5_NET)).M
    A6 = compile_assr(parse_network(G.Z6_NET))
    fp6 = fixed_points(A6.M)
    return [
        ("trace 2", int(np.trace(M5.dense())) == 2),
        ("Z5 fixed points {104, 125}", fixed_points(M5) == [104, 125]),
        ("15 fixed along its trajectory", trajectory(A6, 15, steps=5) == [15] * 6),
        ("Z6 fixed points contain 15 and 36", {15, 36} <= set(fp6)),
    ], None


def c05_control_analysis():
    A = compile_assr(parse_network(G.R4_CONTROL_NET), cross_check=True)
    ctrl = controllability(A)
    return [
        ("control fixed points {60, 64}", control_fixed_points(A) == [60, 64]),
        ("reachable set J (14 states)", ctrl.reachable == G.R4_CONTROL_J and len(ctrl.reachable) == 14),
        ("stabilizable to 60 and 64", stabilizable_to(A, 60) and stabilizable_to(A, 64)),
        ("synchronizes to (4,4,4)", synchronizable(A, 3, 4) == [(4, 4, 4)]),
    ], 10.0


def c06_product_rings():
    P22 = product_ring(make_zk(2), make_zk(2))
    P23 = product_ring(make_zk(2), make_zk(3))
    return [
        ("Z2xZ2 add", _cols(P22.add) == G.Z2xZ2_ADD),
        ("Z2xZ2 mul", _cols(P22.mul) == G.Z2xZ2_MUL),
        ("Z2xZ3 add", _cols(P23.add) == G.Z2xZ3_ADD),
        ("Z2xZ3 mul", _cols(P23.mul) == G.Z2xZ3_MUL),
        ("Z2xZ3 neg", _cols(P23.neg) == G.Z2xZ3_NEG),
        ("Z^4 differs from Z_4", not z_kappa(4).same_tables(make_zk(4))),
    ], None


def c07_decomposition():
    rep = verify_decomposition(parse_network(G.Z4_NET), cross_check=True)
    checks = [("Z^4 example M* = M", rep.equal and _cols(rep.combined) == G.Z4_M)]
    R = z_kappa(6)
    add, mul, neg = ring_dicts(R)
    ok = True
    for seed in range(50):
        rng = np.random.default_rng(1000 + seed)
        net = Network(R, [random_poly(rng, 6, 2, degree=3) for _ in range(2)])
        r = verify_decomposition(net)
        ok &= r.equal and _cols(r.original) == oracle_transition(net, add, mul, neg)
    checks.append(("50 random Z^6 networks M* = M", ok))
    return checks, 30.0


def c08_ideal_restriction():
    S = make_ideal(make_zk(6), {3, 6})
    net = parse_network(G.Z6_NET)
    checks = []
    for s0 in ((3, 3), (3, 6), (6, 3), (6, 6)):
        checks.append((f"start {s0}", ideal_restriction_trace(net, S, s0, steps=10).holds))
    cnet = parse_network(G.Z6_NET_CONTROL)
    tr = ideal_restriction_trace(cnet, S, (3, 3), [(u,) for u in [3, 6] * 5], steps=10)
    checks.append(("controlled run", tr.holds and [z[0] for z in tr.parent][:9] == G.CONTROL_RUN_Z1))
    return checks, None


def c09_observability():
    net = parse_network(G.OBS_NET)
    f1, f2 = (compile_assr(project_network(net, i)) for i in (1, 2))
    s1 = observability(f1, None, include_initial=False).indistinguishable
    s2 = observability(f2, None, include_initial=False).indistinguishable
    v = combined_control_verdicts(net, "observable", include_initial=False)
    return [
        ("S1 = {(1,2),(3,4)}", s1 == G.OBS_S1),
        ("S2 has the 9 published pairs", s2 == G.OBS_S2 and len(s2) == 9),
        ("combined verdict not observable", v.combined is False),
        ("36-state doubled system agrees (AND)", v.cross_checked and v.agrees and v.direct is False),
    ], 30.0


def c10_linear():
    lin = LinearNetwork.from_residues(6, G.LIN_A, G.LIN_B, G.LIN_C)
    f1 = project_linear(lin, 1)
    a1 = linear_assr(f1)
    r = linear_controllability(lin)
    printed = tuple(tuple(v % 2 or 2 for v in row) for row in G.LIN_A1_PRINTED)
    return [
        ("L1 = d4[4,3,1,2,2,1,3,4]", _cols(a1.L) == G.LIN_L1),
        ("L1_1, L1_2", [_cols(c) for c in a1.components] == [G.LIN_L11, G.LIN_L12]),
        ("C1 = J4x4", r.factor_closures[0].shape == (4, 4) and r.factor_closures[0].all()),
        ("C2 = J9x9", r.factor_closures[1].shape == (9, 9) and r.factor_closures[1].all()),
        ("completely controllable", r.combined and r.direct and r.agrees),
        ("printed A1 differs from A mod 2", f1.A != printed),
    ], None


def c11_representation():
    rep = represent_network(G.REPR_M)
    checks = [("d6[4,6,1,3,2,5] round trip", rep.verified and _cols(compile_assr(rep.network).M) == G.REPR_M)]
    ok = True
    for seed in range(30):
        rng = np.random.default_rng(seed)
        kappa = [4, 6][seed % 2]
        cols = rng.integers(1, kappa + 1, size=kappa).tolist()
        ok &= _cols(compile_assr(represent_network(cols).network).M) == cols
    checks.append(("30 random maps over 4 and 6", ok))
    ind = part = True
    for k in (2, 3, 5, 7):
        R = make_zk(k)
        total = None
        for a in range(k):
            g = gamma_poly(k, a).expr
            ind &= all(eval_poly(R, g, (x,)) == (1 if x % k == a else k) for x in range(1, k + 1))
            total = g if total is None else Add(total, g)
        part &= all(eval_poly(R, total, (x,)) == 1 for x in range(1, k + 1))
    checks += [("Gamma indicators, k <= 7", ind), ("partition of unity, k <= 7", part)]
    return checks, 30.0


def _all_logical(rows, cols):
    for c in itertools.product(range(1, rows + 1), repeat=cols):
        yield LogicalMatrix(rows, c)


def c12_stp_algebra():
    # associativity, exhaustive over all logical matrices with shapes up to 2 x 2
    shapes = [(r, c) for r in (1, 2) for c in (1, 2)]
    assoc = True
    for (r1, c1), (r2, c2), (r3, c3) in itertools.product(shapes, repeat=3):
        for A in _all_logical(r1, c1):
            for B in _all_logical(r2, c2):
                for C in _all_logical(r3, c3):
                    lhs = stp(stp(A, B), C)
                    assoc &= lhs == stp(A, stp(B, C))
                    assoc &= (lhs.dense() == dense_stp(dense_stp(A.dense(), B.dense()), C.dense())).all()
    swap = True
    for m, n in itertools.product(range(1, 6), repeat=2):
        W = swap_matrix(m, n)
        swap &= stp(W, swap_matrix(n, m)) == identity(m * n)
        for i, j in itertools.product(range(1, m + 1), range(1, n + 1)):
            swap &= stp(W, stp(delta(m, i), delta(n, j))) == stp(delta(n, j), delta(m, i))
    pseudo = True
    for t in range(1, 5):
        for r, c in itertools.product(range(1, 4), repeat=2):
            for M in _all_logical(r, c):
                for i in range(1, t + 1):
                    x = delta(t, i)
                    pseudo &= stp(x, M) == stp(kron(identity(t), M), x)
    pr = True
    for n in range(1, 9):
        PR = power_reducing_matrix(n)
        pr &= all(stp(PR, delta(n, i)) == stp(delta(n, i), delta(n, i)) for i in range(1, n + 1))
        pr &= PR.dense().tolist() == dense(n * n, [(i - 1) * n + i for i in range(1, n + 1)]).tolist()
    return [("associativity", assoc), ("swap involution", swap), ("pseudo-commutation", pseudo), ("PR_n reduction", pr)], None


CRITERIA = [
    (1, "ring enumeration", c01_ring_enumeration),
    (2, "Z_k construction", c02_zp_construction),
    (3, "ASSR golden tables", c03_assr_golden),
    (4, "fixed points", c04_fixed_points),
    (5, "control analysis", c05_control_analysis),
    (6, "product rings", c06_product_rings),
    (7, "decomposition", c07_decomposition),
    (8, "ideal restriction", c08_ideal_restriction),
    (9, "observability", c09_observability),
    (10, "linear networks", c10_linear),
    (11, "representation", c11_representation),
    (12, "STP algebra", c12_stp_algebra),
]


def evaluate(fn):
    t0 = time.perf_counter()
    checks, limit = fn()
    elapsed = time.perf_counter() - t0
    failed = [label for label, ok in checks if not ok]
    if limit is not None and elapsed > limit:
        failed.append(f"runtime {elapsed:.2f}s over {limit:.0f}s")
    return failed, elapsed, limit


def report_line(num, title, failed, elapsed, limit):
    status = "PASS" if not failed else "FAIL"
    bound = f" (limit {limit:.0f}s)" if limit is not None else ""
    extra = "" if not failed else "  failed: " + "; ".join(failed)
    return f"{status}  criterion {num:2d}  {title:<20s} {elapsed:7.3f}s{bound}{extra}"


@pytest.mark.parametrize("num,title,fn", CRITERIA, ids=[f"criterion_{n:02d}" for n, _, _ in CRITERIA])
def test_criterion(num, title, fn, capsys):
    failed, elapsed, limit = evaluate(fn)
    with capsys.disabled():
        print("\n" + report_line(num, title, failed, elapsed, limit))
    assert not failed


if __name__ == "__main__":
    bad = 0
    for num, title, fn in CRITERIA:
        failed, elapsed, limit = evaluate(fn)
        bad += bool(failed)
        print(report_line(num, title, failed, elapsed, limit))
    sys.exit(1 if bad else 0)
