"""A network over Z^kappa splits into one network per prime factor.

Each factor is compiled on its own, the factor matrices are recombined, and the
result is compared with compiling the original network directly.
"""

import pathlib

import numpy as np

from ringnet.decompose import product_network, project_network, verify_decomposition
from ringnet.dsl import format_network, parse_network_file
from ringnet.network import Network, compile_assr
from ringnet.poly import Add, Const, Mul, Pow, Var
from ringnet.ring import z_kappa

NETS = pathlib.Path(__file__).parent / "nets"

net = parse_network_file(str(NETS / "z4_product.net"))
for i in (1, 2):
    print(f"factor {i}:")
    print(format_network(project_network(net, i)))
rep = verify_decomposition(net, cross_check=True)
print("recombined M* =", rep.combined)
print("direct     M  =", rep.original)
print("equal:", rep.equal)

# The same holds for arbitrary polynomials; try a few random ones over Z^30.
rng = np.random.default_rng(7)
R = z_kappa(30)
for trial in range(3):
    c = [int(v) for v in rng.integers(1, 31, size=3)]
    dyn = [Add(Mul(Const(c[0]), Pow(Var(1), 2)), Var(2)), Add(Mul(Const(c[1]), Var(1)), Const(c[2]))]
    print(f"random Z^30 network {trial}: M* = M is", verify_decomposition(Network(R, dyn)).equal)

# Going the other way: two networks over coprime fields fuse into one.
P = product_network(parse_network_file(str(NETS / "z5_pair.net")), parse_network_file(str(NETS / "z3_pair.net")))
print("\nproduct network over Z5 x Z3:")
print(format_network(P))
print("states:", compile_assr(P).num_states)
