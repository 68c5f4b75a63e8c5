"""Any map on kappa values is a polynomial network over Z^kappa.

The network is built from field interpolation indicators inside factor
projections, then recompiled to confirm it reproduces the map.
"""

import numpy as np

from ringnet.dsl import format_network
from ringnet.network import compile_assr
from ringnet.represent import adequate_set, interpolate_prime, represent_network
from ringnet.stp import LogicalMatrix

rep = represent_network(LogicalMatrix(6, [4, 6, 1, 3, 2, 5]))
print(format_network(rep.network))
print("recompiled:", compile_assr(rep.network).M, "verified:", rep.verified)

rng = np.random.default_rng(3)
cols = rng.integers(1, 5, size=16).tolist()
two = represent_network(LogicalMatrix(16, cols), n=2)
print("\nrandom two-node map over 4 values reproduced:", two.verified)

M_phi, M_gamma = adequate_set(3)
print("\nadequate pair for 3-valued logic:", M_phi, M_gamma)
print("phi as a Z3 polynomial has", len(str(interpolate_prime(3, M_phi))), "characters")
