"""From polynomial update rules to a transition matrix, and what it tells us.

The five-state-per-node network over Z5 has 125 states. Its transition matrix
has trace 2, and the two fixed points are read off the diagonal.
"""

import pathlib

from ringnet.dsl import parse_network_file
from ringnet.network import attractors, compile_assr, fixed_points, label_trajectory, state_labels

NETS = pathlib.Path(__file__).parent / "nets"

net = parse_network_file(str(NETS / "z5_three_node.net"))
A = compile_assr(net, cross_check=True)  # symbolic compile checked against brute force
print("M =", A.M)
for s in fixed_points(A.M):
    print("fixed point", s, "=", state_labels(s, 5, 3))
print("attractor count:", len(attractors(A.M)))

z6 = compile_assr(parse_network_file(str(NETS / "z6_autonomous.net")))
print("\nZ6 run from (6,3):", label_trajectory(z6, (6, 3), steps=4))
print("Z6 fixed points:", fixed_points(z6.M))
