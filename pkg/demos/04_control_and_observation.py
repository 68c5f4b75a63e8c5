"""Control questions answered through the Boolean closure of the input-summed matrix.

The order-4 ring example is not completely controllable; only 14 states are
reachable from everywhere. The Z^6 example is then checked for observability,
factor by factor and on the full doubled system.
"""

import pathlib

from ringnet.decompose import LinearNetwork, combined_control_verdicts, linear_controllability
from ringnet.dsl import parse_network_file
from ringnet.network import compile_assr, control_fixed_points, controllability, stabilizable_to, synchronizable

NETS = pathlib.Path(__file__).parent / "nets"

A = compile_assr(parse_network_file(str(NETS / "r1_control.net")))
ctrl = controllability(A)
print("control fixed points:", control_fixed_points(A))
print("completely controllable:", ctrl.complete)
print("reachable from every state:", ctrl.reachable)
print("stabilizable to 60 / 64:", stabilizable_to(A, 60), stabilizable_to(A, 64))
print("synchronizable to:", synchronizable(A, 3, 4))

obs = parse_network_file(str(NETS / "z6_observe.net"))
for incl in (False, True):
    v = combined_control_verdicts(obs, "observable", include_initial=incl)
    print(f"\nobservability (first output counted: {incl})")
    print("  factor verdicts:", v.factor_verdicts)
    print("  combined (both factors must be observable):", v.combined)
    print("  direct 36-state check agrees:", v.agrees)

lin = LinearNetwork.from_residues(6, [[3, 4], [1, 5]], [[3], [2]], [[2, 3]])
r = linear_controllability(lin)
print("\nlinear Z6 system, factor verdicts:", r.factor_verdicts, "combined:", r.combined)
