"""Finite rings as structure matrices.

Walks through the cyclic rings, the six labelled rings of order 4, and how the
product ring Z^4 = Z2 x Z2 differs from the cyclic ring Z_4.
"""

from ringnet.ring import dump_ring, enumerate_rings, find_isomorphisms, make_zk, product_ring, verify, z_kappa

Z5 = make_zk(5)
print("Z5 addition  ", Z5.add)
print("Z5 product   ", Z5.mul)
print("Z5 negation  ", Z5.neg)
print("axioms hold:", verify(Z5).is_commutative_ring)

# Every commutative ring on labels 1..4, with label 1 the unit and label 4 the zero.
rings = enumerate_rings(4)
print(f"\n{len(rings)} labelled rings of order 4")
classes = []
for i, R in enumerate(rings, 1):
    for cls in classes:
        if find_isomorphisms(rings[cls[0] - 1], R):
            cls.append(i)
            break
    else:
        classes.append([i])
print("isomorphism classes (1-based positions):", classes)

P, C = z_kappa(4), make_zk(4)
print("\nZ^4 and Z_4 share tables?", P.same_tables(C))
print("isomorphic?", bool(find_isomorphisms(P, C)))
print("\nZ2 x Z3 in the serialized form:")
print(dump_ring(product_ring(make_zk(2), make_zk(3))))
