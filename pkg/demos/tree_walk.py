"""A walk around the Bruhat-Tits tree of Q_p."""

from mumford import bttree as bt

p = 3
M = bt.ProjMat(0, 1, 1, 0)  # z -> 1/z
print(M, "is", bt.classify(M, p).to_json())
print("fixed ends:", [bt.end_str(e) for e in bt.fixed_points(M, p)])

# the geodesic 1 .. -1 passes through the base vertex
print("geodesic:", " ".join(str(v) for v in bt.geodesic(1, -1, (0, 2), p)))
print("meets g(0, inf) in", bt.geodesic_intersection((0, bt.INFINITY), (1, -1), 4, p).to_json())

# its fixed vertices are exactly that geodesic when p is odd
print("mirror at p=3:", bt.mirror(M, p, 3).to_json()["count"], "vertices")

# at p = 2 the same involution fixes a whole tube around the axis
tube = bt.fixed_vertices_exhaustive(M, 2, 4)
axis = bt.mirror_from_geodesic(M, 2, 4)
print("p=2:", len(tube), "fixed vertices,", len(axis), "on the axis")

# star action at the base vertex
print("rho:", bt.rho(bt.base_vertex(p), M, p), bt.in_kernel(bt.base_vertex(p), bt.ProjMat(1, p, 0, 1), p))
print("pair with z -> -z:", bt.pair_type(M, bt.ProjMat(1, 0, 0, -1), p).kind)
