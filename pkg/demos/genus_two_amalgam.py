"""Z/2 * Z/3 and the genus-2 curve it produces."""

from mumford import graphs, groups, quotients

#
g = graphs.segment(5, groups.cyclic(2), groups.cyclic(3))
print("graph:", g.to_json())
print("mu =", graphs.rat_str(graphs.volume(g)))  # 1 - 1/2 - 1/3

# genus from the index alone
print("genus via index 6:", graphs.genus_from_index(g, 6))

# and again from the cover over Z/2 x Z/3
q = quotients.product_quotient(g)
rep = quotients.check_gauss_bonnet(g, q)
print("cover:", rep.to_json()["cover"], "betti", rep.betti)
print("|Q| * mu == betti - 1 :", rep.holds)

# index 5 is not allowed, 1 + 5/6 is not an integer
try:
    graphs.genus_from_index(g, 5)
except graphs.NonIntegralGenus as exc:
    print("index 5:", exc)
