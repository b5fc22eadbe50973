"""Smallest volumes and the curvature of single stars."""

from mumford import enumeration as en
from mumford.graphs import rat_str

params = en.EnumParams(5, 3, 12)
trees = list(en.enumerate_trees(params))
print(len(trees), "reduced admissible trees at p=5 with <= 3 vertices, orders <= 12")

mu, witnesses = en.min_positive_volume(params)
print("smallest positive volume", rat_str(mu), "from", [en.short_name(t) for t in witnesses])

# ratio 1/mu bounds |Aut| / (g-1); only Z2-Z3 beats 4
report = en.verify_main_bound(params)
print(report.to_json()["counts"], report.to_json()["exceptional"])

#
census = en.curvature_census(en.EnumParams(5, 7, 12, 6))
for value, stars in list(census.to_json()["buckets"].items())[:4]:
    print(f"c = {value:>5}:", ", ".join(stars))
