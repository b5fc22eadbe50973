"""The curves (y^q - y)(x^q - x) = c for small q."""

from mumford import subrao
from mumford.fields import GF

for p, r in [(2, 1), (3, 1), (2, 2), (5, 1), (2, 3), (3, 2)]:
    rep = subrao.subrao_bound_report(p, r)
    b = rep.to_json()["bound_2g_minus_2"]
    print(f"q={rep.q:2d}  g={rep.genus:3d}  GB genus={rep.gauss_bonnet_genus:3d}  "
          f"q^2={b['lhs']:3d} vs 2(g-1)={b['rhs']:3d}  {'; '.join(rep.flags) or 'ok'}")

# x -> x + a only works for a in F_q
F = GF(2, 4)
t = F.gen()
print("a = t in F_16 on the q=4 curve:", subrao.verify_translation_automorphism(2, 2, t, F.zero()))
print("a = t^5 (in F_4):", subrao.verify_translation_automorphism(2, 2, t ** 5, F.zero()))

print()
print(subrao.subrao_bound_report(3, 2).table())
