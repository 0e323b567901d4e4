"""
Push-forwards on cellular spaces
================================

Projective spaces, products and projective bundles of split bundles, with
coefficients in Chow mod p, BP and rational cobordism.
"""
from fglcalc.cellular import CohomologyRing, complete_intersection, numerical_kernel, parse_space
from fglcalc.theories import make_theory

X = parse_space("PB(P1;O,O(1))")   # the Hirzebruch surface F1
Ch = CohomologyRing(X, make_theory("additive", trunc=4))
print(Ch.presentation()["relations"])
x, xi = Ch.gen("x"), Ch.gen("xi")
print("deg x*xi, xi^2 :", Ch.pushforward(x * xi), Ch.pushforward(xi * xi))

# cobordism class of F1 and of P1 x P1 (same Chern numbers)
L = make_theory("lazard-q", trunc=5)
print("[F1]      =", CohomologyRing(X, L).pushforward(1))
print("[P1xP1]   =", CohomologyRing(parse_space("P1xP1"), L).pushforward(1))

BP = make_theory("bp", 2, trunc=5)
for n in (1, 2, 3):
    print(f"[P{n}]_BP  =", CohomologyRing(parse_space(f"P{n}"), BP).pushforward(1))

# mod 2 the pairing on P3 is perfect, so no numerical kernel
H = CohomologyRing(parse_space("P3"), make_theory("chow-mod:2", trunc=5))
print("kernels   :", [len(numerical_kernel(H, d)) for d in range(4)])

# a complete intersection of even degree is invisible mod 2, never over Z
print("(2,1) mod 2 trivial:", complete_intersection(H, [2, 1]).numerically_trivial)
HZ = CohomologyRing(parse_space("P3"), make_theory("additive", trunc=4))
print("(2,3,1) degree over Z:", complete_intersection(HZ, [2, 3, 1]).degree)
