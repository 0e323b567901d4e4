"""
Formal group laws from logarithms
=================================

Build a few laws, check the axioms, look at n-series and morphisms.
Run with ``python demos/01_formal_group_laws.py``.
"""
from fractions import Fraction

from fglcalc import FormalGroupLaw, check_fgl_axioms, fgl_from_logarithm, logarithm, n_series, revert
from fglcalc.fgl import X1, FGLMorphism, compose_morphisms, invert_morphism, reorient
from fglcalc.rings import QQ, CoefRing, identity_map
from fglcalc.series import GradedSeries

Q = CoefRing(QQ)

# -log(1 - x) truncated at x^6 gives the multiplicative law
l = GradedSeries(Q, X1, 6, {(k,): Fraction(1, k) for k in range(1, 7)})
F = fgl_from_logarithm(l)
print("F(x, y)    =", F)
print("axioms     :", check_fgl_axioms(F).status())
print("[3](x)     =", n_series(F, 3))
print("[-1](x)    =", n_series(F, -1))

# logarithm back from the invariant differential
print("log        =", logarithm(F))

# compositional inverse
x = GradedSeries.gen(Q, X1, 5, "x")
print("revert(x + x^2) =", revert(x + x**2))

# a stable operation gamma = x + b1 x^2 reorients the law
R = CoefRing(QQ, (("b1", 1),))
xb = GradedSeries.gen(R, X1, 4, "x")
M = FormalGroupLaw.multiplicative(R, 4)
g = xb + R.gen("b1") * xb**2
G = FGLMorphism(identity_map(R), g, reorient(M, g), M)
print("source law =", G.source)
print("morphism equation holds:", G.check())

GG = compose_morphisms(G, FGLMorphism(identity_map(R), g, reorient(G.source, g), G.source))
print("gamma of G o G      =", GG.gamma)
print("gamma of G^-1       =", invert_morphism(G).gamma)
