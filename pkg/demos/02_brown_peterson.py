"""
The p-typical tower
===================

Mischenko logarithm, Hazewinkel generators, the total Landweber-Novikov
operation on BP, invariant ideals and p-series modulo p^r.
"""
from fglcalc.bp import check_ideal_invariance, get_context, p_series_mod, verify_mtl0
from fglcalc.rings import InvariantIdeal, landweber_ideal

ctx = get_context(2, 8)

print("log       =", ctx.log)
for n in range(1, ctx.k + 1):
    print(f"v{n}        =", ctx.v_in_m[n], "   (dim", ctx.v_in_m[n].dimension, ")")

F = ctx.fgl_bp
print("[P^1], [P^3] =", F.projective_class(1), ",", F.projective_class(3))

# phi of the total operation, t_i the operation parameters
for g, e in sorted(ctx.phi_table.items()):
    print(f"S(v{g[1:]})     =", e)
print("gamma^-1  =", ctx.gamma_inverse)

# I(2) = (2, v1) survives every operation; (v1) alone does not
ok = check_ideal_invariance(2, 2, 7, include_multiples=True)
print("I(2) invariant:", ok.passed, f"({len(ok.items)} operations checked)")
bad = check_ideal_invariance(2, InvariantIdeal(2, ("v1",)), 7)
print("(v1) counterexample:", bad.failures[0]["id"], "=", bad.failures[0]["witness"]["value"])

# [2](x) mod 2 starts at v1 x^2, and the k-fold composite starts at 2^k
print("[2] mod 2 =", p_series_mod(landweber_ideal(2, 1), 1, ctx))
rep = verify_mtl0(2, 1, 3, 8, ctx)
print("lowest degrees of [2^m] mod 2:", rep.meta["lowest_degrees"])
