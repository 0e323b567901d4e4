"""
Riemann-Roch and descent of operations
======================================

A generic stable operation commutes with push-forwards once the Todd
correction is inserted.  Operations on K(1) and mod-2 Chow also send
numerically trivial classes to numerically trivial classes.
"""
from fglcalc.cellular import CohomologyRing, descent_check, parse_space, riemann_roch_check, todd_genus
from fglcalc.theories import generic_stable_operation

A, B, G = generic_stable_operation(4, 2)
print("gamma     =", G.gamma)

P1 = parse_space("P1")
print("Td(P1)    =", todd_genus(CohomologyRing(P1, B), G))

for s in ("P1", "P2", "P1xP1", "P3", "PB(P1;O,O(1))"):
    rep = riemann_roch_check(parse_space(s), G, A, B)
    print(f"RR {s:14s}", rep.counts())

for s in ("P3", "P2xP1"):
    for th in ("chow-mod:2", "k:1"):
        rep = descent_check(parse_space(s), th, 2, 6)
        print(f"descent {s:6s} {th:11s}", rep.counts())
