"""The verification suite behind ``verify all``.

Each ``check_*`` function returns a ``VerificationReport`` for one family of
properties at explicit parameters; ``run_suite`` wires them together for a
prime and a truncation cap, skipping what the cap does not allow.
"""
from __future__ import annotations

import math
from itertools import combinations_with_replacement, product

from . import bp as bpmod
from .bp import PTypicalContext, get_context, lazard_log, p_typify, rho, top_index
from .cellular import (
    CohomologyRing,
    complete_intersection,
    descent_check,
    parse_space,
    riemann_roch_check,
)
from .errors import FGLCalcError, TruncationTooLow
from .fgl import check_fgl_axioms, fgl_from_logarithm, logarithm
from .report import VerificationReport
from .rings import InvariantIdeal, lazard_rational_ring
from .theories import generic_stable_operation, make_theory

RR_SPACES = ("P1", "P2", "P1xP1", "P3", "PB(P1;O,O(1))")
DESCENT_SPACES = ("P3", "P2xP1")


def check_axioms(p: int, trunc: int) -> VerificationReport:
    rep = VerificationReport("fgl-axioms", {"p": p, "trunc": trunc})
    ctx = get_context(p, trunc)
    for label, F in (("Q[m]", ctx.fgl_m), ("BP", ctx.fgl_bp)):
        ax = check_fgl_axioms(F)
        for name, res in sorted(ax.residuals.items()):
            rep.add(f"p={p}/{label}/{name}", {"p": p, "trunc": trunc}, "pass" if res.is_zero() else "fail",
                    {"residual_terms": len(res.terms)})
    return rep


def _exponents(s) -> list:
    return sorted(k[0] for k in s.terms)


def _is_p_power(n: int, p: int) -> bool:
    while n % p == 0:
        n //= p
    return n == 1


def check_ptypicality(p: int, trunc: int) -> VerificationReport:
    rep = VerificationReport("p-typicality", {"p": p, "trunc": trunc})
    ctx = get_context(p, trunc)
    exps = _exponents(ctx.log)
    expected = [p**i for i in range(ctx.k + 1)]
    rep.add(f"p={p}/mischenko-log", {"exponents": exps}, "pass" if exps == expected else "fail",
            {"expected": expected})
    L = lazard_rational_ring(trunc - 1)
    F = fgl_from_logarithm(lazard_log(trunc, L))
    Frho = F.map_coefficients(rho(L, p))
    lg = logarithm(Frho).with_trunc(trunc)
    exps = _exponents(lg)
    ok = all(_is_p_power(e, p) for e in exps)
    rep.add(f"p={p}/typified-universal-log", {"exponents": exps}, "pass" if ok else "fail", {"log": str(lg)})
    return rep


def check_rho_idempotent(p: int = 2, upto: int = 3, degree: int = 8) -> VerificationReport:
    rep = VerificationReport("rho-idempotence", {"p": p, "upto": upto, "degree": degree})
    L = lazard_rational_ring(upto)
    r = rho(L, p)
    count, bad = 0, []
    for key in product(*(range(degree // d + 1) for _, d in L.generators)):
        if L.key_dim(key) > degree:
            continue
        e = L.element({key: 1})
        once = r(e)
        if r(once) != once:
            bad.append(str(e))
        count += 1
    rep.add(f"p={p}/monomials", {"count": count}, "pass" if not bad else "fail", {"failures": bad})
    for n in range(1, upto + 1):
        P = L.gen(f"m{n}") * (n + 1)
        expect = P if _is_p_power(n + 1, p) else L.zero
        rep.add(f"p={p}/rho[P^{n}]", {"n": n}, "pass" if p_typify(P, p) == expect else "fail",
                {"value": str(p_typify(P, p))})
    return rep


def check_hazewinkel(p: int, upto: int, trunc: int | None = None) -> VerificationReport:
    trunc = trunc if trunc is not None else p**upto
    rep = VerificationReport("hazewinkel", {"p": p, "upto": upto})
    ctx = get_context(p, trunc)
    for n in range(1, upto + 1):
        if n > ctx.k:
            rep.skip(f"p={p}/v{n}", {"n": n}, f"TruncationTooLow: v{n} needs trunc >= {p**n}")
            continue
        vm = ctx.v_in_m[n]
        integral = all(_plocal(c, p) for c in vm.terms.values())
        back = ctx.v_to_m(ctx.m_in_v[n]) == ctx.mring.gen(f"m{n}")
        rep.add(f"p={p}/v{n}", {"n": n}, "pass" if integral and back else "fail",
                {"v_in_m": str(vm), "dim": vm.dimension, "expected_dim": p**n - 1})
        rep.add(f"p={p}/dim(v{n})", {"n": n}, "pass" if vm.dimension == p**n - 1 else "fail", {})
    if ctx.k >= 1:
        ok = ctx.v_in_m[1] == ctx.mring.gen("m1") * p
        rep.add(f"p={p}/v1=p*m1", {}, "pass" if ok else "fail", {"v1": str(ctx.v_in_m[1])})
    try:
        F = ctx.fgl_bp
        rep.add(f"p={p}/F-over-Z(p)[v]", {"trunc": trunc}, "pass", {"terms": len(F.F.terms)})
    except FGLCalcError as exc:
        rep.add(f"p={p}/F-over-Z(p)[v]", {"trunc": trunc}, "fail", {"error": str(exc)})
    return rep


def _plocal(c, p) -> bool:
    from fractions import Fraction
    return Fraction(c).denominator % p != 0


def check_invariance(p: int, degree: int, levels=(1, 2)) -> VerificationReport:
    rep = VerificationReport("ideal-invariance", {"p": p, "degree": degree})
    for m in levels:
        sub = bpmod.check_ideal_invariance(p, m, degree, include_multiples=True)
        rep.add(f"p={p}/I({m})", {"m": m, "checked": len(sub.items)}, "pass" if sub.passed else "fail",
                {"failures": sub.failures[:5]})
    neg = bpmod.check_ideal_invariance(p, InvariantIdeal(p, ("v1",)), degree)
    rep.add(f"p={p}/negative-control(v1)", {"checked": len(neg.items)},
            "pass" if neg.failures else "fail",
            {"counterexample": neg.failures[0]["id"] if neg.failures else None})
    return rep


def check_mtl0(p: int, rs=(1, 2), m_max: int = 3, trunc: int | None = None) -> VerificationReport:
    trunc = trunc if trunc is not None else 2**m_max
    rep = VerificationReport("mtl0", {"p": p, "m_max": m_max, "trunc": trunc})
    for r in rs:
        if trunc < 1:
            rep.skip(f"p={p}/r={r}", {"r": r}, "TruncationTooLow")
            continue
        sub = bpmod.verify_mtl0(p, r, m_max, trunc)
        rep.extend(sub, prefix=f"p={p}/r={r}/")
    return rep


def check_riemann_roch(trunc: int = 4, spaces=RR_SPACES, nb: int = 2) -> VerificationReport:
    rep = VerificationReport("riemann-roch", {"trunc": trunc, "gamma": "x + b1*x^2 + b2*x^3"})
    A, B, G = generic_stable_operation(trunc, nb)
    rep.add("morphism-equation", {}, "pass" if G.check() else "fail", {})
    for s in spaces:
        X = parse_space(s)
        if X.dim + max(X.rank, 1) > trunc:
            rep.skip(f"{s}", {"space": s}, f"TruncationTooLow: {s} needs trunc >= {X.dim + max(X.rank, 1)}")
            continue
        rep.extend(riemann_roch_check(X, G, A, B), prefix=f"{s}/")
    return rep


def check_descent(p: int = 2, degree: int = 6, spaces=DESCENT_SPACES, theories=None) -> VerificationReport:
    theories = theories or (f"chow-mod:{p}", "k:1")
    rep = VerificationReport("descent", {"p": p, "degree": degree})
    for s in spaces:
        for th in theories:
            rep.extend(descent_check(parse_space(s), th, p, degree), prefix=f"{s}/{th}/")
    return rep


def check_complete_intersections(n_max: int = 4, d_max: int = 4, primes=(2, 3)) -> VerificationReport:
    rep = VerificationReport("complete-intersections", {"n_max": n_max, "d_max": d_max})
    for n in range(1, n_max + 1):
        X = parse_space(f"P{n}")
        HZ = CohomologyRing(X, make_theory("additive", trunc=n + 1))
        for ds in combinations_with_replacement(range(1, d_max + 1), n):
            ci = complete_intersection(HZ, list(ds))
            want = math.prod(ds)
            rep.add(f"Z/P{n}/{ds}", {"degrees": list(ds)},
                    "pass" if ci.degree == want and not ci.numerically_trivial else "fail",
                    {"degree": str(ci.degree)})
        for p in primes:
            Hp = CohomologyRing(X, make_theory(f"chow-mod:{p}", trunc=n + 1))
            for k in range(1, n + 1):
                for ds in combinations_with_replacement(range(1, d_max + 1), k):
                    ci = complete_intersection(Hp, list(ds))
                    want = math.prod(ds) % p == 0
                    rep.add(f"F{p}/P{n}/{ds}", {"degrees": list(ds)},
                            "pass" if ci.numerically_trivial == want else "fail",
                            {"numerically_trivial": ci.numerically_trivial})
    return rep


# ---------------------------------------------------------------------------


def run_suite(p: int = 2, trunc: int = 8) -> VerificationReport:
    """All families at the given prime (plus 3 when p = 2), each capped by ``trunc``."""
    primes = [p] + ([3] if p == 2 else [])
    rep = VerificationReport("verify-all", {"p": p, "trunc": trunc, "generators": bpmod.GENERATOR_CHOICE})

    def guarded(cid, need, fn):
        if trunc < need:
            rep.skip(cid, {"needs_trunc": need}, f"TruncationTooLow: trunc {trunc} < {need}")
            return
        rep.extend(fn(), prefix=cid + "/")

    for q in primes:
        tq = min(trunc, 8 if q == 2 else 9)
        guarded(f"1-axioms/p={q}", 1, lambda: check_axioms(q, tq))
        guarded(f"2-ptypical/p={q}", 2, lambda: check_ptypicality(q, tq))
        guarded(f"4-hazewinkel/p={q}", q, lambda: check_hazewinkel(q, 3 if q == 2 else 2, tq))
        guarded(f"5-invariance/p={q}", q, lambda: check_invariance(q, min(trunc, 8)))
    guarded(f"3-rho/p={p}", 2, lambda: check_rho_idempotent(p, 3, min(trunc, 8)))
    if p == 2:
        guarded("6-mtl0", 2, lambda: check_mtl0(2, (1, 2), 3, min(trunc, 8)))
    else:
        guarded("6-mtl0", 2, lambda: check_mtl0(p, (1,), 2, min(trunc, 9)))
    guarded("7-riemann-roch", 2, lambda: check_riemann_roch(min(trunc, 4)))
    guarded("8-descent", 4, lambda: check_descent(p, min(6, trunc - 1)))
    guarded("9-complete-intersections", 2, lambda: check_complete_intersections(min(4, trunc - 1), 4, primes))
    return rep
