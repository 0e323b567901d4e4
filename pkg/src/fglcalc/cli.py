"""Command-line front end: ``fglcalc {fgl,bp,coh,verify} ...``.

Every command prints canonical JSON (sorted keys, no timestamps).  Exit codes:
0 success, 1 a verification failed, 2 usage or configuration error.
"""
from __future__ import annotations

import argparse
import sys

from . import bp as bpmod
from .cellular import (
    CohomologyRing,
    complete_intersection,
    descent_check,
    numerical_kernel,
    operation_on_class,
    pairing_matrix,
    parse_space,
    riemann_roch_check,
    todd_genus,
)
from .errors import FGLCalcError, NonPrime, TruncationTooLow
from .expr import evaluate, generator_dim, names
from .fgl import (
    X1,
    FGLMorphism,
    check_fgl_axioms,
    compose_morphisms,
    n_series,
    reorient,
)
from .report import VerificationReport, canonical_json
from .rings import QQ, CoefRing, RingMap, check_prime, identity_map, landweber_ideal, p_power_ideal
from .series import revert
from .theories import Theory, make_theory, morphism_from_gamma

DEFAULT_TRUNC = 10


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _common(sp, prime=True, trunc=True, theory=None):
    if prime:
        sp.add_argument("-p", "--prime", type=int, default=None)
    if trunc:
        sp.add_argument("--trunc", type=int, default=None)
    if theory is not None:
        sp.add_argument("--theory", default=theory)
    sp.add_argument("--out", default=None, help="write JSON here instead of stdout")
    sp.add_argument("--json", action="store_true", default=True, help="JSON output (the default)")
    sp.add_argument("--cache", default=None, help="cache directory (overrides FGLCALC_CACHE)")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="fglcalc", description="Formal group laws, BP operations and cellular intersection checks.")
    top = ap.add_subparsers(dest="group", required=True, parser_class=_Parser)

    fgl = top.add_parser("fgl").add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    s = fgl.add_parser("show"); _common(s, theory="multiplicative")
    s = fgl.add_parser("axioms"); _common(s, theory="multiplicative")
    s = fgl.add_parser("nseries"); _common(s, theory="additive"); s.add_argument("-n", type=int, required=True)
    s = fgl.add_parser("revert"); _common(s); s.add_argument("--series", required=True)
    s.add_argument("--theory", default=None, help="coefficient ring (default: Q)")
    s = fgl.add_parser("compose-morphisms"); _common(s, theory="additive")
    s.add_argument("--gamma", action="append", required=True,
                   help="gammas of the chain, outermost first (H then G gives H o G)")

    bp = top.add_parser("bp").add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    s = bp.add_parser("log"); _common(s)
    s = bp.add_parser("hazewinkel"); _common(s); s.add_argument("--upto", type=int, default=None)
    s = bp.add_parser("ln-total"); _common(s)
    s = bp.add_parser("invariance"); _common(s)
    s.add_argument("-m", type=int, default=None)
    s.add_argument("--ideal", default=None, help="comma-separated generators, e.g. v1 or p,v1")
    s.add_argument("--degree", type=int, default=8)
    s.add_argument("--multiples", action="store_true")
    s = bp.add_parser("mtl0"); _common(s)
    s.add_argument("-r", type=int, default=1); s.add_argument("--mmax", type=int, default=3)
    s = bp.add_parser("pseries"); _common(s)
    s.add_argument("-r", type=int, default=1); s.add_argument("-k", type=int, default=1)
    s.add_argument("-m", type=int, default=None, help="use I(m) instead of (p^r)")

    coh = top.add_parser("coh").add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    for name in ("ring", "pair", "kernel", "ci", "todd", "rr", "descent"):
        default = {"todd": "lazard-q", "rr": "lazard-q"}.get(name, "chow-mod:2")
        s = coh.add_parser(name); _common(s, theory=default)
        s.add_argument("--space", required=True)
        if name == "pair":
            s.add_argument("--u", required=True); s.add_argument("--v", required=True)
        if name == "kernel":
            s.add_argument("--codim", type=int, default=None)
        if name == "ci":
            s.add_argument("--degrees", required=True)
        if name in ("todd", "rr"):
            s.add_argument("--gamma", required=True)
        if name == "descent":
            s.add_argument("--degree", type=int, default=6)

    v = top.add_parser("verify").add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    s = v.add_parser("all"); _common(s)
    return ap


# ---------------------------------------------------------------------------
# helpers


def _prime(args, default=2) -> int:
    p = args.prime if args.prime is not None else default
    return check_prime(p)


def _trunc(args, default=DEFAULT_TRUNC) -> int:
    t = args.trunc if args.trunc is not None else default
    if t < 0:
        raise UsageError("--trunc must be >= 0")
    return t


def _theory(args, trunc: int) -> Theory:
    spec = args.theory
    p = args.prime
    low = spec.lower()
    if low.startswith(("p:", "pbrace:", "k:", "bpmod:")) or low in ("bp", "universal-p-typical"):
        p = check_prime(p if p is not None else 2)
    elif p is not None:
        check_prime(p)
    return make_theory(spec, p, trunc)


def _ring_with(base: CoefRing, text_names, p, series_vars=("x",)) -> CoefRing:
    extra = []
    for n in text_names:
        if n in series_vars or base.has_generator(n):
            continue
        extra.append((n, generator_dim(n, p)))
    return base.extend(tuple(extra)) if extra else base


# ---------------------------------------------------------------------------
# fgl


def cmd_fgl(args) -> tuple:
    trunc = _trunc(args)
    if args.cmd == "revert":
        base = _theory(args, trunc).ring if args.theory else CoefRing(QQ)
        R = _ring_with(base, names(args.series), args.prime)
        f = evaluate(args.series, R, X1, trunc)
        g = revert(f)
        return {"series": f.to_json(), "revert": g.to_json(), "text": str(g)}, True
    T = _theory(args, trunc)
    F = T.fgl
    if args.cmd == "show":
        return {"theory": T.name, "fgl": F.to_json(with_axioms=True), "text": str(F)}, True
    if args.cmd == "axioms":
        rep = check_fgl_axioms(F)
        return {"theory": T.name, "trunc": trunc, **rep.to_json()}, rep.passed
    if args.cmd == "nseries":
        s = n_series(F, args.n)
        return {"theory": T.name, "n": args.n, "series": s.to_json(), "text": str(s)}, True
    if args.cmd == "compose-morphisms":
        texts = args.gamma
        allnames = sorted({n for t in texts for n in names(t)})
        R = _ring_with(T.ring, allnames, T.p)
        inc = RingMap(T.ring, R, {g: R.gen(g) for g in T.ring.names}, base_map="inclusion")
        current = T.fgl.map_coefficients(inc)
        chain = []
        for t in texts:
            gamma = evaluate(t, R, X1, trunc)
            src = reorient(current, gamma)
            chain.append(FGLMorphism(identity_map(R), gamma, src, current, {"kind": "reoriented"}))
            current = src
        comp = chain[0]
        for G in chain[1:]:
            comp = compose_morphisms(comp, G)
        ok = comp.check()
        return {"gammas": texts, "composite": comp.to_json(), "text": str(comp.gamma),
                "morphism_equation": "pass" if ok else "fail"}, ok
    raise UsageError(args.cmd)


# ---------------------------------------------------------------------------
# bp


def cmd_bp(args) -> tuple:
    p = _prime(args)
    if args.cmd == "log":
        trunc = _trunc(args)
        s = bpmod.mischenko_log(p, trunc)
        return {"p": p, "trunc": trunc, "log": s.to_json(), "text": str(s), "generators": "hazewinkel"}, True
    if args.cmd == "hazewinkel":
        trunc = _trunc(args, p ** (args.upto or 3))
        ctx = bpmod.get_context(p, trunc, args.cache)
        upto = min(args.upto or ctx.k, ctx.k)
        if args.upto and args.upto > ctx.k:
            raise TruncationTooLow(f"v{args.upto} needs trunc >= {p ** args.upto}")
        table = {f"v{n}": {"in_m": ctx.v_in_m[n].to_json(), "text": str(ctx.v_in_m[n]),
                           "dim": p**n - 1, "m_in_v": str(ctx.m_in_v[n])} for n in range(1, upto + 1)}
        return {"p": p, "trunc": trunc, "generators": "hazewinkel", "table": table}, True
    if args.cmd == "ln-total":
        trunc = _trunc(args, 8)
        ctx = bpmod.get_context(p, trunc, args.cache)
        G = bpmod.total_ln_bp(p, trunc, ctx)
        phi = {g: {"value": e.to_json(), "text": str(e)} for g, e in sorted(ctx.phi_table.items())}
        return {"p": p, "trunc": trunc, "generators": "hazewinkel", "stable": G.stable,
                "gamma": {"series": G.gamma.to_json(), "text": str(G.gamma)},
                "gamma_inverse": str(ctx.gamma_inverse), "phi": phi}, True
    if args.cmd == "invariance":
        D = args.degree
        ctx = bpmod.get_context(p, D + 1, args.cache)
        if args.ideal:
            from .rings import InvariantIdeal
            J = InvariantIdeal(p, tuple(g.strip() for g in args.ideal.split(",")))
        else:
            J = landweber_ideal(p, args.m if args.m is not None else 1)
        rep = bpmod.check_ideal_invariance(p, J, D, include_multiples=args.multiples, ctx=ctx)
        return rep.to_json(), rep.passed
    if args.cmd == "mtl0":
        trunc = _trunc(args, 2**args.mmax)
        ctx = bpmod.get_context(p, max(trunc, 1), args.cache)
        rep = bpmod.verify_mtl0(p, args.r, args.mmax, trunc, ctx)
        return rep.to_json(), rep.passed
    if args.cmd == "pseries":
        trunc = _trunc(args, 8)
        ctx = bpmod.get_context(p, trunc, args.cache)
        J = landweber_ideal(p, args.m) if args.m else p_power_ideal(p, args.r)
        s = bpmod.p_series_mod(J, args.k, ctx)
        return {"p": p, "ideal": str(J), "k": args.k, "series": s.to_json(), "text": str(s),
                "lowest_degree": s.lowest_degree()}, True
    raise UsageError(args.cmd)


# ---------------------------------------------------------------------------
# coh


def _coh_ring(args, extra: int = 0):
    X = parse_space(args.space)
    trunc = max(_trunc(args, 0), X.dim + max(X.rank, 1) + extra)
    return X, trunc, CohomologyRing(X, _theory(args, trunc))


def _gamma_morphism(args, X):
    need = X.dim + max(X.rank, 1)
    trunc = max(_trunc(args, need), need)
    A = _theory(args, trunc)
    R = _ring_with(A.ring, names(args.gamma), A.p)
    gamma = evaluate(args.gamma, R, X1, trunc)
    return morphism_from_gamma(A, R, gamma)


def cmd_coh(args) -> tuple:
    if args.cmd == "ring":
        X, _, H = _coh_ring(args)
        return {"presentation": H.presentation()}, True
    if args.cmd == "pair":
        X, _, H = _coh_ring(args)
        u = H.cls(evaluate(args.u, H.ring, H.vars, H.trunc))
        v = H.cls(evaluate(args.v, H.ring, H.vars, H.trunc))
        val = H.pair(u, v)
        return {"space": str(X), "theory": H.theory.name, "u": str(u), "v": str(v), "pairing": str(val),
                "value": val.to_json()}, True
    if args.cmd == "kernel":
        X, _, H = _coh_ring(args)
        codims = [args.codim] if args.codim is not None else list(range(H.dim + 1))
        out = {}
        for d in codims:
            M = pairing_matrix(H, d)
            ker = numerical_kernel(H, d)
            out[str(d)] = {"pairing": M.to_json(), "kernel": [str(c) for c in ker]}
        return {"space": str(X), "theory": H.theory.name, "codims": out}, True
    if args.cmd == "ci":
        X, _, H = _coh_ring(args)
        degrees = [int(d) for d in args.degrees.split(",") if d.strip()]
        ci = complete_intersection(H, degrees)
        return {"space": str(X), "theory": H.theory.name, "degrees": degrees, "class": str(ci.cls),
                "degree": str(ci.degree), "numerically_trivial": ci.numerically_trivial}, True
    if args.cmd == "todd":
        X = parse_space(args.space)
        A, B, G = _gamma_morphism(args, X)
        HB = CohomologyRing(X, B)
        td = todd_genus(HB, G)
        return {"space": str(X), "gamma": args.gamma, "todd": str(td), "class": td.to_json()}, True
    if args.cmd == "rr":
        X = parse_space(args.space)
        A, B, G = _gamma_morphism(args, X)
        rep = riemann_roch_check(X, G, A, B)
        return rep.to_json(), rep.passed
    if args.cmd == "descent":
        X = parse_space(args.space)
        rep = descent_check(X, args.theory, _prime(args), args.degree)
        return rep.to_json(), rep.passed
    raise UsageError(args.cmd)


def cmd_verify_all(args) -> tuple:
    from .suite import run_suite

    p = _prime(args)
    rep = run_suite(p, _trunc(args, 8))
    return rep.to_json(), rep.passed


# ---------------------------------------------------------------------------


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    if getattr(args, "cache", None):
        bpmod.CACHE_DIR = args.cache
    handler = {"fgl": cmd_fgl, "bp": cmd_bp, "coh": cmd_coh, "verify": cmd_verify_all}[args.group]
    try:
        payload, ok = handler(args)
    except (UsageError, NonPrime) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except FGLCalcError as exc:
        print(canonical_json({"error": type(exc).__name__, "message": str(exc)}))
        return 2
    text = canonical_json(payload) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
