"""The p-typical tower: Mischenko logarithm, Hazewinkel generators, the total
Landweber-Novikov operation on BP, invariant ideals and p-series.

Everything is computed rationally over ``Q[m_1, ..., m_k]`` (``m_i`` the
coefficient of ``x^{p^i}`` in the logarithm) and then pushed into
``Z_(p)[v_1, ..., v_k]``; the push raises ``IntegralityFailure`` on any
denominator divisible by p.
"""
from __future__ import annotations

import json
import math
import os
from fractions import Fraction
from itertools import product
from pathlib import Path

from .errors import DanglingGenerator, FGLCalcError, IntegralityFailure, TruncationTooLow
from .fgl import X1, FGLMorphism, FormalGroupLaw, fgl_from_logarithm, formal_sum, n_series, solve_phi
from .rings import (
    CoefElement,
    CoefRing,
    InvariantIdeal,
    RingMap,
    bp_rational_ring,
    canonical_map,
    check_prime,
    ideal_membership,
    landweber_ideal,
    lazard_rational_ring,
    make_theory_ring,
    p_power_ideal,
    ptypical_log_ring,
)
from .series import GradedSeries, compose, map_coefficients, revert

FORMAT_VERSION = 1
GENERATOR_CHOICE = "hazewinkel"


def top_index(p: int, trunc: int) -> int:
    """Largest i with p^i <= trunc (0 if none)."""
    k = 0
    while p ** (k + 1) <= trunc:
        k += 1
    return k


def mischenko_log(p: int, trunc: int, ring: CoefRing | None = None) -> GradedSeries:
    """``x + sum_i m_i x^{p^i}`` for ``p^i <= trunc``."""
    check_prime(p)
    k = top_index(p, trunc)
    ring = ring or ptypical_log_ring(p, k)
    terms = {(1,): ring.one}
    for i in range(1, k + 1):
        terms[(p**i,)] = ring.gen(f"m{i}")
    return GradedSeries(ring, X1, trunc, terms)


# ---------------------------------------------------------------------------
# Lazard side: generic logarithm, p-typification


def lazard_log(trunc: int, ring: CoefRing | None = None) -> GradedSeries:
    """Generic logarithm ``x + sum_n m_n x^{n+1}`` over ``Q[m_1..m_{trunc-1}]``."""
    ring = ring or lazard_rational_ring(max(trunc - 1, 0))
    terms = {(1,): ring.one}
    for n in range(1, trunc):
        terms[(n + 1,)] = ring.gen(f"m{n}")
    return GradedSeries(ring, X1, trunc, terms)


def projective_class_lazard(ring: CoefRing, n: int) -> CoefElement:
    """``[P^n] = (n+1) m_n`` in the rational Lazard ring."""
    return ring.one if n == 0 else ring.gen(f"m{n}") * (n + 1)


def _is_p_power_minus_one(n: int, p: int) -> bool:
    q = n + 1
    while q % p == 0:
        q //= p
    return q == 1 and n > 0


def rho(ring: CoefRing, p: int) -> RingMap:
    """p-typification on ``Q[m_1..m_N]``: keep ``m_n`` when n+1 is a power of p, kill it otherwise."""
    check_prime(p)
    images = {}
    for g, d in ring.generators:
        images[g] = ring.gen(g) if _is_p_power_minus_one(d, p) else ring.zero
    return RingMap(ring, ring, images, name=f"rho_{p}")


def p_typify(e, p: int):
    """Apply rho to an element or to every coefficient of a series."""
    if isinstance(e, CoefElement):
        return rho(e.ring, p)(e)
    if isinstance(e, GradedSeries):
        return map_coefficients(e, rho(e.ring, p))
    raise TypeError(f"cannot p-typify {type(e).__name__}")


def mu(lazard: CoefRing, p: int, target: CoefRing | None = None) -> RingMap:
    """Lazard-rational ring onto the p-typical log ring: ``m_{p^i-1} -> m_i``, others -> 0."""
    top = max((d for _, d in lazard.generators), default=0)
    target = target or ptypical_log_ring(p, top_index(p, top + 1))
    images = {}
    for g, d in lazard.generators:
        if _is_p_power_minus_one(d, p):
            i = round(math.log(d + 1, p))
            images[g] = target.gen(f"m{i}")
        else:
            images[g] = target.zero
    return RingMap(lazard, target, images, name=f"mu_{p}")


# ---------------------------------------------------------------------------
# Hazewinkel generators


def hazewinkel(p: int, upto: int, mring: CoefRing | None = None, vring: CoefRing | None = None):
    """Return ``(v_in_m, m_in_v)``: dicts ``n -> element`` for n = 1..upto.

    ``v_n = p m_n - sum_{1<=i<n} m_i v_{n-i}^{p^i}`` over ``Q[m]`` and the inverse
    ``m_n = (1/p) sum_{0<=i<n} m_i v_{n-i}^{p^i}`` over ``Q[v]``.
    """
    check_prime(p)
    mring = mring or ptypical_log_ring(p, upto)
    vring = vring or bp_rational_ring(p, upto)
    v_in_m: dict = {}
    for n in range(1, upto + 1):
        e = mring.gen(f"m{n}") * p
        for i in range(1, n):
            e = e - mring.gen(f"m{i}") * v_in_m[n - i] ** (p**i)
        v_in_m[n] = e
    m_in_v: dict = {0: vring.one}
    for n in range(1, upto + 1):
        e = vring.zero
        for i in range(n):
            e = e + m_in_v[i] * vring.gen(f"v{n - i}") ** (p**i)
        m_in_v[n] = e * Fraction(1, p)
    del m_in_v[0]
    for n, e in v_in_m.items():
        for c in e.terms.values():
            if Fraction(c).denominator % p == 0:
                raise IntegralityFailure(f"v{n} has a non-{p}-local coefficient")
    return v_in_m, m_in_v


# ---------------------------------------------------------------------------
# the context


class PTypicalContext:
    """Materialized p-typical data for a given ``(p, trunc)``.

    ``k`` generators are materialized, ``p^k <= trunc``; ``degree = trunc - 1``
    bounds the dimensions for which operation coefficients are trusted.
    """

    def __init__(self, p: int, trunc: int):
        self.p = check_prime(p)
        if trunc < 1:
            raise TruncationTooLow("trunc must be >= 1")
        self.trunc = trunc
        self.k = top_index(p, trunc)
        k = self.k
        self.mring = ptypical_log_ring(p, k)
        self.vring_q = bp_rational_ring(p, k)
        self.bp = make_theory_ring("bp", p, upto=k)
        tgens = tuple((f"t{i}", p**i - 1) for i in range(1, k + 1))
        self.tgens = tgens
        self.mt = self.mring.extend(tgens, kind="bp-log[t]")
        self.vt_q = self.vring_q.extend(tgens, kind="bp-q[t]")
        self.bpt = self.bp.extend(tgens, kind="bp[t]")
        self.v_in_m, self.m_in_v = hazewinkel(p, k, self.mring, self.vring_q)
        self.m_to_v = RingMap(self.mring, self.vring_q, {f"m{n}": e for n, e in self.m_in_v.items()},
                              name="m->v")
        self.v_to_m = RingMap(self.vring_q, self.mring, {f"v{n}": e for n, e in self.v_in_m.items()},
                              name="v->m")
        self.q_to_bp = RingMap(self.vring_q, self.bp, {g: self.bp.gen(g) for g in self.vring_q.names},
                               base_map="localization", name="Q[v]->Z_(p)[v]")
        self.log = mischenko_log(p, trunc, self.mring)
        self._fgl_m = None
        self._fgl_bp = None
        self._phi_table = None
        self._gamma_bp = None
        self._gamma_inv_bp = None
        self._phi_m = None

    @property
    def degree(self) -> int:
        return self.trunc - 1

    # -- FGLs -----------------------------------------------------------------
    @property
    def fgl_m(self) -> FormalGroupLaw:
        """Universal p-typical law over ``Q[m]``."""
        if self._fgl_m is None:
            self._fgl_m = fgl_from_logarithm(self.log, self.provenance(), "universal-p-typical")
        return self._fgl_m

    @property
    def fgl_bp(self) -> FormalGroupLaw:
        """The same law written over ``Z_(p)[v]`` (p-locality asserted)."""
        if self._fgl_bp is None:
            Fv = map_coefficients(self.fgl_m.F, self.m_to_v)
            self._fgl_bp = FormalGroupLaw(map_coefficients(Fv, self.q_to_bp), self.provenance(), "bp")
        return self._fgl_bp

    def provenance(self) -> dict:
        return {"generators": GENERATOR_CHOICE, "p": self.p, "trunc": self.trunc}

    # -- the total operation ----------------------------------------------
    def _ext(self, h: RingMap, source: CoefRing, target: CoefRing) -> RingMap:
        images = {g: target.gen(g) for g, _ in self.tgens}
        for g, img in h.images.items():
            images[g] = RingMap(h.target, target, {n: target.gen(n) for n in h.target.names},
                                base_map="inclusion")(img)
        return RingMap(source, target, images, base_map=h.base_map)

    def _build_total(self):
        p, k, T = self.p, self.k, self.trunc
        MT = self.mt
        inc = RingMap(self.mring, MT, {g: MT.gen(g) for g in self.mring.names}, base_map="inclusion")
        F = self.fgl_m.map_coefficients(inc)
        x = GradedSeries.gen(MT, X1, T, "x")
        ginv = x
        for i in range(1, k + 1):
            ginv = formal_sum(F, ginv, (x ** (p**i)).scale(MT.gen(f"t{i}")))
        gamma = revert(ginv)
        logB = map_coefficients(self.log, inc)
        self._phi_m = solve_phi(self.log, gamma, logB)
        mt_to_vt = self._ext(self.m_to_v, MT, self.vt_q)
        vt_to_bpt = RingMap(self.vt_q, self.bpt, {g: self.bpt.gen(g) for g in self.vt_q.names},
                            base_map="localization")
        table = {}
        for n, vm in self.v_in_m.items():
            img = vt_to_bpt(mt_to_vt(self._phi_m(vm)))
            table[f"v{n}"] = img
        self._phi_table = table
        self._gamma_bp = map_coefficients(map_coefficients(gamma, mt_to_vt), vt_to_bpt)
        self._gamma_inv_bp = map_coefficients(map_coefficients(ginv, mt_to_vt), vt_to_bpt)

    @property
    def phi_m(self) -> RingMap:
        """``phi`` of the total operation on ``Q[m] -> Q[m, t]``."""
        if self._phi_m is None:
            self._build_total()
        return self._phi_m

    @property
    def phi_table(self) -> dict:
        if self._phi_table is None:
            self._build_total()
        return self._phi_table

    @property
    def phi(self) -> RingMap:
        """``phi: Z_(p)[v] -> Z_(p)[v, t]``."""
        return RingMap(self.bp, self.bpt, self.phi_table, name="S^Tot")

    @property
    def gamma(self) -> GradedSeries:
        if self._gamma_bp is None:
            self._build_total()
        return self._gamma_bp

    @property
    def gamma_inverse(self) -> GradedSeries:
        if self._gamma_inv_bp is None:
            self._build_total()
        return self._gamma_inv_bp

    # -- serialization -------------------------------------------------------
    def to_json(self) -> dict:
        return {
            "format_version": FORMAT_VERSION,
            "generators": GENERATOR_CHOICE,
            "p": self.p,
            "trunc": self.trunc,
            "log": self.log.to_json(),
            "v_table": {f"v{n}": e.to_json() for n, e in sorted(self.v_in_m.items())},
            "m_table": {f"m{n}": e.to_json() for n, e in sorted(self.m_in_v.items())},
            "F": self.fgl_bp.F.to_json(),
            "phi_table": {g: e.to_json() for g, e in sorted(self.phi_table.items())},
            "gamma": self.gamma.to_json(),
            "gamma_inverse": self.gamma_inverse.to_json(),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "PTypicalContext":
        if obj.get("format_version") != FORMAT_VERSION or obj.get("generators") != GENERATOR_CHOICE:
            raise FGLCalcError("cache entry has an incompatible format")
        ctx = cls(obj["p"], obj["trunc"])
        ctx._fgl_bp = FormalGroupLaw(GradedSeries.from_json(ctx.bp, obj["F"]), ctx.provenance(), "bp")
        ctx._phi_table = {g: CoefElement.from_json(ctx.bpt, e) for g, e in obj["phi_table"].items()}
        ctx._gamma_bp = GradedSeries.from_json(ctx.bpt, obj["gamma"])
        ctx._gamma_inv_bp = GradedSeries.from_json(ctx.bpt, obj["gamma_inverse"])
        return ctx


_MEMO: dict = {}
CACHE_DIR: str | None = None


def cache_path(cache_dir, p: int, trunc: int) -> Path:
    return Path(cache_dir) / f"ptypical-p{p}-t{trunc}-v{FORMAT_VERSION}.json"


def get_context(p: int, trunc: int, cache_dir: str | None = None) -> PTypicalContext:
    """Memoized context; reads/writes a JSON cache when a directory is given (or FGLCALC_CACHE is set)."""
    check_prime(p)
    key = (p, trunc)
    if key in _MEMO:
        return _MEMO[key]
    cache_dir = cache_dir or CACHE_DIR or os.environ.get("FGLCALC_CACHE")
    ctx = None
    if cache_dir:
        path = cache_path(cache_dir, p, trunc)
        if path.exists():
            try:
                ctx = PTypicalContext.from_json(json.loads(path.read_text()))
            except (FGLCalcError, KeyError, ValueError):
                ctx = None
        if ctx is None:
            ctx = PTypicalContext(p, trunc)
            path.parent.mkdir(parents=True, exist_ok=True)
            tmp = path.with_suffix(".tmp")
            tmp.write_text(json.dumps(ctx.to_json(), sort_keys=True))
            tmp.replace(path)
    else:
        ctx = PTypicalContext(p, trunc)
    _MEMO[key] = ctx
    return ctx


# ---------------------------------------------------------------------------
# operations


def total_ln_bp(p: int, trunc: int, ctx: PTypicalContext | None = None) -> FGLMorphism:
    """Total Landweber-Novikov operation ``BP -> BP[t]`` as an FGL morphism."""
    ctx = ctx or get_context(p, trunc)
    F = ctx.fgl_bp
    inc = RingMap(ctx.bp, ctx.bpt, {g: ctx.bpt.gen(g) for g in ctx.bp.names}, base_map="inclusion")
    FB = F.map_coefficients(inc)
    return FGLMorphism(ctx.phi, ctx.gamma, F, FB, {"kind": "total-landweber-novikov", **ctx.provenance()})


def split_t(e: CoefElement, ctx: PTypicalContext) -> dict:
    """Decompose an element of ``Z_(p)[v, t]`` as ``{t-exponents: element of Z_(p)[v]}``."""
    nv = ctx.bp.ngens
    out: dict = {}
    for key, c in e.terms.items():
        r = key[nv:]
        out.setdefault(r, {})[key[:nv]] = c
    return {r: CoefElement(ctx.bp, terms, _trusted=True) for r, terms in out.items()}


def t_dim(r: tuple, p: int) -> int:
    return sum(e * (p ** (i + 1) - 1) for i, e in enumerate(r))


def individual_ln(r, target: CoefElement, ctx: PTypicalContext) -> CoefElement:
    """Coefficient of ``t^r`` in the total operation applied to ``target``."""
    r = tuple(r) + (0,) * (ctx.k - len(r))
    if len(r) > ctx.k and any(r[ctx.k:]):
        raise TruncationTooLow(f"t-monomial {r} uses t_i beyond the materialized t_{ctx.k}")
    r = r[: ctx.k]
    d = t_dim(r, ctx.p)
    if not target.is_zero():
        if max(target.dims()) + d > ctx.degree:
            raise TruncationTooLow(f"|r| + dim = {max(target.dims()) + d} exceeds materialized degree {ctx.degree}")
    elif d > ctx.degree:
        raise TruncationTooLow(f"|r| = {d} exceeds materialized degree {ctx.degree}")
    return split_t(ctx.phi(target), ctx).get(r, ctx.bp.zero)


def t_monomials(p: int, k: int, max_dim: int):
    """All t-exponent vectors (length k) with ``t_dim <= max_dim``, in a fixed order."""
    dims = [p ** (i + 1) - 1 for i in range(k)]
    ranges = [range(max_dim // d + 1) for d in dims]
    out = [r for r in product(*ranges) if sum(e * d for e, d in zip(r, dims)) <= max_dim]
    return sorted(out, key=lambda r: (t_dim(r, p), r))


def v_monomials(p: int, k: int, max_dim: int):
    return t_monomials(p, k, max_dim)


def check_ideal_invariance(p: int, ideal, degree_bound: int, include_multiples: bool = False,
                           ctx: PTypicalContext | None = None):
    """Every individual operation of every ideal generator (optionally times v-monomials) stays in the ideal.

    ``ideal`` is an ``InvariantIdeal`` or an integer m meaning ``I(m)``.
    """
    from .report import VerificationReport

    J = landweber_ideal(p, ideal) if isinstance(ideal, int) else ideal
    ctx = ctx or get_context(p, degree_bound + 1)
    if ctx.degree < degree_bound:
        raise TruncationTooLow(f"context degree {ctx.degree} < {degree_bound}")
    rep = VerificationReport(f"ideal-invariance {J}", {"p": p, "degree_bound": degree_bound,
                                                       "generators": GENERATOR_CHOICE})
    phi = ctx.phi
    bp = ctx.bp
    elements = []
    for g in J.generators:
        if not g.startswith("p") and not bp.has_generator(g):
            raise DanglingGenerator(f"{g} is not materialized at degree {degree_bound}")
        base = J.element(g, bp)
        gd = base.dimension or 0
        if include_multiples:
            for a in v_monomials(p, ctx.k, degree_bound - gd):
                mono = bp.element({tuple(a): 1})
                elements.append((g if not any(a) else f"{g}*{_mono_str(a, 'v')}", base * mono))
        else:
            elements.append((g, base))
    for label, e in elements:
        img = split_t(phi(e), ctx)
        ed = e.dimension or 0
        for r in t_monomials(p, ctx.k, degree_bound - ed):
            val = img.get(r, bp.zero)
            ok = ideal_membership(val, J)
            rep.add(f"S[{_mono_str(r, 't')}]({label})", {"r": list(r), "element": str(e)},
                    "pass" if ok else "fail", {"value": str(val)})
    return rep


def _mono_str(r, letter: str) -> str:
    parts = [f"{letter}{i + 1}" + (f"^{e}" if e > 1 else "") for i, e in enumerate(r) if e]
    return "*".join(parts) or "1"


# ---------------------------------------------------------------------------
# p-series modulo invariant ideals


def quotient_theory(J: InvariantIdeal, ctx: PTypicalContext):
    """Ring and FGL for ``BP / J`` with J a power of p or a Landweber ideal."""
    p = ctx.p
    vgens = J.v_generators
    r = J.p_exponent
    if not vgens and r is not None:
        ring = make_theory_ring("bp-mod-p^r", p, upto=ctx.k, r=r)
    elif r == 1 and vgens == tuple(f"v{i}" for i in range(1, len(vgens) + 1)):
        ring = make_theory_ring("p(m)", p, upto=max(ctx.k, len(vgens) + 1), m=len(vgens) + 1)
    else:
        raise FGLCalcError(f"quotients by {J} are not supported")
    h = canonical_map(ctx.bp, ring)
    return ring, ctx.fgl_bp.map_coefficients(h)


def p_series_mod(J: InvariantIdeal, k: int, ctx: PTypicalContext) -> GradedSeries:
    """``[p^k]`` over ``BP/J`` as the k-fold composite of ``[p]``."""
    _, F = quotient_theory(J, ctx)
    base = n_series(F, ctx.p)
    out = F.univariate()
    for _ in range(k):
        out = compose(base, {"x": out})
    return out


def verify_mtl0(p: int, r: int, m_max: int, trunc: int | None = None, ctx: PTypicalContext | None = None):
    """``[p^{rm}]`` mod ``p^r`` has no terms of degree below ``2^m``, for m = 1..m_max."""
    from .report import VerificationReport

    trunc = trunc if trunc is not None else 2**m_max
    ctx = ctx or get_context(p, trunc)
    rep = VerificationReport(f"mtl0 p={p} r={r}", {"p": p, "r": r, "m_max": m_max, "trunc": trunc,
                                                   "generators": GENERATOR_CHOICE})
    J = p_power_ideal(p, r)
    _, F = quotient_theory(J, ctx)
    base = n_series(F, p)
    cur = F.univariate()
    done = 0
    lows = []
    for m in range(1, m_max + 1):
        if trunc < 2**m:
            rep.skip(f"m={m}", {"m": m}, f"TruncationTooLow: trunc {trunc} < 2^{m}")
            lows.append(None)
            continue
        while done < r * m:
            cur = compose(base, {"x": cur})
            done += 1
        low = cur.lowest_degree()
        ok = low is None or low >= 2**m
        lows.append(low)
        rep.add(f"m={m}", {"m": m, "k": r * m}, "pass" if ok else "fail",
                {"lowest_degree": low, "bound": 2**m, "series": str(cur)})
    rep.meta["lowest_degrees"] = lows
    rep.meta["nilpotence"] = {str(d): r * math.ceil(math.log2(d)) for d in range(2, max(trunc, 2) + 1)}
    return rep
