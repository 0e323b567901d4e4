"""Named free theories: a coefficient ring together with its formal group law,
plus the total operations used by the Riemann-Roch and descent checks."""
from __future__ import annotations

from dataclasses import dataclass, field

from .bp import PTypicalContext, get_context, lazard_log, top_index
from .errors import TruncationTooLow, UnsupportedTheory
from .fgl import X1, FGLMorphism, FormalGroupLaw, fgl_from_logarithm, reorient, solve_phi
from .rings import CoefRing, RingMap, canonical_map, lazard_rational_ring, make_theory_ring, _parse_theory_spec
from .series import GradedSeries, map_coefficients, revert


@dataclass
class Theory:
    name: str
    ring: CoefRing
    fgl: FormalGroupLaw
    p: int | None = None
    level: int | None = None
    ctx: PTypicalContext | None = field(default=None, repr=False)

    @property
    def trunc(self) -> int:
        return self.fgl.trunc

    @property
    def kind(self) -> str:
        return self.ring.kind

    @property
    def is_fp_finite(self) -> bool:
        """Graded pieces finite over F_p (so numerical kernels are computable)."""
        return self.kind in ("chow-mod", "k(m)")

    def label(self) -> str:
        return self.name


def make_theory(spec: str, p: int | None = None, trunc: int = 10, m: int | None = None,
                r: int | None = None) -> Theory:
    """Theory by name (as used on the command line) with its FGL materialized to ``trunc``."""
    name, p, m, r = _parse_theory_spec(spec, p, m, r)
    if name == "additive":
        ring = make_theory_ring("additive")
        return Theory("additive", ring, FormalGroupLaw.additive(ring, trunc))
    if name == "multiplicative":
        ring = make_theory_ring("multiplicative")
        return Theory("multiplicative", ring, FormalGroupLaw.multiplicative(ring, trunc))
    if name == "lazard-rational":
        ring = lazard_rational_ring(max(trunc - 1, 0))
        F = fgl_from_logarithm(lazard_log(trunc, ring), {"law": "universal"}, "lazard-q")
        return Theory("lazard-q", ring, F)
    if name == "chow-mod-p":
        ring = make_theory_ring("chow-mod-p", p)
        return Theory(f"chow-mod:{p}", ring, FormalGroupLaw.additive(ring, trunc), p=p)
    if p is None:
        raise UnsupportedTheory(f"{spec} needs a prime")
    ctx = get_context(p, max(trunc, 1))
    upto = max(ctx.k, m or 0, 1)
    if name == "bp":
        ring = ctx.bp
        label = "bp"
    elif name == "bp-mod-p^r":
        ring = make_theory_ring(name, p, upto=ctx.k, r=r)
        label = f"bpmod:{r}"
    else:
        ring = make_theory_ring(name, p, upto=upto, m=m)
        label = {"p(m)": "p", "p-brace(m)": "pbrace", "k(m)": "k"}[name] + f":{m}"
    F = ctx.fgl_bp if ring == ctx.bp else ctx.fgl_bp.map_coefficients(canonical_map(ctx.bp, ring))
    return Theory(label, ring, F, p=p, level=m if m is not None else r, ctx=ctx)


def theory_from_fgl(F: FormalGroupLaw, name: str = "custom") -> Theory:
    return Theory(name, F.ring, F)


# ---------------------------------------------------------------------------
# operations


def t_ring(ring: CoefRing, p: int, k: int) -> CoefRing:
    return ring.extend(tuple((f"t{i}", p**i - 1) for i in range(1, k + 1)), kind=ring.kind + "[t]")


def total_operation(T: Theory, degree_bound: int) -> FGLMorphism:
    """Total Landweber-Novikov (or Steenrod-type, for mod-p Chow) operation ``T -> T[t]``."""
    if T.p is None:
        raise UnsupportedTheory(f"no total operation for {T.name}")
    p = T.p
    need = max(T.trunc, degree_bound + 1)
    if T.kind == "chow-mod":
        k = top_index(p, degree_bound + 1)
        R = t_ring(T.ring, p, k)
        x = GradedSeries.gen(R, X1, T.trunc, "x")
        ginv = x
        for i in range(1, k + 1):
            ginv = ginv + (x ** (p**i)).scale(R.gen(f"t{i}"))
        inc = RingMap(T.ring, R, {}, base_map="inclusion")
        return FGLMorphism(inc, revert(ginv), T.fgl, FormalGroupLaw.additive(R, T.trunc),
                           {"kind": "total-steenrod", "p": p})
    ctx = T.ctx
    if ctx is None or ctx.trunc < need:
        raise TruncationTooLow(f"theory {T.name} must be built with trunc >= {need}")
    if T.kind == "k(m)":
        raise UnsupportedTheory("operations on K(m) are taken through P{m} lifts")
    R = t_ring(T.ring, p, ctx.k)
    h = canonical_map(ctx.bpt, R)
    images = {g: h(img) for g, img in ctx.phi_table.items()}
    phi = RingMap(T.ring, R, images, name=f"S^Tot on {T.name}")
    gamma = map_coefficients(ctx.gamma, h).with_trunc(T.trunc)
    FB = T.fgl.map_coefficients(RingMap(T.ring, R, {g: R.gen(g) for g in T.ring.names}, base_map="inclusion"))
    return FGLMorphism(phi, gamma, T.fgl, FB, {"kind": "total-landweber-novikov", "p": p,
                                                "generators": "hazewinkel"})


def generic_stable_operation(trunc: int, nb: int | None = None):
    """The universal stable operation on rational cobordism, ``gamma = x + b_1 x^2 + ... + b_nb x^{nb+1}``.

    Returns ``(A, B, G)``: source theory over ``Q[m]``, target over ``Q[m, b]``
    and the morphism whose phi is solved from the logarithms.
    """
    nb = trunc - 1 if nb is None else nb
    A = make_theory("lazard-q", trunc=trunc)
    RB = A.ring.extend(tuple((f"b{i}", i) for i in range(1, nb + 1)), kind="lazard-q[b]")
    gamma = operation_gamma(RB, trunc, {i: RB.gen(f"b{i}") for i in range(1, nb + 1)})
    return morphism_from_gamma(A, RB, gamma)


def operation_gamma(R: CoefRing, trunc: int, coeffs: dict) -> GradedSeries:
    terms = {(1,): R.one}
    for i, c in coeffs.items():
        terms[(i + 1,)] = c
    return GradedSeries(R, X1, trunc, terms)


def morphism_from_gamma(A: Theory, RB: CoefRing, gamma: GradedSeries):
    """Operation out of A with the given gamma over ``RB`` (an extension of A's ring).

    Rational universal sources get phi from the logarithms; every other source is
    reoriented: the target keeps A's law, the source becomes ``gamma(F(gamma^-1 x, gamma^-1 y))``
    and phi is the identity.
    """
    inc = RingMap(A.ring, RB, {g: RB.gen(g) for g in A.ring.names}, base_map="inclusion")
    if A.name == "lazard-q":
        logA = lazard_log(A.trunc, A.ring)
        logB = map_coefficients(logA, inc)
        phi = solve_phi(logA, gamma, logB)
        FB = A.fgl.map_coefficients(inc)
        G = FGLMorphism(phi, gamma, A.fgl, FB, {"kind": "solved"})
        return A, Theory(A.name + "[b]", RB, FB), G
    FB = A.fgl.map_coefficients(inc)
    FA = reorient(FB, gamma)
    idB = RingMap(RB, RB, {g: RB.gen(g) for g in RB.names}, name="id")
    src = Theory(A.name + "[b]~", RB, FA, p=A.p)
    tgt = Theory(A.name + "[b]", RB, FB, p=A.p)
    return src, tgt, FGLMorphism(idB, gamma, FA, FB, {"kind": "reoriented"})
