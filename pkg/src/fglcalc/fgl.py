"""Formal group laws, their morphisms ``(phi, gamma)`` and the basic calculus on them."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import (
    MixedContext,
    NonInvertiblePhi,
    NonUnitLeadingCoefficient,
    NotRationalBase,
    OverdeterminedSystem,
    SourceTargetMismatch,
)
from .rings import CoefElement, CoefRing, RingMap, identity_map
from .series import GradedSeries, Var, compose, map_coefficients, revert

XY = (Var("x"), Var("y"))
X1 = (Var("x"),)
XYZ = (Var("x"), Var("y"), Var("z"))


class FormalGroupLaw:
    """Truncated bivariate series ``F(x, y)`` over a coefficient ring."""

    def __init__(self, F: GradedSeries, meta: dict | None = None, name: str = ""):
        if F.vars != XY:
            raise MixedContext("an FGL lives in the variables (x, y)")
        self.F = F
        self.meta = dict(meta or {})
        self.name = name
        self._omega = None

    @property
    def ring(self) -> CoefRing:
        return self.F.ring

    @property
    def trunc(self) -> int:
        return self.F.trunc

    # -- standard laws ------------------------------------------------------
    @classmethod
    def additive(cls, ring: CoefRing, trunc: int) -> "FormalGroupLaw":
        x = GradedSeries.gen(ring, XY, trunc, "x")
        y = GradedSeries.gen(ring, XY, trunc, "y")
        return cls(x + y, {"law": "additive"}, "additive")

    @classmethod
    def multiplicative(cls, ring: CoefRing, trunc: int, beta=1) -> "FormalGroupLaw":
        """``x + y - beta*x*y``; beta defaults to 1."""
        x = GradedSeries.gen(ring, XY, trunc, "x")
        y = GradedSeries.gen(ring, XY, trunc, "y")
        return cls(x + y - (x * y).scale(beta), {"law": "multiplicative", "orientation": f"beta={beta}"},
                   "multiplicative")

    # -- derived ----------------------------------------------------------------
    def map_coefficients(self, h) -> "FormalGroupLaw":
        return FormalGroupLaw(map_coefficients(self.F, h), self.meta, self.name)

    def truncate(self, trunc: int) -> "FormalGroupLaw":
        return FormalGroupLaw(self.F.with_trunc(trunc), self.meta, self.name)

    def coefficient(self, i: int, j: int) -> CoefElement:
        return self.F.coefficient((i, j))

    def univariate(self, trunc: int | None = None) -> GradedSeries:
        """The identity series ``x`` in this FGL's univariate context."""
        return GradedSeries.gen(self.ring, X1, self.trunc if trunc is None else trunc, "x")

    def omega(self) -> GradedSeries:
        """Invariant differential ``1 / dF/dy(x, 0)``, univariate in x."""
        if self._omega is None:
            d = self.F.derivative("y")
            zero = GradedSeries.zero(self.ring, X1, d.trunc)
            at0 = compose(d, {"x": self.univariate(d.trunc), "y": zero})
            self._omega = at0.reciprocal()
        return self._omega

    def projective_class(self, n: int) -> CoefElement:
        """``[P^n]``: the coefficient of ``x^n`` in the invariant differential."""
        om = self.omega()
        if n > om.trunc:
            from .errors import TruncationTooLow
            raise TruncationTooLow(f"[P^{n}] needs FGL trunc >= {n + 1}")
        return om.coefficient((n,))

    def equals(self, other: "FormalGroupLaw") -> bool:
        if self.ring != other.ring:
            return False
        return self.F.equal_upto(other.F)

    def to_json(self, with_axioms: bool = False) -> dict:
        out = {
            "ring": self.ring.describe(),
            "F": self.F.to_json(),
            "trunc": self.trunc,
            "provenance": dict(sorted(self.meta.items())),
        }
        if with_axioms:
            out["axioms"] = check_fgl_axioms(self).status()
        return out

    def __str__(self):
        return str(self.F)

    def __repr__(self):
        return f"FormalGroupLaw({self.name or self.F}, trunc={self.trunc})"


def _embed(f: GradedSeries, var: str, vars=XY) -> GradedSeries:
    """Univariate ``f(x)`` re-expressed as ``f(var)`` in a bigger context."""
    return compose(f, {"x": GradedSeries.gen(f.ring, vars, f.trunc, var)})


def fgl_from_logarithm(l: GradedSeries, meta: dict | None = None, name: str = "") -> FormalGroupLaw:
    """``F(x, y) = l^{-1}(l(x) + l(y))``."""
    if l.ring.base.kind != "Q":
        raise NotRationalBase(f"logarithms need rational coefficients, got {l.ring}")
    if l.vars != X1:
        raise MixedContext("logarithm must be univariate in x")
    if l.coefficient((1,)) != l.ring.one or not l.constant_term().is_zero():
        raise NonUnitLeadingCoefficient("logarithm must start with x")
    inv = revert(l)
    s = _embed(l, "x") + _embed(l, "y")
    return FormalGroupLaw(compose(inv, {"x": s}), meta, name)


def logarithm(F: FormalGroupLaw) -> GradedSeries:
    """Recover ``l`` from ``l' = omega`` over a rational base."""
    if F.ring.base.kind != "Q":
        raise NotRationalBase("logarithm recovery needs a rational base")
    om = F.omega()
    terms = {(k + 1,): c * Fraction(1, k + 1) for (k,), c in om.terms.items()}
    return GradedSeries(F.ring, X1, om.trunc + 1, terms)


@dataclass
class AxiomReport:
    residuals: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(r.is_zero() for r in self.residuals.values())

    def status(self) -> dict:
        return {k: ("pass" if r.is_zero() else "fail") for k, r in sorted(self.residuals.items())}

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "axioms": self.status(),
            "residuals": {k: r.to_json() for k, r in sorted(self.residuals.items())},
        }


def check_fgl_axioms(F: FormalGroupLaw) -> AxiomReport:
    ring, T = F.ring, F.trunc
    x1 = F.univariate()
    z1 = GradedSeries.zero(ring, X1, T)
    rep = AxiomReport()
    rep.residuals["unit_left"] = compose(F.F, {"x": z1, "y": x1}) - x1
    rep.residuals["unit_right"] = compose(F.F, {"x": x1, "y": z1}) - x1
    x = GradedSeries.gen(ring, XY, T, "x")
    y = GradedSeries.gen(ring, XY, T, "y")
    rep.residuals["commutativity"] = F.F - compose(F.F, {"x": y, "y": x})
    X, Y, Z = (GradedSeries.gen(ring, XYZ, T, v) for v in "xyz")
    Fxy = compose(F.F, {"x": X, "y": Y})
    Fyz = compose(F.F, {"x": Y, "y": Z})
    left = compose(F.F, {"x": Fxy, "y": Z})
    right = compose(F.F, {"x": X, "y": Fyz})
    rep.residuals["associativity"] = left - right
    return rep


def formal_sum(F: FormalGroupLaw, a: GradedSeries, b: GradedSeries) -> GradedSeries:
    if a.ring != F.ring or b.ring != F.ring:
        raise MixedContext("formal sum arguments must live over the FGL's ring")
    return compose(F.F, {"x": a, "y": b})


def formal_inverse(F: FormalGroupLaw) -> GradedSeries:
    """``i(x)`` with ``F(x, i(x)) = 0``, solved degree by degree."""
    T = F.trunc
    x = F.univariate()
    terms = {(1,): -F.ring.one}
    for d in range(2, T + 1):
        i_d = GradedSeries(F.ring, X1, d, dict(terms), _trusted=True)
        c = compose(F.F.with_trunc(d), {"x": x.with_trunc(d), "y": i_d}).coefficient((d,))
        if not c.is_zero():
            terms[(d,)] = -c
    return GradedSeries(F.ring, X1, T, terms, _trusted=True)


def n_series(F: FormalGroupLaw, n: int) -> GradedSeries:
    """``[n]_F(x)`` by binary expansion of iterated formal sums."""
    x = F.univariate()
    if n < 0:
        return compose(n_series(F, -n), {"x": formal_inverse(F)})
    result = GradedSeries.zero(F.ring, X1, F.trunc)
    acc = x
    while n:
        if n & 1:
            result = formal_sum(F, result, acc)
        n >>= 1
        if n:
            acc = formal_sum(F, acc, acc)
    return result


def reorient(F: FormalGroupLaw, gamma: GradedSeries) -> FormalGroupLaw:
    """``gamma(F(gamma^{-1} x, gamma^{-1} y))``, the law for which ``(id, gamma)`` is a morphism into F."""
    ginv = revert(gamma)
    a = _embed(ginv, "x")
    b = _embed(ginv, "y")
    inner = compose(F.F, {"x": a, "y": b})
    meta = dict(F.meta, reoriented="yes")
    return FormalGroupLaw(compose(gamma, {"x": inner}), meta, f"reorient({F.name})")


# ---------------------------------------------------------------------------
# morphisms


class FGLMorphism:
    """``(phi, gamma): (A, F_A) -> (B, F_B)`` with ``phi(F_A)(gamma x, gamma y) = gamma(F_B(x, y))``."""

    def __init__(self, phi: RingMap, gamma: GradedSeries, source: FormalGroupLaw, target: FormalGroupLaw,
                 meta: dict | None = None):
        if phi.source != source.ring or phi.target != target.ring:
            raise SourceTargetMismatch("phi does not connect the source and target rings")
        if gamma.ring != target.ring or gamma.vars != X1:
            raise MixedContext("gamma must be univariate over the target ring")
        if not gamma.constant_term().is_zero():
            raise MixedContext("gamma must have zero constant term")
        self.phi = phi
        self.gamma = gamma
        self.source = source
        self.target = target
        self.meta = dict(meta or {})

    @property
    def leading(self) -> CoefElement:
        return self.gamma.coefficient((1,))

    @property
    def stable(self) -> bool:
        return self.leading == self.target.ring.one

    @property
    def invertible_type(self) -> bool:
        return self.leading.is_unit()

    @property
    def trunc(self) -> int:
        return min(self.gamma.trunc, self.source.trunc, self.target.trunc)

    def residual(self) -> GradedSeries:
        T = self.trunc
        B = self.target.ring
        FA = map_coefficients(self.source.F.with_trunc(T), self.phi)
        g = self.gamma.with_trunc(T)
        left = compose(FA, {"x": _embed(g, "x"), "y": _embed(g, "y")})
        right = compose(g, {"x": self.target.F.with_trunc(T)})
        if left.ring != B:
            raise MixedContext("phi(F_A) is not over the target ring")
        return left - right

    def check(self) -> bool:
        return self.residual().is_zero()

    def apply_phi(self, e):
        return self.phi(e)

    def equals(self, other: "FGLMorphism") -> bool:
        if self.phi.source != other.phi.source or self.phi.target != other.phi.target:
            return False
        if not self.gamma.equal_upto(other.gamma):
            return False
        A = self.phi.source
        return all(self.phi(A.gen(g)) == other.phi(A.gen(g)) for g in A.names if not A.is_killed(g))

    def to_json(self) -> dict:
        A = self.phi.source
        return {
            "phi": {g: self.phi(A.gen(g)).to_json() for g in A.names if not A.is_killed(g)},
            "gamma": self.gamma.to_json(),
            "stable": self.stable,
            "invertible_type": self.invertible_type,
            "source_ring": A.describe(),
            "target_ring": self.phi.target.describe(),
            "meta": dict(sorted(self.meta.items())),
        }


def identity_morphism(F: FormalGroupLaw) -> FGLMorphism:
    return FGLMorphism(identity_map(F.ring), F.univariate(), F, F, {"kind": "identity"})


def compose_morphisms(H: FGLMorphism, G: FGLMorphism) -> FGLMorphism:
    """``H o G = (phi_H o phi_G, phi_H(gamma_G)(gamma_H(x)))``."""
    if H.source.ring != G.target.ring or not H.source.equals(G.target):
        raise SourceTargetMismatch("H.source is not G.target")
    phi = H.phi.compose(G.phi)
    gG = map_coefficients(G.gamma, H.phi)
    gamma = compose(gG, {"x": H.gamma})
    return FGLMorphism(phi, gamma, G.source, H.target, {"kind": "composite"})


def invert_ring_map(phi: RingMap) -> RingMap:
    """Inverse of a triangular automorphism ``g -> u*g + (other generators)``."""
    R = phi.source
    if phi.target != R:
        raise NonInvertiblePhi("phi is not an endomorphism; no inverse on generators")
    live = [g for g in R.names if not R.is_killed(g)]
    lin, rest = {}, {}
    for g in live:
        img = phi(R.gen(g))
        k = R.key({g: 1})
        u = img.terms.get(k, 0)
        if not u or not R.base.is_unit(u):
            raise NonInvertiblePhi(f"phi({g}) has no unit multiple of {g}")
        r = img - R.gen(g) * u
        idx = R.index(g)
        if any(kk[idx] for kk in r.terms):
            raise NonInvertiblePhi(f"phi({g}) is not triangular in {g}")
        lin[g], rest[g] = u, r
    psi: dict = {}
    pending = list(live)
    while pending:
        progress = False
        for g in list(pending):
            used = {R.names[i] for kk in rest[g].terms for i, e in enumerate(kk) if e}
            if used <= set(psi):
                partial = RingMap(R, R, psi, check_dims=False)
                psi[g] = (R.gen(g) - partial(rest[g])) * R.base.inverse(lin[g])
                pending.remove(g)
                progress = True
        if not progress:
            raise NonInvertiblePhi("phi is not triangular on the materialized generators")
    inv = RingMap(R, R, psi, base_map=phi.base_map, name=f"{phi.name}^-1")
    for g in live:
        if phi(inv(R.gen(g))) != R.gen(g):
            raise NonInvertiblePhi(f"inverse check failed on {g}")
    return inv


def invert_morphism(G: FGLMorphism) -> FGLMorphism:
    """``(phi^{-1}, phi^{-1}(gamma^{-1}))``."""
    if not G.invertible_type:
        raise NonUnitLeadingCoefficient(f"gamma'(0) = {G.leading} is not a unit")
    psi = invert_ring_map(G.phi)
    gamma = map_coefficients(revert(G.gamma), psi)
    return FGLMorphism(psi, gamma, G.target, G.source, {"kind": "inverse"})


def solve_phi(logA: GradedSeries, gamma: GradedSeries, logB: GradedSeries, extra: dict | None = None) -> RingMap:
    """Ring map ``phi`` with ``phi(log_A)(gamma(x)) = gamma'(0) * log_B(x)``.

    Each coefficient of ``log_A`` must be a scalar or a scalar multiple of a
    single generator (the universal situation).  Generators of the source that
    do not occur in ``log_A`` are sent to ``extra[g]`` or, failing that, to the
    same-named generator of the target.
    """
    A, B = logA.ring, logB.ring
    if gamma.ring != B:
        raise MixedContext("gamma must be over the target ring of log_B")
    for r in (A, B):
        if r.base.kind != "Q":
            raise NotRationalBase("solve_phi works over rational coefficient rings")
    c = gamma.coefficient((1,))
    if not c.is_unit():
        raise NonUnitLeadingCoefficient(f"gamma'(0) = {c} is not a unit")
    T = min(logA.trunc, logB.trunc, gamma.trunc)
    rhs = compose(logB.with_trunc(T), {"x": revert(gamma.with_trunc(T))}).scale(c)
    images: dict = {}
    constraints = []
    for d in range(1, T + 1):
        a = logA.coefficient((d,))
        target = rhs.coefficient((d,))
        gens = [(k, s) for k, s in a.terms.items() if any(k)]
        if len(gens) == 1 and len(a.terms) == 1:
            (k, s), = gens
            if sum(k) != 1:
                raise OverdeterminedSystem(f"log_A coefficient {a} is not a single generator")
            g = A.names[k.index(1)]
            if g in images:
                constraints.append((d, a, target))
            else:
                images[g] = target * B.base.inverse(s)
        elif not gens:
            constraints.append((d, a, target))
        else:
            raise OverdeterminedSystem(f"log_A coefficient {a} mixes generators")
    for g in A.names:
        if g in images or A.is_killed(g):
            continue
        if extra and g in extra:
            images[g] = extra[g]
        elif B.has_generator(g):
            images[g] = B.gen(g)
    phi = RingMap(A, B, images, name="solved")
    for d, a, target in constraints:
        if phi(a) != target:
            raise OverdeterminedSystem(f"degree {d}: phi({a}) must equal {target}")
    check = compose(map_coefficients(logA.with_trunc(T), phi), {"x": gamma.with_trunc(T)}) - logB.with_trunc(T).scale(c)
    if not check.is_zero():
        raise OverdeterminedSystem("solved phi fails the logarithm comparison")
    return phi
