"""Free theories on cellular spaces: products of projective spaces, optionally
with one projectivized split bundle on top.

Classes are truncated series in the hyperplane classes ``x`` (or ``x1, x2, ...``)
and the tautological class ``xi``, reduced modulo ``x_i^{n_i+1} = 0`` and the
projective-bundle relation ``prod_j F(xi, c1(L_j)) = 0``.  Any monomial of
degree above ``dim X`` vanishes after reduction (the relation never lowers the
monomial degree), so truncating at ``dim X`` is exact.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import product

from .errors import InfiniteRank, MixedContext, TruncationTooLow, UnsupportedBundle, UnsupportedSpace
from .fgl import X1, FGLMorphism, FormalGroupLaw, formal_sum, n_series
from .report import VerificationReport
from .rings import CoefElement, CoefRing, RingMap, canonical_map, make_theory_ring
from .series import GradedSeries, Var, compose, map_coefficients
from .theories import Theory, make_theory, t_ring, theory_from_fgl, total_operation


# ---------------------------------------------------------------------------
# spaces


@dataclass(frozen=True)
class CellularSpace:
    """``P^{n_1} x ... x P^{n_r}``, optionally ``P(L_1 + ... + L_N)`` over it.

    Each ``L_j`` is a tuple of twists, one per projective factor.
    """

    factors: tuple = ()
    bundle: tuple | None = None

    def __post_init__(self):
        if any(n < 1 for n in self.factors):
            raise UnsupportedSpace("projective factors need n >= 1")
        if self.bundle is not None:
            if not self.bundle:
                raise UnsupportedBundle("a projective bundle needs at least one summand")
            for L in self.bundle:
                if len(L) != len(self.factors):
                    raise UnsupportedBundle(f"twist {L} does not match {len(self.factors)} base factors")

    @property
    def base_dim(self) -> int:
        return sum(self.factors)

    @property
    def rank(self) -> int:
        return len(self.bundle) if self.bundle is not None else 0

    @property
    def dim(self) -> int:
        return self.base_dim + (self.rank - 1 if self.bundle is not None else 0)

    @property
    def base_names(self) -> tuple:
        if len(self.factors) == 1:
            return ("x",)
        return tuple(f"x{i}" for i in range(1, len(self.factors) + 1))

    @property
    def names(self) -> tuple:
        return self.base_names + (("xi",) if self.bundle is not None else ())

    @property
    def base(self) -> "CellularSpace":
        return CellularSpace(self.factors)

    def __str__(self):
        base = "x".join(f"P{n}" for n in self.factors) or "pt"
        if self.bundle is None:
            return base
        return f"PB({'' if base == 'pt' else base};" + ",".join(_bundle_str(L) for L in self.bundle) + ")"


def _bundle_str(L) -> str:
    if not any(L):
        return "O"
    return "O(" + ",".join(str(a) for a in L) + ")"


POINT = CellularSpace()


def proj_space(n: int) -> CellularSpace:
    return CellularSpace((n,))


def parse_space(desc: str) -> CellularSpace:
    """``P3``, ``P2xP1``, ``PB(P1;O,O(1))``, ``PB(P1xP1;O,O(1,0),O(0,1))``, ``pt``."""
    s = desc.replace(" ", "")
    if not s:
        raise UnsupportedSpace("empty space descriptor")
    m = re.fullmatch(r"PB\((.*);(.*)\)", s)
    if m:
        base = _parse_product(m.group(1))
        bundle = tuple(_parse_line(t, len(base)) for t in _split_top(m.group(2)))
        return CellularSpace(base, bundle)
    return CellularSpace(_parse_product(s))


def _parse_product(s: str) -> tuple:
    if s in ("", "pt", "point", "Point"):
        return ()
    out = []
    for part in s.split("x"):
        m = re.fullmatch(r"P(\d+)", part)
        if not m:
            raise UnsupportedSpace(f"cannot parse {part!r} as a projective space")
        out.append(int(m.group(1)))
    return tuple(out)


def _split_top(s: str) -> list:
    parts, depth, cur = [], 0, ""
    for ch in s:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append(cur)
            cur = ""
        else:
            cur += ch
    parts.append(cur)
    return parts


def _parse_line(t: str, nf: int) -> tuple:
    if t == "O":
        return (0,) * nf
    m = re.fullmatch(r"O\((-?\d+(?:,-?\d+)*)\)", t)
    if not m:
        raise UnsupportedBundle(f"cannot parse line bundle {t!r}")
    tw = tuple(int(a) for a in m.group(1).split(","))
    if len(tw) == 1 and nf > 1:
        raise UnsupportedBundle(f"{t} needs {nf} twists over a product")
    if len(tw) != nf:
        raise UnsupportedBundle(f"{t} has {len(tw)} twists, base has {nf} factors")
    return tw


# ---------------------------------------------------------------------------
# cohomology rings


class CohomologyRing:
    """``T*(X)`` for a cellular space X and a free theory T."""

    def __init__(self, space: CellularSpace, theory: Theory):
        self.space = space
        self.theory = theory
        self.ring: CoefRing = theory.ring
        X = space
        self.dim = X.dim
        N = max(X.rank, 1)
        need = X.dim + N
        if theory.trunc < need:
            raise TruncationTooLow(f"{theory.name} law has trunc {theory.trunc}; {X} needs {need}")
        self.fgl = theory.fgl.truncate(need)
        self.vars = tuple(Var(n) for n in X.names)
        self.base_vars = tuple(Var(n) for n in X.base_names) if X.factors else ()
        self.trunc = X.dim
        self._omega = self.fgl.omega()
        self._setup_relations()

    # -- construction helpers -------------------------------------------------
    def _gen(self, name: str, trunc: int | None = None, vars=None) -> GradedSeries:
        return GradedSeries.gen(self.ring, vars or self.vars, self.trunc if trunc is None else trunc, name)

    def line_class(self, twist: tuple, vars=None, trunc: int | None = None) -> GradedSeries:
        """``c_1(O(a_1, ..., a_r)) = [a_1](x_1) +_F ... +_F [a_r](x_r)``."""
        vars = vars or self.vars
        trunc = self.trunc if trunc is None else trunc
        F = self.fgl.truncate(max(trunc, 1))
        total = GradedSeries.zero(self.ring, vars, trunc)
        for name, a in zip(self.space.base_names, twist):
            if a == 0:
                continue
            na = n_series(F, a).with_trunc(trunc)
            total = formal_sum(F, total, compose(na, {"x": GradedSeries.gen(self.ring, vars, trunc, name)}))
        return total

    def _setup_relations(self):
        X = self.space
        self.n_of = dict(zip(X.base_names, X.factors))
        if X.bundle is None:
            self.N = None
            return
        N = X.rank
        self.N = N
        wide = X.dim + N
        F = self.fgl
        xi = self._gen("xi", wide)
        D = GradedSeries.constant(self.ring, self.vars, wide, 1)
        for L in X.bundle:
            D = D * formal_sum(F, xi, self.line_class(L, trunc=wide))
        D = self._drop_base(D)
        self.relation = D
        parts = self._split_xi(D)
        u = parts.get(N)
        if u is None or u.constant_term() != self.ring.one:
            raise UnsupportedBundle("projective-bundle relation is not monic in xi")
        self.u_inv = u.reciprocal()
        uinv_full = self._from_base(self.u_inv, 0, wide)
        Dn = (D * uinv_full)
        tail = Dn - self._gen("xi", wide) ** N
        self.tail = self._drop_base(tail.with_trunc(self.trunc))
        self._laurent_parts = parts
        self._residues = None

    def _drop_base(self, s: GradedSeries) -> GradedSeries:
        """Kill monomials with ``x_i^{e}``, ``e > n_i``."""
        nb = len(self.space.factors)
        lim = self.space.factors
        keep = {k: c for k, c in s.terms.items() if all(k[i] <= lim[i] for i in range(nb))}
        return s.like(keep)

    def _split_xi(self, s: GradedSeries) -> dict:
        """Full-context series -> ``{xi-exponent: base series (trunc dim B)}``."""
        out: dict = {}
        tb = self.space.base_dim
        bv = self.base_vars
        for k, c in s.terms.items():
            bk, e = k[:-1], k[-1]
            if sum(bk) > tb:
                continue
            out.setdefault(e, {})[bk] = c
        return {e: GradedSeries(self.ring, bv, tb, t, _trusted=True) for e, t in out.items()}

    def _from_base(self, b: GradedSeries, e: int, trunc: int | None = None) -> GradedSeries:
        trunc = self.trunc if trunc is None else trunc
        terms = {}
        for k, c in b.terms.items():
            key = k + ((e,) if self.N is not None else ())
            if sum(key) <= trunc:
                terms[key] = c
        return GradedSeries(self.ring, self.vars, trunc, terms, _trusted=True)

    # -- reduction ----------------------------------------------------------
    def reduce(self, s: GradedSeries) -> GradedSeries:
        if s.ring != self.ring or s.vars != self.vars:
            raise MixedContext("series is not in this cohomology ring's context")
        s = self._drop_base(s.with_trunc(self.trunc))
        if self.N is None:
            return s
        N = self.N
        for _ in range(self.space.base_dim + 2):
            bad = {k: c for k, c in s.terms.items() if k[-1] >= N}
            if not bad:
                return s
            good = s.like({k: c for k, c in s.terms.items() if k[-1] < N})
            q = s.like({k[:-1] + (k[-1] - N,): c for k, c in bad.items()})
            s = self._drop_base(good - q * self.tail)
        raise UnsupportedBundle("reduction did not terminate")

    def cls(self, s) -> "CellClass":
        if isinstance(s, CellClass):
            return s
        if isinstance(s, GradedSeries):
            return CellClass(self, self.reduce(s))
        return CellClass(self, GradedSeries.constant(self.ring, self.vars, self.trunc, s))

    def one(self) -> "CellClass":
        return self.cls(1)

    def zero(self) -> "CellClass":
        return CellClass(self, GradedSeries.zero(self.ring, self.vars, self.trunc))

    def gen(self, name: str) -> "CellClass":
        return self.cls(self._gen(name))

    def gens(self) -> dict:
        return {n: self.gen(n) for n in self.space.names}

    def monomial(self, key: tuple) -> "CellClass":
        return self.cls(GradedSeries(self.ring, self.vars, self.trunc, {tuple(key): self.ring.one}))

    # -- presentation -------------------------------------------------------
    def basis(self, codim: int | None = None) -> list:
        """Reduced monomials (exponent tuples), sorted by codimension then reverse-lex."""
        ranges = [range(n + 1) for n in self.space.factors]
        if self.N is not None:
            ranges.append(range(self.N))
        out = [k for k in product(*ranges) if codim is None or sum(k) == codim]
        return sorted(out, key=lambda k: (sum(k), tuple(-e for e in k)))

    def mono_name(self, key: tuple) -> str:
        parts = [n if e == 1 else f"{n}^{e}" for n, e in zip(self.space.names, key) if e]
        return "*".join(parts) or "1"

    def presentation(self) -> dict:
        rels = [{"generator": n, "relation": f"{n}^{self.n_of[n] + 1}"} for n in self.space.base_names]
        if self.N is not None:
            rels.append({"generator": "xi", "relation": str(self.relation.with_trunc(self.trunc + 1))})
        return {
            "space": str(self.space),
            "dim": self.dim,
            "theory": self.theory.name,
            "coefficients": str(self.ring),
            "generators": [{"name": n, "degree": 1} for n in self.space.names],
            "relations": rels,
            "basis": [self.mono_name(k) for k in self.basis()],
        }

    # -- push-forward -------------------------------------------------------
    def projective_class(self, n: int) -> CoefElement:
        if n < 0:
            return self.ring.zero
        return self._omega.coefficient((n,))

    def _push_base(self, b: GradedSeries) -> CoefElement:
        total = self.ring.zero
        for k, c in b.terms.items():
            term = c
            for e, n in zip(k, self.space.factors):
                if e > n:
                    term = self.ring.zero
                    break
                term = term * self.projective_class(n - e)
            total = total + term
        return total

    def residues(self) -> dict:
        """``R_k = Res_xi xi^k omega(xi) / D(xi)`` as base classes, for k < N."""
        if self._residues is not None:
            return self._residues
        N = self.N
        tb = self.space.base_dim
        bv = self.base_vars
        E = {}
        for e, b in self._laurent_parts.items():
            if e == N:
                b = b - 1
            if not b.is_zero():
                E[e - N] = b
        one = GradedSeries.constant(self.ring, bv, tb, 1)
        S = {0: one}
        term = {0: one}
        for _ in range(tb):
            nxt: dict = {}
            for a, ca in term.items():
                for b, cb in E.items():
                    prod_ = -(ca * cb)
                    if prod_.is_zero():
                        continue
                    nxt[a + b] = nxt[a + b] + prod_ if a + b in nxt else prod_
            term = {e: c for e, c in nxt.items() if not c.is_zero()}
            if not term:
                break
            for e, c in term.items():
                S[e] = S[e] + c if e in S else c
        out = {}
        for k in range(N):
            r = GradedSeries.zero(self.ring, bv, tb)
            for q, c in S.items():
                idx = N - 1 - k - q
                if idx < 0:
                    continue
                if idx > self._omega.trunc:
                    raise TruncationTooLow("invariant differential too short for the residue")
                w = self._omega.coefficient((idx,))
                if not w.is_zero():
                    r = r + c.scale(w)
            out[k] = r
        self._residues = out
        return out

    def pushforward(self, u) -> CoefElement:
        s = self.cls(u).series
        if self.N is None:
            return self._push_base(s)
        R = self.residues()
        total = GradedSeries.zero(self.ring, self.base_vars, self.space.base_dim)
        for k, b in self._split_xi(s).items():
            total = total + b * R[k]
        return self._push_base(total)

    def pair(self, u, v) -> CoefElement:
        return self.pushforward(self.cls(u) * self.cls(v))

    # -- Chern classes and tangent roots ---------------------------------
    def chern_roots(self, bundle) -> list:
        """First Chern classes of the summands of a split bundle (list of twists)."""
        out = []
        for L in bundle:
            L = tuple(L) if not isinstance(L, int) else (L,)
            if len(L) != len(self.space.factors):
                raise UnsupportedBundle(f"twist {L} does not match the base")
            out.append(self.cls(self.line_class(L)))
        return out

    def chern_classes(self, bundle) -> list:
        roots = self.chern_roots(bundle)
        c = [self.one()]
        for r in roots:
            nxt = c + [self.zero()]
            for i in range(len(c), 0, -1):
                nxt[i] = nxt[i] + c[i - 1] * r
            c = nxt
        return c

    def tangent_roots(self) -> list:
        """Signed virtual roots ``(series, +1/-1)`` of the tangent bundle."""
        roots = []
        for name, n in zip(self.space.base_names, self.space.factors):
            roots += [(self._gen(name), 1)] * (n + 1)
            roots.append((GradedSeries.zero(self.ring, self.vars, self.trunc), -1))
        if self.N is not None:
            xi = self._gen("xi")
            for L in self.space.bundle:
                roots.append((formal_sum(self.fgl.truncate(self.trunc), xi, self.line_class(L)), 1))
            roots.append((GradedSeries.zero(self.ring, self.vars, self.trunc), -1))
        return roots


class CellClass:
    """Element of ``T*(X)``, kept reduced."""

    __slots__ = ("H", "series")

    def __init__(self, H: CohomologyRing, series: GradedSeries):
        self.H = H
        self.series = series

    def _other(self, o):
        if isinstance(o, CellClass):
            if o.H is not self.H and (o.H.space != self.H.space or o.H.ring != self.H.ring):
                raise MixedContext("classes live on different spaces or theories")
            return o.series
        return GradedSeries.constant(self.H.ring, self.H.vars, self.H.trunc, o)

    def __add__(self, o):
        return CellClass(self.H, self.series + self._other(o))

    __radd__ = __add__

    def __sub__(self, o):
        return CellClass(self.H, self.series - self._other(o))

    def __neg__(self):
        return CellClass(self.H, -self.series)

    def __mul__(self, o):
        if isinstance(o, CoefElement) or isinstance(o, int):
            return CellClass(self.H, self.series.scale(o))
        return CellClass(self.H, self.H.reduce(self.series * self._other(o)))

    __rmul__ = __mul__

    def __pow__(self, n: int):
        out = self.H.one()
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, o):
        if not isinstance(o, CellClass):
            o = self.H.cls(o)
        return self.series == o.series

    __hash__ = None

    def is_zero(self) -> bool:
        return self.series.is_zero()

    def coefficients(self) -> dict:
        return dict(self.series.terms)

    def codims(self) -> set:
        return self.series.weights()

    def __str__(self):
        return str(self.series)

    def __repr__(self):
        return f"CellClass({self} on {self.H.space})"

    def to_json(self):
        return self.series.to_json()


def theory_ring(X: CellularSpace, T: Theory) -> CohomologyRing:
    return CohomologyRing(X, T)


def pushforward_point(u: CellClass) -> CoefElement:
    return u.H.pushforward(u)


def numerical_pairing(u: CellClass, v: CellClass) -> CoefElement:
    if u.H.space != v.H.space or u.H.ring != v.H.ring:
        raise MixedContext("classes live on different spaces or theories")
    return u.H.pushforward(u * v)


def chern_roots(H: CohomologyRing, bundle) -> list:
    return H.chern_roots(bundle)


# ---------------------------------------------------------------------------
# numerical kernels


@dataclass
class PairingMatrix:
    rows: list
    cols: list
    entries: list

    def is_symmetric_with(self, other: "PairingMatrix") -> bool:
        return all(self.entries[i][j] == other.entries[j][i]
                   for i in range(len(self.rows)) for j in range(len(self.cols)))

    def to_json(self) -> dict:
        return {"rows": self.rows, "cols": self.cols,
                "entries": [[str(e) for e in row] for row in self.entries]}


def pairing_matrix(H: CohomologyRing, d: int, e: int | None = None) -> PairingMatrix:
    e = H.dim - d if e is None else e
    rows, cols = H.basis(d), H.basis(e)
    ent = [[H.pair(H.monomial(r), H.monomial(c)) for c in cols] for r in rows]
    return PairingMatrix([H.mono_name(r) for r in rows], [H.mono_name(c) for c in cols], ent)


def _fp_left_kernel(rows: int, cols: int, mat: list, p: int) -> list:
    """Basis of ``{c : c^T M = 0}`` over F_p."""
    if rows == 0:
        return []
    if cols == 0:
        return [[1 if i == j else 0 for i in range(rows)] for j in range(rows)]
    from sympy import GF
    from sympy.polys.matrices import DomainMatrix

    K = GF(p)
    Mt = DomainMatrix([[K(mat[i][j]) for i in range(rows)] for j in range(cols)], (cols, rows), K)
    ns = Mt.nullspace()
    out = []
    for row in ns.to_Matrix().tolist():
        out.append([int(v) % p for v in row])
    return out


def _k_scalar(e: CoefElement, m: int):
    """``c`` with ``e = c * v_m^j`` in K(m), or 0."""
    if e.is_zero():
        return 0, 0
    if len(e.terms) != 1:
        raise InfiniteRank("K(m) push-forward is not a single monomial")
    (k, c), = e.terms.items()
    return c, k[m - 1]


def periodic_basis(H: CohomologyRing, d: int) -> list:
    """``(monomial, v_m exponent)`` spanning the codim-d piece of K(m)*(X) over F_p."""
    m = H.theory.level
    delta = H.theory.p ** m - 1
    out = []
    for k in H.basis():
        s = sum(k)
        if (s - d) % delta == 0:
            out.append((k, (s - d) // delta))
    return out


def _periodic_class(H: CohomologyRing, k: tuple, j: int) -> CellClass:
    m = H.theory.level
    c = H.ring.gen(f"v{m}", j)
    return H.monomial(k) * c


def numerical_kernel(H: CohomologyRing, d: int) -> list:
    """F_p-basis of the codim-d numerical kernel, as classes."""
    T = H.theory
    if T.kind == "chow-mod":
        rows, cols = H.basis(d), H.basis(H.dim - d)
        mat = [[int(H.pair(H.monomial(r), H.monomial(c)).constant_term()) for c in cols] for r in rows]
        out = []
        for vec in _fp_left_kernel(len(rows), len(cols), mat, T.p):
            cl = H.zero()
            for c, r in zip(vec, rows):
                if c:
                    cl = cl + H.monomial(r) * c
            out.append(cl)
        return out
    if T.kind == "k(m)":
        m = T.level
        rows = periodic_basis(H, d)
        allb = H.basis()
        mat = []
        for rk, rj in rows:
            line = []
            for ck in allb:
                val = H.pair(_periodic_class(H, rk, rj), H.monomial(ck))
                line.append(int(_k_scalar(val, m)[0]))
            mat.append(line)
        out = []
        for vec in _fp_left_kernel(len(rows), len(allb), mat, T.p):
            cl = H.zero()
            for c, (rk, rj) in zip(vec, rows):
                if c:
                    cl = cl + _periodic_class(H, rk, rj) * c
            out.append(cl)
        return out
    raise InfiniteRank(f"graded pieces of {T.name} are not finite over F_p")


def is_numerically_trivial(u: CellClass) -> bool:
    """``<u, b> = 0`` for every basis monomial b (exact, any coefficient ring)."""
    H = u.H
    return all(H.pair(u, H.monomial(b)).is_zero() for b in H.basis())


# ---------------------------------------------------------------------------
# complete intersections


@dataclass
class CompleteIntersection:
    cls: CellClass
    degree: CoefElement
    numerically_trivial: bool


def complete_intersection(H: CohomologyRing, degrees) -> CompleteIntersection:
    """``prod_i c_1(O(d_i))``; integer degrees refer to the hyperplane class of a single factor."""
    nf = len(H.space.factors)
    if len(degrees) > H.dim:
        raise UnsupportedSpace("more hypersurfaces than the dimension")
    u = H.one()
    for d in degrees:
        tw = (d,) if isinstance(d, int) else tuple(d)
        if isinstance(d, int) and nf != 1:
            raise UnsupportedSpace("integer degrees need a single projective factor")
        u = u * H.cls(H.line_class(tw))
    return CompleteIntersection(u, H.pushforward(u * H.gen(H.space.base_names[0]) ** (H.dim - len(degrees))),
                                is_numerically_trivial(u))


# ---------------------------------------------------------------------------
# operations, Todd genus, Riemann-Roch


def operation_on_class(G: FGLMorphism, u: CellClass, target: CohomologyRing) -> CellClass:
    """``G(u)``: phi on coefficients, ``x -> gamma(x)`` on every generator, then reduce."""
    if u.H.ring != G.phi.source:
        raise MixedContext("operation source does not match the class's theory")
    if target.ring != G.phi.target or target.space != u.H.space:
        raise MixedContext("target cohomology ring does not match the operation")
    s = map_coefficients(u.series, G.phi)
    g = G.gamma.with_trunc(target.trunc)
    subs = {n: compose(g, {"x": target._gen(n)}) for n in target.space.names}
    return target.cls(compose(s, subs))


def todd_genus(target: CohomologyRing, G: FGLMorphism) -> CellClass:
    """``prod over signed tangent roots of (x / gamma(x))^{+-1}``."""
    if not G.invertible_type:
        from .errors import NonUnitLeadingCoefficient
        raise NonUnitLeadingCoefficient("Todd genus needs gamma'(0) to be a unit")
    T = target.trunc
    g = G.gamma.with_trunc(T + 1)
    q = g.divide_by_var("x")
    h = q.reciprocal()
    td = target.one()
    for root, sign in target.tangent_roots():
        f = h if sign > 0 else q
        td = td * target.cls(compose(f, {"x": root}))
    return td


def cohomology_pair(X: CellularSpace, G: FGLMorphism, source: Theory | None = None, target: Theory | None = None):
    A = source or theory_from_fgl(G.source, "source")
    B = target or theory_from_fgl(G.target, "target")
    return CohomologyRing(X, A), CohomologyRing(X, B)


def riemann_roch_check(X: CellularSpace, G: FGLMorphism, source: Theory | None = None,
                       target: Theory | None = None) -> VerificationReport:
    HA, HB = cohomology_pair(X, G, source, target)
    td = todd_genus(HB, G)
    rep = VerificationReport(f"riemann-roch {X}", {"space": str(X), "stable": G.stable})
    for k in HA.basis():
        u = HA.monomial(k)
        lhs = HB.pushforward(operation_on_class(G, u, HB) * td)
        rhs = G.phi(HA.pushforward(u))
        res = lhs - rhs
        rep.add(f"u={HA.mono_name(k)}", {"u": HA.mono_name(k)}, "pass" if res.is_zero() else "fail",
                {"lhs": str(lhs), "rhs": str(rhs), "residual": str(res)})
    return rep


# ---------------------------------------------------------------------------
# descent of operations to the numerical quotient


def _split_t_class(u: CellClass, nbase: int) -> dict:
    """Split a class over ``R[t]`` into ``{t-exponents: {monomial: R-coefficient terms}}``."""
    out: dict = {}
    for k, c in u.series.terms.items():
        for key, val in c.terms.items():
            r = key[nbase:]
            out.setdefault(r, {}).setdefault(k, {})[key[:nbase]] = val
    return out


def _component_class(H: CohomologyRing, comp: dict) -> CellClass:
    terms = {k: CoefElement(H.ring, t, _trusted=False) for k, t in comp.items()}
    terms = {k: c for k, c in terms.items() if not c.is_zero()}
    return CellClass(H, GradedSeries(H.ring, H.vars, H.trunc, terms, _trusted=True))


class _OperationSetup:
    """Total operation acting on a theory, with K(m) handled through P{m} lifts."""

    def __init__(self, X: CellularSpace, spec: str, p: int, degree_bound: int):
        trunc = max(X.dim + max(X.rank, 1), degree_bound + 1)
        self.T = make_theory(spec, p, trunc)
        self.H = CohomologyRing(X, self.T)
        self.lifted = self.T.kind == "k(m)"
        if self.lifted:
            m = self.T.level
            self.L = make_theory(f"pbrace:{m}", p, trunc)
            self.HL = CohomologyRing(X, self.L)
            self.down = canonical_map(self.L.ring, self.T.ring)
            G = total_operation(self.L, degree_bound)
            self.G = G
            self.HLt = CohomologyRing(X, theory_from_fgl(G.target, "lift[t]"))
            Rt = t_ring(self.T.ring, p, self.L.ctx.k)
            self.down_t = canonical_map(G.target.ring, Rt)
            self.Ht = CohomologyRing(X, theory_from_fgl(G.target.map_coefficients(self.down_t), "k[t]"))
            self.src_ring = self.L.ring
        else:
            self.G = total_operation(self.T, degree_bound)
            self.Ht = CohomologyRing(X, theory_from_fgl(self.G.target, self.T.name + "[t]"))
        self.nbase = self.T.ring.ngens
        self.degree_bound = degree_bound

    def lift(self, u: CellClass) -> CellClass:
        R = self.L.ring
        terms = {}
        for k, c in u.series.terms.items():
            terms[k] = R.element(dict(c.terms))
        return self.HL.cls(GradedSeries(R, self.HL.vars, self.HL.trunc, terms))

    def total(self, u: CellClass) -> CellClass:
        """Total operation of u, landing in ``T[t]*(X)``."""
        if not self.lifted:
            return operation_on_class(self.G, u, self.Ht)
        up = operation_on_class(self.G, self.lift(u), self.HLt)
        return self.Ht.cls(map_coefficients(up.series, self.down_t))

    def components(self, u: CellClass) -> dict:
        parts = _split_t_class(self.total(u), self.nbase)
        return {r: _component_class(self.H, comp) for r, comp in parts.items()}

    def todd(self) -> CellClass:
        if not self.lifted:
            return todd_genus(self.Ht, self.G)
        td = todd_genus(self.HLt, self.G)
        return self.Ht.cls(map_coefficients(td.series, self.down_t))

    def phi_point(self, e: CoefElement) -> CoefElement:
        if not self.lifted:
            return self.G.phi(e)
        R = self.L.ring
        return self.down_t(self.G.phi(R.element(dict(e.terms))))


def descent_check(X: CellularSpace, spec: str, p: int, degree_bound: int) -> VerificationReport:
    """Operations map the numerical kernel into itself, plus the pairing identity behind it."""
    from .bp import t_monomials

    op = _OperationSetup(X, spec, p, degree_bound)
    H = op.H
    rep = VerificationReport(f"descent {X} {op.T.name}", {"space": str(X), "theory": op.T.name, "p": p,
                                                         "degree_bound": degree_bound})
    k = op.Ht.ring.ngens - op.nbase
    rs = [r for r in t_monomials(p, k, degree_bound)]
    kernels = {}
    for d in range(H.dim + 1):
        if H.theory.is_fp_finite:
            kernels[d] = numerical_kernel(H, d)
        else:
            kernels[d] = []
        rep.add(f"kernel/codim={d}", {"codim": d}, "pass", {"dimension": len(kernels[d])})
    for d, basis in kernels.items():
        for i, u in enumerate(basis):
            comps = op.components(u)
            for r in rs:
                img = comps.get(r, H.zero())
                ok = is_numerically_trivial(img)
                rep.add(f"kernel/codim={d}/u{i}/S[{r}]", {"r": list(r)}, "pass" if ok else "fail",
                        {"image": str(img)})
    if H.space.factors:
        z = H.gen(H.space.base_names[0]) ** 2 * p if H.dim >= 2 else H.gen(H.space.base_names[0]) * p
        comps = op.components(z)
        ok = z.is_zero() and all(c.is_zero() for c in comps.values()) and is_numerically_trivial(z)
        rep.add("zero-element", {"element": f"{p}*x^2"}, "pass" if ok else "fail", {})
    td = op.todd()
    basis = H.basis()
    for a in basis:
        Ga = op.total(H.monomial(a))
        for b in basis:
            if b < a:
                continue
            Gb = op.total(H.monomial(b))
            lhs = op.Ht.pushforward(Ga * Gb * td)
            rhs = op.phi_point(H.pair(H.monomial(a), H.monomial(b)))
            ok = (lhs - rhs).is_zero()
            rep.add(f"intertwine/{H.mono_name(a)},{H.mono_name(b)}", {}, "pass" if ok else "fail",
                    {"lhs": str(lhs), "rhs": str(rhs)})
    return rep
