"""Sparse multivariate power series over a ``CoefRing``, truncated at a total degree.

A series lives in a context ``(ring, vars)``; ``vars`` is an ordered tuple of
``Var(name, deg)``.  Terms are stored as ``{exponent tuple: CoefElement}``
and every stored monomial has weighted degree ``<= trunc``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .errors import MixedContext, NonNilpotentSubstitution, NonUnitLeadingCoefficient
from .rings import CoefElement, CoefRing, RingMap


@dataclass(frozen=True)
class Var:
    name: str
    deg: int = 1

    def __post_init__(self):
        if self.deg < 1:
            raise ValueError("series variables have degree >= 1")


def make_vars(*names, deg: int = 1) -> tuple:
    return tuple(n if isinstance(n, Var) else Var(n, deg) for n in names)


class GradedSeries:
    __slots__ = ("ring", "vars", "trunc", "terms", "_degs")

    def __init__(self, ring: CoefRing, vars, trunc: int, terms: Mapping | None = None, *, _trusted=False):
        if trunc < 0:
            raise ValueError("trunc must be >= 0")
        self.ring = ring
        self.vars = tuple(vars) if vars and isinstance(vars[0], Var) else make_vars(*vars)
        self.trunc = trunc
        self._degs = tuple(v.deg for v in self.vars)
        if _trusted:
            self.terms = terms
        else:
            clean = {}
            for k, c in (terms or {}).items():
                if isinstance(k, Mapping):
                    k = self.key(k)
                if self.mono_degree(k) > trunc:
                    continue
                c = ring(c)
                if c.is_zero():
                    continue
                clean[k] = clean[k] + c if k in clean else c
            self.terms = {k: c for k, c in clean.items() if not c.is_zero()}

    # -- constructors -----------------------------------------------------
    @classmethod
    def zero(cls, ring, vars, trunc):
        return cls(ring, vars, trunc, {}, _trusted=True)

    @classmethod
    def constant(cls, ring, vars, trunc, value=1):
        s = cls(ring, vars, trunc)
        return cls(ring, s.vars, trunc, {s._unit: ring(value)})

    @classmethod
    def gen(cls, ring, vars, trunc, name):
        s = cls(ring, vars, trunc)
        return cls(ring, s.vars, trunc, {s.key({name: 1}): ring.one})

    @classmethod
    def from_coefficients(cls, ring, var: str, trunc: int, coeffs: Mapping):
        """Univariate series ``sum coeffs[k] * var^k``."""
        return cls(ring, (var,), trunc, {(k,): c for k, c in coeffs.items()})

    # -- context helpers ---------------------------------------------------
    @property
    def _unit(self) -> tuple:
        return (0,) * len(self.vars)

    @property
    def names(self) -> tuple:
        return tuple(v.name for v in self.vars)

    def key(self, mono: Mapping) -> tuple:
        k = [0] * len(self.vars)
        idx = {v.name: i for i, v in enumerate(self.vars)}
        for name, e in mono.items():
            if name not in idx:
                raise MixedContext(f"{name} is not a variable of this series")
            if e < 0:
                raise ValueError("negative exponent in a power series")
            k[idx[name]] += e
        return tuple(k)

    def mono_degree(self, k: tuple) -> int:
        return sum(e * d for e, d in zip(k, self._degs))

    def same_context(self, other: "GradedSeries") -> bool:
        return self.ring == other.ring and self.vars == other.vars

    def _check(self, other: "GradedSeries"):
        if not self.same_context(other):
            raise MixedContext("series live in different contexts")

    def like(self, terms: dict, trunc: int | None = None) -> "GradedSeries":
        return GradedSeries(self.ring, self.vars, self.trunc if trunc is None else trunc, terms, _trusted=True)

    def with_trunc(self, trunc: int) -> "GradedSeries":
        """Lower the truncation bound (raising it would invent precision)."""
        trunc = min(trunc, self.trunc)
        return self.like({k: c for k, c in self.terms.items() if self.mono_degree(k) <= trunc}, trunc)

    def in_context(self, vars) -> "GradedSeries":
        """Re-embed into a larger variable table containing all of this series' variables."""
        vars = tuple(vars) if vars and isinstance(vars[0], Var) else make_vars(*vars)
        pos = {v: i for i, v in enumerate(vars)}
        for v in self.vars:
            if v not in pos:
                raise MixedContext(f"variable {v.name} missing from target context")
        out = {}
        for k, c in self.terms.items():
            nk = [0] * len(vars)
            for v, e in zip(self.vars, k):
                nk[pos[v]] = e
            out[tuple(nk)] = c
        return GradedSeries(self.ring, vars, self.trunc, out, _trusted=True)

    # -- queries -----------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, mono: Mapping | tuple | int = ()) -> CoefElement:
        if isinstance(mono, int):
            mono = (mono,)
        k = mono if isinstance(mono, tuple) else self.key(mono)
        if not k:
            k = self._unit
        return self.terms.get(k, self.ring.zero)

    def constant_term(self) -> CoefElement:
        return self.terms.get(self._unit, self.ring.zero)

    def degree_part(self, d: int) -> "GradedSeries":
        return self.like({k: c for k, c in self.terms.items() if self.mono_degree(k) == d})

    def lowest_degree(self) -> int | None:
        if not self.terms:
            return None
        return min(self.mono_degree(k) for k in self.terms)

    def weights(self) -> set:
        """``monomial degree - coefficient dimension`` over all terms."""
        out = set()
        for k, c in self.terms.items():
            md = self.mono_degree(k)
            for d in c.dims():
                out.add(md - d)
        return out

    def is_homogeneous(self, weight: int | None = None) -> bool:
        ws = self.weights()
        if weight is None:
            return len(ws) <= 1
        return ws <= {weight}

    def monomials(self):
        """Yield ``({var: exponent}, coefficient)`` in graded-lex order on variable names."""
        for k in sorted(self.terms, key=self._sort_key):
            yield {v.name: e for v, e in zip(self.vars, k) if e}, self.terms[k]

    def _sort_key(self, k):
        order = sorted(range(len(self.vars)), key=lambda i: self.vars[i].name)
        return (self.mono_degree(k), tuple(-k[i] for i in order))

    def univariate_coefficients(self) -> dict:
        if len(self.vars) != 1:
            raise MixedContext("series is not univariate")
        return {k[0]: c for k, c in self.terms.items()}

    # -- arithmetic ----------------------------------------------------------
    def __add__(self, other):
        if isinstance(other, GradedSeries):
            self._check(other)
            trunc = min(self.trunc, other.trunc)
            out = {}
            for src in (self.terms, other.terms):
                for k, c in src.items():
                    if self.mono_degree(k) > trunc:
                        continue
                    out[k] = out[k] + c if k in out else c
            return self.like({k: c for k, c in out.items() if not c.is_zero()}, trunc)
        c = self.ring(other)
        return self + self.like({self._unit: c} if not c.is_zero() else {})

    __radd__ = __add__

    def __neg__(self):
        return self.like({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, GradedSeries):
            return self + (-other)
        return self + (-self.ring(other))

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "GradedSeries":
        c = self.ring(c)
        if c.is_zero():
            return self.like({})
        out = {}
        for k, v in self.terms.items():
            w = v * c
            if not w.is_zero():
                out[k] = w
        return self.like(out)

    def __mul__(self, other):
        if not isinstance(other, GradedSeries):
            if isinstance(other, (int, Fraction, CoefElement)):
                return self.scale(other)
            return NotImplemented
        self._check(other)
        trunc = min(self.trunc, other.trunc)
        return self.like(_mul_terms(self, other.terms, trunc), trunc)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            return self.reciprocal() ** (-n)
        result = GradedSeries.constant(self.ring, self.vars, self.trunc, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def powers(self, n: int) -> list:
        out = [GradedSeries.constant(self.ring, self.vars, self.trunc, 1)]
        for _ in range(n):
            out.append(out[-1] * self)
        return out

    def __eq__(self, other):
        if not isinstance(other, GradedSeries):
            return NotImplemented
        return self.same_context(other) and self.trunc == other.trunc and self.terms == other.terms

    def equal_upto(self, other: "GradedSeries", trunc: int | None = None) -> bool:
        self._check(other)
        t = min(self.trunc, other.trunc) if trunc is None else trunc
        return (self - other).with_trunc(t).is_zero()

    __hash__ = None

    def reciprocal(self) -> "GradedSeries":
        """Multiplicative inverse of a series whose constant term is a unit."""
        c0 = self.constant_term()
        if not c0.is_unit():
            raise NonUnitLeadingCoefficient(f"constant term {c0} is not a unit")
        inv0 = c0.inverse()
        h = (self.scale(inv0) - 1)
        result = GradedSeries.constant(self.ring, self.vars, self.trunc, 1)
        term = result
        low = h.lowest_degree()
        if low is not None and low > 0:
            for _ in range(self.trunc // low):
                term = -(term * h)
                if term.is_zero():
                    break
                result = result + term
        return result.scale(inv0)

    def derivative(self, var: str) -> "GradedSeries":
        i = self.names.index(var)
        out = {}
        for k, c in self.terms.items():
            e = k[i]
            if e:
                nk = k[:i] + (e - 1,) + k[i + 1:]
                w = c * e
                if not w.is_zero():
                    out[nk] = w
        return self.like(out, max(self.trunc - self.vars[i].deg, 0))

    def divide_by_var(self, var: str) -> "GradedSeries":
        """Exact division by a variable; every term must contain it."""
        i = self.names.index(var)
        out = {}
        for k, c in self.terms.items():
            if k[i] == 0:
                raise ValueError(f"series is not divisible by {var}")
            out[k[:i] + (k[i] - 1,) + k[i + 1:]] = c
        return self.like(out, max(self.trunc - self.vars[i].deg, 0))

    def compose(self, subs: Mapping) -> "GradedSeries":
        return compose(self, subs)

    def revert(self) -> "GradedSeries":
        return revert(self)

    def map_coefficients(self, h) -> "GradedSeries":
        return map_coefficients(self, h)

    def evaluate(self, values: Mapping, one, mul=None):
        """Evaluate at nilpotent values of any ring-like type (classes, elements)."""
        mul = mul or (lambda a, b: a * b)
        powers = {}
        for i, v in enumerate(self.vars):
            top = max((k[i] for k in self.terms), default=0)
            if top and v.name not in values:
                raise MixedContext(f"no value for {v.name}")
            seq = [one]
            for _ in range(top):
                seq.append(mul(seq[-1], values[v.name]))
            powers[i] = seq
        total = None
        for k, c in self.terms.items():
            term = None
            for i, e in enumerate(k):
                if e:
                    term = powers[i][e] if term is None else mul(term, powers[i][e])
            term = (one if term is None else term) * c
            total = term if total is None else total + term
        return one * self.ring.zero if total is None else total

    # -- output -------------------------------------------------------------
    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for mono, c in self.monomials():
            m = "*".join(v if e == 1 else f"{v}^{e}" for v, e in mono.items())
            cs = str(c)
            if not m:
                parts.append(cs)
            elif cs == "1":
                parts.append(m)
            elif cs == "-1":
                parts.append("-" + m)
            elif len(c.terms) > 1:
                parts.append(f"({cs})*{m}")
            else:
                parts.append(f"{cs}*{m}")
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self):
        return f"GradedSeries({self}, trunc={self.trunc})"

    def to_json(self) -> dict:
        return {
            "trunc": self.trunc,
            "vars": [{"name": v.name, "deg": v.deg} for v in self.vars],
            "terms": [{"mono": mono, "coeff": c.to_json()} for mono, c in self.monomials()],
        }

    @classmethod
    def from_json(cls, ring: CoefRing, obj: dict) -> "GradedSeries":
        vars = tuple(Var(v["name"], v["deg"]) for v in obj["vars"])
        s = cls(ring, vars, obj["trunc"])
        terms = {s.key(t["mono"]): CoefElement.from_json(ring, t["coeff"]) for t in obj["terms"]}
        return cls(ring, vars, obj["trunc"], terms)


def _mul_terms(a: GradedSeries, b_terms: dict, trunc: int) -> dict:
    ring = a.ring
    md = a.mono_degree
    A = sorted(((md(k), k, c.terms) for k, c in a.terms.items()), key=lambda t: t[0])
    B = sorted(((md(k), k, c.terms) for k, c in b_terms.items()), key=lambda t: t[0])
    if not A or not B:
        return {}
    bmin = B[0][0]
    acc: dict = {}
    for da, ka, ca in A:
        if da + bmin > trunc:
            break
        for db, kb, cb in B:
            if da + db > trunc:
                break
            k = tuple([x + y for x, y in zip(ka, kb)])
            slot = acc.get(k)
            if slot is None:
                slot = acc[k] = {}
            ring._mul_into(slot, ca, cb)
    out = {}
    for k, raw in acc.items():
        clean = ring._clean(raw)
        if clean:
            out[k] = CoefElement(ring, clean, _trusted=True)
    return out


# ---------------------------------------------------------------------------
# module-level operations


def add(a: GradedSeries, b: GradedSeries) -> GradedSeries:
    return a + b


def mul(a: GradedSeries, b: GradedSeries) -> GradedSeries:
    return a * b


def compose(f: GradedSeries, subs: Mapping) -> GradedSeries:
    """Substitute series for variables of ``f``.

    All substituted series share one context, which becomes the context of the
    result; variables of ``f`` without a substitution are kept and must exist
    in that context.  The result is truncated at the minimum bound involved.
    """
    if not subs:
        return f
    subs = dict(subs)
    first = next(iter(subs.values()))
    ring, vars = first.ring, first.vars
    trunc = f.trunc
    for name, s in subs.items():
        if name not in f.names:
            raise MixedContext(f"{name} is not a variable of the series being composed")
        if s.ring != ring or s.vars != vars:
            raise MixedContext("substituted series must share a context")
        if f.ring != ring:
            raise MixedContext("substitution changes the coefficient ring")
        if not s.constant_term().is_zero():
            raise NonNilpotentSubstitution(f"substitution for {name} has constant term {s.constant_term()}")
        trunc = min(trunc, s.trunc)
    for name in f.names:
        if name not in subs:
            ident = GradedSeries.gen(ring, vars, trunc, name)
            subs[name] = ident
    image = [subs[v.name].with_trunc(trunc) for v in f.vars]
    pows = []
    for i, s in enumerate(image):
        top = max((k[i] for k in f.terms), default=0)
        pows.append(s.powers(top))
    acc: dict = {}
    for k, c in f.terms.items():
        term = None
        for i, e in enumerate(k):
            if e:
                term = pows[i][e] if term is None else term * pows[i][e]
        if term is None:
            term = GradedSeries.constant(ring, vars, trunc, 1)
        for tk, tc in term.terms.items():
            if tk in acc:
                ring._mul_into(acc[tk], tc.terms, c.terms)
            else:
                slot = acc[tk] = {}
                ring._mul_into(slot, tc.terms, c.terms)
    out = {}
    for tk, raw in acc.items():
        clean = ring._clean(raw)
        if clean:
            out[tk] = CoefElement(ring, clean, _trusted=True)
    return GradedSeries(ring, vars, trunc, out, _trusted=True)


def revert(f: GradedSeries) -> GradedSeries:
    """Compositional inverse of a univariate series ``a1*x + ...`` with ``a1`` a unit."""
    if len(f.vars) != 1:
        raise MixedContext("revert needs a univariate series")
    if not f.constant_term().is_zero():
        raise NonNilpotentSubstitution("series has a constant term")
    var = f.vars[0]
    if var.deg != 1:
        raise MixedContext("revert needs a degree-1 variable")
    a1 = f.coefficient((1,))
    if not a1.is_unit():
        raise NonUnitLeadingCoefficient(f"leading coefficient {a1} is not invertible")
    inv = a1.inverse()
    g_terms = {(1,): inv}
    T = f.trunc
    for d in range(2, T + 1):
        g = GradedSeries(f.ring, f.vars, d, dict(g_terms), _trusted=True)
        c = compose(f.with_trunc(d), {var.name: g}).coefficient((d,))
        if not c.is_zero():
            g_terms[(d,)] = -(c * inv)
    return GradedSeries(f.ring, f.vars, T, g_terms, _trusted=True)


def map_coefficients(f: GradedSeries, h) -> GradedSeries:
    """Push every coefficient through a ring map (or any callable returning ``CoefElement``)."""
    target = h.target if isinstance(h, RingMap) else None
    out = {}
    for k, c in f.terms.items():
        w = h(c)
        if target is None:
            target = w.ring
        if not w.is_zero():
            out[k] = w
    if target is None:
        raise ValueError("cannot infer the target ring of an empty map")
    return GradedSeries(target, f.vars, f.trunc, out, _trusted=True)
