"""Graded coefficient rings: base scalars, polynomial generators, quotients, one inverted generator.

Elements are sparse maps from generator exponent vectors to base scalars.  The
exponent vector is aligned with ``CoefRing.generators``; a ring may list
generators that are killed by its relations (so that every ring of the BP
tower shares the layout ``v1, v2, ...`` and reductions are cheap), and at most
one generator may be inverted.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .errors import (
    DanglingGenerator,
    FGLCalcError,
    InhomogeneousElement,
    IntegralityFailure,
    MixedContext,
    NonPrime,
    UnsupportedTheory,
)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def check_prime(p: int) -> int:
    if not isinstance(p, int) or not is_prime(p):
        raise NonPrime(f"{p!r} is not a prime")
    return p


def p_valuation(n: int, p: int) -> int:
    if n == 0:
        raise ValueError("valuation of zero")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


# ---------------------------------------------------------------------------
# base scalars


@dataclass(frozen=True)
class Base:
    """Scalar domain: ``Z``, ``Q``, ``Zp`` (p-local rationals) or ``Zmod`` (integers mod p^r)."""

    kind: str
    p: int | None = None
    modulus: int | None = None

    def __post_init__(self):
        if self.kind not in ("Z", "Q", "Zp", "Zmod"):
            raise ValueError(f"unknown base kind {self.kind}")
        if self.kind in ("Zp", "Zmod"):
            check_prime(self.p)
        if self.kind == "Zmod":
            m = self.modulus
            if m is None or m < self.p or p_valuation(m, self.p) == 0 or m != self.p ** p_valuation(m, self.p):
                raise ValueError("Zmod modulus must be a positive power of p")

    @property
    def label(self) -> str:
        if self.kind == "Z":
            return "Z"
        if self.kind == "Q":
            return "Q"
        if self.kind == "Zp":
            return f"Z_({self.p})"
        if self.modulus == self.p:
            return f"F_{self.p}"
        return f"Z/{self.modulus}"

    @property
    def characteristic(self) -> int:
        return self.modulus if self.kind == "Zmod" else 0

    @property
    def is_rational(self) -> bool:
        return self.kind == "Q"

    @property
    def is_field_fp(self) -> bool:
        return self.kind == "Zmod" and self.modulus == self.p

    def normalize(self, value):
        """Coerce an int or Fraction into this base; raises on values outside it."""
        kind = self.kind
        if kind == "Zmod":
            if isinstance(value, int):
                return value % self.modulus
            value = Fraction(value)
            den = value.denominator
            if den % self.p == 0:
                raise IntegralityFailure(f"{value} has denominator divisible by {self.p}")
            return value.numerator * pow(den, -1, self.modulus) % self.modulus
        if isinstance(value, int):
            return value
        value = Fraction(value)
        if value.denominator == 1:
            return value.numerator
        if kind == "Q":
            return value
        if kind == "Zp":
            if value.denominator % self.p == 0:
                raise IntegralityFailure(f"{value} is not {self.p}-local")
            return value
        raise IntegralityFailure(f"{value} is not an integer")

    def is_unit(self, value) -> bool:
        if value == 0:
            return False
        if self.kind == "Q":
            return True
        if self.kind == "Z":
            return value in (1, -1)
        num = Fraction(value).numerator
        return num % self.p != 0

    def inverse(self, value):
        if not self.is_unit(value):
            raise ZeroDivisionError(f"{value} is not a unit in {self.label}")
        if self.kind == "Zmod":
            return pow(value, -1, self.modulus)
        return self.normalize(Fraction(1) / Fraction(value))

    def to_json(self, value) -> dict:
        f = Fraction(value)
        return {"num": str(f.numerator), "den": str(f.denominator)}

    def from_json(self, obj):
        return self.normalize(Fraction(int(obj["num"]), int(obj["den"])))


ZZ = Base("Z")
QQ = Base("Q")


def Zp(p: int) -> Base:
    return Base("Zp", p)


def Fp(p: int) -> Base:
    return Base("Zmod", p, p)


def Zmod(p: int, r: int) -> Base:
    return Base("Zmod", p, p**r)


# ---------------------------------------------------------------------------
# rings


@dataclass(frozen=True)
class CoefRing:
    """Graded ring ``base[generators] / relations`` with optionally one inverted generator.

    ``relations`` lists the ideal generators that were divided out: ``"p"``,
    ``"p^r"`` or generator names.  Killed generators stay in the layout but
    never appear in a normal form.
    """

    base: Base
    generators: tuple = ()
    relations: tuple = ()
    inverted: str | None = None
    kind: str = field(default="custom", compare=False)
    level: int | None = field(default=None, compare=False)

    def __post_init__(self):
        names = [g for g, _ in self.generators]
        if len(set(names)) != len(names):
            raise ValueError("duplicate generator names")
        for _, d in self.generators:
            if not isinstance(d, int) or d < 1:
                raise ValueError("generator dimensions must be integers >= 1")
        if self.inverted is not None and self.inverted not in names:
            raise ValueError(f"inverted generator {self.inverted} is not a generator")
        object.__setattr__(self, "_index", {g: i for i, g in enumerate(names)})
        object.__setattr__(self, "_dims", tuple(d for _, d in self.generators))
        killed = frozenset(self._index[r] for r in self.relations if r in self._index)
        object.__setattr__(self, "_killed", killed)
        inv = self._index[self.inverted] if self.inverted is not None else None
        object.__setattr__(self, "_inv", inv)
        object.__setattr__(self, "_zero_key", (0,) * len(names))

    # -- descriptors -----------------------------------------------------
    @property
    def names(self) -> tuple:
        return tuple(g for g, _ in self.generators)

    @property
    def ngens(self) -> int:
        return len(self.generators)

    @property
    def p(self):
        return self.base.p

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise DanglingGenerator(f"{name} is not a generator of {self}") from None

    def has_generator(self, name: str) -> bool:
        return name in self._index

    def dim_of(self, name: str) -> int:
        return self._dims[self.index(name)]

    def is_killed(self, name: str) -> bool:
        return self._index.get(name) in self._killed

    @property
    def live_generators(self) -> tuple:
        return tuple((g, d) for i, (g, d) in enumerate(self.generators) if i not in self._killed)

    def __str__(self):
        gens = []
        for g, _ in self.live_generators:
            gens.append(g)
            if g == self.inverted:
                gens.append(f"{g}^-1")
        s = self.base.label
        if gens:
            s += "[" + ", ".join(gens) + "]"
        return s

    def describe(self) -> dict:
        return {
            "base": self.base.label,
            "generators": [{"name": g, "dim": d} for g, d in self.live_generators],
            "relations": list(self.relations),
            "inverted": self.inverted,
            "kind": self.kind,
        }

    # -- element construction -------------------------------------------
    def _clean(self, terms: dict) -> dict:
        norm = self.base.normalize
        killed = self._killed
        inv = self._inv
        out = {}
        for k, c in terms.items():
            c = norm(c)
            if c == 0:
                continue
            if killed and any(k[i] for i in killed):
                continue
            if any(e < 0 for e in k):
                for i, e in enumerate(k):
                    if e < 0 and i != inv:
                        raise FGLCalcError(f"negative exponent on non-inverted generator {self.names[i]}")
            out[k] = c
        return out

    def element(self, terms: Mapping | None = None) -> "CoefElement":
        terms = terms or {}
        fixed = {}
        for k, c in terms.items():
            if isinstance(k, Mapping):
                k = self.key(k)
            fixed[k] = fixed.get(k, 0) + c
        return CoefElement(self, self._clean(fixed), _trusted=True)

    def key(self, mono: Mapping) -> tuple:
        k = [0] * self.ngens
        for g, e in mono.items():
            k[self.index(g)] += e
        return tuple(k)

    def scalar(self, value) -> "CoefElement":
        return CoefElement(self, self._clean({self._zero_key: value}), _trusted=True)

    def __call__(self, value) -> "CoefElement":
        if isinstance(value, CoefElement):
            if value.ring != self:
                raise MixedContext(f"element of {value.ring} used in {self}")
            return value
        return self.scalar(value)

    @property
    def zero(self) -> "CoefElement":
        return CoefElement(self, {}, _trusted=True)

    @property
    def one(self) -> "CoefElement":
        return self.scalar(1)

    def gen(self, name: str, exponent: int = 1) -> "CoefElement":
        k = [0] * self.ngens
        k[self.index(name)] = exponent
        return CoefElement(self, self._clean({tuple(k): 1}), _trusted=True)

    def gens(self) -> dict:
        return {g: self.gen(g) for g in self.names}

    def key_dim(self, k: tuple) -> int:
        return sum(e * d for e, d in zip(k, self._dims))

    # -- raw arithmetic on term dicts (hot path) -------------------------
    def _mul_into(self, out: dict, a: dict, b: dict, coef=1):
        for ka, ca in a.items():
            cac = ca * coef
            for kb, cb in b.items():
                k = tuple([x + y for x, y in zip(ka, kb)])
                out[k] = out.get(k, 0) + cac * cb

    def _add_into(self, out: dict, a: dict, coef=1):
        for k, c in a.items():
            out[k] = out.get(k, 0) + c * coef

    # -- derived rings ----------------------------------------------------
    def extend(self, extra: Iterable, kind: str | None = None) -> "CoefRing":
        """Polynomial extension by new generators ``[(name, dim), ...]``."""
        return CoefRing(
            self.base,
            tuple(self.generators) + tuple(extra),
            self.relations,
            self.inverted,
            kind=kind or self.kind,
            level=self.level,
        )

    def with_base(self, base: Base, relations: tuple | None = None, kind: str | None = None) -> "CoefRing":
        return CoefRing(
            base,
            self.generators,
            self.relations if relations is None else relations,
            self.inverted,
            kind=kind or self.kind,
            level=self.level,
        )


class CoefElement:
    """Immutable element of a ``CoefRing``."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: CoefRing, terms: dict, _trusted: bool = False):
        self.ring = ring
        self.terms = terms if _trusted else ring._clean(terms)

    # -- queries ----------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def dims(self) -> set:
        return {self.ring.key_dim(k) for k in self.terms}

    def is_homogeneous(self) -> bool:
        return len(self.dims()) <= 1

    @property
    def dimension(self) -> int | None:
        """Dimension of a homogeneous element; ``None`` for zero."""
        ds = self.dims()
        if not ds:
            return None
        if len(ds) > 1:
            raise InhomogeneousElement(f"{self} mixes dimensions {sorted(ds)}")
        return ds.pop()

    def constant_term(self):
        return self.terms.get(self.ring._zero_key, 0)

    def is_constant(self) -> bool:
        return all(k == self.ring._zero_key for k in self.terms)

    def coefficient(self, mono: Mapping | tuple = ()):
        k = mono if isinstance(mono, tuple) else self.ring.key(mono)
        if not k:
            k = self.ring._zero_key
        return self.terms.get(k, 0)

    def is_unit(self) -> bool:
        if len(self.terms) != 1:
            return False
        (k, c), = self.terms.items()
        inv = self.ring._inv
        if any(e for i, e in enumerate(k) if i != inv):
            return False
        return self.ring.base.is_unit(c)

    def inverse(self) -> "CoefElement":
        if not self.is_unit():
            raise ZeroDivisionError(f"{self} is not a unit of {self.ring}")
        (k, c), = self.terms.items()
        return CoefElement(self.ring, {tuple(-e for e in k): self.ring.base.inverse(c)}, _trusted=True)

    def filter_dim(self, max_dim: int) -> "CoefElement":
        kd = self.ring.key_dim
        return CoefElement(self.ring, {k: c for k, c in self.terms.items() if kd(k) <= max_dim}, _trusted=True)

    def homogeneous_part(self, dim: int) -> "CoefElement":
        kd = self.ring.key_dim
        return CoefElement(self.ring, {k: c for k, c in self.terms.items() if kd(k) == dim}, _trusted=True)

    def monomials(self):
        """Yield ``({name: exponent}, scalar)`` pairs in canonical order."""
        names = self.ring.names
        for k in sorted(self.terms, key=self._sort_key):
            yield {names[i]: e for i, e in enumerate(k) if e}, self.terms[k]

    def _sort_key(self, k):
        return (self.ring.key_dim(k), tuple(-e for e in k))

    # -- arithmetic ---------------------------------------------------------
    def _coerce(self, other) -> "CoefElement | None":
        if isinstance(other, CoefElement):
            if other.ring != self.ring:
                raise MixedContext(f"cannot combine elements of {self.ring} and {other.ring}")
            return other
        if isinstance(other, (int, Fraction)):
            return self.ring.scalar(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        out = dict(self.terms)
        for k, c in o.terms.items():
            out[k] = out.get(k, 0) + c
        return CoefElement(self.ring, self.ring._clean(out), _trusted=True)

    __radd__ = __add__

    def __neg__(self):
        return CoefElement(self.ring, self.ring._clean({k: -c for k, c in self.terms.items()}), _trusted=True)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        out = {}
        self.ring._mul_into(out, self.terms, o.terms)
        return CoefElement(self.ring, self.ring._clean(out), _trusted=True)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = self.ring.one
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            inv = self.ring.base.inverse(self.ring.base.normalize(other))
            return self * inv
        if isinstance(other, CoefElement):
            return self * other.inverse()
        return NotImplemented

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.ring.scalar(other)
        if not isinstance(other, CoefElement):
            return NotImplemented
        return self.ring == other.ring and self.terms == other.terms

    def __hash__(self):
        return hash((self.ring, frozenset(self.terms.items())))

    # -- output -----------------------------------------------------------
    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for mono, c in self.monomials():
            m = "*".join(g if e == 1 else f"{g}^{e}" for g, e in mono.items())
            if not m:
                parts.append(str(c))
            elif c == 1:
                parts.append(m)
            elif c == -1:
                parts.append("-" + m)
            else:
                parts.append(f"{c}*{m}")
        s = " + ".join(parts)
        return s.replace("+ -", "- ")

    def __repr__(self):
        return f"CoefElement({self})"

    def to_json(self) -> dict:
        base = self.ring.base
        return {
            "terms": [
                {"gens": mono, **base.to_json(c)}
                for mono, c in self.monomials()
            ]
        }

    @classmethod
    def from_json(cls, ring: CoefRing, obj: dict) -> "CoefElement":
        terms = {}
        for t in obj["terms"]:
            k = ring.key(t["gens"])
            terms[k] = terms.get(k, 0) + ring.base.from_json(t)
        return ring.element(terms)


# ---------------------------------------------------------------------------
# ring maps


class RingMap:
    """Homomorphism defined by generator images and coercion of base scalars.

    ``base_map`` is descriptive (``identity``, ``reduction``, ``localization``,
    ``inclusion``); scalars are always pushed through ``target.base.normalize``,
    which raises ``IntegralityFailure`` for values the target cannot hold.
    """

    def __init__(self, source: CoefRing, target: CoefRing, images: Mapping, base_map: str = "identity",
                 name: str = "", check_dims: bool = True):
        self.source = source
        self.target = target
        self.base_map = base_map
        self.name = name
        imgs = {}
        for g, img in images.items():
            source.index(g)
            imgs[g] = target(img) if not isinstance(img, CoefElement) else img
            if imgs[g].ring != target:
                raise MixedContext(f"image of {g} lies in {imgs[g].ring}, expected {target}")
        self.images = imgs
        self._validate(check_dims)
        self._plan = []
        for i, g in enumerate(source.names):
            img = imgs.get(g)
            if img is None:
                self._plan.append(None)
            elif len(img.terms) == 1:
                (k, c), = img.terms.items()
                self._plan.append(("mono", k, c, img))
            else:
                self._plan.append(("poly", None, None, img))
        self._pow_cache: dict = {}

    def _validate(self, check_dims: bool):
        s, t = self.source, self.target
        if check_dims:
            for g, img in self.images.items():
                if img.is_zero() or not img.is_homogeneous():
                    if not img.is_homogeneous():
                        raise InhomogeneousElement(f"image of {g} is not homogeneous")
                    continue
                if img.dimension != s.dim_of(g):
                    raise FGLCalcError(f"image of {g} has dimension {img.dimension}, expected {s.dim_of(g)}")
        for r in s.relations:
            if s.has_generator(r) and r in self.images and not self.images[r].is_zero():
                raise FGLCalcError(f"relation generator {r} does not map to zero")
        ch = s.base.characteristic
        if ch and t.scalar(ch) != t.zero:
            raise FGLCalcError(f"characteristic {ch} of the source is not killed in {t}")
        if s.inverted is not None and s.inverted in self.images:
            if not self.images[s.inverted].is_unit():
                raise FGLCalcError(f"inverted generator {s.inverted} must map to a unit")

    def _power(self, i: int, e: int) -> dict:
        key = (i, e)
        hit = self._pow_cache.get(key)
        if hit is None:
            hit = (self._plan[i][3] ** e).terms
            self._pow_cache[key] = hit
        return hit

    def __call__(self, element):
        if not isinstance(element, CoefElement):
            return self.target.scalar(element)
        if element.ring != self.source:
            raise MixedContext(f"{element} is not in {self.source}")
        tgt = self.target
        norm = tgt.base.normalize
        zk = tgt._zero_key
        out: dict = {}
        names = self.source.names
        for k, c in element.terms.items():
            key = list(zk)
            coef = norm(c)
            polys = []
            dead = False
            for i, e in enumerate(k):
                if not e:
                    continue
                plan = self._plan[i]
                if plan is None:
                    raise DanglingGenerator(f"{names[i]} has no image under {self.name or 'this map'}")
                if plan[0] == "mono":
                    _, mk, mc, _ = plan
                    if e < 0:
                        if not plan[3].is_unit():
                            raise ZeroDivisionError(f"image of {names[i]} is not a unit")
                        mc = tgt.base.inverse(mc)
                        mk = tuple(-x for x in mk)
                        e = -e
                    coef = coef * mc**e
                    for j, x in enumerate(mk):
                        if x:
                            key[j] += x * e
                else:
                    if e < 0:
                        raise ZeroDivisionError(f"image of {names[i]} is not a unit")
                    polys.append(self._power(i, e))
            if dead:
                continue
            acc = {tuple(key): coef}
            for poly in polys:
                nxt: dict = {}
                tgt._mul_into(nxt, acc, poly)
                acc = nxt
            tgt._add_into(out, acc)
        return CoefElement(tgt, tgt._clean(out), _trusted=True)

    def compose(self, inner: "RingMap") -> "RingMap":
        """``self ∘ inner``."""
        if inner.target != self.source:
            raise MixedContext("ring maps do not compose")
        images = {g: self(img) for g, img in inner.images.items()}
        return RingMap(inner.source, self.target, images, base_map=f"{self.base_map}∘{inner.base_map}",
                       check_dims=False)

    def is_identity(self) -> bool:
        if self.source != self.target:
            return False
        return all(self.images.get(g) == self.target.gen(g) for g in self.source.names
                   if not self.source.is_killed(g))

    def __repr__(self):
        body = ", ".join(f"{g} -> {img}" for g, img in self.images.items())
        return f"RingMap({self.source} -> {self.target}: {body})"


def identity_map(ring: CoefRing) -> RingMap:
    return RingMap(ring, ring, {g: ring.gen(g) for g in ring.names}, name="id")


def inclusion(source: CoefRing, target: CoefRing, base_map: str = "inclusion") -> RingMap:
    """Map sending each generator to the same-named generator of ``target``."""
    return RingMap(source, target, {g: target.gen(g) for g in source.names}, base_map=base_map)


def canonical_map(source: CoefRing, target: CoefRing) -> RingMap:
    """Tower map of p-typical theories (``BP -> P(m) -> P{m} -> K(m)``, ``BP -> Ch``, ...).

    Generators are sent to the same-named target generator (zero when the
    target kills it).  Chow-type targets have no generators; every ``v_i`` goes
    to zero there.  Generators absent from the target are left without image
    and raise ``DanglingGenerator`` when used.
    """
    images = {}
    for g in source.names:
        if target.has_generator(g):
            images[g] = target.gen(g)
        elif target.kind in ("chow-mod", "additive") and g.startswith("v"):
            images[g] = target.zero
    tb, sb = target.base, source.base
    if sb.kind == "Q" and tb.kind != "Q":
        bm = "localization"
    elif tb.kind == "Zmod" and sb.kind != "Zmod":
        bm = "reduction"
    else:
        bm = "identity"
    return RingMap(source, target, images, base_map=bm, name=f"{source.kind}->{target.kind}")


def apply_ring_map(h: RingMap, e: CoefElement) -> CoefElement:
    return h(e)


# ---------------------------------------------------------------------------
# invariant ideals


@dataclass(frozen=True)
class InvariantIdeal:
    """Monomial ideal of a BP-type ring generated by ``p^r`` and/or some ``v_i``.

    Generator strings: ``"p"``, ``"p^r"`` or a ring generator name such as ``"v1"``.
    """

    p: int
    generators: tuple

    def __post_init__(self):
        check_prime(self.p)

    @property
    def p_exponent(self) -> int | None:
        best = None
        for g in self.generators:
            if g == "p":
                r = 1
            elif g.startswith("p^"):
                r = int(g[2:])
            else:
                continue
            best = r if best is None else min(best, r)
        return best

    @property
    def v_generators(self) -> tuple:
        return tuple(g for g in self.generators if not g.startswith("p"))

    def element(self, g: str, ring: CoefRing) -> CoefElement:
        if g == "p":
            return ring.scalar(self.p)
        if g.startswith("p^"):
            return ring.scalar(self.p ** int(g[2:]))
        return ring.gen(g)

    def contains(self, e: CoefElement) -> bool:
        return ideal_membership(e, self)

    def __str__(self):
        return "(" + ", ".join(self.generators) + ")"


def landweber_ideal(p: int, m: int) -> InvariantIdeal:
    """``I(m) = (v_0 = p, v_1, ..., v_{m-1})``; ``I(0) = 0``."""
    if m < 0:
        raise ValueError("m must be >= 0")
    gens = () if m == 0 else ("p",) + tuple(f"v{i}" for i in range(1, m))
    return InvariantIdeal(p, gens)


def p_power_ideal(p: int, r: int) -> InvariantIdeal:
    return InvariantIdeal(p, ("p" if r == 1 else f"p^{r}",))


def ideal_membership(e: CoefElement, J: InvariantIdeal) -> bool:
    """Membership in a monomial ideal: every term must be divisible by some generator."""
    if not e.is_homogeneous():
        raise InhomogeneousElement(f"{e} is not homogeneous")
    ring = e.ring
    if ring.base.kind == "Zmod":
        raise FGLCalcError("membership is decided in BP-type rings over Z_(p), Z or Q")
    r = J.p_exponent
    vidx = [ring.index(g) for g in J.v_generators if ring.has_generator(g)]
    for k, c in e.terms.items():
        if any(k[i] > 0 for i in vidx):
            continue
        if r is not None:
            f = Fraction(c)
            if f.denominator % J.p == 0:
                raise IntegralityFailure(f"{c} is not {J.p}-local")
            if p_valuation(f.numerator, J.p) >= r:
                continue
        return False
    return True


# ---------------------------------------------------------------------------
# theory rings


def lazard_rational_ring(upto: int) -> CoefRing:
    """``Q[m_1, ..., m_upto]``, ``m_n`` the coefficient of ``x^{n+1}`` in the generic logarithm."""
    return CoefRing(QQ, tuple((f"m{n}", n) for n in range(1, upto + 1)), kind="lazard-q")


def ptypical_log_ring(p: int, upto: int) -> CoefRing:
    """``Q[m_1, ..., m_upto]`` with ``m_i`` standing for ``m_{p^i-1}`` (dimension ``p^i - 1``)."""
    check_prime(p)
    return CoefRing(QQ, tuple((f"m{i}", p**i - 1) for i in range(1, upto + 1)), kind="bp-log", level=p)


def _v_gens(p: int, upto: int) -> tuple:
    return tuple((f"v{i}", p**i - 1) for i in range(1, upto + 1))


def bp_rational_ring(p: int, upto: int) -> CoefRing:
    return CoefRing(QQ, _v_gens(check_prime(p), upto), kind="bp-q", level=p)


THEORY_NAMES = ("lazard-rational", "bp", "p(m)", "p-brace(m)", "k(m)", "chow-mod-p", "additive",
                "multiplicative", "bp-mod-p^r")


def make_theory_ring(spec: str, p: int | None = None, upto: int = 3, m: int | None = None,
                     r: int | None = None) -> CoefRing:
    """Coefficient ring of a named theory.

    ``spec`` is one of ``THEORY_NAMES`` or a CLI form (``bp``, ``p:1``,
    ``pbrace:1``, ``k:1``, ``chow-mod:2``, ``lazard-q``, ``additive``,
    ``multiplicative``, ``bpmod:2``).
    """
    spec, p, m, r = _parse_theory_spec(spec, p, m, r)
    if spec == "lazard-rational":
        return lazard_rational_ring(upto)
    if spec == "additive":
        return CoefRing(ZZ, kind="additive")
    if spec == "multiplicative":
        return CoefRing(ZZ, kind="multiplicative")
    if p is None:
        raise UnsupportedTheory(f"theory {spec} needs a prime")
    check_prime(p)
    if spec == "chow-mod-p":
        return CoefRing(Fp(p), (), ("p",), kind="chow-mod", level=None)
    if spec == "bp":
        return CoefRing(Zp(p), _v_gens(p, upto), kind="bp")
    if spec == "bp-mod-p^r":
        if not r or r < 1:
            raise UnsupportedTheory("bp-mod-p^r needs r >= 1")
        rel = "p" if r == 1 else f"p^{r}"
        return CoefRing(Zmod(p, r), _v_gens(p, upto), (rel,), kind="bp-mod", level=r)
    if m is None or m < 1:
        raise UnsupportedTheory(f"theory {spec} needs a level m >= 1")
    if m > upto:
        upto = m
    rels = ("p",) + tuple(f"v{i}" for i in range(1, m))
    if spec == "p(m)":
        return CoefRing(Fp(p), _v_gens(p, upto), rels, kind="p(m)", level=m)
    if spec == "p-brace(m)":
        return CoefRing(Fp(p), _v_gens(p, upto), rels, inverted=f"v{m}", kind="p{m}", level=m)
    if spec == "k(m)":
        rels = ("p",) + tuple(f"v{i}" for i in range(1, upto + 1) if i != m)
        return CoefRing(Fp(p), _v_gens(p, upto), rels, inverted=f"v{m}", kind="k(m)", level=m)
    raise UnsupportedTheory(spec)


def _parse_theory_spec(spec: str, p, m, r):
    s = spec.strip().lower()
    aliases = {
        "lazard-q": "lazard-rational",
        "lazard": "lazard-rational",
        "universal-p-typical": "bp",
        "chow": "additive",
    }
    if s in aliases:
        return aliases[s], p, m, r
    if ":" in s:
        head, arg = s.split(":", 1)
        n = int(arg)
        if head == "p":
            return "p(m)", p, n, r
        if head == "pbrace":
            return "p-brace(m)", p, n, r
        if head == "k":
            return "k(m)", p, n, r
        if head == "chow-mod":
            if p is not None and p != n:
                raise UnsupportedTheory(f"chow-mod:{n} conflicts with p={p}")
            return "chow-mod-p", n, m, r
        if head == "bpmod":
            return "bp-mod-p^r", p, m, n
        raise UnsupportedTheory(spec)
    if s in THEORY_NAMES:
        return s, p, m, r
    raise UnsupportedTheory(spec)
