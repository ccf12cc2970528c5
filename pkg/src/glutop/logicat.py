"""The logical structure of finite sets, and the handle interface through which
the rest of the package talks to any category with that structure.

A handle exposes finite limits, a subobject classifier and dependent products
together with both transposes. :class:`FinSetCategory` is the base
implementation; diagram categories and gluings implement the same interface.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Any, Callable, Mapping

from .elements import sort_elems
from .errors import ExplosionLimit, MissingCapability, NotMono, SliceMismatch

DEFAULT_CAP = 10**6
BOT, TOP, STAR = "⊥", "⊤", "*"


@dataclass(frozen=True, eq=False)
class FinSetObj:
    """A finite set with canonically sorted, distinct elements."""

    elements: tuple
    _members: frozenset = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "elements", sort_elems(self.elements))
        object.__setattr__(self, "_members", frozenset(self.elements))

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, x):
        return x in self._members

    def __eq__(self, other):
        return isinstance(other, FinSetObj) and self._members == other._members

    def __hash__(self):
        return hash(self._members)

    def __repr__(self):
        return f"FinSetObj({list(self.elements)!r})"


@dataclass(frozen=True, eq=False)
class FinSetMap:
    """A total function between finite sets, stored as a table."""

    src: FinSetObj
    tgt: FinSetObj
    table: Mapping

    def __call__(self, x):
        return self.table[x]

    def image(self) -> frozenset:
        return frozenset(self.table[x] for x in self.src)

    def is_injective(self) -> bool:
        return len(self.image()) == len(self.src)

    def is_surjective(self) -> bool:
        return len(self.image()) == len(self.tgt)

    def key(self):
        return (self.src, self.tgt, tuple(self.table[x] for x in self.src.elements))

    def __eq__(self, other):
        return isinstance(other, FinSetMap) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"FinSetMap({dict((x, self.table[x]) for x in self.src)!r})"


def validate_map(f: FinSetMap) -> list:
    bad = [x for x in f.src if x not in f.table or f.table[x] not in f.tgt]
    return bad


def fmap(src: FinSetObj, tgt: FinSetObj, fn: Callable | Mapping) -> FinSetMap:
    if isinstance(fn, Mapping):
        return FinSetMap(src, tgt, {x: fn[x] for x in src})
    return FinSetMap(src, tgt, {x: fn(x) for x in src})


@dataclass(frozen=True, eq=False)
class Pullback:
    """``apex`` with ``leg1: apex -> dom f`` and ``leg2: apex -> dom g``."""

    category: Any
    f: Any
    g: Any
    apex: Any
    leg1: Any
    leg2: Any

    def factor(self, q1, q2):
        return self.category.pullback_factor(self, q1, q2)


@dataclass(frozen=True, eq=False)
class Equalizer:
    category: Any
    f: Any
    g: Any
    apex: Any
    incl: Any

    def factor(self, h):
        return self.category.equalizer_factor(self, h)


@dataclass(frozen=True, eq=False)
class DependentProduct:
    """``Π_f g`` for ``f: B -> A`` and ``g: C -> B``.

    ``proj: obj -> A``; ``pb`` is the pullback of ``f`` and ``proj``; ``ev`` is the
    counit ``pb.apex -> C`` over ``B``. The transposes work against pullbacks of
    ``f`` along an arbitrary ``d: D -> A`` computed by the owning handle.
    """

    category: Any
    f: Any
    g: Any
    obj: Any
    proj: Any
    pb: Pullback
    ev: Any
    sharp_fn: Callable = field(repr=False, default=None)

    def flat(self, d, u):
        """``u: D -> Π`` over ``A`` to ``B ×_A D -> C`` over ``B``."""
        C = self.category
        if not C.equal(C.compose(self.proj, u), d):
            raise SliceMismatch("map does not lie over the base of the dependent product")
        P = C.pullback(self.f, d)
        k = self.pb.factor(P.leg1, C.compose(u, P.leg2))
        return C.compose(self.ev, k)

    def sharp(self, d, h):
        """``h: B ×_A D -> C`` over ``B`` to ``D -> Π`` over ``A``."""
        C = self.category
        P = C.pullback(self.f, d)
        if not C.same_object(C.dom(h), P.apex):
            raise SliceMismatch("domain is not the pullback of the base map along d")
        if not C.equal(C.compose(self.g, h), P.leg1):
            raise SliceMismatch("map does not lie over B")
        if self.sharp_fn is None:
            raise MissingCapability("dependent product has no transpose")
        return self.sharp_fn(d, h, P)

    def counit_check(self) -> bool:
        C = self.category
        return C.equal(C.compose(self.g, self.ev), self.pb.leg1)


class LogicalCategory:
    """Interface for a finitely complete category with a subobject classifier
    and dependent products. Subclasses override the primitive operations; the
    derived ones are generic."""

    name = "category"

    # primitives
    def dom(self, f):
        raise MissingCapability(f"{self.name}: dom")

    def cod(self, f):
        raise MissingCapability(f"{self.name}: cod")

    def identity(self, X):
        raise MissingCapability(f"{self.name}: identity")

    def compose(self, g, f):
        raise MissingCapability(f"{self.name}: compose")

    def equal(self, f, g) -> bool:
        return f == g

    def same_object(self, X, Y) -> bool:
        return X == Y

    def terminal(self):
        raise MissingCapability(f"{self.name}: terminal")

    def to_terminal(self, X):
        raise MissingCapability(f"{self.name}: to_terminal")

    def pullback(self, f, g) -> Pullback:
        raise MissingCapability(f"{self.name}: pullback")

    def pullback_factor(self, pb: Pullback, q1, q2):
        raise MissingCapability(f"{self.name}: pullback_factor")

    def omega(self):
        raise MissingCapability(f"{self.name}: subobject classifier")

    def char(self, m):
        raise MissingCapability(f"{self.name}: characteristic maps")

    def pi(self, f, g) -> DependentProduct:
        raise MissingCapability(f"{self.name}: dependent products")

    def hom(self, X, Y, cap: int = DEFAULT_CAP) -> list:
        raise MissingCapability(f"{self.name}: hom enumeration")

    def is_mono(self, m) -> bool:
        raise MissingCapability(f"{self.name}: mono test")

    def invert(self, m):
        raise MissingCapability(f"{self.name}: inverses")

    # derived
    def product(self, X, Y) -> Pullback:
        return self.pullback(self.to_terminal(X), self.to_terminal(Y))

    def equalizer(self, f, g) -> Equalizer:
        X, Y = self.dom(f), self.cod(f)
        XY = self.product(X, Y)
        P = self.pullback(XY.factor(self.identity(X), f), XY.factor(self.identity(X), g))
        return Equalizer(self, f, g, P.apex, P.leg1)

    def equalizer_factor(self, eq: Equalizer, h):
        P = self.pullback(*self._eq_pairs(eq))
        return P.factor(h, h)

    def _eq_pairs(self, eq):
        X, Y = self.dom(eq.f), self.cod(eq.f)
        XY = self.product(X, Y)
        return XY.factor(self.identity(X), eq.f), XY.factor(self.identity(X), eq.g)

    def meet(self):
        """``∧: Ω × Ω -> Ω``: classifier of ``(true, true)``."""
        Om, true = self.omega()
        OO = self.product(Om, Om)
        return self.char(OO.factor(true, true)), OO

    def pi_map(self, dp1: DependentProduct, dp2: DependentProduct, t):
        """Functorial action ``Π_f(t)`` for ``t: C1 -> C2`` over ``B``."""
        return dp2.sharp(dp1.proj, self.compose(t, dp1.ev))


class FinSetCategory(LogicalCategory):
    """The category of finite sets."""

    name = "FinSet"

    def __init__(self, cap: int = DEFAULT_CAP):
        self.cap = cap
        self._terminal = FinSetObj((STAR,))
        self._omega = FinSetObj((BOT, TOP))
        self._true = FinSetMap(self._terminal, self._omega, {STAR: TOP})

    def dom(self, f):
        return f.src

    def cod(self, f):
        return f.tgt

    def identity(self, X):
        return FinSetMap(X, X, {x: x for x in X})

    def compose(self, g, f):
        if f.tgt != g.src:
            raise SliceMismatch("maps are not composable")
        return FinSetMap(f.src, g.tgt, {x: g.table[f.table[x]] for x in f.src})

    def initial(self):
        return FinSetObj(())

    def terminal(self):
        return self._terminal

    def to_terminal(self, X):
        return FinSetMap(X, self._terminal, {x: STAR for x in X})

    def point(self, X, x):
        return FinSetMap(self._terminal, X, {STAR: x})

    def pullback(self, f, g) -> Pullback:
        if f.tgt != g.tgt:
            raise SliceMismatch("pullback of maps with different codomains")
        by = {}
        for y in g.src:
            by.setdefault(g.table[y], []).append(y)
        pairs = [(x, y) for x in f.src for y in by.get(f.table[x], ())]
        if len(pairs) > self.cap:
            raise ExplosionLimit(f"pullback has {len(pairs)} elements")
        P = FinSetObj(pairs)
        return Pullback(self, f, g, P, FinSetMap(P, f.src, {p: p[0] for p in P}),
                        FinSetMap(P, g.src, {p: p[1] for p in P}))

    def pullback_factor(self, pb, q1, q2):
        W = q1.src
        table = {}
        for w in W:
            x, y = q1.table[w], q2.table[w]
            if pb.f.table[x] != pb.g.table[y]:
                raise SliceMismatch("cone does not commute", witness=w)
            table[w] = (x, y)
        return FinSetMap(W, pb.apex, table)

    def equalizer(self, f, g) -> Equalizer:
        E = FinSetObj([x for x in f.src if f.table[x] == g.table[x]])
        return Equalizer(self, f, g, E, FinSetMap(E, f.src, {x: x for x in E}))

    def equalizer_factor(self, eq, h):
        for w in h.src:
            if h.table[w] not in eq.apex:
                raise SliceMismatch("map does not equalize", witness=w)
        return FinSetMap(h.src, eq.apex, dict(h.table))

    def omega(self):
        return self._omega, self._true

    def char(self, m):
        return char_map(m)

    def pi(self, f, g) -> DependentProduct:
        return pi_finset(f, g, self.cap)

    def is_mono(self, m) -> bool:
        return m.is_injective()

    def invert(self, m):
        return inverse(m)

    def hom(self, X, Y, cap: int = DEFAULT_CAP) -> list:
        if len(X) and len(Y) ** len(X) > cap:
            raise ExplosionLimit(f"{len(Y)}^{len(X)} functions exceed cap {cap}")
        return [FinSetMap(X, Y, dict(zip(X.elements, vals)))
                for vals in product(Y.elements, repeat=len(X))]


_FINSET = FinSetCategory()


def finset_handle(cap: int = DEFAULT_CAP) -> FinSetCategory:
    return FinSetCategory(cap) if cap != DEFAULT_CAP else _FINSET


def char_map(m: FinSetMap) -> FinSetMap:
    """The classifying map of a mono into ``{⊥, ⊤}``."""
    if not m.is_injective():
        raise NotMono("map is not injective")
    img = m.image()
    om = _FINSET._omega
    return FinSetMap(m.tgt, om, {y: TOP if y in img else BOT for y in m.tgt})


def pi_finset(f: FinSetMap, g: FinSetMap, cap: int = DEFAULT_CAP) -> DependentProduct:
    """Dependent product along ``f: B -> A`` of ``g: C -> B``: pairs of a point
    ``a`` and a section of ``g`` over the fiber of ``f`` at ``a``."""
    if g.tgt != f.src:
        raise SliceMismatch("g must land in the domain of f")
    fib_f = {a: [] for a in f.tgt}
    for b in f.src:
        fib_f[f.table[b]].append(b)
    fib_g = {b: [] for b in g.tgt}
    for c in g.src:
        fib_g[g.table[c]].append(c)
    elems = []
    for a in f.tgt:
        bs = fib_f[a]
        count = 1
        for b in bs:
            count *= len(fib_g[b])
        if len(elems) + count > cap:
            raise ExplosionLimit(f"dependent product exceeds cap {cap}")
        for choice in product(*(fib_g[b] for b in bs)):
            elems.append((a, tuple(zip(bs, choice))))
    Pi = FinSetObj(elems)
    H = finset_handle(cap)
    proj = FinSetMap(Pi, f.tgt, {p: p[0] for p in Pi})
    pb = H.pullback(f, proj)
    ev = FinSetMap(pb.apex, g.src, {(b, p): dict(p[1])[b] for (b, p) in pb.apex})

    def sharp(d, h, P):
        table = {}
        for x in d.src:
            a = d.table[x]
            table[x] = (a, tuple((b, h.table[(b, x)]) for b in fib_f[a]))
        return FinSetMap(d.src, Pi, table)

    return DependentProduct(H, f, g, Pi, proj, pb, ev, sharp)


def transpose_flat_finset(dp: DependentProduct, d: FinSetMap, u: FinSetMap) -> FinSetMap:
    return dp.flat(d, u)


def transpose_sharp_finset(dp: DependentProduct, d: FinSetMap, h: FinSetMap) -> FinSetMap:
    return dp.sharp(d, h)


@dataclass(frozen=True, eq=False)
class LimitResult:
    apex: FinSetObj
    legs: Mapping[str, FinSetMap]


def limit(shape, sets: Mapping[str, FinSetObj], maps: Mapping[str, FinSetMap],
          cap: int = DEFAULT_CAP) -> LimitResult:
    """Limit of a finite-set valued diagram on a finite category ``shape``.

    Elements are tuples of ``(object, element)`` pairs sorted by object id,
    found by backtracking with propagation along the diagram's maps.
    """
    objs = list(shape.objects)
    out = {o: [m for m in shape.out_arrows(o) if not shape.is_identity(m)] for o in objs}
    inc = {o: [m for m in shape.in_arrows(o) if not shape.is_identity(m)] for o in objs}
    results = []
    visited = [0]
    assign: dict = {}

    def ok(o, x):
        for m in out[o]:
            t = shape.tgt(m)
            if t in assign and maps[m].table[x] != assign[t]:
                return False
            if t == o and maps[m].table[x] != x:
                return False
        for m in inc[o]:
            s = shape.src(m)
            if s in assign and maps[m].table[assign[s]] != x:
                return False
        return True

    def candidates(o):
        for m in inc[o]:
            s = shape.src(m)
            if s in assign:
                return (maps[m].table[assign[s]],)
        return sets[o].elements

    def pick():
        best, best_n = None, None
        for o in objs:
            if o in assign:
                continue
            n = len(candidates(o))
            if best is None or n < best_n:
                best, best_n = o, n
                if n <= 1:
                    break
        return best

    def go():
        o = pick()
        if o is None:
            results.append(tuple((k, assign[k]) for k in objs))
            if len(results) > cap:
                raise ExplosionLimit(f"limit exceeds cap {cap}")
            return
        for x in candidates(o):
            visited[0] += 1
            if visited[0] > 50 * cap:
                raise ExplosionLimit(f"limit search exceeds cap {cap}")
            if ok(o, x):
                assign[o] = x
                go()
                del assign[o]

    go()
    apex = FinSetObj(results)
    legs = {o: FinSetMap(apex, sets[o], {e: dict(e)[o] for e in apex}) for o in objs}
    return LimitResult(apex, legs)


def limit_map(L1: LimitResult, L2: LimitResult, components: Mapping[str, FinSetMap]) -> FinSetMap:
    """Map between limits over the same shape induced by a natural transformation."""
    table = {}
    for e in L1.apex:
        img = tuple((o, components[o].table[x]) for o, x in e)
        if img not in L2.apex:
            raise SliceMismatch("components are not natural", witness=e)
        table[e] = img
    return FinSetMap(L1.apex, L2.apex, table)


def sections_count(f: FinSetMap, g: FinSetMap) -> int:
    """Number of elements of ``Π_f g`` computed without building it."""
    total = 0
    sizes = {b: 0 for b in g.tgt}
    for c in g.src:
        sizes[g.table[c]] += 1
    for a in f.tgt:
        n = 1
        for b in f.src:
            if f.table[b] == a:
                n *= sizes[b]
        total += n
    return total


def is_iso(f: FinSetMap) -> bool:
    return f.is_injective() and f.is_surjective()


def inverse(f: FinSetMap) -> FinSetMap:
    if not is_iso(f):
        raise NotMono("map is not a bijection")
    return FinSetMap(f.tgt, f.src, {y: x for x, y in f.table.items() if x in f.src})

