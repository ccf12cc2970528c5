"""Set-valued diagrams on finite categories, natural transformations between
them, and the logical structure of diagram categories.

Limits and monos are computed pointwise. The subobject classifier and
dependent products depend on the index category: a groupoid gets the
pointwise formers here, an inverse category gets the matching-object formers
from :mod:`glutop.matching`.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping

from .elements import ekey, freeze
from .errors import (
    ExplosionLimit,
    NotGroupoid,
    NotPowerful,
    ParseError,
    ShapeMismatch,
    SliceMismatch,
    Violation,
)
from .fincat import FinCategory, FinFunctor, InverseStructure, category_from_json, infer_inverse_structure
from .logicat import (
    BOT,
    DEFAULT_CAP,
    STAR,
    TOP,
    DependentProduct,
    Equalizer,
    FinSetMap,
    FinSetObj,
    LogicalCategory,
    Pullback,
    char_map,
    finset_handle,
    inverse,
    pi_finset,
)


@dataclass(frozen=True, eq=False)
class Diagram:
    """A functor from a finite category to finite sets."""

    index: FinCategory
    sets: Mapping[str, FinSetObj]
    maps: Mapping[str, FinSetMap]

    def __call__(self, m: str) -> FinSetMap:
        return self.maps[m]

    def act(self, m: str, x):
        return self.maps[m].table[x]

    def sizes(self) -> dict:
        return {o: len(self.sets[o]) for o in self.index.objects}

    def key(self):
        return (self.index.key(), tuple((o, self.sets[o]) for o in self.index.objects),
                tuple((m, self.maps[m].key()) for m in sorted(self.index.morphisms)))

    def __eq__(self, other):
        return isinstance(other, Diagram) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"Diagram({self.sizes()})"


def make_diagram(index: FinCategory, sets: Mapping[str, Iterable],
                 maps: Mapping[str, Mapping | Callable]) -> Diagram:
    """Build a diagram, filling identity maps that are not given."""
    S = {o: s if isinstance(s, FinSetObj) else FinSetObj(tuple(s)) for o, s in sets.items()}
    M = {}
    for m, (a, b) in index.morphisms.items():
        if m in maps:
            t = maps[m]
            if isinstance(t, FinSetMap):
                M[m] = t
            elif callable(t):
                M[m] = FinSetMap(S[a], S[b], {x: t(x) for x in S[a]})
            else:
                M[m] = FinSetMap(S[a], S[b], dict(t))
        elif index.is_identity(m):
            M[m] = FinSetMap(S[a], S[a], {x: x for x in S[a]})
        else:
            raise ParseError(f"no map given for morphism {m}")
    return Diagram(index, S, M)


@dataclass(frozen=True, eq=False)
class NatTrans:
    src: Diagram
    tgt: Diagram
    components: Mapping[str, FinSetMap]

    def __getitem__(self, o: str) -> FinSetMap:
        return self.components[o]

    def key(self):
        return (self.src.key(), self.tgt.key(),
                tuple((o, self.components[o].key()) for o in self.src.index.objects))

    def __eq__(self, other):
        return isinstance(other, NatTrans) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"NatTrans({ {o: dict(c.table) for o, c in self.components.items()} })"


def make_nat(src: Diagram, tgt: Diagram, comps: Mapping[str, Mapping | Callable]) -> NatTrans:
    out = {}
    for o in src.index.objects:
        c = comps[o]
        if isinstance(c, FinSetMap):
            out[o] = c
        elif callable(c):
            out[o] = FinSetMap(src.sets[o], tgt.sets[o], {x: c(x) for x in src.sets[o]})
        else:
            out[o] = FinSetMap(src.sets[o], tgt.sets[o], dict(c))
    return NatTrans(src, tgt, out)


def validate_diagram(d: Diagram) -> list:
    rep = []
    C = d.index
    for o in C.objects:
        if o not in d.sets:
            rep.append(Violation("MissingSet", f"no set at {o}", o))
    if rep:
        return rep
    for m, (a, b) in sorted(C.morphisms.items()):
        f = d.maps.get(m)
        if f is None:
            rep.append(Violation("MissingMap", f"no map for {m}", m))
            continue
        if f.src != d.sets[a] or f.tgt != d.sets[b]:
            rep.append(Violation("BrokenFunctoriality", f"map for {m} has wrong endpoints", m))
            continue
        bad = [x for x in f.src if x not in f.table or f.table[x] not in f.tgt]
        if bad:
            rep.append(Violation("BrokenFunctoriality", f"map for {m} is not total", (m, bad[0])))
    if rep:
        return rep
    for o in C.objects:
        f = d.maps[C.identity(o)]
        if any(f.table[x] != x for x in f.src):
            rep.append(Violation("BrokenFunctoriality", f"identity at {o} acts nontrivially", o))
    for (g, f), gf in sorted(C.composition.items()):
        G, F, GF = d.maps[g], d.maps[f], d.maps[gf]
        for x in F.src:
            if G.table[F.table[x]] != GF.table[x]:
                rep.append(Violation("BrokenFunctoriality", f"X({g}) X({f}) != X({gf}) at {x!r}",
                                     (g, f, x)))
                break
    return rep


def validate_nat(t: NatTrans) -> list:
    rep = []
    X, Y = t.src, t.tgt
    if X.index != Y.index:
        return [Violation("ShapeMismatch", "source and target on different categories")]
    C = X.index
    for o in C.objects:
        c = t.components.get(o)
        if c is None or c.src != X.sets[o] or c.tgt != Y.sets[o] or any(
                x not in c.table or c.table[x] not in Y.sets[o] for x in X.sets[o]):
            rep.append(Violation("BrokenComponent", f"component at {o} is not a map X->Y", o))
    if rep:
        return rep
    for m, (a, b) in sorted(C.morphisms.items()):
        for x in X.sets[a]:
            if t.components[b].table[X.maps[m].table[x]] != Y.maps[m].table[t.components[a].table[x]]:
                rep.append(Violation("BrokenNaturality", f"square for {m} fails at {x!r}", (m, x)))
                break
    return rep


def _object_order(C: FinCategory) -> list:
    inv = infer_inverse_structure(C)
    if inv is not None:
        return inv.objects_by_degree()
    return sorted(C.objects, key=lambda o: (len(C.out_arrows(o)), o))


def enumerate_nat_trans(X: Diagram, Y: Diagram, cap: int = DEFAULT_CAP,
                        allowed: Callable | None = None, injective: bool = False,
                        first: bool = False) -> list:
    """All natural transformations ``X -> Y``, by backtracking over elements.

    ``allowed(o, x)`` may return the collection of admissible values for ``x``
    at ``o`` (used to enumerate maps over a fixed base). ``injective`` keeps
    only pointwise injective maps; ``first`` stops at the first hit.
    """
    if X.index != Y.index:
        raise ShapeMismatch("diagrams on different index categories")
    C = X.index
    order = [(o, x) for o in _object_order(C) for x in X.sets[o].elements]
    outs = {o: [m for m in C.out_arrows(o) if not C.is_identity(m)] for o in C.objects}
    pre = {}
    for m in C.non_identity():
        a, b = C.morphisms[m]
        for x in X.sets[a]:
            pre.setdefault((b, X.maps[m].table[x]), []).append((m, a, x))
    val: dict = {}
    used: dict = {o: set() for o in C.objects}
    results = []

    def cands(o, x):
        for m, a, x2 in pre.get((o, x), ()):
            if (a, x2) in val:
                return (Y.maps[m].table[val[(a, x2)]],)
        if allowed is not None:
            return allowed(o, x)
        return Y.sets[o].elements

    def ok(o, x, y):
        for m in outs[o]:
            b = C.tgt(m)
            x2 = X.maps[m].table[x]
            key = (b, x2)
            if key in val:
                if Y.maps[m].table[y] != val[key]:
                    return False
            elif key == (o, x) and Y.maps[m].table[y] != y:
                return False
        for m, a, x2 in pre.get((o, x), ()):
            if (a, x2) in val and Y.maps[m].table[val[(a, x2)]] != y:
                return False
        if allowed is not None and y not in allowed(o, x):
            return False
        if injective and y in used[o]:
            return False
        return True

    def go(k):
        if k == len(order):
            comps = {o: FinSetMap(X.sets[o], Y.sets[o], {x: val[(o, x)] for x in X.sets[o]})
                     for o in C.objects}
            results.append(NatTrans(X, Y, comps))
            if len(results) > cap:
                raise ExplosionLimit(f"more than {cap} natural transformations")
            return
        o, x = order[k]
        for y in cands(o, x):
            if ok(o, x, y):
                val[(o, x)] = y
                used[o].add(y)
                go(k + 1)
                used[o].discard(y)
                del val[(o, x)]
                if first and results:
                    return

    go(0)
    return results


def is_mono(t: NatTrans) -> bool:
    return all(c.is_injective() for c in t.components.values())


def is_iso_nat(t: NatTrans) -> bool:
    return all(c.is_injective() and c.is_surjective() for c in t.components.values())


def constant_diagram(C: FinCategory, elems: Iterable) -> Diagram:
    S = FinSetObj(tuple(elems))
    return make_diagram(C, {o: S for o in C.objects},
                        {m: {x: x for x in S} for m in C.morphisms})


def terminal_diagram(C: FinCategory) -> Diagram:
    return constant_diagram(C, (STAR,))


def subdiagram(d: Diagram, keep: Mapping[str, Iterable]) -> tuple:
    """Smallest subdiagram containing the given elements, with its inclusion."""
    C = d.index
    sel = {o: set(keep.get(o, ())) for o in C.objects}
    frontier = [(o, x) for o in C.objects for x in sel[o]]
    while frontier:
        o, x = frontier.pop()
        for m in C.out_arrows(o):
            b = C.tgt(m)
            y = d.maps[m].table[x]
            if y not in sel[b]:
                sel[b].add(y)
                frontier.append((b, y))
    sets = {o: FinSetObj(tuple(sel[o])) for o in C.objects}
    maps = {m: FinSetMap(sets[a], sets[b], {x: d.maps[m].table[x] for x in sets[a]})
            for m, (a, b) in C.morphisms.items()}
    sub = Diagram(C, sets, maps)
    inc = NatTrans(sub, d, {o: FinSetMap(sets[o], d.sets[o], {x: x for x in sets[o]})
                            for o in C.objects})
    return sub, inc


def restrict(d, F: FinFunctor):
    """Precompose a diagram (or natural transformation) with ``F: J -> I``."""
    if isinstance(d, NatTrans):
        src, tgt = restrict(d.src, F), restrict(d.tgt, F)
        return NatTrans(src, tgt, {j: d.components[F.obj_map[j]] for j in F.src.objects})
    if F.tgt != d.index:
        raise ShapeMismatch("functor does not land in the diagram's index category")
    J = F.src
    sets = {j: d.sets[F.obj_map[j]] for j in J.objects}
    maps = {m: d.maps[F.mor_map[m]] for m in J.morphisms}
    return Diagram(J, sets, maps)


class DiagramCategory(LogicalCategory):
    """Handle for ``FinSet^I``."""

    def __init__(self, index: FinCategory, inverse: InverseStructure | None = None,
                 cap: int = DEFAULT_CAP):
        self.index = index
        self.inverse = inverse
        self.cap = cap
        self.name = f"FinSet^{index.name or 'I'}"
        self.fs = finset_handle(cap)
        self._omega = None

    def dom(self, f):
        return f.src

    def cod(self, f):
        return f.tgt

    def identity(self, X):
        return NatTrans(X, X, {o: self.fs.identity(X.sets[o]) for o in self.index.objects})

    def compose(self, g, f):
        if f.tgt != g.src:
            raise SliceMismatch("natural transformations are not composable")
        return NatTrans(f.src, g.tgt, {o: self.fs.compose(g.components[o], f.components[o])
                                       for o in self.index.objects})

    def terminal(self):
        return terminal_diagram(self.index)

    def to_terminal(self, X):
        T = self.terminal()
        return NatTrans(X, T, {o: FinSetMap(X.sets[o], T.sets[o], {x: STAR for x in X.sets[o]})
                               for o in self.index.objects})

    def pullback(self, f, g) -> Pullback:
        if f.tgt != g.tgt:
            raise SliceMismatch("pullback of maps with different codomains")
        C = self.index
        pbs = {o: self.fs.pullback(f.components[o], g.components[o]) for o in C.objects}
        sets = {o: pbs[o].apex for o in C.objects}
        X, Y = f.src, g.src
        maps = {m: FinSetMap(sets[a], sets[b],
                             {(x, y): (X.maps[m].table[x], Y.maps[m].table[y]) for x, y in sets[a]})
                for m, (a, b) in C.morphisms.items()}
        P = Diagram(C, sets, maps)
        return Pullback(self, f, g, P, NatTrans(P, X, {o: pbs[o].leg1 for o in C.objects}),
                        NatTrans(P, Y, {o: pbs[o].leg2 for o in C.objects}))

    def pullback_factor(self, pb, q1, q2):
        comps = {}
        for o in self.index.objects:
            W = q1.src.sets[o]
            table = {}
            for w in W:
                x, y = q1.components[o].table[w], q2.components[o].table[w]
                if pb.f.components[o].table[x] != pb.g.components[o].table[y]:
                    raise SliceMismatch("cone does not commute", witness=(o, w))
                table[w] = (x, y)
            comps[o] = FinSetMap(W, pb.apex.sets[o], table)
        return NatTrans(q1.src, pb.apex, comps)

    def equalizer(self, f, g) -> Equalizer:
        C = self.index
        X = f.src
        sets = {o: FinSetObj([x for x in X.sets[o]
                              if f.components[o].table[x] == g.components[o].table[x]])
                for o in C.objects}
        maps = {m: FinSetMap(sets[a], sets[b], {x: X.maps[m].table[x] for x in sets[a]})
                for m, (a, b) in C.morphisms.items()}
        E = Diagram(C, sets, maps)
        inc = NatTrans(E, X, {o: FinSetMap(sets[o], X.sets[o], {x: x for x in sets[o]})
                              for o in C.objects})
        return Equalizer(self, f, g, E, inc)

    def equalizer_factor(self, eq, h):
        comps = {}
        for o in self.index.objects:
            for w in h.src.sets[o]:
                if h.components[o].table[w] not in eq.apex.sets[o]:
                    raise SliceMismatch("map does not equalize", witness=(o, w))
            comps[o] = FinSetMap(h.src.sets[o], eq.apex.sets[o], dict(h.components[o].table))
        return NatTrans(h.src, eq.apex, comps)

    def is_mono(self, m) -> bool:
        return is_mono(m)

    def invert(self, m):
        return NatTrans(m.tgt, m.src, {o: inverse(c) for o, c in m.components.items()})

    def hom(self, X, Y, cap: int = DEFAULT_CAP) -> list:
        return enumerate_nat_trans(X, Y, cap)

    def _former(self):
        if self.index.is_groupoid():
            return "groupoid"
        if self.inverse is None:
            self.inverse = infer_inverse_structure(self.index)
        if self.inverse is not None:
            return "inverse"
        raise NotPowerful(f"{self.index.name or 'index'} is neither a groupoid nor inverse")

    def omega(self):
        if self._omega is None:
            if self._former() == "groupoid":
                self._omega = omega_groupoid(self.index)
            else:
                from .matching import omega_inverse
                self._omega = omega_inverse(self.inverse)
        return self._omega

    def char(self, m):
        if self._former() == "groupoid":
            return char_groupoid(m, self.omega())
        from .matching import char_inverse
        return char_inverse(self.inverse, m, self.omega())

    def pi(self, f, g) -> DependentProduct:
        if self._former() == "groupoid":
            return pi_groupoid(f, g, self.cap, handle=self)
        from .matching import pi_inverse
        return pi_inverse(self.inverse, f, g, self.cap, handle=self)


def diagram_handle(index: FinCategory, inverse: InverseStructure | None = None,
                   cap: int = DEFAULT_CAP) -> DiagramCategory:
    """Handle for ``FinSet^I``; raises NotPowerful when no former applies."""
    h = DiagramCategory(index, inverse, cap)
    h._former()
    return h


def omega_groupoid(G: FinCategory) -> tuple:
    """Constant two-element classifier on a groupoid, with its truth map."""
    if not G.is_groupoid():
        raise NotGroupoid(f"{G.name or 'index'} has a non-invertible morphism")
    Om = constant_diagram(G, (BOT, TOP))
    T = terminal_diagram(G)
    true = NatTrans(T, Om, {o: FinSetMap(T.sets[o], Om.sets[o], {STAR: TOP}) for o in G.objects})
    return Om, true


def char_groupoid(m: NatTrans, omega: tuple) -> NatTrans:
    Om = omega[0]
    return NatTrans(m.tgt, Om, {o: FinSetMap(m.tgt.sets[o], Om.sets[o], char_map(c).table)
                                for o, c in m.components.items()})


def pi_groupoid(f: NatTrans, g: NatTrans, cap: int = DEFAULT_CAP,
                handle: DiagramCategory | None = None) -> DependentProduct:
    """Pointwise sections, acted on by conjugation."""
    G = f.src.index
    if not G.is_groupoid():
        raise NotGroupoid(f"{G.name or 'index'} has a non-invertible morphism")
    H = handle or DiagramCategory(G, cap=cap)
    A, B, Cd = f.tgt, f.src, g.src
    local = {o: pi_finset(f.components[o], g.components[o], cap) for o in G.objects}
    sets = {o: local[o].obj for o in G.objects}
    maps = {}
    for m, (a, b) in G.morphisms.items():
        table = {}
        for (x, sec) in sets[a]:
            moved = [(B.maps[m].table[bb], Cd.maps[m].table[cc]) for bb, cc in sec]
            moved.sort(key=lambda p: ekey(p[0]))
            table[(x, sec)] = (A.maps[m].table[x], tuple(moved))
        maps[m] = FinSetMap(sets[a], sets[b], table)
    Pi = Diagram(G, sets, maps)
    proj = NatTrans(Pi, A, {o: local[o].proj for o in G.objects})
    pb = H.pullback(f, proj)
    ev = NatTrans(pb.apex, Cd, {o: FinSetMap(pb.apex.sets[o], Cd.sets[o],
                                             {(bb, p): dict(p[1])[bb] for bb, p in pb.apex.sets[o]})
                                for o in G.objects})

    def sharp(d, h, P):
        comps = {}
        for o in G.objects:
            Po = H.fs.pullback(f.components[o], d.components[o])
            ho = FinSetMap(Po.apex, Cd.sets[o], h.components[o].table)
            comps[o] = local[o].sharp(d.components[o], ho)
        return NatTrans(d.src, Pi, comps)

    return DependentProduct(H, f, g, Pi, proj, pb, ev, sharp)


# JSON

def diagram_from_json(data: Mapping, base_dir: str = ".", index: FinCategory | None = None) -> Diagram:
    if not isinstance(data, Mapping):
        raise ParseError("diagram document must be a JSON object")
    unknown = set(data) - {"category", "sets", "maps"}
    if unknown:
        raise ParseError(f"unknown keys in diagram file: {sorted(unknown)}")
    if index is None:
        index = _load_category_ref(data.get("category"), base_dir)
    try:
        sets = {str(o): [freeze(x) for x in xs] for o, xs in data["sets"].items()}
        maps = {str(m): {freeze(k): freeze(v) for k, v in t.items()}
                for m, t in data.get("maps", {}).items()}
        d = make_diagram(index, sets, maps)
    except (KeyError, TypeError, AttributeError) as exc:
        raise ParseError(f"malformed diagram: {exc}") from exc
    return d


def _load_category_ref(ref, base_dir: str) -> FinCategory:
    if isinstance(ref, str):
        path = ref if os.path.isabs(ref) else os.path.join(base_dir, ref)
        try:
            with open(path, encoding="utf-8") as fh:
                ref = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ParseError(f"cannot read category {path}: {exc}") from exc
    if not isinstance(ref, Mapping):
        raise ParseError("diagram needs a category (path or inline object)")
    return category_from_json(ref)[0]


def diagram_to_json(d: Diagram, category: object = None) -> dict:
    from .elements import show
    from .fincat import category_to_json
    return {
        "category": category if category is not None else category_to_json(d.index),
        "sets": {o: [show(x) for x in d.sets[o]] for o in d.index.objects},
        "maps": {m: {show(x): show(d.maps[m].table[x]) for x in d.maps[m].src}
                 for m in d.index.non_identity()},
    }


def nat_from_json(data: Mapping, base_dir: str = ".") -> NatTrans:
    unknown = set(data) - {"src", "tgt", "components"}
    if unknown:
        raise ParseError(f"unknown keys in natural transformation file: {sorted(unknown)}")
    src = _load_diagram_ref(data["src"], base_dir)
    tgt = _load_diagram_ref(data["tgt"], base_dir, src.index)
    comps = {str(o): {freeze(k): freeze(v) for k, v in t.items()}
             for o, t in data["components"].items()}
    try:
        return make_nat(src, tgt, comps)
    except KeyError as exc:
        raise ParseError(f"malformed components: {exc}") from exc


def _load_diagram_ref(ref, base_dir: str, index: FinCategory | None = None) -> Diagram:
    if isinstance(ref, str):
        path = ref if os.path.isabs(ref) else os.path.join(base_dir, ref)
        try:
            with open(path, encoding="utf-8") as fh:
                ref = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ParseError(f"cannot read diagram {path}: {exc}") from exc
        base_dir = os.path.dirname(path)
    return diagram_from_json(ref, base_dir, index)
