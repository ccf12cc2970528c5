"""Finite categories given by explicit tables, inverse structures on them,
coslices, strata, truncations, profunctor collages and the strata
decomposition of an inverse category."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .errors import (
    ExplosionLimit,
    InvalidCategory,
    ParseError,
    ReconstructionFailed,
    UnknownObject,
    Violation,
)

MORPHISM_CAP = 10_000


@dataclass(frozen=True, eq=False)
class FinCategory:
    """A finite category.

    ``morphisms`` maps a morphism id to ``(src, tgt)``; ``composition`` maps
    ``(g, f)`` to the id of ``g ∘ f`` (``f`` first). The tables are not checked
    on construction; use :func:`validate_category`.
    """

    objects: tuple
    morphisms: Mapping[str, tuple]
    identities: Mapping[str, str]
    composition: Mapping[tuple, str]
    name: str = ""
    _out: dict = field(init=False, repr=False)
    _in: dict = field(init=False, repr=False)
    _hom: dict = field(init=False, repr=False)
    _iso: dict = field(init=False, repr=False)

    def __post_init__(self):
        if len(self.morphisms) > MORPHISM_CAP:
            raise ExplosionLimit(f"{len(self.morphisms)} morphisms exceeds cap {MORPHISM_CAP}")
        object.__setattr__(self, "objects", tuple(sorted(self.objects)))
        out = {o: [] for o in self.objects}
        inc = {o: [] for o in self.objects}
        hom = {}
        for m in sorted(self.morphisms):
            s, t = self.morphisms[m]
            out.setdefault(s, []).append(m)
            inc.setdefault(t, []).append(m)
            hom.setdefault((s, t), []).append(m)
        object.__setattr__(self, "_out", {k: tuple(v) for k, v in out.items()})
        object.__setattr__(self, "_in", {k: tuple(v) for k, v in inc.items()})
        object.__setattr__(self, "_hom", {k: tuple(v) for k, v in hom.items()})
        object.__setattr__(self, "_iso", {})

    @classmethod
    def from_arrows(cls, objects: Iterable[str], arrows: Iterable[tuple],
                    composites: Mapping[tuple, str] = (), name: str = "",
                    id_prefix: str = "id_") -> "FinCategory":
        """Build from non-identity arrows ``(id, src, tgt)`` and the composites of
        non-identity pairs; identities and their composites are added."""
        objects = tuple(objects)
        mors = {m: (s, t) for m, s, t in arrows}
        ids = {o: id_prefix + o for o in objects}
        for o in objects:
            mors[ids[o]] = (o, o)
        comp = dict(composites)
        for m, (s, t) in mors.items():
            comp[(ids[t], m)] = m
            comp[(m, ids[s])] = m
        return cls(objects, mors, ids, comp, name)

    # basic queries
    def src(self, m: str) -> str:
        return self.morphisms[m][0]

    def tgt(self, m: str) -> str:
        return self.morphisms[m][1]

    def hom(self, a: str, b: str) -> tuple:
        return self._hom.get((a, b), ())

    def out_arrows(self, a: str) -> tuple:
        return self._out.get(a, ())

    def in_arrows(self, b: str) -> tuple:
        return self._in.get(b, ())

    def identity(self, a: str) -> str:
        return self.identities[a]

    def is_identity(self, m: str) -> bool:
        return self.identities.get(self.src(m)) == m

    def compose(self, g: str, f: str) -> str:
        try:
            return self.composition[(g, f)]
        except KeyError:
            raise InvalidCategory(f"missing composite {g} ∘ {f}", witness=(g, f)) from None

    def compose_path(self, *ms: str) -> str:
        """Compose right to left: ``compose_path(h, g, f) = h ∘ g ∘ f``."""
        out = ms[-1]
        for m in reversed(ms[:-1]):
            out = self.compose(m, out)
        return out

    def inverse(self, m: str) -> str | None:
        """The inverse of ``m`` found by exhaustive search, or None."""
        if m not in self._iso:
            s, t = self.morphisms[m]
            inv = None
            for n in self.hom(t, s):
                if (self.composition.get((n, m)) == self.identities[s]
                        and self.composition.get((m, n)) == self.identities[t]):
                    inv = n
                    break
            self._iso[m] = inv
        return self._iso[m]

    def is_iso(self, m: str) -> bool:
        return self.inverse(m) is not None

    def is_groupoid(self) -> bool:
        return all(self.is_iso(m) for m in self.morphisms)

    def non_identity(self) -> tuple:
        return tuple(m for m in sorted(self.morphisms) if not self.is_identity(m))

    def full_subcategory(self, objs: Iterable[str], name: str = "") -> "FinCategory":
        keep = set(objs)
        mors = {m: st for m, st in self.morphisms.items() if st[0] in keep and st[1] in keep}
        comp = {k: v for k, v in self.composition.items() if k[0] in mors and k[1] in mors}
        ids = {o: self.identities[o] for o in keep}
        return FinCategory(tuple(keep), mors, ids, comp, name)

    def key(self) -> tuple:
        return (self.objects, tuple(sorted(self.morphisms.items())),
                tuple(sorted(self.identities.items())), tuple(sorted(self.composition.items())))

    def __eq__(self, other):
        return isinstance(other, FinCategory) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"FinCategory({self.name or '?'}: {len(self.objects)} objects, {len(self.morphisms)} morphisms)"


@dataclass(frozen=True, eq=False)
class FinFunctor:
    src: FinCategory
    tgt: FinCategory
    obj_map: Mapping[str, str]
    mor_map: Mapping[str, str]

    def __call__(self, m: str) -> str:
        return self.mor_map[m]

    def on_obj(self, o: str) -> str:
        return self.obj_map[o]


def validate_functor(F: FinFunctor) -> list:
    rep = []
    for m, (s, t) in F.src.morphisms.items():
        if m not in F.mor_map:
            rep.append(Violation("MissingMorphism", f"{m} has no image", m))
            continue
        fm = F.mor_map[m]
        if F.tgt.morphisms.get(fm) != (F.obj_map[s], F.obj_map[t]):
            rep.append(Violation("BrokenEndpoints", f"image of {m} has wrong endpoints", m))
    if rep:
        return rep
    for o in F.src.objects:
        if F.mor_map[F.src.identity(o)] != F.tgt.identity(F.obj_map[o]):
            rep.append(Violation("BrokenIdentity", f"identity of {o} not preserved", o))
    for (g, f), gf in F.src.composition.items():
        if F.tgt.composition.get((F(g), F(f))) != F(gf):
            rep.append(Violation("BrokenComposition", f"{g} ∘ {f} not preserved", (g, f)))
    return rep


def identity_functor(C: FinCategory) -> FinFunctor:
    return FinFunctor(C, C, {o: o for o in C.objects}, {m: m for m in C.morphisms})


def inclusion_functor(sub: FinCategory, C: FinCategory) -> FinFunctor:
    return FinFunctor(sub, C, {o: o for o in sub.objects}, {m: m for m in sub.morphisms})


def validate_category(C: FinCategory) -> list:
    """Empty report iff the tables define a category."""
    rep = []
    objs = set(C.objects)
    for m, (s, t) in sorted(C.morphisms.items()):
        if s not in objs or t not in objs:
            rep.append(Violation("UnknownObject", f"{m} has endpoint outside the objects", m))
    for o in C.objects:
        i = C.identities.get(o)
        if i is None or C.morphisms.get(i) != (o, o):
            rep.append(Violation("BrokenIdentity", f"object {o} has no identity loop", o))
    if rep:
        return rep
    for (g, f), gf in sorted(C.composition.items()):
        if g not in C.morphisms or f not in C.morphisms or gf not in C.morphisms:
            rep.append(Violation("UnknownMorphism", f"composite entry {g} ∘ {f} = {gf}", (g, f)))
        elif C.src(g) != C.tgt(f):
            rep.append(Violation("NonComposable", f"entry for non-composable {g} ∘ {f}", (g, f)))
        elif C.morphisms[gf] != (C.src(f), C.tgt(g)):
            rep.append(Violation("BrokenEndpoints", f"{g} ∘ {f} = {gf} has wrong endpoints", (g, f)))
    for f in sorted(C.morphisms):
        for g in C.out_arrows(C.tgt(f)):
            if (g, f) not in C.composition:
                rep.append(Violation("MissingComposite", f"no entry for {g} ∘ {f}", (g, f)))
    if rep:
        return rep
    for m, (s, t) in sorted(C.morphisms.items()):
        if C.composition[(C.identities[t], m)] != m or C.composition[(m, C.identities[s])] != m:
            rep.append(Violation("BrokenIdentity", f"identity law fails for {m}", m))
    for f in sorted(C.morphisms):
        for g in C.out_arrows(C.tgt(f)):
            gf = C.composition[(g, f)]
            for h in C.out_arrows(C.tgt(g)):
                if C.composition[(h, gf)] != C.composition[(C.composition[(h, g)], f)]:
                    rep.append(Violation("BrokenAssociativity", f"({h} ∘ {g}) ∘ {f}", (h, g, f)))
    return rep


@dataclass(frozen=True, eq=False)
class InverseStructure:
    """A degree function making every non-isomorphism strictly lower degree."""

    category: FinCategory
    deg: Mapping[str, int]

    @property
    def degrees(self) -> tuple:
        return tuple(sorted(set(self.deg[o] for o in self.category.objects)))

    @property
    def max_degree(self) -> int:
        return max(self.degrees) if self.category.objects else -1

    def objects_of_degree(self, n: int) -> tuple:
        return tuple(o for o in self.category.objects if self.deg[o] == n)

    def is_lowering(self, m: str) -> bool:
        C = self.category
        return self.deg[C.tgt(m)] < self.deg[C.src(m)]

    def lowering_out(self, i: str) -> tuple:
        return tuple(m for m in self.category.out_arrows(i) if self.is_lowering(m))

    def objects_by_degree(self) -> list:
        return sorted(self.category.objects, key=lambda o: (self.deg[o], o))


def validate_inverse_structure(inv: InverseStructure) -> list:
    C = inv.category
    rep = [Violation("MissingDegree", f"object {o} has no degree", o)
           for o in C.objects if o not in inv.deg]
    if rep:
        return rep
    for m in C.non_identity():
        s, t = C.morphisms[m]
        if C.is_iso(m):
            if inv.deg[s] != inv.deg[t]:
                rep.append(Violation("IsoDegreeMismatch", f"isomorphism {m} changes degree", m))
        elif inv.deg[t] >= inv.deg[s]:
            rep.append(Violation("NonDecreasingMap", f"{m}: {s} -> {t} does not lower degree", m))
    return rep


def infer_inverse_structure(C: FinCategory) -> InverseStructure | None:
    """Degrees from the longest chain of non-isomorphisms, if they form one.

    Returns None when some non-isomorphism stays inside an isomorphism class or
    the non-isomorphisms contain a cycle.
    """
    cls = {o: o for o in C.objects}

    def find(o):
        while cls[o] != o:
            cls[o] = cls[cls[o]]
            o = cls[o]
        return o

    for m in C.morphisms:
        if C.is_iso(m):
            a, b = find(C.src(m)), find(C.tgt(m))
            if a != b:
                cls[max(a, b)] = min(a, b)
    edges = {}
    for m in C.morphisms:
        if C.is_iso(m):
            continue
        a, b = find(C.src(m)), find(C.tgt(m))
        if a == b:
            return None
        edges.setdefault(a, set()).add(b)
    height: dict = {}
    state: dict = {}

    def visit(r):
        if state.get(r) == 1:
            return False
        if state.get(r) == 2:
            return True
        state[r] = 1
        h = 0
        for t in edges.get(r, ()):
            if not visit(t):
                return False
            h = max(h, height[t] + 1)
        height[r] = h
        state[r] = 2
        return True

    for o in C.objects:
        if not visit(find(o)):
            return None
    inv = InverseStructure(C, {o: height[find(o)] for o in C.objects})
    return inv if not validate_inverse_structure(inv) else None


@dataclass(frozen=True, eq=False)
class Coslice:
    """A coslice category under ``anchor``; objects are morphism ids out of the
    anchor, ``underlying`` sends each coslice morphism to the morphism of the
    base between codomains."""

    category: FinCategory
    anchor: str
    codomain: Mapping[str, str]
    underlying: Mapping[str, str]

    def projection(self, base: FinCategory) -> FinFunctor:
        return FinFunctor(self.category, base, dict(self.codomain), dict(self.underlying))


def _coslice(C: FinCategory, anchor: str, objs: Iterable[str], name: str) -> Coslice:
    objs = tuple(objs)
    keep = set(objs)
    mors, under, ids = {}, {}, {}
    for u in objs:
        for t in C.out_arrows(C.tgt(u)):
            v = C.compose(t, u)
            if v in keep:
                mid = f"{t}@{u}"
                mors[mid] = (u, v)
                under[mid] = t
        ids[u] = f"{C.identity(C.tgt(u))}@{u}"
    comp = {}
    for m1, (u, v) in mors.items():
        for m2 in [m for m in mors if mors[m][0] == v]:
            comp[(m2, m1)] = f"{C.compose(under[m2], under[m1])}@{u}"
    cat = FinCategory(objs, mors, ids, comp, name)
    return Coslice(cat, anchor, {u: C.tgt(u) for u in objs}, under)


def strict_coslice(inv: InverseStructure, i: str) -> Coslice:
    """Objects: degree-lowering morphisms out of ``i``; morphisms: commuting triangles."""
    if i not in inv.deg:
        raise UnknownObject(f"unknown object {i!r}", witness=i)
    return _coslice(inv.category, i, inv.lowering_out(i), f"{i}/lower")


def punctured_coslice(C: FinCategory, c: str) -> Coslice:
    """Objects: every non-identity morphism out of ``c``."""
    if c not in C.objects:
        raise UnknownObject(f"unknown object {c!r}", witness=c)
    objs = [m for m in C.out_arrows(c) if not C.is_identity(m)]
    return _coslice(C, c, objs, f"{c}/punctured")


def stratum(inv: InverseStructure, n: int) -> FinCategory:
    """Full subcategory on objects of degree ``n`` (a groupoid when valid)."""
    return inv.category.full_subcategory(inv.objects_of_degree(n), f"stratum{n}")


def truncation(inv: InverseStructure, n: int, strict: bool = False) -> InverseStructure:
    """Full subcategory on degrees ``<= n`` (or ``< n`` when strict)."""
    keep = [o for o in inv.category.objects if (inv.deg[o] < n if strict else inv.deg[o] <= n)]
    sub = inv.category.full_subcategory(keep, f"{'lt' if strict else 'le'}{n}")
    return InverseStructure(sub, {o: inv.deg[o] for o in keep})


@dataclass(frozen=True, eq=False)
class Profunctor:
    """A profunctor ``source ⇸ target``: sets ``H(s, t)`` acted on by source
    morphisms through precomposition and target morphisms through
    postcomposition. Element tags must be globally distinct."""

    source: FinCategory
    target: FinCategory
    elements: Mapping[tuple, tuple]
    left_action: Mapping[tuple, str]
    right_action: Mapping[tuple, str]


def validate_profunctor(H: Profunctor) -> list:
    rep = []
    S, T = H.source, H.target
    where = {e: st for st, es in H.elements.items() for e in es}
    for (m, e), e2 in H.left_action.items():
        s, t = where[e]
        if S.tgt(m) != s or where.get(e2) != (S.src(m), t):
            rep.append(Violation("BrokenAction", f"left action {e} . {m}", (m, e)))
    for (m, e), e2 in H.right_action.items():
        s, t = where[e]
        if T.src(m) != t or where.get(e2) != (s, T.tgt(m)):
            rep.append(Violation("BrokenAction", f"right action {m} . {e}", (m, e)))
    for e, (s, t) in where.items():
        for m in S.in_arrows(s):
            if (m, e) not in H.left_action:
                rep.append(Violation("MissingAction", f"left action {e} . {m}", (m, e)))
        for m in T.out_arrows(t):
            if (m, e) not in H.right_action:
                rep.append(Violation("MissingAction", f"right action {m} . {e}", (m, e)))
    return rep


def collage(H: Profunctor, name: str = "") -> FinCategory:
    """Source and target objects side by side, with ``H(s, t)`` as the
    morphisms from ``s`` to ``t`` and none going back."""
    S, T = H.source, H.target
    clash = set(S.objects) & set(T.objects) or set(S.morphisms) & set(T.morphisms)
    if clash:
        raise InvalidCategory(f"source and target ids overlap: {sorted(clash)[:3]}")
    mors = dict(S.morphisms)
    mors.update(T.morphisms)
    for (s, t), es in H.elements.items():
        for e in es:
            if e in mors:
                raise InvalidCategory(f"element tag {e} clashes with a morphism id")
            mors[e] = (s, t)
    comp = dict(S.composition)
    comp.update(T.composition)
    for (m, e), e2 in H.left_action.items():
        comp[(e, m)] = e2
    for (m, e), e2 in H.right_action.items():
        comp[(m, e)] = e2
    ids = dict(S.identities)
    ids.update(T.identities)
    return FinCategory(tuple(S.objects) + tuple(T.objects), mors, ids, comp, name)


def attaching_profunctor(inv: InverseStructure, n: int) -> Profunctor:
    """Morphisms from degree-``n`` objects into lower degrees, as a profunctor
    from the stratum to the strict truncation."""
    C = inv.category
    G = stratum(inv, n)
    low = truncation(inv, n, strict=True).category
    elems, left, right = {}, {}, {}
    for i in G.objects:
        for j in low.objects:
            es = C.hom(i, j)
            if es:
                elems[(i, j)] = es
            for e in es:
                for m in G.in_arrows(i):
                    left[(m, e)] = C.compose(e, m)
                for m in low.out_arrows(j):
                    right[(m, e)] = C.compose(m, e)
    return Profunctor(G, low, elems, left, right)


@dataclass(frozen=True)
class StratumPiece:
    degree: int
    stratum: FinCategory
    interior: InverseStructure
    attaching: Profunctor


@dataclass(frozen=True)
class StrataDecomposition:
    pieces: tuple
    reconstruction: FinCategory
    certificate: tuple  # (object map, morphism map) reconstruction -> input


def strata_decomposition(inv: InverseStructure) -> StrataDecomposition:
    """Decompose by degree and rebuild the category as an iterated collage,
    certified by an isomorphism found through backtracking search."""
    pieces = []
    stage = None
    for n in inv.degrees:
        H = attaching_profunctor(inv, n)
        pieces.append(StratumPiece(n, H.source, truncation(inv, n, strict=True), H))
        if stage is None:
            stage = H.source
        else:
            H = Profunctor(H.source, stage, H.elements, H.left_action, H.right_action)
            stage = collage(H, f"collage{n}")
    if stage is None:
        stage = inv.category
    cert = find_isomorphism(stage, inv.category)
    if cert is None:
        raise ReconstructionFailed("iterated collage is not isomorphic to the input")
    return StrataDecomposition(tuple(pieces), stage, cert)


def _signature(C: FinCategory, o: str) -> tuple:
    return (len(C.hom(o, o)), len(C.out_arrows(o)), len(C.in_arrows(o)),
            sum(1 for m in C.hom(o, o) if C.is_iso(m)))


def find_isomorphism(C: FinCategory, D: FinCategory,
                     obj_hint: Mapping[str, Iterable[str]] | None = None):
    """Backtracking search for an isomorphism of categories ``C -> D``.

    Returns ``(obj_map, mor_map)`` or None. ``obj_hint`` optionally restricts the
    candidate images of each object.
    """
    if len(C.objects) != len(D.objects) or len(C.morphisms) != len(D.morphisms):
        return None
    sigD = {}
    for o in D.objects:
        sigD.setdefault(_signature(D, o), []).append(o)
    cands = {}
    for o in C.objects:
        pool = list(sigD.get(_signature(C, o), []))
        if obj_hint is not None and o in obj_hint:
            allowed = set(obj_hint[o])
            pool = [p for p in pool if p in allowed]
        pool.sort(key=lambda p: (p != o, p))
        cands[o] = pool
    order = sorted(C.objects, key=lambda o: len(cands[o]))
    omap: dict = {}
    used: set = set()

    def assign_objects(k):
        if k == len(order):
            for a in C.objects:
                for b in C.objects:
                    if len(C.hom(a, b)) != len(D.hom(omap[a], omap[b])):
                        return None
            return _match_morphisms(C, D, omap)
        o = order[k]
        for p in cands[o]:
            if p in used:
                continue
            omap[o] = p
            used.add(p)
            res = assign_objects(k + 1)
            if res is not None:
                return res
            used.discard(p)
            del omap[o]
        return None

    mmap = assign_objects(0)
    if mmap is None:
        return None
    return dict(omap), mmap


def _match_morphisms(C: FinCategory, D: FinCategory, omap: Mapping[str, str]):
    mmap = {C.identity(o): D.identity(omap[o]) for o in C.objects}
    rest = [m for m in sorted(C.morphisms) if m not in mmap]
    involved: dict = {m: [] for m in C.morphisms}
    for (g, f), gf in C.composition.items():
        for x in {g, f, gf}:
            involved[x].append((g, f, gf))
    used = set(mmap.values())

    def consistent(m):
        for g, f, gf in involved[m]:
            if g in mmap and f in mmap and gf in mmap:
                if D.composition.get((mmap[g], mmap[f])) != mmap[gf]:
                    return False
        return True

    def go(k):
        if k == len(rest):
            return dict(mmap)
        m = rest[k]
        s, t = C.morphisms[m]
        pool = sorted(D.hom(omap[s], omap[t]), key=lambda n: (n != m, n))
        for n in pool:
            if n in used:
                continue
            mmap[m] = n
            used.add(n)
            if consistent(m):
                res = go(k + 1)
                if res is not None:
                    return res
            used.discard(n)
            del mmap[m]
        return None

    return go(0)


# JSON and DOT

_CATEGORY_KEYS = {"objects", "morphisms", "identities", "composition", "degrees",
                  "weak_equivalences", "name"}


def category_from_json(data: Mapping) -> tuple:
    """Parse a category document into ``(category, degrees | None, weq | None)``."""
    if not isinstance(data, Mapping):
        raise ParseError("category document must be a JSON object")
    unknown = set(data) - _CATEGORY_KEYS
    if unknown:
        raise ParseError(f"unknown keys in category file: {sorted(unknown)}")
    try:
        objects = [str(o) for o in data["objects"]]
        mors = {}
        for entry in data["morphisms"]:
            if set(entry) != {"id", "src", "tgt"}:
                raise ParseError(f"morphism entry needs exactly id, src, tgt: {entry}")
            mors[str(entry["id"])] = (str(entry["src"]), str(entry["tgt"]))
        ids = {str(k): str(v) for k, v in data["identities"].items()}
        comp = {}
        for row in data["composition"]:
            g, f, gf = (str(x) for x in row)
            comp[(g, f)] = gf
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed category file: {exc}") from exc
    cat = FinCategory(tuple(objects), mors, ids, comp, str(data.get("name", "")))
    degrees = data.get("degrees")
    if degrees is not None:
        degrees = {str(k): int(v) for k, v in degrees.items()}
    weq = data.get("weak_equivalences")
    if weq is not None:
        weq = frozenset(str(w) for w in weq)
    return cat, degrees, weq


def category_to_json(C: FinCategory, degrees: Mapping | None = None,
                     weq: Iterable[str] | None = None) -> dict:
    out = {
        "objects": list(C.objects),
        "morphisms": [{"id": m, "src": s, "tgt": t} for m, (s, t) in sorted(C.morphisms.items())],
        "identities": {o: C.identities[o] for o in C.objects},
        "composition": [[g, f, gf] for (g, f), gf in sorted(C.composition.items())],
    }
    if degrees is not None:
        out["degrees"] = {o: degrees[o] for o in C.objects}
    if weq is not None:
        out["weak_equivalences"] = sorted(weq)
    return out


def load_category(path) -> tuple:
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: {exc}") from exc
    return category_from_json(data)


def to_dot(C: FinCategory, weak: Iterable[str] = ()) -> str:
    """Graphviz source: a node per object, an edge per non-identity morphism,
    weak equivalences dashed."""
    weak = set(weak)
    lines = [f"digraph {json.dumps(C.name or 'C')} {{"]
    for o in C.objects:
        lines.append(f"  {json.dumps(o)};")
    for m in C.non_identity():
        s, t = C.morphisms[m]
        style = ", style=dashed" if m in weak else ""
        lines.append(f"  {json.dumps(s)} -> {json.dumps(t)} [label={json.dumps(m)}{style}];")
    lines.append("}")
    return "\n".join(lines) + "\n"

