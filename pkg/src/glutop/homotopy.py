"""Localizations of inverse categories and the comparison of dependent
products along the localization functor.

``bounded_localization`` builds ``H = W⁻¹I`` from zigzag words. The remaining
operations compare diagrams on ``H`` with their restrictions to ``I``: matching
objects over punctured coslices of ``H`` against strict matching objects of
``I`` (the map κ), and dependent products in ``FinSet^H`` against those in
``FinSet^I`` (the map φ with its factorization through ψ, ρ̃ and σ).
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .diagcat import Diagram, DiagramCategory, NatTrans, restrict, validate_diagram
from .errors import (
    CompatibilityViolation,
    DecompositionUnavailable,
    EpiAssumptionFailed,
    InvalidCategory,
    InvalidDiagram,
    NotWide,
    SaturationBudgetExceeded,
    TwoOfThreeViolation,
    Violation,
)
from .fincat import (
    FinCategory,
    FinFunctor,
    InverseStructure,
    infer_inverse_structure,
    punctured_coslice,
    strict_coslice,
    validate_category,
    validate_functor,
)
from .logicat import DEFAULT_CAP, FinSetMap, FinSetObj, finset_handle
from .matching import (
    MatchingResult,
    _pi_eval,
    _proj_map,
    coslice_limit,
    local_pi,
    matching_object,
    matching_on_map,
    pi_inverse,
)

INV = "⁻¹"
WORD_CAP = 16
HOMSET_CAP = 64
WORD_LIMIT = 200_000


@dataclass(frozen=True, eq=False)
class LocalizationData:
    """``gamma: base -> target`` inverting ``weq``; ``words[m]`` is the zigzag
    word (first letter applied first) representing each target morphism."""

    base: InverseStructure
    weq: frozenset
    target: FinCategory
    gamma: FinFunctor
    words: Mapping[str, tuple] = field(default_factory=dict)
    certificate: Mapping = field(default_factory=dict)


# weak equivalences

def with_identities(C: FinCategory, W: Iterable[str]) -> frozenset:
    return frozenset(W) | frozenset(C.identities.values())


def validate_weq(C: FinCategory, W: Iterable[str], relax: bool = False) -> list:
    """Empty iff ``W`` contains every identity and (unless ``relax``) has the
    2-of-3 property on every composable pair."""
    W = frozenset(W)
    rep = [Violation("UnknownMorphism", f"{w} is not a morphism", w)
           for w in sorted(W) if w not in C.morphisms]
    if rep:
        return rep
    rep += [Violation("NotWide", f"identity {i} missing", i)
            for i in sorted(C.identities.values()) if i not in W]
    if relax:
        return rep
    for (g, f), gf in sorted(C.composition.items()):
        inside = (f in W, g in W, gf in W)
        if sum(inside) == 2:
            rep.append(Violation("TwoOfThreeViolation",
                                 f"{g} ∘ {f} = {gf} has exactly two of three maps in W", (g, f)))
    return rep


def require_weq(C: FinCategory, W: Iterable[str], relax: bool = False) -> None:
    rep = validate_weq(C, W, relax)
    for v in rep:
        if v.kind == "NotWide":
            raise NotWide(v.message, witness=v.witness)
    if rep:
        v = rep[0]
        if v.kind == "TwoOfThreeViolation":
            raise TwoOfThreeViolation(v.message, witness=v.witness)
        raise InvalidCategory(v.message, witness=v.witness)


# localization by bounded word saturation

class _Words:
    def __init__(self, C: FinCategory, W: frozenset):
        self.C = C
        gens = {}
        for m in C.non_identity():
            gens[m] = C.morphisms[m]
        for w in sorted(W):
            if not C.is_identity(w):
                s, t = C.morphisms[w]
                gens[w + INV] = (t, s)
        self.gens = gens
        self.out = {o: sorted(g for g, (s, _) in gens.items() if s == o) for o in C.objects}

    def end(self, word: tuple) -> str:
        o, letters = word
        return self.gens[letters[-1]][1] if letters else o

    def enumerate(self, length: int) -> list:
        """All words of length ``length`` (as ``(start, letters)``)."""
        layer = [(o, ()) for o in self.C.objects]
        for _ in range(length):
            layer = [(o, ls + (g,)) for o, ls in layer for g in self.out[self.end((o, ls))]]
            if len(layer) > WORD_LIMIT:
                raise SaturationBudgetExceeded(f"more than {WORD_LIMIT} words of length {length}")
        return layer

    def rewrites(self, word: tuple) -> list:
        """One-step shortenings by base composition and cancellation."""
        C = self.C
        o, ls = word
        out = []
        for k in range(len(ls) - 1):
            a, b = ls[k], ls[k + 1]
            rep = None
            if not a.endswith(INV) and not b.endswith(INV):
                ab = C.compose(b, a)
                rep = () if C.is_identity(ab) else (ab,)
            elif b == a + INV or a == b + INV:
                rep = ()
            if rep is not None:
                out.append((o, ls[:k] + rep + ls[k + 2:]))
        return out


class _UF:
    def __init__(self):
        self.p = {}

    def find(self, x):
        self.p.setdefault(x, x)
        while self.p[x] != x:
            self.p[x] = self.p[self.p[x]]
            x = self.p[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.p[max(ra, rb, key=_word_key)] = min(ra, rb, key=_word_key)


def _word_key(word: tuple):
    o, ls = word
    return (len(ls), sum(1 for g in ls if g.endswith(INV)), ls, o)


def _partition(words: _Words, upto: int, within: int) -> tuple:
    """Classes of words of length <= ``upto`` under rewrites among words of
    length <= ``within``; returns (union-find, words by length)."""
    uf = _UF()
    layers = [words.enumerate(n) for n in range(within + 1)]
    for layer in layers:
        for w in layer:
            uf.find(w)
            for r in words.rewrites(w):
                uf.union(w, r)
    return uf, layers


def _classes(uf: _UF, layers: list, upto: int) -> frozenset:
    groups: dict = {}
    for layer in layers[:upto + 1]:
        for w in layer:
            groups.setdefault(uf.find(w), set()).add(w)
    return frozenset(frozenset(g) for g in groups.values())


def _name(C: FinCategory, word: tuple) -> str:
    o, ls = word
    if not ls:
        return C.identity(o)
    return "∘".join(reversed(ls))


def bounded_localization(base: InverseStructure, W: Iterable[str], word_cap: int = WORD_CAP,
                         homset_cap: int = HOMSET_CAP, relax: bool = False) -> LocalizationData:
    """``W⁻¹I`` as equivalence classes of zigzag words.

    Identities are added to ``W``. The word length ``L`` grows until every word
    of length ``L+1`` equals a shorter one and the classes of words up to ``L``
    no longer change when longer words are admitted; reaching ``word_cap`` or a
    hom-set above ``homset_cap`` first raises SaturationBudgetExceeded.
    """
    C = base.category
    W = with_identities(C, W)
    require_weq(C, W, relax)
    words = _Words(C, W)
    saturated = None
    for L in range(0, word_cap - 1):
        uf1, layers1 = _partition(words, L, L + 1)
        if not all(len(uf1.find(w)[1]) <= L for w in layers1[L + 1]):
            continue
        uf2, layers2 = _partition(words, L, L + 2)
        if _classes(uf1, layers1, L) == _classes(uf2, layers2, L):
            saturated = (L, uf2, layers2)
            break
    if saturated is None:
        raise SaturationBudgetExceeded(f"no saturation with words up to length {word_cap}")
    L, uf, layers = saturated
    reps = {}
    for layer in layers[:L + 1]:
        for w in layer:
            r = uf.find(w)
            reps[r] = r
    name = {r: _name(C, r) for r in reps}
    ends = {r: (r[0], words.end(r)) for r in reps}
    homs: dict = {}
    for r, st in ends.items():
        homs.setdefault(st, []).append(r)
    for st, rs in homs.items():
        if len(rs) > homset_cap:
            raise SaturationBudgetExceeded(f"hom-set {st} has more than {homset_cap} classes")

    def reduce(word):
        o, ls = word
        while len(ls) > L:
            head = uf.find((o, ls[:L + 1]))
            ls = head[1] + ls[L + 1:]
        return uf.find((o, ls))

    mors = {name[r]: ends[r] for r in reps}
    ids = {o: C.identity(o) for o in C.objects}
    starting: dict = {}
    for r, (s, _) in ends.items():
        starting.setdefault(s, []).append(r)
    comp = {}
    for f in reps:
        for g in starting.get(ends[f][1], ()):
            comp[(name[g], name[f])] = name[reduce((f[0], f[1] + g[1]))]
    H = FinCategory(tuple(C.objects), mors, ids, comp, f"{C.name}[W^-1]")
    rep = validate_category(H)
    if rep:
        raise SaturationBudgetExceeded(f"saturated words do not form a category: {rep[0].message}",
                                       witness=rep[0].witness)
    mor_map = {m: (ids[s] if C.is_identity(m) else name[uf.find((s, (m,)))])
               for m, (s, _) in C.morphisms.items()}
    gamma = FinFunctor(C, H, {o: o for o in C.objects}, mor_map)
    loc = LocalizationData(base, W, H, gamma, {name[r]: r for r in reps},
                           {"word_length": L, "classes": len(reps)})
    bad = validate_localization(loc)
    if bad:
        raise SaturationBudgetExceeded(bad[0].message, witness=bad[0].witness)
    return loc


def validate_localization(loc: LocalizationData) -> list:
    """Functoriality, identity on objects, ``γ(w)`` invertible, and every target
    morphism generated by images and inverses of images of weak equivalences."""
    H, g = loc.target, loc.gamma
    rep = validate_category(H) + validate_functor(g)
    if rep:
        return rep
    for o in loc.base.category.objects:
        if g.obj_map[o] != o:
            rep.append(Violation("NotIdentityOnObjects", f"{o} is moved", o))
    for w in sorted(loc.weq):
        if H.inverse(g(w)) is None:
            rep.append(Violation("NotInverted", f"image of {w} is not invertible", w))
    if rep:
        return rep
    gens = {g(m) for m in loc.base.category.morphisms} | {H.inverse(g(w)) for w in loc.weq}
    reached = set(H.identities.values())
    frontier = list(reached)
    while frontier:
        m = frontier.pop()
        for x in gens:
            if H.src(x) == H.tgt(m):
                y = H.compose(x, m)
                if y not in reached:
                    reached.add(y)
                    frontier.append(y)
    for m in sorted(set(H.morphisms) - reached):
        rep.append(Violation("NotGenerated", f"{m} is not a composite of generators", m))
    return rep


def localization_from_functor(base: InverseStructure, W: Iterable[str], target: FinCategory,
                              gamma_map: Mapping[str, str]) -> LocalizationData:
    """A user-supplied localization, validated."""
    C = base.category
    W = with_identities(C, W)
    require_weq(C, W, relax=True)
    gamma = FinFunctor(C, target, {o: o for o in C.objects}, dict(gamma_map))
    loc = LocalizationData(base, W, target, gamma)
    rep = validate_localization(loc)
    if rep:
        raise InvalidCategory(rep[0].message, witness=rep[0].witness)
    return loc


def descend_diagram(loc: LocalizationData, X: Diagram) -> Diagram:
    """The diagram on the localization whose restriction is ``X``; requires
    ``X(w)`` bijective for ``w`` in W and a localization built from words."""
    C, H = loc.base.category, loc.target
    if X.index != C:
        raise InvalidDiagram("diagram is not on the base category")
    inv_maps = {}
    for w in loc.weq:
        t = X.maps[w]
        if not (t.is_injective() and t.is_surjective()):
            raise InvalidDiagram(f"{w} is a weak equivalence but acts non-bijectively", witness=w)
        inv_maps[w + INV] = {y: x for x, y in t.table.items()}
    maps = {}
    for m, (s, t) in H.morphisms.items():
        o, ls = loc.words[m]
        table = {x: x for x in X.sets[s]}
        for letter in ls:
            step = inv_maps[letter] if letter.endswith(INV) else X.maps[letter].table
            table = {x: step[y] for x, y in table.items()}
        maps[m] = FinSetMap(X.sets[s], X.sets[t], table)
    Y = Diagram(H, dict(X.sets), maps)
    rep = validate_diagram(Y)
    if rep:
        raise InvalidDiagram(rep[0].message, witness=rep[0].witness)
    return Y


def descend_nat(t: NatTrans, src: Diagram, tgt: Diagram) -> NatTrans:
    return NatTrans(src, tgt, {o: FinSetMap(src.sets[o], tgt.sets[o], t.components[o].table)
                               for o in src.index.objects})


# assumption checkers

def check_all_epi(H: FinCategory) -> list:
    """Violations of ``g∘f = h∘f ⇒ g = h``."""
    rep = []
    for f, (_, b) in sorted(H.morphisms.items()):
        seen: dict = {}
        for g in H.out_arrows(b):
            key = (H.tgt(g), H.compose(g, f))
            if key in seen:
                rep.append(Violation("NotEpi", f"{seen[key]} ∘ {f} = {g} ∘ {f}", (f, seen[key], g)))
            else:
                seen[key] = g
    return rep


def check_initiality(loc: LocalizationData) -> list:
    """Per object ``i``: the comma category of ``i/I_{<n} -> (i/H)°`` over each
    non-identity ``f`` out of ``i`` must be non-empty and connected."""
    inv, H, gamma = loc.base, loc.target, loc.gamma
    out = []
    for i in inv.objects_by_degree():
        cs = strict_coslice(inv, i)
        K = cs.category
        failures = []
        for f in sorted(H.out_arrows(i)):
            if H.is_identity(f):
                continue
            j = H.tgt(f)
            objs = [(u, h) for u in K.objects for h in H.hom(H.tgt(gamma(u)), j)
                    if H.compose(h, gamma(u)) == f]
            if not objs:
                failures.append({"morphism": f, "reason": "empty"})
                continue
            parent = {o: o for o in objs}

            def find(x):
                while parent[x] != x:
                    parent[x] = parent[parent[x]]
                    x = parent[x]
                return x

            for u, h in objs:
                for t in K.out_arrows(u):
                    u2 = K.tgt(t)
                    for u3, h2 in objs:
                        if u3 == u2 and H.compose(h2, gamma(cs.underlying[t])) == h:
                            parent[find((u, h))] = find((u2, h2))
            if len({find(o) for o in objs}) > 1:
                failures.append({"morphism": f, "reason": "disconnected"})
        out.append({"object": i, "passes": not failures, "failures": failures,
                    "first": failures[0]["morphism"] if failures else None})
    return out


# matching objects and κ

def homotopical_matching(H: FinCategory, X: Diagram, c: str, cap: int = DEFAULT_CAP) -> MatchingResult:
    """Limit of ``X`` over the punctured coslice of ``H`` at ``c``, with the
    matching map from ``X_c``."""
    return coslice_limit(punctured_coslice(H, c), X.sets, X.maps, cap, X.sets[c])


def _kappa(loc: LocalizationData, Mbar: MatchingResult, M: MatchingResult) -> FinSetMap:
    gamma = loc.gamma
    us = M.coslice.category.objects
    table = {}
    for mu in Mbar.object:
        d = dict(mu)
        table[mu] = tuple((u, d[gamma(u)]) for u in us)
    return FinSetMap(Mbar.object, M.object, table)


def matching_comparison(loc: LocalizationData, X: Diagram, i: str,
                        cap: int = DEFAULT_CAP) -> FinSetMap:
    """``κ: M̄_i X -> M_i(γ*X)``, restricting a cone over ``(i/H)°`` to the
    image of ``i/I_{<n}``; checks ``m_i(γ*X) = κ ∘ m̄_i X``."""
    Mbar = homotopical_matching(loc.target, X, i, cap)
    M = matching_object(loc.base, restrict(X, loc.gamma), i, cap)
    k = _kappa(loc, Mbar, M)
    for x in X.sets[i]:
        if k.table[Mbar.matching_map.table[x]] != M.matching_map.table[x]:
            raise CompatibilityViolation("κ does not factor the matching map", witness=(i, x))
    return k


def _bijective(m: FinSetMap) -> bool:
    return m.is_injective() and len(m.src) == len(m.tgt)


# dependent products on the localization

def _mbar_parts(H: FinCategory, dp, f: NatTrans, g: NatTrans, i: str, cap: int):
    """The local pullback at ``i`` built from punctured-coslice matching
    objects, for the dependent product ``dp`` in ``FinSet^H``."""
    fs = finset_handle(cap)
    A, B, Cd, Pi = f.tgt, f.src, g.src, dp.obj
    MA, MB, MC = (homotopical_matching(H, X, i, cap) for X in (A, B, Cd))
    MPi = homotopical_matching(H, Pi, i, cap)
    cs = MA.coslice
    Mf = matching_on_map(MB, MA, f)
    Mg = matching_on_map(MC, MB, g)
    Mproj = matching_on_map(MPi, MA, dp.proj)
    ev_low = {u: _pi_eval for u in cs.category.objects}
    return local_pi(fs, f.components[i], g.components[i], MA.matching_map, MB.matching_map,
                    MC.matching_map, MA, MB, MC, MPi, Mf, Mg, Mproj, ev_low, full=True)


def pi_homotopical(loc: LocalizationData | FinCategory, f: NatTrans, g: NatTrans,
                   cap: int = DEFAULT_CAP):
    """Dependent product in ``FinSet^H`` for ``H`` with all maps epi.

    On such a finite ``H`` every endomorphism is invertible, so the
    non-invertible maps induce a generalized inverse structure and the
    degreewise construction applies. Its value at each object is then checked
    to be the pullback built from punctured-coslice matching objects.
    """
    H = loc.target if isinstance(loc, LocalizationData) else loc
    bad = check_all_epi(H)
    if bad:
        raise EpiAssumptionFailed(bad[0].message, witness=bad[0].witness)
    invH = infer_inverse_structure(H)
    if invH is None:
        raise InvalidCategory("non-invertible maps do not form an inverse structure")
    dp = pi_inverse(invH, f, g, cap)
    for i in H.objects:
        parts = _mbar_parts(H, dp, f, g, i, cap)
        mbar = homotopical_matching(H, dp.obj, i, cap).matching_map
        image = set()
        for x in dp.obj.sets[i]:
            y = ((x[0][0], mbar.table[x]), x[1])
            if y not in parts.pb.apex:
                raise CompatibilityViolation("element is not in the matching pullback", witness=(i, x))
            image.add(y)
        if len(image) != len(parts.pb.apex) or len(image) != len(dp.obj.sets[i]):
            raise CompatibilityViolation("matching pullback differs from the dependent product",
                                         witness=i)
    return dp


@dataclass(frozen=True, eq=False)
class ComparisonBundle:
    """φ with its per-object factorization.

    ``kappa[i]`` maps ``"A"``, ``"B"``, ``"C"`` to the comparison maps;
    ``rho_tilde[i]`` and ``sigma[i]`` are None where some κ is not invertible.
    """

    loc: LocalizationData
    dp_target: object
    dp_base: object
    phi: NatTrans
    phi_tilde: Mapping[str, FinSetMap]
    kappa: Mapping[str, Mapping[str, FinSetMap]]
    psi: Mapping[str, FinSetMap]
    rho_tilde: Mapping[str, FinSetMap | None]
    sigma: Mapping[str, FinSetMap | None]
    parts_target: Mapping
    parts_base: Mapping
    verdict: list

    @property
    def unavailable(self) -> list:
        return [i for i, s in self.sigma.items() if s is None]


def _lookup(S: FinSetObj) -> dict:
    return {(x[0], frozenset(x[1])): x for x in S}


def _as_element(index: dict, a, pairs) -> object:
    return index.get((a, frozenset(pairs)))


def pi_comparison(loc: LocalizationData, f: NatTrans, g: NatTrans,
                  cap: int = DEFAULT_CAP) -> ComparisonBundle:
    """``φ: γ*(Π_B C) -> Π_{γ*B} γ*C`` and its decomposition.

    φ is the transpose of ``γ*(ev)``; ψ, ρ̃ and σ are the maps between the
    local pullbacks on either side.
    """
    H, inv, gamma = loc.target, loc.base, loc.gamma
    fs = finset_handle(cap)
    dpH = pi_homotopical(loc, f, g, cap)
    fb, gb = restrict(f, gamma), restrict(g, gamma)
    Hb = DiagramCategory(inv.category, inv, cap)
    dpB = pi_inverse(inv, fb, gb, cap, Hb)
    proj_b = restrict(dpH.proj, gamma)
    P = Hb.pullback(fb, proj_b)
    ev_b = restrict(dpH.ev, gamma)
    h = NatTrans(P.apex, gb.src, {o: FinSetMap(P.apex.sets[o], gb.src.sets[o], ev_b.components[o].table)
                                  for o in inv.category.objects})
    phi = dpB.sharp(proj_b, h)
    initial = {r["object"]: r["passes"] for r in check_initiality(loc)}
    phi_t, kappa, psi, rho_t, sigma, partsH, partsB, verdict = {}, {}, {}, {}, {}, {}, {}, []
    for i in inv.objects_by_degree():
        pH = _mbar_parts(H, dpH, f, g, i, cap)
        cs = strict_coslice(inv, i)
        MPi = coslice_limit(cs, dpB.obj.sets, dpB.obj.maps, cap, dpB.obj.sets[i])
        MA = coslice_limit(cs, fb.tgt.sets, fb.tgt.maps, cap, fb.tgt.sets[i])
        MB = coslice_limit(cs, fb.src.sets, fb.src.maps, cap, fb.src.sets[i])
        MC = coslice_limit(cs, gb.src.sets, gb.src.maps, cap, gb.src.sets[i])
        Mproj = matching_on_map(MPi, MA, {j: _proj_map(dpB.obj.sets[j], fb.tgt.sets[j])
                                          for j in set(cs.codomain.values())})
        pB = local_pi(fs, fb.components[i], gb.components[i], MA.matching_map, MB.matching_map,
                      MC.matching_map, MA, MB, MC, MPi, matching_on_map(MB, MA, fb),
                      matching_on_map(MC, MB, gb), Mproj, {u: _pi_eval for u in cs.category.objects},
                      full=True)
        partsH[i], partsB[i] = pH, pB
        kA, kB, kC = (_kappa(loc, pH_M, pB_M) for pH_M, pB_M in
                      ((pH.MA, pB.MA), (pH.MB, pB.MB), (pH.MC, pB.MC)))
        kappa[i] = {"A": kA, "B": kB, "C": kC}
        us = cs.category.objects
        table = {}
        for mu in pH.MPi.object:
            d = dict(mu)
            table[mu] = tuple((u, phi.components[cs.codomain[u]].table[d[gamma(u)]]) for u in us)
        phi_t[i] = FinSetMap(pH.MPi.object, pB.MPi.object, table)
        psi[i] = FinSetMap(pH.P1.apex, pB.P1.apex,
                           {(a, mu): (a, phi_t[i].table[mu]) for a, mu in pH.P1.apex})
        kappa_ok = all(_bijective(k) for k in (kA, kB, kC))
        if kappa_ok:
            rho_t[i], sigma[i] = _rho_sigma(pH, pB, kA, kB, kC)
        else:
            rho_t[i], sigma[i] = None, None
        verdict.append({"object": i, "phi_bijective": _bijective(phi.components[i]),
                        "kappa_bijective": kappa_ok, "initiality": initial[i]})
    return ComparisonBundle(loc, dpH, dpB, phi, phi_t, kappa, psi, rho_t, sigma, partsH, partsB,
                            verdict)


def _rho_sigma(pH, pB, kA: FinSetMap, kB: FinSetMap, kC: FinSetMap) -> tuple:
    """ρ̃ = (id, ρ) with ρ the transpose of ``κ_C ∘ ev``, and σ = Π(id, κ_C)."""
    PiB = _lookup(pB.PiM)
    rho = {}
    for a_bar, s in pH.PiM:
        y = _as_element(PiB, kA.table[a_bar], ((kB.table[beta], kC.table[c]) for beta, c in s))
        rho[(a_bar, s)] = y
    rho_tilde = FinSetMap(pH.P2.apex, pB.P2.apex,
                          {(a, p): (a, rho[p]) for a, p in pH.P2.apex})
    QB = _lookup(pB.dp_Q.obj)
    sig = {}
    for a, s in pH.dp_Q.obj:
        sig[(a, s)] = _as_element(QB, a, ((b, (b2, kC.table[c])) for b, (b2, c) in s))
    sigma = FinSetMap(pH.dp_Q.obj, pB.dp_Q.obj, sig)
    return rho_tilde, sigma


def verify_phi_decomposition(bundle: ComparisonBundle, partial: bool = False) -> list:
    """The four faces of the comparison cube at every object, and bijectivity
    of ρ̃ and σ. Raises DecompositionUnavailable when some κ is not invertible,
    unless ``partial`` restricts the check to the objects where all are."""
    if bundle.unavailable and not partial:
        raise DecompositionUnavailable("κ is not invertible at some objects",
                                       witness=bundle.unavailable)
    rep = []
    miss = object()

    def face(name, i, x, lhs, rhs):
        if lhs is miss or rhs is miss or lhs != rhs:
            rep.append(Violation("FaceViolation", f"{name} fails at {i}", (name, i, x)))

    for i in bundle.loc.base.objects_by_degree():
        if i in bundle.unavailable:
            continue
        pH, pB = bundle.parts_target[i], bundle.parts_base[i]
        psi, rho, sig = bundle.psi[i], bundle.rho_tilde[i], bundle.sigma[i]
        phi_i = bundle.phi.components[i]
        mbar = pH.MPi.matching_map
        for x in bundle.dp_target.obj.sets[i]:
            y = phi_i.table[x]
            face("left-face", i, x, psi.table.get((x[0][0], mbar.table[x]), miss), y[0])
        for y in pH.P1.apex:
            lhs = pB.green.table.get(psi.table[y], miss)
            face("bot-face-left", i, y, lhs, rho.table.get(pH.green.table[y], miss))
        for z in pH.P2.apex:
            lhs = pB.yellow.table.get(rho.table[z], miss)
            face("bot-face-right", i, z, lhs, sig.table.get(pH.yellow.table[z], miss))
        for w in pH.dp_C.obj:
            face("right-face", i, w, sig.table.get(pH.cyan.table[w], miss),
                 pB.cyan.table.get(w, miss))
        for name, m in (("rho_tilde", rho), ("sigma", sig)):
            if None in m.table.values() or not _bijective(m):
                rep.append(Violation("FaceViolation", f"{name} is not a bijection at {i}", (name, i)))
    return rep


# search for nontrivial positive instances

def random_weq(seed: int, C: FinCategory) -> frozenset | None:
    """A random wide subcategory with 2-of-3 containing a non-identity map, or None."""
    rng = random.Random(f"weq:{seed}:{C.name}")
    W = {m for m in C.non_identity() if rng.random() < 0.4}
    W = with_identities(C, W)
    changed = True
    while changed:
        changed = False
        for (g, f), gf in C.composition.items():
            if f in W and g in W and gf not in W:
                W |= {gf}
                changed = True
    if validate_weq(C, W) or W == with_identities(C, ()):
        return None
    return W


def search_positive_instance(seed: int, tries: int = 50, word_cap: int = 8):
    """Look for a localization with W beyond the isomorphisms that passes both
    the epi and initiality checks. Returns the first hit or None."""
    from .oracle import gen_inverse_category

    for t in range(tries):
        inv = gen_inverse_category(seed * 1000 + t, 4, 2, 2)
        W = random_weq(seed * 1000 + t, inv.category)
        if W is None or all(inv.category.is_iso(w) for w in W):
            continue
        try:
            loc = bounded_localization(inv, W, word_cap)
        except (SaturationBudgetExceeded, InvalidCategory):
            continue
        if not check_all_epi(loc.target) and all(r["passes"] for r in check_initiality(loc)):
            return loc
    return None
