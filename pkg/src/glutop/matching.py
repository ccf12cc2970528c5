"""Matching objects on inverse categories, coskeleta, the stratum-by-stratum
gluing equivalence, and the subobject classifier and dependent products of
``FinSet^I`` built one degree at a time.

At an object ``i`` the matching object ``M_i X`` is the limit of ``X`` over the
degree-lowering maps out of ``i``; ``m_i: X_i -> M_i X`` collects the values of
those maps.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .diagcat import (
    Diagram,
    DiagramCategory,
    NatTrans,
    is_mono,
    restrict,
)
from .elements import ekey
from .errors import CompatibilityViolation, NotMono, SliceMismatch, Violation
from .fincat import (
    Coslice,
    InverseStructure,
    inclusion_functor,
    stratum,
    strict_coslice,
    truncation,
)
from .gluing import GluedObject, LexFunctor
from .logicat import (
    BOT,
    DEFAULT_CAP,
    STAR,
    TOP,
    DependentProduct,
    FinSetMap,
    FinSetObj,
    char_map,
    finset_handle,
    limit,
    limit_map,
)


@dataclass(frozen=True, eq=False)
class MatchingResult:
    """``object`` is the limit, ``legs[u]`` its projection to ``X(cod u)`` and
    ``matching_map`` the canonical map from ``X_i`` (None if ``X_i`` is absent)."""

    object: FinSetObj
    legs: Mapping[str, FinSetMap]
    matching_map: FinSetMap | None
    coslice: Coslice


def coslice_limit(cs: Coslice, sets: Mapping, maps: Mapping, cap: int = DEFAULT_CAP,
                  own: FinSetObj | None = None) -> MatchingResult:
    """Limit of ``X ∘ cod`` over a coslice, given the sets and maps of ``X`` on
    (at least) the codomains involved."""
    K = cs.category
    shape_sets = {u: sets[cs.codomain[u]] for u in K.objects}
    shape_maps = {m: maps[cs.underlying[m]] for m in K.morphisms}
    L = limit(K, shape_sets, shape_maps, cap)
    mm = None
    if own is not None:
        table = {x: tuple((u, maps[u].table[x]) for u in K.objects) for x in own}
        for x, v in table.items():
            if v not in L.apex:
                raise SliceMismatch("matching map leaves the limit", witness=x)
        mm = FinSetMap(own, L.apex, table)
    return MatchingResult(L.apex, L.legs, mm, cs)


def matching_object(inv: InverseStructure, X: Diagram, i: str,
                    cap: int = DEFAULT_CAP) -> MatchingResult:
    cs = strict_coslice(inv, i)
    own = X.sets.get(i)
    if own is not None and not all(u in X.maps for u in cs.category.objects):
        own = None
    return coslice_limit(cs, X.sets, X.maps, cap, own)


def matching_on_map(M1: MatchingResult, M2: MatchingResult, t) -> FinSetMap:
    """``M_i(t)`` for a natural transformation ``t`` (or a dict of components)."""
    comps = t.components if isinstance(t, NatTrans) else t
    cs = M1.coslice
    return limit_map(_as_limit(M1), _as_limit(M2),
                     {u: comps[cs.codomain[u]] for u in cs.category.objects})


def _as_limit(M: MatchingResult):
    from .logicat import LimitResult
    return LimitResult(M.object, M.legs)


def reindex_along_iso(inv: InverseStructure, phi: str, mu) -> tuple:
    """``M(φ)`` for an isomorphism ``φ: i -> i'`` in a stratum: the component at a
    lowering map ``u'`` out of ``i'`` is the component of ``mu`` at ``u' ∘ φ``."""
    C = inv.category
    i2 = C.tgt(phi)
    d = dict(mu)
    return tuple((u2, d[C.compose(u2, phi)]) for u2 in inv.lowering_out(i2))


def matching_diagram(inv: InverseStructure, sets: Mapping, maps: Mapping, n: int,
                     cap: int = DEFAULT_CAP) -> tuple:
    """``M_n X`` as a diagram on the degree-``n`` stratum, with the per-object
    matching results. ``sets``/``maps`` need only cover lower degrees."""
    G = stratum(inv, n)
    res = {i: coslice_limit(strict_coslice(inv, i), sets, maps, cap) for i in G.objects}
    S = {i: res[i].object for i in G.objects}
    M = {phi: FinSetMap(S[a], S[b], {mu: reindex_along_iso(inv, phi, mu) for mu in S[a]})
         for phi, (a, b) in G.morphisms.items()}
    return Diagram(G, S, M), res


def matching_functor(inv: InverseStructure, n: int, cap: int = DEFAULT_CAP) -> LexFunctor:
    """``M_n: FinSet^{I<n} -> FinSet^{G_n}`` with explicit preservation witnesses."""
    low = truncation(inv, n, strict=True)
    G = stratum(inv, n)
    src = DiagramCategory(low.category, low, cap)
    tgt = DiagramCategory(G, None, cap)
    cache: dict = {}

    def M(X):
        key = id(X)
        if key not in cache or cache[key][0] is not X:
            cache[key] = (X, matching_diagram(inv, X.sets, X.maps, n, cap))
        return cache[key][1]

    def on_obj(X):
        return M(X)[0]

    def on_map(t):
        (D1, r1), (D2, r2) = M(t.src), M(t.tgt)
        return NatTrans(D1, D2, {i: matching_on_map(r1[i], r2[i], t) for i in G.objects})

    def cmp(f, g):
        P = src.pullback(f, g).apex
        MP = on_obj(P)
        target = tgt.pullback(on_map(f), on_map(g)).apex
        comps = {}
        for i in G.objects:
            table = {}
            for mu in MP.sets[i]:
                table[mu] = (tuple((u, xy[0]) for u, xy in mu), tuple((u, xy[1]) for u, xy in mu))
            comps[i] = FinSetMap(MP.sets[i], target.sets[i], table)
        return NatTrans(MP, target, comps)

    def term():
        T = tgt.terminal()
        MT = on_obj(src.terminal())
        return NatTrans(T, MT, {i: FinSetMap(T.sets[i], MT.sets[i], {STAR: MT.sets[i].elements[0]})
                                for i in G.objects})

    return LexFunctor(src, tgt, on_obj, on_map, cmp, term, f"M_{n}")


def glue_stratum(inv: InverseStructure, low: Diagram, apex: Diagram, structure: NatTrans,
                 n: int) -> Diagram:
    """Extend a diagram on ``I<n`` by a ``G_n``-diagram with a map to ``M_n``; the
    lowering maps out of degree ``n`` are the legs of the matching object."""
    keep = [o for o in inv.category.objects if inv.deg[o] <= n]
    C = inv.category.full_subcategory(keep, f"le{n}")
    sets = dict(low.sets)
    sets.update(apex.sets)
    maps = {}
    for m, (a, b) in C.morphisms.items():
        if m in low.maps:
            maps[m] = low.maps[m]
        elif m in apex.maps:
            maps[m] = apex.maps[m]
        else:
            st = structure.components[a]
            maps[m] = FinSetMap(sets[a], sets[b], {x: dict(st.table[x])[m] for x in sets[a]})
    return Diagram(C, sets, maps)


@dataclass(frozen=True)
class GlueEquivalence:
    """``FinSet^{I≤n} ≃ Gl(M_n)``: forward splits a diagram into its top stratum,
    the rest and the matching map; backward glues them back."""

    inv: InverseStructure
    n: int
    functor: LexFunctor

    def forward(self, X: Diagram) -> GluedObject:
        low = truncation(self.inv, self.n, strict=True)
        G = stratum(self.inv, self.n)
        shadow = restrict(X, inclusion_functor(low.category, X.index))
        apex = restrict(X, inclusion_functor(G, X.index))
        MX = self.functor.on_obj(shadow)
        comps = {}
        for i in G.objects:
            table = {x: tuple((u, X.maps[u].table[x]) for u in self.inv.lowering_out(i))
                     for x in X.sets[i]}
            comps[i] = FinSetMap(apex.sets[i], MX.sets[i], table)
        return GluedObject(apex, shadow, NatTrans(apex, MX, comps))

    def backward(self, Y: GluedObject) -> Diagram:
        return glue_stratum(self.inv, Y.shadow, Y.apex, Y.structure, self.n)

    def forward_map(self, t: NatTrans):
        from .gluing import GluedMorphism
        low = truncation(self.inv, self.n, strict=True)
        G = stratum(self.inv, self.n)
        X, Y = self.forward(t.src), self.forward(t.tgt)
        return GluedMorphism(X, Y, restrict(t, inclusion_functor(G, t.src.index)),
                             restrict(t, inclusion_functor(low.category, t.src.index)))

    def backward_map(self, m) -> NatTrans:
        X, Y = self.backward(m.src), self.backward(m.tgt)
        comps = dict(m.shadow_map.components)
        comps.update(m.apex_map.components)
        return NatTrans(X, Y, comps)


def glue_equivalence(inv: InverseStructure, n: int, cap: int = DEFAULT_CAP) -> GlueEquivalence:
    le = truncation(inv, n)
    return GlueEquivalence(le, n, matching_functor(le, n, cap))


def coskeleton(inv: InverseStructure, X: Diagram, upto: int | None = None,
               cap: int = DEFAULT_CAP) -> Diagram:
    """Extend ``X`` (given on the degrees below some bound) to degrees up to
    ``upto`` by taking matching objects with identity matching maps."""
    top = inv.max_degree if upto is None else upto
    have = max((inv.deg[o] for o in X.index.objects), default=-1)
    cur = X
    for n in range(have + 1, top + 1):
        if not inv.objects_of_degree(n):
            continue
        le = truncation(inv, n)
        apex, _ = matching_diagram(le, cur.sets, cur.maps, n, cap)
        ident = NatTrans(apex, apex, {i: FinSetMap(apex.sets[i], apex.sets[i],
                                                   {m: m for m in apex.sets[i]})
                                      for i in apex.index.objects})
        cur = glue_stratum(le, cur, apex, ident, n)
    return cur


# classifier

def omega_inverse(inv: InverseStructure, cap: int = DEFAULT_CAP) -> tuple:
    """Subobject classifier of ``FinSet^I`` and its truth map, built by degree.

    At ``i`` the set is the equalizer of ``π₁`` and ``∧ ∘ (id × χ)`` on
    ``{⊥,⊤} × M_i Ω`` where ``χ`` classifies the all-true point of ``M_i Ω``.
    Lowering maps act by projecting ``M_i Ω``; stratum isomorphisms reindex it.
    """
    fs = finset_handle(cap)
    C = inv.category
    OmE, trueE = fs.omega()
    meet, OO = fs.meet()
    sets, maps, tops = {}, {}, {}
    for n in inv.degrees:
        for i in inv.objects_of_degree(n):
            cs = strict_coslice(inv, i)
            M = coslice_limit(cs, sets, maps, cap)
            top = tuple((u, tops[cs.codomain[u]]) for u in cs.category.objects)
            chi = char_map(fs.point(M.object, top))
            P = fs.product(OmE, M.object)
            rhs = fs.compose(meet, OO.factor(P.leg1, fs.compose(chi, P.leg2)))
            eq = fs.equalizer(P.leg1, rhs)
            sets[i] = eq.apex
            tops[i] = (TOP, top)
            for u in cs.category.objects:
                maps[u] = FinSetMap(sets[i], sets[C.tgt(u)], {x: dict(x[1])[u] for x in sets[i]})
        for i in inv.objects_of_degree(n):
            maps[C.identity(i)] = fs.identity(sets[i])
            for phi in C.out_arrows(i):
                j = C.tgt(phi)
                if inv.deg[j] == n and not C.is_identity(phi):
                    maps[phi] = FinSetMap(sets[i], sets[j],
                                          {(v, mu): (v, reindex_along_iso(inv, phi, mu))
                                           for v, mu in sets[i]})
    Om = Diagram(C, sets, maps)
    T = DiagramCategory(C, inv).terminal()
    true = NatTrans(T, Om, {i: FinSetMap(T.sets[i], sets[i], {STAR: tops[i]}) for i in C.objects})
    return Om, true


def char_inverse(inv: InverseStructure, m: NatTrans, omega: tuple | None = None) -> NatTrans:
    """Classifying map of a mono ``m: F -> G``: at ``i``,
    ``x ↦ (x ∈ im m_i, (χ_j(G(u) x))_u)``."""
    if not is_mono(m):
        raise NotMono("natural transformation is not pointwise injective")
    Om = (omega or omega_inverse(inv))[0]
    G = m.tgt
    C = inv.category
    chi: dict = {}
    comps = {}
    for i in inv.objects_by_degree():
        img = m.components[i].image()
        table = {}
        for x in G.sets[i]:
            mu = tuple((u, chi[(C.tgt(u), G.maps[u].table[x])]) for u in inv.lowering_out(i))
            v = TOP if x in img else BOT
            val = (v, mu)
            if val not in Om.sets[i]:
                raise NotMono("subobject is not closed under the diagram's maps", witness=(i, x))
            table[x] = val
            chi[(i, x)] = val
        comps[i] = FinSetMap(G.sets[i], Om.sets[i], table)
    return NatTrans(G, Om, comps)


# dependent products

@dataclass(frozen=True, eq=False)
class InversePiParts:
    """Per-object pieces of the degreewise dependent product."""

    MA: MatchingResult
    MB: MatchingResult
    MC: MatchingResult
    MPi: MatchingResult
    PiM: FinSetObj              # reached part of Π_{M_i B} M_i C
    Mev_sharp: FinSetMap        # M_i Π over im(A_i) -> PiM
    P1: object                  # A_i ×_{M_i A} M_i Π
    P2: object                  # A_i ×_{M_i A} PiM
    green: FinSetMap
    Q: object                   # B_i ×_{M_i B} M_i C
    dp_Q: DependentProduct      # Π_{B_i} Q
    yellow: FinSetMap
    dp_C: DependentProduct      # Π_{B_i} C_i
    cyan: FinSetMap
    pb: object                  # Π_i as a pullback


@dataclass(frozen=True, eq=False)
class InverseDependentProduct(DependentProduct):
    parts: Mapping = None


def local_pi(fs, f_i: FinSetMap, g_i: FinSetMap, mA: FinSetMap, mB: FinSetMap, mC: FinSetMap,
             MA: MatchingResult, MB: MatchingResult, MC: MatchingResult, MPi: MatchingResult,
             Mf: FinSetMap, Mg: FinSetMap, Mproj: FinSetMap, ev_low: Mapping,
             full: bool = False) -> InversePiParts:
    """One step of the degreewise dependent product, as a pullback of
    ``Π_{B_i} C_i -> Π_{B_i}(B_i ×_{M_i B} M_i C)`` along
    ``A_i ×_{M_i A} M_i Π -> A_i ×_{M_i A} Π_{M_i B} M_i C -> Π_{B_i}(B_i ×_{M_i B} M_i C)``.

    ``ev_low[u]`` evaluates the already built counit at the codomain of ``u``.
    With ``full`` the whole of ``Π_{M_i B} M_i C`` over the image of ``A_i`` is
    built instead of the part reached from ``M_i Π``.
    """
    # Π_i is a pullback over P1, so of Π_{M_i B} M_i C only the image of M_i Π
    # over the image of A_i is ever reached; build just that part
    live = mA.image()
    A1 = FinSetObj(tuple(live))
    B1 = FinSetObj(tuple(b for b in Mf.src if Mf.table[b] in live))
    Pi1 = FinSetObj(tuple(m for m in Mproj.src if Mproj.table[m] in live))
    Mf1 = FinSetMap(B1, A1, {b: Mf.table[b] for b in B1})
    Mproj1 = FinSetMap(Pi1, A1, {m: Mproj.table[m] for m in Pi1})
    mA1 = FinSetMap(mA.src, A1, mA.table)
    mB1 = FinSetMap(mB.src, B1, mB.table)
    fib = {a: [] for a in A1}
    for beta in B1:
        fib[Mf1.table[beta]].append(beta)
    # M_i B ×_{M_i A} M_i Π ≅ M_i(B ×_A Π), followed by M_i(ev), then transposed
    sharp_table = {
        mu: (Mproj1.table[mu], tuple((beta, tuple((u, ev_low[u]((dict(beta)[u], dict(mu)[u])))
                                                  for u, _ in beta))
                                     for beta in fib[Mproj1.table[mu]]))
        for mu in Pi1}
    if full:
        C1 = FinSetObj(tuple(c for c in Mg.src if Mg.table[c] in B1))
        Mg1 = FinSetMap(C1, B1, {c: Mg.table[c] for c in C1})
        PiM = fs.pi(Mf1, Mg1).obj
    else:
        PiM = FinSetObj(tuple(set(sharp_table.values())))
    Mev_sharp = FinSetMap(Pi1, PiM, sharp_table)
    PiM_proj = FinSetMap(PiM, A1, {p: p[0] for p in PiM})
    PiM_pb = fs.pullback(Mf1, PiM_proj)
    PiM_ev = FinSetMap(PiM_pb.apex, Mg.src, {(beta, p): dict(p[1])[beta] for beta, p in PiM_pb.apex})
    P1 = fs.pullback(mA1, Mproj1)
    P2 = fs.pullback(mA1, PiM_proj)
    green = P2.factor(P1.leg1, fs.compose(Mev_sharp, P1.leg2))
    Q = fs.pullback(mB, Mg)
    dpQ = fs.pi(f_i, Q.leg1)
    S = fs.pullback(f_i, P2.leg1)
    into = PiM_pb.factor(fs.compose(mB1, S.leg1), fs.compose(P2.leg2, S.leg2))
    yellow = dpQ.sharp(P2.leg1, Q.factor(S.leg1, fs.compose(PiM_ev, into)))
    dpC = fs.pi(f_i, g_i)
    cyan = fs.pi_map(dpC, dpQ, Q.factor(g_i, mC))
    pb = fs.pullback(fs.compose(yellow, green), cyan)
    return InversePiParts(MA, MB, MC, MPi, PiM, Mev_sharp, P1, P2, green, Q, dpQ, yellow,
                          dpC, cyan, pb)


def pi_inverse(inv: InverseStructure, f: NatTrans, g: NatTrans, cap: int = DEFAULT_CAP,
               handle: DiagramCategory | None = None) -> InverseDependentProduct:
    """Dependent product in ``FinSet^I`` along ``f: B -> A`` of ``g: C -> B``.

    An element at ``i`` is ``((a, μ), (a, s))``: ``a`` in ``A_i``, ``μ`` in
    ``M_i Π`` and ``s`` a section of ``g_i`` over the fiber of ``f_i`` at ``a``,
    subject to the compatibility expressed by the defining pullback.
    """
    fs = finset_handle(cap)
    H = handle or DiagramCategory(inv.category, inv, cap)
    C = inv.category
    A, B, Cd = f.tgt, f.src, g.src
    if g.tgt != B:
        raise SliceMismatch("g must land in the domain of f")
    sets, maps, parts = {}, {}, {}
    for n in inv.degrees:
        objs = inv.objects_of_degree(n)
        for i in objs:
            cs = strict_coslice(inv, i)
            us = cs.category.objects
            MA = coslice_limit(cs, A.sets, A.maps, cap, A.sets[i])
            MB = coslice_limit(cs, B.sets, B.maps, cap, B.sets[i])
            MC = coslice_limit(cs, Cd.sets, Cd.maps, cap, Cd.sets[i])
            MPi = coslice_limit(cs, sets, maps, cap)
            Mf = matching_on_map(MB, MA, f)
            Mg = matching_on_map(MC, MB, g)
            Mproj = matching_on_map(MPi, MA, {j: _proj_map(sets[j], A.sets[j]) for j in
                                              set(cs.codomain.values())})
            ev_low = {u: _pi_eval for u in us}
            pt = local_pi(fs, f.components[i], g.components[i], MA.matching_map,
                          MB.matching_map, MC.matching_map, MA, MB, MC, MPi, Mf, Mg, Mproj, ev_low)
            parts[i] = pt
            sets[i] = pt.pb.apex
            for u in us:
                maps[u] = FinSetMap(sets[i], sets[C.tgt(u)], {x: dict(x[0][1])[u] for x in sets[i]})
            maps[C.identity(i)] = fs.identity(sets[i])
        for i in objs:
            for phi in C.out_arrows(i):
                j = C.tgt(phi)
                if inv.deg[j] != n or C.is_identity(phi):
                    continue
                table = {}
                binv = B.maps[C.inverse(phi)]
                for x in sets[i]:
                    (a, mu), (_, s) = x
                    a2 = A.maps[phi].table[a]
                    mu2 = reindex_along_iso(inv, phi, mu)
                    sec = dict(s)
                    s2 = tuple(sorted(((b2, Cd.maps[phi].table[sec[binv.table[b2]]])
                                       for b2 in B.sets[j] if f.components[j].table[b2] == a2),
                                      key=lambda p: ekey(p[0])))
                    y = ((a2, mu2), (a2, s2))
                    if y not in sets[j]:
                        raise CompatibilityViolation("isomorphism action leaves the product",
                                                     witness=(phi, x))
                    table[x] = y
                maps[phi] = FinSetMap(sets[i], sets[j], table)
    Pi = Diagram(C, sets, maps)
    proj = NatTrans(Pi, A, {i: _proj_map(sets[i], A.sets[i]) for i in C.objects})
    pb = H.pullback(f, proj)
    ev = NatTrans(pb.apex, Cd, {i: FinSetMap(pb.apex.sets[i], Cd.sets[i],
                                             {(b, x): _pi_eval((b, x)) for b, x in pb.apex.sets[i]})
                                for i in C.objects})

    def sharp(d, h, P):
        D = d.src
        val: dict = {}
        comps = {}
        for i in inv.objects_by_degree():
            table = {}
            for x in D.sets[i]:
                a = d.components[i].table[x]
                s = tuple((b, h.components[i].table[(b, x)]) for b in B.sets[i]
                          if f.components[i].table[b] == a)
                mu = tuple((u, val[(C.tgt(u), D.maps[u].table[x])]) for u in inv.lowering_out(i))
                y = ((a, mu), (a, s))
                if y not in sets[i]:
                    raise SliceMismatch("transpose leaves the dependent product", witness=(i, x))
                val[(i, x)] = y
                table[x] = y
            comps[i] = FinSetMap(D.sets[i], sets[i], table)
        return NatTrans(D, Pi, comps)

    return InverseDependentProduct(H, f, g, Pi, proj, pb, ev, sharp, parts)


def _proj_map(S: FinSetObj, A: FinSetObj) -> FinSetMap:
    return FinSetMap(S, A, {x: x[0][0] for x in S})


def _pi_eval(bx):
    b, x = bx
    return dict(x[1][1])[b]


# restriction compatibility

def verify_restriction_compat(inv: InverseStructure, former: str = "omega",
                              data: tuple | None = None, cap: int = DEFAULT_CAP) -> list:
    """Check that the global former restricts to the former computed on each
    truncation ``I≤n``. ``data = (f, g)`` is required for ``former="pi"``."""
    rep = []
    if former == "omega":
        Om, true = omega_inverse(inv, cap)
        for n in inv.degrees:
            le = truncation(inv, n)
            inc = inclusion_functor(le.category, inv.category)
            Om_n, true_n = omega_inverse(le, cap)
            if restrict(Om, inc) != Om_n or restrict(true, inc) != true_n:
                rep.append(Violation("CompatibilityViolation",
                                     f"classifier differs from its truncation at degree {n}", n))
    elif former == "pi":
        f, g = data
        dp = pi_inverse(inv, f, g, cap)
        for n in inv.degrees:
            le = truncation(inv, n)
            inc = inclusion_functor(le.category, inv.category)
            dp_n = pi_inverse(le, restrict(f, inc), restrict(g, inc), cap)
            if (restrict(dp.obj, inc) != dp_n.obj or restrict(dp.proj, inc) != dp_n.proj
                    or restrict(dp.ev, inc) != dp_n.ev):
                rep.append(Violation("CompatibilityViolation",
                                     f"dependent product differs from its truncation at degree {n}", n))
    else:
        raise ValueError(f"unknown former {former!r}")
    return rep

