"""Independent reference constructions and checkers.

The classifier here is built from cosieves and the dependent product from
natural families of sections, both directly on an arbitrary finite category,
without matching objects or gluing. The checkers test universal properties by
enumerating hom-sets. Seeded generators supply random inverse categories and
diagrams on them.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping

from .diagcat import (
    Diagram,
    DiagramCategory,
    NatTrans,
    constant_diagram,
    enumerate_nat_trans,
    is_mono,
    make_diagram,
    subdiagram,
    validate_diagram,
)
from .errors import ExplosionLimit, GenerationFailed, NotMono, SliceMismatch, Violation
from .fincat import FinCategory, InverseStructure, stratum, strict_coslice, validate_category
from .logicat import DEFAULT_CAP, STAR, DependentProduct, FinSetMap, FinSetObj


@dataclass(frozen=True)
class Cosieve:
    """A set of arrows out of ``anchor`` closed under postcomposition."""

    anchor: str
    arrows: frozenset

    def element(self) -> tuple:
        return tuple(sorted(self.arrows))


def cosieves(C: FinCategory, c: str) -> list:
    """Every cosieve at ``c``, as sorted tuples of arrow ids."""
    arrows = list(C.out_arrows(c))
    up = {u: {C.compose(t, u) for t in C.out_arrows(C.tgt(u))} for u in arrows}
    out = []

    def go(k, inc, exc):
        if k == len(arrows):
            out.append(tuple(sorted(inc)))
            return
        u = arrows[k]
        if u in inc or u in exc:
            go(k + 1, inc, exc)
            return
        if not (up[u] & exc):
            go(k + 1, inc | up[u], exc)
        go(k + 1, inc, exc | {u})

    go(0, frozenset(), frozenset())
    return out


def omega_oracle(C: FinCategory) -> tuple:
    """Classifier of ``FinSet^C`` by cosieves; the truth map picks the maximal
    cosieve."""
    sets = {c: FinSetObj(cosieves(C, c)) for c in C.objects}
    maps = {}
    for t, (c, c2) in C.morphisms.items():
        table = {}
        for S in sets[c]:
            Sset = set(S)
            table[S] = tuple(sorted(g for g in C.out_arrows(c2) if C.compose(g, t) in Sset))
        maps[t] = FinSetMap(sets[c], sets[c2], table)
    Om = Diagram(C, sets, maps)
    T = constant_diagram(C, (STAR,))
    true = NatTrans(T, Om, {c: FinSetMap(T.sets[c], sets[c], {STAR: tuple(sorted(C.out_arrows(c)))})
                            for c in C.objects})
    return Om, true


def char_oracle(m: NatTrans, omega: tuple | None = None) -> NatTrans:
    """``x ↦ {u | G(u) x lies in the subobject}``."""
    if not is_mono(m):
        raise NotMono("natural transformation is not pointwise injective")
    G = m.tgt
    C = G.index
    Om = (omega or omega_oracle(C))[0]
    imgs = {c: m.components[c].image() for c in C.objects}
    comps = {}
    for c in C.objects:
        comps[c] = FinSetMap(G.sets[c], Om.sets[c], {
            x: tuple(sorted(u for u in C.out_arrows(c) if G.maps[u].table[x] in imgs[C.tgt(u)]))
            for x in G.sets[c]})
    return NatTrans(G, Om, comps)


def _families(C: FinCategory, c: str, a, A: Diagram, B: Diagram, Cd: Diagram,
              f: NatTrans, g: NatTrans, cap: int) -> list:
    """Natural families of sections over the arrows out of ``c``."""
    keys = []
    for u in C.out_arrows(c):
        d = C.tgt(u)
        au = A.maps[u].table[a]
        for b in B.sets[d]:
            if f.components[d].table[b] == au:
                keys.append((u, b))
    fib = {}
    for d in C.objects:
        for x in Cd.sets[d]:
            fib.setdefault((d, g.components[d].table[x]), []).append(x)
    out = []
    val: dict = {}

    def propagate(k, v, trail):
        stack = [(k, v)]
        while stack:
            (u, b), y = stack.pop()
            d = C.tgt(u)
            for t in C.out_arrows(d):
                k2 = (C.compose(t, u), B.maps[t].table[b])
                y2 = Cd.maps[t].table[y]
                if k2 in val:
                    if val[k2] != y2:
                        return False
                else:
                    val[k2] = y2
                    trail.append(k2)
                    stack.append((k2, y2))
        return True

    def go(idx):
        while idx < len(keys) and keys[idx] in val:
            idx += 1
        if idx == len(keys):
            out.append(tuple((k, val[k]) for k in keys))
            if len(out) > cap:
                raise ExplosionLimit(f"more than {cap} sections")
            return
        k = keys[idx]
        u, b = k
        for y in fib.get((C.tgt(u), b), ()):
            trail = [k]
            val[k] = y
            if propagate(k, y, trail):
                go(idx + 1)
            for k2 in trail:
                del val[k2]

    go(0)
    return out


def pi_oracle_sections(f: NatTrans, g: NatTrans, cap: int = DEFAULT_CAP,
                       handle: DiagramCategory | None = None) -> DependentProduct:
    """Dependent product along ``f: B -> A`` of ``g: C -> B`` on any finite
    index category: at ``c`` an element is ``a`` in ``A_c`` with a natural family
    of sections of ``g`` over the fibers of ``f`` above the images of ``a``."""
    A, B, Cd = f.tgt, f.src, g.src
    C = A.index
    if g.tgt != B:
        raise SliceMismatch("g must land in the domain of f")
    H = handle or DiagramCategory(C, cap=cap)
    sets = {}
    for c in C.objects:
        elems = []
        for a in A.sets[c]:
            for fam in _families(C, c, a, A, B, Cd, f, g, cap):
                elems.append((a, fam))
                if len(elems) > cap:
                    raise ExplosionLimit(f"more than {cap} sections")
        sets[c] = FinSetObj(elems)
    maps = {}
    for t, (c, c2) in C.morphisms.items():
        table = {}
        for a, fam in sets[c]:
            d = dict(fam)
            a2 = A.maps[t].table[a]
            table[(a, fam)] = (a2, _restrict_family(C, t, c2, a2, d, A, B, f))
        maps[t] = FinSetMap(sets[c], sets[c2], table)
    Pi = Diagram(C, sets, maps)
    proj = NatTrans(Pi, A, {c: FinSetMap(sets[c], A.sets[c], {x: x[0] for x in sets[c]})
                            for c in C.objects})
    pb = H.pullback(f, proj)
    ev = NatTrans(pb.apex, Cd, {c: FinSetMap(pb.apex.sets[c], Cd.sets[c],
                                             {(b, x): dict(x[1])[(C.identity(c), b)]
                                              for b, x in pb.apex.sets[c]})
                                for c in C.objects})

    def sharp(d, h, P):
        D = d.src
        comps = {}
        for c in C.objects:
            table = {}
            for x in D.sets[c]:
                a = d.components[c].table[x]
                fam = []
                for u in C.out_arrows(c):
                    e = C.tgt(u)
                    xu = D.maps[u].table[x]
                    au = A.maps[u].table[a]
                    for b in B.sets[e]:
                        if f.components[e].table[b] == au:
                            fam.append(((u, b), h.components[e].table[(b, xu)]))
                y = (a, tuple(fam))
                if y not in sets[c]:
                    raise SliceMismatch("transpose leaves the dependent product", witness=(c, x))
                table[x] = y
            comps[c] = FinSetMap(D.sets[c], sets[c], table)
        return NatTrans(D, Pi, comps)

    return DependentProduct(H, f, g, Pi, proj, pb, ev, sharp)


def _restrict_family(C, t, c2, a2, d, A, B, f) -> tuple:
    fam = []
    for u2 in C.out_arrows(c2):
        e = C.tgt(u2)
        au = A.maps[u2].table[a2]
        for b in B.sets[e]:
            if f.components[e].table[b] == au:
                fam.append(((u2, b), d[(C.compose(u2, t), b)]))
    return tuple(fam)


# checkers

def verify_classifier(omega: tuple, monos: Iterable[NatTrans], char_fn: Callable | None = None,
                      cap: int = DEFAULT_CAP) -> list:
    """For each mono ``S -> G`` count the maps ``G -> Ω`` pulling the truth map
    back to ``S``; anything other than exactly one is a violation. When
    ``char_fn`` is given its output must be that map."""
    Om, true = omega
    rep = []
    C = Om.index
    tops = {c: true.components[c].table[STAR] for c in C.objects}
    if not all(t.is_injective() for t in true.components.values()):
        rep.append(Violation("ClassifierViolation", "truth map is not monic"))
    for k, m in enumerate(monos):
        G = m.tgt
        imgs = {c: m.components[c].image() for c in C.objects}
        hits = []
        for chi in enumerate_nat_trans(G, Om, cap):
            if all(frozenset(x for x in G.sets[c] if chi.components[c].table[x] == tops[c]) == imgs[c]
                   for c in C.objects):
                hits.append(chi)
        if len(hits) != 1:
            rep.append(Violation("ClassifierViolation",
                                 f"mono {k}: {len(hits)} classifying maps instead of one", k))
        elif char_fn is not None and char_fn(m) != hits[0]:
            rep.append(Violation("ClassifierViolation",
                                 f"mono {k}: computed characteristic map is not the classifying one", k))
    return rep


def verify_dependent_product(dp: DependentProduct, tests: Iterable[NatTrans],
                             cap: int = DEFAULT_CAP) -> list:
    """For each ``d: D -> A`` compare ``Hom_A(D, Π)`` with ``Hom_B(B ×_A D, C)``:
    the flat transpose must be injective and both sides equinumerous."""
    H = dp.category
    rep = []
    f, g = dp.f, dp.g
    A = f.tgt
    C = A.index
    over_pi = {c: {} for c in C.objects}
    for c in C.objects:
        for x in dp.obj.sets[c]:
            over_pi[c].setdefault(dp.proj.components[c].table[x], set()).add(x)
    for k, d in enumerate(tests):
        D = d.src
        homs = enumerate_nat_trans(D, dp.obj, cap,
                                   allowed=lambda o, x: over_pi[o].get(d.components[o].table[x], ()))
        flats = set()
        for u in homs:
            h = dp.flat(d, u)
            flats.add(h.key())
        P = H.pullback(f, d)
        fib = {c: {} for c in C.objects}
        for c in C.objects:
            for z in g.src.sets[c]:
                fib[c].setdefault(g.components[c].table[z], set()).add(z)
        maps_over_B = enumerate_nat_trans(
            P.apex, g.src, cap,
            allowed=lambda o, bx: fib[o].get(P.leg1.components[o].table[bx], ()))
        keys_B = {h.key() for h in maps_over_B}
        if len(flats) != len(homs):
            rep.append(Violation("AdjunctionViolation", f"test {k}: transpose is not injective", k))
        elif flats != keys_B:
            rep.append(Violation("AdjunctionViolation",
                                 f"test {k}: {len(homs)} maps into the product but {len(keys_B)} over B", k))
    return rep


def natural_iso_search(X: Diagram, Y: Diagram, cap: int = DEFAULT_CAP,
                       over: tuple | None = None) -> NatTrans | None:
    """Find a natural isomorphism ``X -> Y`` (over ``(p: X -> Z, q: Y -> Z)`` if
    given), or None."""
    if X.index != Y.index or X.sizes() != Y.sizes():
        return None
    allowed = None
    if over is not None:
        p, q = over
        by = {c: {} for c in X.index.objects}
        for c in X.index.objects:
            for y in Y.sets[c]:
                by[c].setdefault(q.components[c].table[y], set()).add(y)
        allowed = lambda o, x: by[o].get(p.components[o].table[x], ())  # noqa: E731
    found = enumerate_nat_trans(X, Y, cap, allowed=allowed, injective=True, first=True)
    return found[0] if found else None


def classifier_iso(omega1: tuple, char1: Callable, omega2: tuple, char2: Callable):
    """Compare two classifiers by classifying each truth map with the other
    and checking the two maps are mutually inverse. Returns them or None."""
    H = DiagramCategory(omega1[0].index)
    f12 = char2(omega1[1])
    f21 = char1(omega2[1])
    if (H.equal(H.compose(f21, f12), H.identity(omega1[0]))
            and H.equal(H.compose(f12, f21), H.identity(omega2[0]))):
        return f12, f21
    return None


def canonical_comparison(dp_from: DependentProduct, dp_to: DependentProduct) -> NatTrans:
    """The map between two dependent products of the same data induced by the
    counit of the first."""
    return dp_to.sharp(dp_from.proj, dp_from.ev)


# generators

def gen_inverse_category(seed: int, max_objects: int = 4, max_degree: int = 2,
                         max_hom: int = 3) -> InverseStructure:
    """A random generalized inverse category, deterministic in its arguments.

    Generating arrows run from higher to lower degree and carry weights in
    ``Z/k`` with ``k <= max_hom``; parallel morphisms are the distinct weight
    sums of paths. Some objects get an automorphism group from a weighted loop
    and one object may be doubled into an isomorphic pair.
    """
    if max_objects < 1 or max_degree < 0 or max_hom < 0:
        raise GenerationFailed("bounds must be non-negative with at least one object")
    rng = random.Random(f"inverse:{seed}:{max_objects}:{max_degree}:{max_hom}")
    if max_objects == 1:
        C = FinCategory.from_arrows(["o0"], [], name=f"gen{seed}")
        return InverseStructure(C, {"o0": 0})
    k = rng.randint(1, max(1, max_hom))
    doubled = max_objects >= 2 and max_hom > 0 and rng.random() < 0.3
    n_base = rng.randint(1, max_objects - (1 if doubled else 0))
    deg = [rng.randint(0, max_degree) for _ in range(n_base)]
    reach = {(i, i): {0} for i in range(n_base)}
    if max_hom > 0:
        for i in range(n_base):
            if k > 1 and n_base > 1 and rng.random() < 0.25:
                w = rng.randint(1, k - 1)
                reach[(i, i)] = {(w * t) % k for t in range(k)}
        for i in range(n_base):
            for j in range(n_base):
                if deg[i] > deg[j] and rng.random() < 0.6:
                    reach.setdefault((i, j), set()).update(
                        rng.randrange(k) for _ in range(rng.randint(1, 2)))
        changed = True
        while changed:
            changed = False
            for (i, j), ws in list(reach.items()):
                for (j2, l), vs in list(reach.items()):
                    if j2 != j:
                        continue
                    new = {(w + v) % k for w in ws for v in vs}
                    cur = reach.setdefault((i, l), set())
                    if not new <= cur:
                        cur |= new
                        changed = True
    copies = {i: [f"o{i}"] for i in range(n_base)}
    if doubled:
        i = rng.randrange(n_base)
        copies[i].append(f"o{i}b")
    objs, degree, base = [], {}, {}
    for i in range(n_base):
        for o in copies[i]:
            objs.append(o)
            degree[o] = deg[i]
            base[o] = i
    mors, comp, ids = {}, {}, {}
    for s in objs:
        for t in objs:
            for w in sorted(reach.get((base[s], base[t]), ())):
                mors[f"{s}>{t}#{w}"] = (s, t)
        ids[s] = f"{s}>{s}#0"
    for m1, (s, t) in mors.items():
        w1 = int(m1.rsplit("#", 1)[1])
        for m2, (t2, u) in mors.items():
            if t2 == t:
                w2 = int(m2.rsplit("#", 1)[1])
                comp[(m2, m1)] = f"{s}>{u}#{(w1 + w2) % k}"
    C = FinCategory(tuple(objs), mors, ids, comp, f"gen{seed}")
    inv = InverseStructure(C, degree)
    if validate_category(C):
        raise GenerationFailed(f"seed {seed} produced an invalid category")
    return inv


def gen_diagram(seed: int, inv: InverseStructure, max_elems: int = 3) -> Diagram:
    """A random diagram on an inverse category, built degree by degree.

    Each isomorphism class of a stratum gets a set made of free orbits and
    fixed points of its automorphism group, with an equivariant map to the
    matching object; ``max_elems`` bounds the size at each object where the
    automorphism group allows it.
    """
    from .matching import coslice_limit, reindex_along_iso

    rng = random.Random(f"diagram:{seed}:{inv.category.name}:{max_elems}")
    C = inv.category
    sets, maps = {}, {}
    for n in inv.degrees:
        G = stratum(inv, n)
        done = set()
        for r in G.objects:
            if r in done:
                continue
            comp_objs = [x for x in G.objects if G.hom(r, x)]
            done.update(comp_objs)
            auts = list(G.hom(r, r))
            phi = {x: G.hom(r, x)[0] for x in comp_objs}
            M = coslice_limit(strict_coslice(inv, r), sets, maps)
            Mr = list(M.object.elements)
            fixed = [mu for mu in Mr if all(reindex_along_iso(inv, a, mu) == mu for a in auts)]
            elems, match = [], {}
            budget = rng.randint(min(1, max_elems), max_elems)
            orbit = 0
            while budget > 0 and Mr:
                if len(auts) > 1 and len(auts) <= budget and rng.random() < 0.5:
                    mu0 = rng.choice(Mr)
                    for a in auts:
                        e = f"{orbit}.{a}"
                        elems.append(e)
                        match[e] = reindex_along_iso(inv, a, mu0)
                    budget -= len(auts)
                elif fixed:
                    e = f"{orbit}"
                    elems.append(e)
                    match[e] = rng.choice(fixed)
                    budget -= 1
                else:
                    break
                orbit += 1
            for x in comp_objs:
                sets[x] = FinSetObj(elems)
            for x in comp_objs:
                for y in comp_objs:
                    for g in G.hom(x, y):
                        a = C.compose_path(C.inverse(phi[y]), g, phi[x])
                        maps[g] = FinSetMap(sets[x], sets[y], {e: _act(C, a, e) for e in elems})
                mx = {e: reindex_along_iso(inv, phi[x], match[e]) for e in elems}
                for u in inv.lowering_out(x):
                    maps[u] = FinSetMap(sets[x], sets[C.tgt(u)], {e: dict(mx[e])[u] for e in elems})
    d = Diagram(C, sets, maps)
    if validate_diagram(d):
        raise GenerationFailed(f"seed {seed} produced an invalid diagram")
    return d


def _act(C: FinCategory, a: str, e: str) -> str:
    if "." not in e:
        return e
    orbit, b = e.split(".", 1)
    return f"{orbit}.{C.compose(a, b)}"


def gen_over(seed: int, base: Diagram, inv: InverseStructure, max_elems: int = 2,
             tag: str = "") -> NatTrans:
    """A random ``B -> base``: a subdiagram of ``base × R`` for random ``R``,
    with its projection."""
    H = DiagramCategory(inv.category, inv)
    R = gen_diagram(seed, inv, max_elems)
    P = H.product(base, R)
    rng = random.Random(f"over:{seed}:{tag}")
    pick = {c: [x for x in P.apex.sets[c] if rng.random() < 0.5] for c in inv.category.objects}
    sub, inc = subdiagram(P.apex, pick)
    return H.compose(P.leg1, inc)


def gen_mono(seed: int, G: Diagram) -> NatTrans:
    """A random subdiagram inclusion into ``G``."""
    rng = random.Random(f"mono:{seed}")
    pick = {c: [x for x in G.sets[c] if rng.random() < 0.3] for c in G.index.objects}
    return subdiagram(G, pick)[1]


def small_over_tests(seed: int, A: Diagram, inv: InverseStructure, count: int = 3) -> list:
    """Test objects ``D -> A`` for the dependent product check: the identity and
    a few small random objects over ``A``."""
    H = DiagramCategory(inv.category, inv)
    tests = [H.identity(A)]
    for t in range(count):
        tests.append(gen_over(seed * 31 + t, A, inv, 2, tag="test"))
    return tests


def diagram_from_tables(C: FinCategory, sets: Mapping, maps: Mapping) -> Diagram:
    return make_diagram(C, sets, maps)
