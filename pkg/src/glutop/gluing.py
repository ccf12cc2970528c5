"""Artin gluing along a finite-limit preserving functor ``F: C -> E``.

Objects of the gluing are triples ``(a, x, α: a -> Fx)`` with ``a`` in ``E`` and ``x``
in ``C``. Everything here is written against the handle interface of
:mod:`glutop.logicat`, so ``C`` and ``E`` may be finite sets, diagram categories
or gluings themselves.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable

from .errors import MissingCapability, NotMono, NotPowerful, SliceMismatch
from .logicat import (
    DEFAULT_CAP,
    DependentProduct,
    FinSetMap,
    LogicalCategory,
    Pullback,
    finset_handle,
    limit,
    limit_map,
)


@dataclass(frozen=True, eq=False)
class LexFunctor:
    """A functor ``src -> tgt`` with explicit witnesses that it preserves the
    terminal object and pullbacks.

    ``pullback_cmp(f, g)`` is the canonical iso ``F(X ×_Z Y) -> FX ×_FZ FY`` and
    ``terminal_cmp()`` the iso ``1 -> F(1)``, both in ``tgt``.
    """

    src: LogicalCategory
    tgt: LogicalCategory
    on_obj: Callable
    on_map: Callable
    pullback_cmp: Callable
    terminal_cmp: Callable
    name: str = "F"

    def __call__(self, x):
        return self.on_map(x)


@dataclass(frozen=True, eq=False)
class GluedObject:
    apex: Any
    shadow: Any
    structure: Any

    def __repr__(self):
        return f"GluedObject(apex={self.apex!r}, shadow={self.shadow!r})"


@dataclass(frozen=True, eq=False)
class GluedMorphism:
    src: GluedObject
    tgt: GluedObject
    apex_map: Any
    shadow_map: Any


@dataclass(frozen=True, eq=False)
class GluedPullback(Pullback):
    apex_pb: Pullback = None
    shadow_pb: Pullback = None


class GlCategory(LogicalCategory):
    """Handle for the gluing ``Gl(F)``."""

    def __init__(self, F: LexFunctor, cap: int = DEFAULT_CAP):
        self.F = F
        self.E = F.tgt
        self.C = F.src
        self.cap = cap
        self.name = f"Gl({F.name})"
        self._omega = None

    # morphisms
    def dom(self, f):
        return f.src

    def cod(self, f):
        return f.tgt

    def morphism(self, X, Y, apex_map, shadow_map) -> GluedMorphism:
        """Build a glued morphism, checking that the square commutes."""
        E, F = self.E, self.F
        if not E.equal(E.compose(Y.structure, apex_map), E.compose(F(shadow_map), X.structure)):
            raise SliceMismatch("square does not commute")
        return GluedMorphism(X, Y, apex_map, shadow_map)

    def identity(self, X):
        return GluedMorphism(X, X, self.E.identity(X.apex), self.C.identity(X.shadow))

    def compose(self, g, f):
        return GluedMorphism(f.src, g.tgt, self.E.compose(g.apex_map, f.apex_map),
                             self.C.compose(g.shadow_map, f.shadow_map))

    def equal(self, f, g) -> bool:
        return self.E.equal(f.apex_map, g.apex_map) and self.C.equal(f.shadow_map, g.shadow_map)

    def same_object(self, X, Y) -> bool:
        return (self.E.same_object(X.apex, Y.apex) and self.C.same_object(X.shadow, Y.shadow)
                and self.E.equal(X.structure, Y.structure))

    def invert(self, m):
        return GluedMorphism(m.tgt, m.src, self.E.invert(m.apex_map), self.C.invert(m.shadow_map))

    def is_mono(self, m) -> bool:
        return self.E.is_mono(m.apex_map) and self.C.is_mono(m.shadow_map)

    def hom(self, X, Y, cap: int = DEFAULT_CAP) -> list:
        E, F = self.E, self.F
        out = []
        shadows = self.C.hom(X.shadow, Y.shadow, cap)
        for a in E.hom(X.apex, Y.apex, cap):
            lhs = E.compose(Y.structure, a)
            for x in shadows:
                if E.equal(lhs, E.compose(F(x), X.structure)):
                    out.append(GluedMorphism(X, Y, a, x))
        return out

    # limits
    def terminal(self):
        return GluedObject(self.E.terminal(), self.C.terminal(), self.F.terminal_cmp())

    def to_terminal(self, X):
        return GluedMorphism(X, self.terminal(), self.E.to_terminal(X.apex),
                             self.C.to_terminal(X.shadow))

    def pullback(self, f, g) -> GluedPullback:
        E, C, F = self.E, self.C, self.F
        X, Y = f.src, g.src
        pe = E.pullback(f.apex_map, g.apex_map)
        pc = C.pullback(f.shadow_map, g.shadow_map)
        fp = E.pullback(F(f.shadow_map), F(g.shadow_map))
        into = fp.factor(E.compose(X.structure, pe.leg1), E.compose(Y.structure, pe.leg2))
        back = E.invert(F.pullback_cmp(f.shadow_map, g.shadow_map))
        P = GluedObject(pe.apex, pc.apex, E.compose(back, into))
        return GluedPullback(self, f, g, P,
                             GluedMorphism(P, X, pe.leg1, pc.leg1),
                             GluedMorphism(P, Y, pe.leg2, pc.leg2), pe, pc)

    def pullback_factor(self, pb, q1, q2):
        return GluedMorphism(q1.src, pb.apex, pb.apex_pb.factor(q1.apex_map, q2.apex_map),
                             pb.shadow_pb.factor(q1.shadow_map, q2.shadow_map))

    # logical structure
    def omega(self):
        if self._omega is None:
            self._omega = gl_omega(self.F)
        return self._omega

    def char(self, m):
        return gl_char(self.F, m)

    def pi(self, f, g) -> DependentProduct:
        return gl_pi(self.F, f, g, handle=self)


def gl_handle(F: LexFunctor, cap: int = DEFAULT_CAP) -> GlCategory:
    return GlCategory(F, cap)


def _require(fn, what: str, err=MissingCapability):
    try:
        return fn()
    except MissingCapability as exc:
        raise err(f"{what}: {exc}") from exc


def gl_omega(F: LexFunctor) -> tuple:
    """Subobject classifier of the gluing and its truth map.

    The apex is the equalizer of ``π₁`` and ``∧ ∘ (id × χ_{F(true)})`` on
    ``Ω_E × F(Ω_C)``; the shadow is ``Ω_C``.
    """
    return _omega_parts(F)[:2]


def _omega_parts(F: LexFunctor) -> tuple:
    E, C = F.tgt, F.src
    OmE, trueE = _require(E.omega, "codomain has no subobject classifier")
    OmC, trueC = _require(C.omega, "domain has no subobject classifier")
    FOm = F.on_obj(OmC)
    Ftrue = E.compose(F(trueC), F.terminal_cmp())
    chi = E.char(Ftrue)
    P = E.product(OmE, FOm)
    meet, OO = E.meet()
    rhs = E.compose(meet, OO.factor(P.leg1, E.compose(chi, P.leg2)))
    eq = E.equalizer(P.leg1, rhs)
    Om = GluedObject(eq.apex, OmC, E.compose(P.leg2, eq.incl))
    T = GluedObject(E.terminal(), C.terminal(), F.terminal_cmp())
    true_apex = eq.factor(P.factor(trueE, Ftrue))
    return Om, GluedMorphism(T, Om, true_apex, trueC), P, eq


def gl_char(F: LexFunctor, m: GluedMorphism) -> GluedMorphism:
    """Classifying map of a mono ``(g, k): β -> α``: apex ``(χ_g, Fχ_k ∘ α)``
    factored through the equalizer, shadow ``χ_k``."""
    E, C = F.tgt, F.src
    if not (E.is_mono(m.apex_map) and C.is_mono(m.shadow_map)):
        raise NotMono("glued morphism is not a mono")
    Om, _, P, eq = _omega_parts(F)
    alpha = m.tgt
    chi_k = C.char(m.shadow_map)
    chi_g = E.char(m.apex_map)
    second = E.compose(F(chi_k), alpha.structure)
    apex = eq.factor(P.factor(chi_g, second))
    return GluedMorphism(alpha, Om, apex, chi_k)


@dataclass(frozen=True, eq=False)
class GluedPiParts:
    """Intermediate objects of the glued dependent product, kept for the
    transposes and for inspection."""

    dp_shadow: DependentProduct   # Π_y z in C
    dp_F: DependentProduct        # Π_Fy Fz in E
    theta: Any                    # F(Π_y z) -> Π_Fy Fz
    P1: Pullback                  # a ×_Fx F(Π_y z)
    P2: Pullback                  # a ×_Fx Π_Fy Fz
    green: Any                    # P1 -> P2
    Q: Pullback                   # b ×_Fy Fz
    dp_Q: DependentProduct        # Π_b (b ×_Fy Fz)
    yellow: Any                   # P2 -> Π_b Q
    dp_c: DependentProduct        # Π_b c
    cyan: Any                     # Π_b c -> Π_b Q
    p: Pullback                   # apex of the glued product


@dataclass(frozen=True, eq=False)
class GluedDependentProduct(DependentProduct):
    parts: GluedPiParts = None


def gl_pi(F: LexFunctor, f: GluedMorphism, g: GluedMorphism,
          handle: GlCategory | None = None) -> DependentProduct:
    """Dependent product in the gluing along ``f = (g_E, k): β -> α`` of
    ``g = (f_E, h): γ -> β``.

    The shadow is ``Π_y z`` in ``C``. The apex is the pullback of
    ``Π_b c -> Π_b(b ×_Fy Fz)`` along
    ``a ×_Fx F(Π_y z) -> a ×_Fx Π_Fy Fz -> Π_b(b ×_Fy Fz)``.
    """
    Gl = handle or GlCategory(F)
    E, C = F.tgt, F.src
    if not Gl.same_object(g.tgt, f.src):
        raise SliceMismatch("g must land in the domain of f")
    alpha, beta, gamma = f.tgt, f.src, g.src
    gE, k = f.apex_map, f.shadow_map
    fE, h = g.apex_map, g.shadow_map

    dpC = _require(lambda: C.pi(k, h), "domain has no dependent products", NotPowerful)
    Fk, Fh = F(k), F(h)
    dpF = _require(lambda: E.pi(Fk, Fh), "codomain has no dependent products", NotPowerful)

    # θ: F(Π_y z) -> Π_Fy Fz, transpose of F(ev) through the pullback comparison
    Fproj = F(dpC.proj)
    Fev = E.compose(F(dpC.ev), E.invert(F.pullback_cmp(k, dpC.proj)))
    theta = dpF.sharp(Fproj, Fev)

    P1 = E.pullback(alpha.structure, Fproj)
    P2 = E.pullback(alpha.structure, dpF.proj)
    green = P2.factor(P1.leg1, E.compose(theta, P1.leg2))

    Q = E.pullback(beta.structure, Fh)
    dpQ = _require(lambda: E.pi(gE, Q.leg1), "codomain has no dependent products", NotPowerful)
    R = E.pullback(gE, P2.leg1)
    into = dpF.pb.factor(E.compose(beta.structure, R.leg1),
                         E.compose(P2.leg2, R.leg2))
    yellow = dpQ.sharp(P2.leg1, Q.factor(R.leg1, E.compose(dpF.ev, into)))

    dpc = _require(lambda: E.pi(gE, fE), "codomain has no dependent products", NotPowerful)
    cyan = E.pi_map(dpc, dpQ, Q.factor(fE, gamma.structure))

    p = E.pullback(E.compose(yellow, green), cyan)
    structure = E.compose(P1.leg2, p.leg1)
    Pi = GluedObject(p.apex, dpC.obj, structure)
    proj_apex = E.compose(P1.leg1, p.leg1)
    proj = GluedMorphism(Pi, alpha, proj_apex, dpC.proj)
    parts = GluedPiParts(dpC, dpF, theta, P1, P2, green, Q, dpQ, yellow, dpc, cyan, p)

    pb = Gl.pullback(f, proj)
    ev = GluedMorphism(pb.apex, gamma, dpc.flat(proj_apex, p.leg2), dpC.ev)

    def sharp(d, hh, _P):
        return _gl_sharp(Gl, parts, f, d, hh)

    return GluedDependentProduct(Gl, f, g, Pi, proj, pb, ev, sharp, parts)


def gl_flat(dp: GluedDependentProduct, d: GluedMorphism, u: GluedMorphism) -> GluedMorphism:
    """``(u, v): δ -> Π`` over ``α`` to ``(u₂‡, v†): β ×_α δ -> γ``, where ``u₂`` is
    the ``Π_b c`` component of ``u``."""
    Gl = dp.category
    E = Gl.E
    parts = dp.parts
    if not Gl.equal(Gl.compose(dp.proj, u), d):
        raise SliceMismatch("map does not lie over the base")
    u2 = E.compose(parts.p.leg2, u.apex_map)
    apex = parts.dp_c.flat(d.apex_map, u2)
    shadow = parts.dp_shadow.flat(d.shadow_map, u.shadow_map)
    P = Gl.pullback(dp.f, d)
    return GluedMorphism(P.apex, dp.g.src, apex, shadow)


def gl_sharp(dp: GluedDependentProduct, d: GluedMorphism, h: GluedMorphism) -> GluedMorphism:
    return dp.sharp(d, h)


def _gl_sharp(Gl: GlCategory, parts: GluedPiParts, f, d, hh) -> GluedMorphism:
    E, F = Gl.E, Gl.F
    delta = d.src
    v = parts.dp_shadow.sharp(d.shadow_map, hh.shadow_map)
    u1 = parts.P1.factor(d.apex_map, E.compose(F(v), delta.structure))
    u2 = parts.dp_c.sharp(d.apex_map, hh.apex_map)
    u = parts.p.factor(u1, u2)
    Pi = GluedObject(parts.p.apex, parts.dp_shadow.obj,
                     E.compose(parts.P1.leg2, parts.p.leg1))
    return GluedMorphism(delta, Pi, u, v)


# demonstration functors

def identity_lex(H: LogicalCategory) -> LexFunctor:
    """Identity functor; its gluing is the arrow category of ``H``."""

    def cmp(f, g):
        return H.identity(H.pullback(f, g).apex)

    return LexFunctor(H, H, lambda X: X, lambda m: m, cmp,
                      lambda: H.identity(H.terminal()), "id")


def limit_lex(J, cap: int = DEFAULT_CAP) -> LexFunctor:
    """``lim: FinSet^J -> FinSet``. Its gluing is diagrams on ``J`` with a cone
    point adjoined."""
    from .diagcat import DiagramCategory

    src = DiagramCategory(J, cap=cap)
    fs = finset_handle(cap)
    cache: dict = {}

    def lim(X):
        key = id(X)
        if key not in cache or cache[key][0] is not X:
            cache[key] = (X, limit(J, X.sets, X.maps, cap))
        return cache[key][1]

    def on_map(t):
        return limit_map(lim(t.src), lim(t.tgt), t.components)

    def cmp(f, g):
        P = src.pullback(f, g).apex
        LP = lim(P).apex
        target = fs.pullback(on_map(f), on_map(g)).apex
        table = {e: (tuple((o, xy[0]) for o, xy in e), tuple((o, xy[1]) for o, xy in e))
                 for e in LP}
        return FinSetMap(LP, target, table)

    def term():
        one = lim(src.terminal()).apex
        return FinSetMap(fs.terminal(), one, {"*": one.elements[0]})

    return LexFunctor(src, fs, lambda X: lim(X).apex, on_map, cmp, term, f"lim_{J.name or 'J'}")


def constant_terminal_lex(C: LogicalCategory, E: LogicalCategory) -> LexFunctor:
    """Sends everything to the terminal object."""

    def cmp(f, g):
        one = E.identity(E.terminal())
        return E.pullback(one, one).factor(one, one)

    return LexFunctor(C, E, lambda X: E.terminal(), lambda m: E.identity(E.terminal()),
                      cmp, lambda: E.identity(E.terminal()), "const1")


def glued_to_cone_diagram(X: GluedObject, J, collage_category) -> Any:
    """Translate an object of ``Gl(lim_J)`` into a diagram on ``J`` with a cone
    point adjoined (the collage of the terminal profunctor into ``J``).

    The adjoined object must be the only object of the collage not in ``J``.
    """
    from .diagcat import make_diagram

    extra = [o for o in collage_category.objects if o not in J.objects]
    if len(extra) != 1:
        raise SliceMismatch("collage must adjoin exactly one object")
    top = extra[0]
    sets = dict(X.shadow.sets)
    sets[top] = X.apex
    maps = dict(X.shadow.maps)
    for m, (s, t) in collage_category.morphisms.items():
        if s == top and t != top:
            maps[m] = {e: dict(X.structure.table[e])[t] for e in X.apex}
    return make_diagram(collage_category, sets, maps)


def glued_map_to_cone(m: GluedMorphism, J, collage_category) -> Any:
    """Translate a morphism of ``Gl(lim_J)`` along ``glued_to_cone_diagram``."""
    from .diagcat import NatTrans

    X = glued_to_cone_diagram(m.src, J, collage_category)
    Y = glued_to_cone_diagram(m.tgt, J, collage_category)
    top = next(o for o in collage_category.objects if o not in J.objects)
    comps = {}
    for o in collage_category.objects:
        t = m.apex_map if o == top else m.shadow_map.components[o]
        comps[o] = FinSetMap(X.sets[o], Y.sets[o], t.table)
    return NatTrans(X, Y, comps)


def terminal_profunctor(J, point: str = "•"):
    """The profunctor from a one-object category into ``J`` with singleton sets."""
    from .fincat import FinCategory, Profunctor

    one = FinCategory.from_arrows([point], [], name="point")
    elems, left, right = {}, {}, {}
    for j in J.objects:
        e = f"{point}>{j}"
        elems[(point, j)] = (e,)
        left[(one.identity(point), e)] = e
    for m, (s, t) in J.morphisms.items():
        right[(m, f"{point}>{s}")] = f"{point}>{t}"
    return Profunctor(one, J, elems, left, right)

