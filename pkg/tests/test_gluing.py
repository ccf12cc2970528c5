import pytest
from hypothesis import given, settings, strategies as st

from glutop.corpus import delta_inj_op, discrete, horn_3_2, simplex_3, walking_arrow
from glutop.diagcat import Diagram, NatTrans, enumerate_nat_trans, make_diagram, make_nat, restrict
from glutop.errors import NotMono, SliceMismatch
from glutop.fincat import collage, inclusion_functor, infer_inverse_structure, truncation
from glutop.gluing import (
    GluedMorphism,
    GluedObject,
    constant_terminal_lex,
    gl_char,
    gl_flat,
    gl_handle,
    gl_omega,
    gl_pi,
    gl_sharp,
    glued_map_to_cone,
    glued_to_cone_diagram,
    identity_lex,
    limit_lex,
    terminal_profunctor,
)
from glutop.logicat import STAR, TOP, FinSetMap, FinSetObj, finset_handle
from glutop.matching import glue_equivalence
from glutop.oracle import (
    gen_diagram,
    gen_mono,
    gen_over,
    natural_iso_search,
    omega_oracle,
    pi_oracle_sections,
)

fs = finset_handle()
seeds = st.integers(min_value=0, max_value=10_000)
J2 = discrete(["x", "y"]).category
CONE = collage(terminal_profunctor(J2), "cone")
CONE_INV = infer_inverse_structure(CONE)
TOPOBJ = "•"


def glued(apex, shadow, table):
    e, c = FinSetObj(apex), FinSetObj(shadow)
    return GluedObject(e, c, FinSetMap(e, c, table))


@st.composite
def arrow_objects(draw, tag="x"):
    ne, nc = draw(st.integers(0, 2)), draw(st.integers(1, 2))
    apex = [f"{tag}e{i}" for i in range(ne)]
    shadow = [f"{tag}c{i}" for i in range(nc)]
    return glued(apex, shadow, {a: shadow[draw(st.integers(0, nc - 1))] for a in apex})


@st.composite
def arrow_monos(draw):
    X = draw(arrow_objects())
    keep_c = [c for c in X.shadow if draw(st.booleans())]
    keep_e = [e for e in X.apex if X.structure.table[e] in keep_c and draw(st.booleans())]
    S = glued(keep_e, keep_c, {e: X.structure.table[e] for e in keep_e})
    return GluedMorphism(S, X, FinSetMap(S.apex, X.apex, {e: e for e in keep_e}),
                         FinSetMap(S.shadow, X.shadow, {c: c for c in keep_c}))


def cone_to_glued(X: Diagram) -> GluedObject:
    shadow = restrict(X, inclusion_functor(J2, CONE))
    F = limit_lex(J2)
    lim = F.on_obj(shadow)
    legs = {t: m for m, (s, t) in CONE.morphisms.items() if s == TOPOBJ and t != TOPOBJ}
    table = {e: tuple((t, X.maps[legs[t]].table[e]) for t in sorted(legs)) for e in X.sets[TOPOBJ]}
    return GluedObject(X.sets[TOPOBJ], shadow, FinSetMap(X.sets[TOPOBJ], lim, table))


def cone_map_to_glued(t: NatTrans, X: GluedObject, Y: GluedObject) -> GluedMorphism:
    shadow = restrict(t, inclusion_functor(J2, CONE))
    apex = FinSetMap(X.apex, Y.apex, t.components[TOPOBJ].table)
    return GluedMorphism(X, Y, apex, NatTrans(X.shadow, Y.shadow, shadow.components))


def preimage_matches(chi_map, point, image) -> bool:
    """Whether ``chi^{-1}(point)`` is ``image``, for FinSet maps or natural transformations."""
    if isinstance(chi_map, FinSetMap):
        return {x for x in chi_map.src if chi_map.table[x] == point} == set(image)
    return all(preimage_matches(chi_map.components[o], point[o], image[o]) for o in chi_map.components)


def classifying_count(Gl, Om, true, m) -> int:
    t_apex = true.apex_map.table[STAR]
    shadow_true = true.shadow_map
    if isinstance(shadow_true, FinSetMap):
        t_shadow = shadow_true.table[STAR]
        shadow_img = m.shadow_map.image()
    else:
        t_shadow = {o: c.table[next(iter(c.src))] for o, c in shadow_true.components.items()}
        shadow_img = {o: c.image() for o, c in m.shadow_map.components.items()}
    return sum(1 for chi in Gl.hom(m.tgt, Om)
               if preimage_matches(chi.apex_map, t_apex, m.apex_map.image())
               and preimage_matches(chi.shadow_map, t_shadow, shadow_img))


# handles

def test_identity_gluing_is_arrow_category():
    Gl = gl_handle(identity_lex(fs))
    X = glued(["a"], ["b", "c"], {"a": "b"})
    Y = glued(["u", "v"], ["w"], {"u": "w", "v": "w"})
    A = walking_arrow().category
    dX = make_diagram(A, {"a": ["a"], "b": ["b", "c"]}, {"f": {"a": "b"}})
    dY = make_diagram(A, {"a": ["u", "v"], "b": ["w"]}, {"f": {"u": "w", "v": "w"}})
    assert len(Gl.hom(X, Y)) == len(enumerate_nat_trans(dX, dY))
    assert len(Gl.hom(Y, X)) == len(enumerate_nat_trans(dY, dX))


def test_limit_gluing_matches_cone_diagrams():
    Gl = gl_handle(limit_lex(J2))
    for s in range(5):
        X, Y = gen_diagram(s, CONE_INV, 2), gen_diagram(s + 50, CONE_INV, 2)
        gX, gY = cone_to_glued(X), cone_to_glued(Y)
        assert glued_to_cone_diagram(gX, J2, CONE) == X
        assert len(Gl.hom(gX, gY)) == len(enumerate_nat_trans(X, Y))


def test_constant_gluing_is_product():
    Gl = gl_handle(constant_terminal_lex(fs, fs))
    one = fs.terminal()
    X = GluedObject(FinSetObj(["a", "b"]), FinSetObj(["c"]), FinSetMap(FinSetObj(["a", "b"]), one, {"a": STAR, "b": STAR}))
    Y = GluedObject(FinSetObj(["u"]), FinSetObj(["v", "w"]), FinSetMap(FinSetObj(["u"]), one, {"u": STAR}))
    assert len(Gl.hom(X, Y)) == 1 * 2
    assert len(Gl.hom(Y, X)) == 2 * 1


def test_morphism_checks_square():
    Gl = gl_handle(identity_lex(fs))
    X = glued(["a"], ["b", "c"], {"a": "b"})
    with pytest.raises(SliceMismatch):
        Gl.morphism(X, X, fs.identity(X.apex), FinSetMap(X.shadow, X.shadow, {"b": "c", "c": "b"}))


# classifiers

def test_sierpinski_classifier():
    Om, true = gl_omega(identity_lex(fs))
    assert len(Om.apex) == 3 and len(Om.shadow) == 2


def test_limit_classifier_apex():
    Om, true = gl_omega(limit_lex(J2))
    assert len(Om.apex) == 5
    assert len(omega_oracle(CONE)[0].sets[TOPOBJ]) == 5


def test_constant_classifier_apex():
    Om, _ = gl_omega(constant_terminal_lex(fs, fs))
    assert len(Om.apex) == 2


def test_true_is_pullback_of_finset_truth():
    for F in (identity_lex(fs), limit_lex(J2)):
        Om, true = gl_omega(F)
        t = true.apex_map.table[STAR]
        assert [e for e in Om.apex if e[0] == TOP] == [t]


def test_char_of_identity_is_true():
    Gl = gl_handle(identity_lex(fs))
    Om, true = Gl.omega()
    X = glued(["a", "b"], ["c"], {"a": "c", "b": "c"})
    chi = gl_char(Gl.F, Gl.identity(X))
    assert set(chi.apex_map.table.values()) == {true.apex_map.table[STAR]}
    assert set(chi.shadow_map.table.values()) == {true.shadow_map.table[STAR]}


def test_char_rejects_non_mono():
    Gl = gl_handle(identity_lex(fs))
    X = glued(["a", "b"], ["c"], {"a": "c", "b": "c"})
    Y = glued(["z"], ["c"], {"z": "c"})
    with pytest.raises(NotMono):
        gl_char(Gl.F, GluedMorphism(X, Y, FinSetMap(X.apex, Y.apex, {"a": "z", "b": "z"}), fs.identity(X.shadow)))


def test_horn_in_matching_gluing():
    inv = delta_inj_op(3)
    le = truncation(inv, 2)
    inc = inclusion_functor(le.category, inv.category)
    h, s = restrict(horn_3_2(), inc), restrict(simplex_3(), inc)
    E = glue_equivalence(inv, 2)
    t = make_nat(h, s, {o: {x: x for x in h.sets[o]} for o in h.index.objects})
    m = E.forward_map(t)
    Gl = gl_handle(E.functor)
    Om, true = Gl.omega()
    chi = gl_char(E.functor, m)
    t_apex = true.apex_map.components["[2]"].table[STAR]
    present = {x for x in s.sets["[2]"] if chi.apex_map.components["[2]"].table[x] == t_apex}
    assert present == set(h.sets["[2]"])


def test_char_of_empty_subobject_unique():
    Gl = gl_handle(identity_lex(fs))
    Om, true = Gl.omega()
    X = glued(["a"], ["c", "d"], {"a": "c"})
    S = glued([], [], {})
    m = GluedMorphism(S, X, FinSetMap(S.apex, X.apex, {}), FinSetMap(S.shadow, X.shadow, {}))
    assert classifying_count(Gl, Om, true, m) == 1
    chi = gl_char(Gl.F, m)
    assert preimage_matches(chi.apex_map, true.apex_map.table[STAR], set())


@settings(max_examples=40, deadline=None)
@given(arrow_monos())
def test_glued_classifier_unique(m):
    Gl = gl_handle(identity_lex(fs))
    Om, true = Gl.omega()
    assert classifying_count(Gl, Om, true, m) == 1
    chi = gl_char(Gl.F, m)
    assert preimage_matches(chi.apex_map, true.apex_map.table[STAR], m.apex_map.image())


@settings(max_examples=10, deadline=None)
@given(seeds)
def test_limit_classifier_unique(seed):
    Gl = gl_handle(limit_lex(J2))
    Om, true = Gl.omega()
    X = gen_diagram(seed, CONE_INV, 2)
    t = gen_mono(seed, X)
    gX, gS = cone_to_glued(X), cone_to_glued(t.src)
    m = cone_map_to_glued(t, gS, gX)
    assert classifying_count(Gl, Om, true, m) == 1


# dependent products

def test_arrow_exponential():
    Gl = gl_handle(identity_lex(fs))
    X = glued(["x0"], ["x1", "x2"], {"x0": "x1"})
    Y = glued(["y0", "y1"], ["z"], {"y0": "z", "y1": "z"})
    dp = gl_pi(Gl.F, Gl.to_terminal(X), Gl.product(X, Y).leg1, Gl)
    assert (len(dp.obj.apex), len(dp.obj.shadow)) == (2, 1)


def test_pi_along_iso_gives_singleton_fibres():
    Gl = gl_handle(identity_lex(fs))
    X = glued(["a", "b"], ["c", "d"], {"a": "c", "b": "d"})
    Y = glued(["y"], ["z"], {"y": "z"})
    f = Gl.product(X, Y).leg1
    dp = gl_pi(Gl.F, f, Gl.identity(f.src), Gl)
    assert len(dp.obj.apex) == len(X.apex) and len(dp.obj.shadow) == len(X.shadow)


def _round_trips(Gl, dp, d):
    homs = [u for u in Gl.hom(Gl.dom(d), dp.obj) if Gl.equal(Gl.compose(dp.proj, u), d)]
    P = Gl.pullback(dp.f, d)
    over = [h for h in Gl.hom(P.apex, Gl.dom(dp.g)) if Gl.equal(Gl.compose(dp.g, h), P.leg1)]
    assert len(homs) == len(over)
    for u in homs:
        assert Gl.equal(gl_sharp(dp, d, gl_flat(dp, d, u)), u)
    for h in over:
        assert Gl.equal(gl_flat(dp, d, gl_sharp(dp, d, h)), h)


@settings(max_examples=25, deadline=None)
@given(arrow_objects("x"), arrow_objects("y"), arrow_objects("d"))
def test_glued_transposes_inverse(X, Y, D):
    Gl = gl_handle(identity_lex(fs))
    dp = gl_pi(Gl.F, Gl.to_terminal(X), Gl.product(X, Y).leg1, Gl)
    _round_trips(Gl, dp, Gl.to_terminal(D))


def test_flat_of_identity_is_counit():
    Gl = gl_handle(identity_lex(fs))
    X = glued(["x0"], ["x1", "x2"], {"x0": "x1"})
    Y = glued(["y0", "y1"], ["z"], {"y0": "z", "y1": "z"})
    dp = gl_pi(Gl.F, Gl.to_terminal(X), Gl.product(X, Y).leg1, Gl)
    h = gl_flat(dp, dp.proj, Gl.identity(dp.obj))
    P = Gl.pullback(dp.f, dp.proj)
    assert Gl.equal(h, Gl.compose(dp.ev, Gl.pullback_factor(dp.pb, P.leg1, P.leg2)))


def test_counit_apex_is_codomain_counit():
    Gl = gl_handle(identity_lex(fs))
    X = glued(["x0"], ["x1", "x2"], {"x0": "x1"})
    Y = glued(["y0", "y1"], ["z"], {"y0": "z", "y1": "z"})
    dp = gl_pi(Gl.F, Gl.to_terminal(X), Gl.product(X, Y).leg1, Gl)
    parts = dp.parts
    apb = dp.pb.apex_pb
    k = parts.dp_c.pb.factor(apb.leg1, fs.compose(parts.p.leg2, apb.leg2))
    assert fs.equal(dp.ev.apex_map, fs.compose(parts.dp_c.ev, k))


@settings(max_examples=10, deadline=None)
@given(seeds)
def test_limit_gluing_pi_matches_oracle(seed):
    Gl = gl_handle(limit_lex(J2))
    A = gen_diagram(seed, CONE_INV, 2)
    f = gen_over(seed, A, CONE_INV, 2, "B")
    g = gen_over(seed + 1, f.src, CONE_INV, 2, "C")
    gA, gB, gC = cone_to_glued(A), cone_to_glued(f.src), cone_to_glued(g.src)
    dp = gl_pi(Gl.F, cone_map_to_glued(f, gB, gA), cone_map_to_glued(g, gC, gB), Gl)
    Pi = glued_to_cone_diagram(dp.obj, J2, CONE)
    proj = glued_map_to_cone(dp.proj, J2, CONE)
    orc = pi_oracle_sections(f, g)
    assert natural_iso_search(Pi, orc.obj, over=(proj, orc.proj)) is not None
