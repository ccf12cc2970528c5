import pytest
from hypothesis import given, settings, strategies as st

from glutop.corpus import (
    arrow_exponential_data,
    corpus_categories,
    delta_inj_op,
    discrete,
    exponential,
    horn_3_2,
    simplex_3,
    span,
    walking_arrow,
)
from glutop.diagcat import (
    DiagramCategory,
    constant_diagram,
    is_iso_nat,
    make_diagram,
    make_nat,
    restrict,
    validate_diagram,
    validate_nat,
)
from glutop.errors import NotMono
from glutop.fincat import inclusion_functor, truncation
from glutop.gluing import GluedObject, gl_handle, gl_pi
from glutop.logicat import STAR, TOP, FinSetMap, FinSetObj
from glutop.matching import (
    char_inverse,
    coskeleton,
    glue_equivalence,
    matching_object,
    matching_on_map,
    omega_inverse,
    pi_inverse,
    verify_restriction_compat,
)
from glutop.oracle import (
    canonical_comparison,
    gen_diagram,
    gen_inverse_category,
    gen_mono,
    gen_over,
    natural_iso_search,
    omega_oracle,
    pi_oracle_sections,
    small_over_tests,
    verify_classifier,
    verify_dependent_product,
)

seeds = st.integers(min_value=0, max_value=10_000)


def low_part(inv, X, n):
    le = truncation(inv, n)
    return restrict(X, inclusion_functor(le.category, inv.category))


# matching objects

def test_horn_matching_object():
    M = matching_object(delta_inj_op(3), horn_3_2(), "[2]")
    assert len(M.object) == 4


def test_simplex_matching_map_injective():
    M = matching_object(delta_inj_op(3), simplex_3(), "[2]")
    assert M.matching_map.is_injective()


def test_degree_zero_matching_is_point():
    M = matching_object(span(), constant_diagram(span().category, ["u", "v"]), "0")
    assert len(M.object) == 1


def test_span_matching_is_product():
    C = span().category
    X = make_diagram(C, {"0": ["a", "b"], "1": ["x", "y", "z"], "2": []}, {"p": {}, "q": {}})
    M = matching_object(span(), X, "2")
    assert len(M.object) == 6
    assert M.matching_map.tgt == M.object and len(M.matching_map.src) == 0


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_matching_map_commutes_with_legs(seed):
    inv = gen_inverse_category(seed)
    X = gen_diagram(seed, inv, 3)
    for i in inv.category.objects:
        M = matching_object(inv, X, i)
        for u, leg in M.legs.items():
            for x in X.sets[i]:
                assert leg.table[M.matching_map.table[x]] == X.maps[u].table[x]


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_matching_on_map_is_natural(seed):
    inv = gen_inverse_category(seed)
    X = gen_diagram(seed, inv, 3)
    t = gen_over(seed, X, inv, 2)
    for i in inv.category.objects:
        M1, M2 = matching_object(inv, t.src, i), matching_object(inv, X, i)
        mt = matching_on_map(M1, M2, t)
        for y in t.src.sets[i]:
            assert mt.table[M1.matching_map.table[y]] == M2.matching_map.table[t.components[i].table[y]]


# coskeleton

def test_coskeleton_of_horn_edges():
    inv = delta_inj_op(3)
    cosk = coskeleton(inv, low_part(inv, horn_3_2(), 1), 2)
    assert tuple(len(cosk.sets[f"[{k}]"]) for k in range(3)) == (4, 6, 4)
    assert validate_diagram(cosk) == []


def test_coskeleton_of_span_base():
    inv = span()
    base = low_part(inv, make_diagram(inv.category, {"0": ["a", "b"], "1": ["x", "y", "z"], "2": []},
                                      {"p": {}, "q": {}}), 0)
    cosk = coskeleton(inv, base)
    assert cosk.sizes() == {"0": 2, "1": 3, "2": 6}


def test_coskeleton_matching_maps_are_bijective():
    inv = delta_inj_op(3)
    cosk = coskeleton(inv, low_part(inv, horn_3_2(), 1))
    for i in ("[2]", "[3]"):
        m = matching_object(inv, cosk, i).matching_map
        assert m.is_injective() and m.is_surjective()


# gluing equivalence

@pytest.mark.parametrize("inv, X, n", [
    (delta_inj_op(3), horn_3_2(), 2),
    (delta_inj_op(3), simplex_3(), 3),
    (span(), constant_diagram(span().category, ["u", "v"]), 1),
])
def test_glue_round_trip(inv, X, n):
    E = glue_equivalence(inv, n)
    Xn = low_part(inv, X, n)
    assert E.backward(E.forward(Xn)) == Xn


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_glue_round_trip_random(seed):
    inv = gen_inverse_category(seed)
    n = inv.max_degree
    X = gen_diagram(seed, inv, 3)
    E = glue_equivalence(inv, n)
    Y = E.forward(X)
    assert E.backward(Y) == X
    t = gen_over(seed, X, inv, 2)
    assert E.backward_map(E.forward_map(t)) == t


def test_forward_structure_is_matching_map():
    inv = delta_inj_op(3)
    E = glue_equivalence(inv, 2)
    X = low_part(inv, horn_3_2(), 2)
    Y = E.forward(X)
    assert isinstance(Y, GluedObject)
    assert set(Y.apex.sets) == {"[2]"}
    assert len(Y.structure.tgt.sets["[2]"]) == 4


# classifier

@pytest.mark.parametrize("name, sizes", [
    ("arrow", {"a": 3, "b": 2}),
    ("span", {"0": 2, "1": 2, "2": 5}),
    ("dinj1", {"[0]": 2, "[1]": 5}),
    ("discrete2", {"u": 2, "v": 2}),
    ("terminal", {"*": 2}),
])
def test_omega_sizes(name, sizes):
    assert omega_inverse(corpus_categories()[name])[0].sizes() == sizes


def test_omega_matches_oracle_sizes_on_corpus():
    for inv in corpus_categories().values():
        assert omega_inverse(inv)[0].sizes() == omega_oracle(inv.category)[0].sizes()


def test_char_of_identity_is_true():
    inv = delta_inj_op(3)
    Om, true = omega_inverse(inv)
    X = simplex_3()
    chi = char_inverse(inv, DiagramCategory(inv.category).identity(X), (Om, true))
    for i, comp in chi.components.items():
        assert set(comp.table.values()) <= {true.components[i].table[STAR]}


def test_char_of_horn_marks_missing_face():
    inv = delta_inj_op(3)
    h, s = horn_3_2(), simplex_3()
    t = make_nat(h, s, {o: {x: x for x in h.sets[o]} for o in h.index.objects})
    Om, true = omega_inverse(inv)
    chi = char_inverse(inv, t, (Om, true))
    tops = {i: true.components[i].table[STAR] for i in inv.category.objects}
    for i in inv.category.objects:
        assert {x for x in s.sets[i] if chi.components[i].table[x] == tops[i]} == set(h.sets[i])
    missing = [x for x in s.sets["[2]"] if x not in h.sets["[2]"]]
    assert len(missing) == 1 and chi.components["[2]"].table[missing[0]][0] != TOP


def test_char_of_empty_subobject():
    inv = span()
    X = constant_diagram(inv.category, ["u"])
    E = constant_diagram(inv.category, [])
    m = make_nat(E, X, {o: {} for o in inv.category.objects})
    Om, true = omega_inverse(inv)
    chi = char_inverse(inv, m, (Om, true))
    assert all(chi.components[i].table["u"] != true.components[i].table[STAR] for i in inv.category.objects)


def test_char_rejects_non_mono():
    inv = walking_arrow()
    X = constant_diagram(inv.category, ["u", "v"])
    with pytest.raises(NotMono):
        char_inverse(inv, DiagramCategory(inv.category).to_terminal(X))


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_classifier_property_random(seed):
    inv = gen_inverse_category(seed)
    om = omega_inverse(inv)
    G = gen_diagram(seed, inv, 3)
    monos = [gen_mono(seed * 5 + k, G) for k in range(4)]
    assert verify_classifier(om, monos, lambda m: char_inverse(inv, m, om)) == []


# dependent products

def test_arrow_exponential_sizes_and_gluing_agree():
    inv = walking_arrow()
    X, Y = arrow_exponential_data()
    f, g = exponential(X, Y)
    dp = pi_inverse(inv, f, g)
    assert dp.obj.sizes() == {"a": 2, "b": 1}
    E = glue_equivalence(inv, 1)
    Gl = gl_handle(E.functor)
    gdp = gl_pi(Gl.F, E.forward_map(f), E.forward_map(g), Gl)
    back = E.backward(gdp.obj)
    assert back.sizes() == {"a": 2, "b": 1}


def test_pi_along_identity_is_c():
    inv = span()
    A = gen_diagram(2, inv, 2)
    g = gen_over(2, A, inv, 2, "C")
    dp = pi_inverse(inv, DiagramCategory(inv.category).identity(A), g)
    assert natural_iso_search(dp.obj, g.src, over=(dp.proj, g)) is not None


def test_pi_of_identity_is_terminal():
    inv = walking_arrow()
    B = make_diagram(inv.category, {"a": ["x"], "b": ["y", "z"]}, {"f": {"x": "y"}})
    H = DiagramCategory(inv.category)
    f = H.to_terminal(B)
    dp = pi_inverse(inv, f, H.identity(B))
    assert dp.obj.sizes() == {"a": 1, "b": 1}


@settings(max_examples=15, deadline=None)
@given(seeds)
def test_pi_matches_oracle_random(seed):
    inv = gen_inverse_category(seed)
    A = gen_diagram(seed, inv, 2)
    f = gen_over(seed, A, inv, 2, "B")
    g = gen_over(seed + 1, f.src, inv, 2, "C")
    dp = pi_inverse(inv, f, g)
    orc = pi_oracle_sections(f, g)
    assert natural_iso_search(dp.obj, orc.obj, over=(dp.proj, orc.proj)) is not None
    assert is_iso_nat(canonical_comparison(dp, orc))
    tests = [d for d in small_over_tests(seed, A, inv) if max(d.src.sizes().values(), default=0) <= 3]
    assert verify_dependent_product(dp, tests) == []


@settings(max_examples=15, deadline=None)
@given(seeds)
def test_pi_components_are_natural(seed):
    inv = gen_inverse_category(seed)
    A = gen_diagram(seed, inv, 2)
    f = gen_over(seed, A, inv, 2, "B")
    g = gen_over(seed + 1, f.src, inv, 2, "C")
    dp = pi_inverse(inv, f, g)
    assert validate_diagram(dp.obj) == []
    assert validate_nat(dp.proj) == [] and validate_nat(dp.ev) == []


# restriction compatibility

@pytest.mark.parametrize("name", sorted(corpus_categories()))
def test_omega_restricts(name):
    assert verify_restriction_compat(corpus_categories()[name], "omega") == []


def test_pi_restricts_on_dinj2():
    inv = delta_inj_op(2)
    A = gen_diagram(0, inv, 2)
    f = gen_over(0, A, inv, 2, "B")
    g = gen_over(1, f.src, inv, 2, "C")
    assert verify_restriction_compat(inv, "pi", (f, g)) == []


def test_restriction_unknown_former():
    with pytest.raises(ValueError):
        verify_restriction_compat(discrete(["x"]), "sigma")


def test_truncated_finset_map_helper():
    # degree-zero truncation of the span is discrete
    assert truncation(span(), 0).category.non_identity() == ()
    assert FinSetMap(FinSetObj([]), FinSetObj([]), {}).is_injective()
