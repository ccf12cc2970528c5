import dataclasses

import pytest
from hypothesis import given, settings, strategies as st

from glutop.corpus import (
    arrow_exponential_data,
    counterexample_diagrams,
    corpus_categories,
    cyclic_group,
    discrete,
    exponential,
    span,
    terminal_category,
    walking_arrow,
)
from glutop.diagcat import (
    Diagram,
    DiagramCategory,
    NatTrans,
    constant_diagram,
    is_iso_nat,
    is_mono,
    make_diagram,
    validate_diagram,
    validate_nat,
)
from glutop.errors import GenerationFailed, NotMono
from glutop.fincat import validate_category, validate_inverse_structure
from glutop.homotopy import bounded_localization, descend_diagram
from glutop.logicat import FinSetMap, FinSetObj, pi_finset
from glutop.oracle import (
    char_oracle,
    cosieves,
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


def arrow_exponential():
    return exponential(*arrow_exponential_data())


# classifier oracle

@pytest.mark.parametrize("name, sizes", [
    ("terminal", {"*": 2}),
    ("arrow", {"a": 3, "b": 2}),
    ("span", {"0": 2, "1": 2, "2": 5}),
])
def test_omega_oracle_sizes(name, sizes):
    assert omega_oracle(corpus_categories()[name].category)[0].sizes() == sizes


def test_cosieves_of_group_are_trivial():
    assert set(cosieves(cyclic_group(3), "o")) == {(), tuple(sorted(cyclic_group(3).morphisms))}


def test_omega_oracle_is_a_diagram():
    for inv in corpus_categories().values():
        Om, true = omega_oracle(inv.category)
        assert validate_diagram(Om) == [] and validate_nat(true) == []


def test_char_oracle_rejects_non_mono():
    C = walking_arrow().category
    with pytest.raises(NotMono):
        char_oracle(DiagramCategory(C).to_terminal(constant_diagram(C, ["u", "v"])))


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_oracle_classifier_random(seed):
    inv = gen_inverse_category(seed)
    om = omega_oracle(inv.category)
    G = gen_diagram(seed, inv, 3)
    monos = [gen_mono(seed * 3 + k, G) for k in range(3)]
    assert verify_classifier(om, monos, lambda m: char_oracle(m, om)) == []


def test_enlarged_omega_is_rejected():
    C = walking_arrow().category
    Om, true = omega_oracle(C)
    sets = dict(Om.sets)
    sets["b"] = FinSetObj(list(Om.sets["b"]) + ["junk"])
    maps = {m: FinSetMap(sets[C.src(m)], sets[C.tgt(m)],
                         dict(t.table, junk="junk") if C.src(m) == "b" else t.table)
            for m, t in Om.maps.items()}
    big = Diagram(C, sets, maps)
    big_true = NatTrans(true.src, big, {c: FinSetMap(true.src.sets[c], sets[c], t.table)
                                        for c, t in true.components.items()})
    G = make_diagram(C, {"a": ["x"], "b": ["y", "z"]}, {"f": {"x": "y"}})
    S = make_diagram(C, {"a": [], "b": ["y"]}, {"f": {}})
    m = NatTrans(S, G, {"a": FinSetMap(S.sets["a"], G.sets["a"], {}),
                        "b": FinSetMap(S.sets["b"], G.sets["b"], {"y": "y"})})
    assert is_mono(m)
    rep = verify_classifier((big, big_true), [m])
    assert rep and rep[0].kind == "ClassifierViolation"
    assert verify_classifier((Om, true), [m]) == []


# dependent-product oracle

def test_pi_oracle_on_terminal_is_finset():
    C = terminal_category().category
    A = make_diagram(C, {"*": ["a0", "a1"]}, {})
    B = make_diagram(C, {"*": ["b0", "b1", "b2"]}, {})
    Cd = make_diagram(C, {"*": ["c0", "c1", "c2", "c3"]}, {})
    ftab = {"b0": "a0", "b1": "a0", "b2": "a1"}
    gtab = {"c0": "b0", "c1": "b0", "c2": "b1", "c3": "b2"}
    f = NatTrans(B, A, {"*": FinSetMap(B.sets["*"], A.sets["*"], ftab)})
    g = NatTrans(Cd, B, {"*": FinSetMap(Cd.sets["*"], B.sets["*"], gtab)})
    dp = pi_oracle_sections(f, g)
    ref = pi_finset(f.components["*"], g.components["*"])
    assert len(dp.obj.sets["*"]) == len(ref.obj) == 3


def test_pi_oracle_arrow_exponential():
    f, g = arrow_exponential()
    assert pi_oracle_sections(f, g).obj.sizes() == {"a": 2, "b": 1}


def test_localized_span_exponential():
    loc = bounded_localization(span(), {"q"})
    X, Y = counterexample_diagrams()
    f, g = exponential(descend_diagram(loc, X), descend_diagram(loc, Y))
    assert len(pi_oracle_sections(f, g).obj.sets["1"]) == 2
    f0, g0 = exponential(X, Y)
    assert len(pi_oracle_sections(f0, g0).obj.sets["1"]) == 1


def test_oracle_dependent_product_self_consistent():
    f, g = arrow_exponential()
    dp = pi_oracle_sections(f, g)
    assert dp.counit_check()
    assert verify_dependent_product(dp, small_over_tests(0, f.tgt, walking_arrow())) == []


def test_collapsed_counit_is_rejected():
    X, Y = arrow_exponential_data()
    f, g = exponential(X, Y)
    dp = pi_oracle_sections(f, g)
    H = DiagramCategory(walking_arrow().category)
    P = H.product(X, Y)
    assert P.apex == g.src
    # send every Y coordinate at a to y0; natural because Y(f) is constant
    k = NatTrans(P.apex, Y, {"a": FinSetMap(P.apex.sets["a"], Y.sets["a"], {e: "y0" for e in P.apex.sets["a"]}),
                             "b": FinSetMap(P.apex.sets["b"], Y.sets["b"], {e: "z" for e in P.apex.sets["b"]})})
    collapse = P.factor(P.leg1, k)
    bad = dataclasses.replace(dp, ev=H.compose(collapse, dp.ev))
    assert bad.counit_check()
    rep = verify_dependent_product(bad, [H.identity(f.tgt)])
    assert rep and rep[0].kind == "AdjunctionViolation"


@settings(max_examples=15, deadline=None)
@given(seeds)
def test_oracle_pi_adjunction_random(seed):
    inv = gen_inverse_category(seed)
    A = gen_diagram(seed, inv, 2)
    f = gen_over(seed, A, inv, 2, "B")
    g = gen_over(seed + 1, f.src, inv, 2, "C")
    dp = pi_oracle_sections(f, g)
    assert validate_diagram(dp.obj) == []
    tests = [d for d in small_over_tests(seed, A, inv) if max(d.src.sizes().values(), default=0) <= 3]
    assert verify_dependent_product(dp, tests) == []


# iso search

def test_natural_iso_search():
    C = walking_arrow().category
    X = make_diagram(C, {"a": ["x"], "b": ["y", "z"]}, {"f": {"x": "y"}})
    Y = make_diagram(C, {"a": ["u"], "b": ["v", "w"]}, {"f": {"u": "w"}})
    Z = make_diagram(C, {"a": ["u", "u2"], "b": ["v"]}, {"f": {"u": "v", "u2": "v"}})
    t = natural_iso_search(X, Y)
    assert t is not None and is_iso_nat(t)
    assert natural_iso_search(X, Z) is None


def test_natural_iso_search_respects_base():
    C = discrete(["x"]).category
    X = make_diagram(C, {"x": ["p", "q"]}, {})
    A = make_diagram(C, {"x": ["a", "b"]}, {})
    p = NatTrans(X, A, {"x": FinSetMap(X.sets["x"], A.sets["x"], {"p": "a", "q": "a"})})
    q = NatTrans(X, A, {"x": FinSetMap(X.sets["x"], A.sets["x"], {"p": "a", "q": "b"})})
    assert natural_iso_search(X, X, over=(p, q)) is None
    assert natural_iso_search(X, X, over=(q, q)) is not None


# generators

def test_generator_snapshot():
    inv = gen_inverse_category(1, 3, 2, 2)
    assert inv.category.objects == ("o0", "o1", "o1b")
    assert inv.deg == {"o0": 0, "o1": 2, "o1b": 2}
    assert len(inv.category.morphisms) == 10
    assert omega_oracle(inv.category)[0].sizes() == {"o0": 2, "o1": 3, "o1b": 3}
    assert gen_diagram(1, inv, 2).sizes() == {"o0": 2, "o1": 1, "o1b": 1}


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_generator_deterministic_and_valid(seed):
    a, b = gen_inverse_category(seed), gen_inverse_category(seed)
    assert a.category.morphisms == b.category.morphisms and a.deg == b.deg
    assert validate_category(a.category) == [] and validate_inverse_structure(a) == []
    assert gen_diagram(seed, a, 3) == gen_diagram(seed, b, 3)
    assert validate_diagram(gen_diagram(seed, a, 3)) == []


def test_generator_bounds():
    assert gen_inverse_category(5, 1).category.objects == ("o0",)
    assert gen_inverse_category(5, 4, 2, 0).category.non_identity() == ()
    with pytest.raises(GenerationFailed):
        gen_inverse_category(0, 0)


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_gen_mono_is_mono(seed):
    inv = gen_inverse_category(seed)
    G = gen_diagram(seed, inv, 3)
    m = gen_mono(seed, G)
    assert is_mono(m) and validate_nat(m) == []
