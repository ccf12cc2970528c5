import pytest
from hypothesis import given, settings, strategies as st

from glutop.corpus import cyclic_group, delta_inj_op, discrete, indiscrete, span, terminal_category, walking_arrow
from glutop.errors import InvalidCategory, ParseError
from glutop.fincat import (
    FinCategory,
    InverseStructure,
    Profunctor,
    category_from_json,
    category_to_json,
    collage,
    find_isomorphism,
    infer_inverse_structure,
    punctured_coslice,
    strata_decomposition,
    stratum,
    strict_coslice,
    to_dot,
    truncation,
    validate_category,
    validate_inverse_structure,
)
from glutop.gluing import terminal_profunctor
from glutop.homotopy import bounded_localization
from glutop.oracle import gen_inverse_category

seeds = st.integers(min_value=0, max_value=10_000)


def kinds(report):
    return {v.kind for v in report}


# validate_category

def test_walking_arrow_valid():
    assert validate_category(walking_arrow().category) == []


def test_missing_composite_reported():
    C = walking_arrow().category
    comp = {k: v for k, v in C.composition.items() if k != ("f", "id_a")}
    broken = FinCategory(C.objects, C.morphisms, C.identities, comp, "broken")
    assert "MissingComposite" in kinds(validate_category(broken))


def test_span_valid():
    assert validate_category(span().category) == []


def test_wrong_composite_endpoints_reported():
    C = walking_arrow().category
    comp = dict(C.composition)
    comp[("f", "id_a")] = "id_b"
    assert validate_category(FinCategory(C.objects, C.morphisms, C.identities, comp)) != []


# validate_inverse_structure

def test_span_degrees_valid():
    assert validate_inverse_structure(InverseStructure(span().category, {"0": 0, "1": 0, "2": 1})) == []


def test_arrow_equal_degrees_rejected():
    inv = InverseStructure(walking_arrow().category, {"a": 0, "b": 0})
    assert kinds(validate_inverse_structure(inv)) == {"NonDecreasingMap"}


def test_groupoid_equal_degrees_valid():
    G = indiscrete(["x", "y"])
    assert validate_inverse_structure(InverseStructure(G, {"x": 0, "y": 0})) == []


def test_iso_changing_degree_rejected():
    G = indiscrete(["x", "y"])
    assert "IsoDegreeMismatch" in kinds(validate_inverse_structure(InverseStructure(G, {"x": 0, "y": 1})))


# coslices

def test_span_strict_coslice_at_apex():
    cs = strict_coslice(span(), "2")
    assert cs.category.objects == ("p", "q")
    assert cs.category.non_identity() == ()


def test_span_strict_coslice_at_base_empty():
    assert strict_coslice(span(), "0").category.objects == ()


def test_delta_coslice_at_2():
    cs = strict_coslice(delta_inj_op(2), "[2]")
    targets = sorted(cs.codomain.values())
    assert targets == ["[0]"] * 3 + ["[1]"] * 3
    # each edge face has its two vertices below it
    assert len(cs.category.non_identity()) == 6


def test_punctured_coslice_terminal_empty():
    assert punctured_coslice(terminal_category().category, "*").category.objects == ()


def test_punctured_coslice_localized_span():
    loc = bounded_localization(span(), {"q"})
    cs = punctured_coslice(loc.target, "1")
    assert set(cs.category.objects) == {"q⁻¹", "p∘q⁻¹"}
    assert set(cs.category.non_identity()) == {"p@q⁻¹"}


def test_punctured_coslice_arrow():
    cs = punctured_coslice(walking_arrow().category, "a")
    assert cs.category.objects == ("f",)
    assert cs.category.non_identity() == ()


# strata and truncations

def test_span_strata():
    assert stratum(span(), 1).objects == ("2",)
    assert stratum(span(), 0).objects == ("0", "1")
    assert stratum(span(), 0).non_identity() == ()


def test_iso_pair_stratum_is_connected_groupoid():
    C = FinCategory.from_arrows(
        ["x", "y", "z"],
        [("i", "x", "y"), ("j", "y", "x"), ("u", "x", "z"), ("v", "y", "z")],
        {("j", "i"): "id_x", ("i", "j"): "id_y", ("v", "i"): "u", ("u", "j"): "v"})
    G = stratum(InverseStructure(C, {"x": 1, "y": 1, "z": 0}), 1)
    assert G.is_groupoid()
    assert G.hom("x", "y") and G.hom("y", "x")


def test_truncations():
    assert truncation(span(), 0).category.objects == ("0", "1")
    assert set(truncation(span(), 1).category.morphisms) == set(span().category.morphisms)
    low = truncation(delta_inj_op(3), 2).category
    assert find_isomorphism(low, delta_inj_op(2).category) is not None


def test_strict_truncation_drops_top():
    assert truncation(span(), 1, strict=True).category.objects == ("0", "1")


# collage

def test_terminal_profunctor_collage_is_span():
    J = discrete(["1", "2"]).category
    K = collage(terminal_profunctor(J))
    assert find_isomorphism(K, span().category) is not None


def test_empty_profunctor_collage_is_disjoint_union():
    A, B = discrete(["z"]).category, walking_arrow().category
    K = collage(Profunctor(A, B, {}, {}, {}))
    assert set(K.objects) == {"z"} | set(B.objects)
    assert len(K.morphisms) == 1 + len(B.morphisms)


def test_collage_rejects_clash():
    A = discrete(["a"]).category
    with pytest.raises(InvalidCategory):
        collage(Profunctor(A, A, {}, {}, {}))


# strata decomposition

def test_span_decomposition():
    sd = strata_decomposition(span())
    assert [p.degree for p in sd.pieces] == [0, 1]
    assert sd.pieces[1].attaching.elements == {("2", "0"): ("p",), ("2", "1"): ("q",)}


def test_discrete_decomposition_single_stratum():
    sd = strata_decomposition(discrete(["x", "y"]))
    assert len(sd.pieces) == 1
    assert sd.pieces[0].attaching.elements == {}


def test_delta_decomposition():
    assert len(strata_decomposition(delta_inj_op(2)).pieces) == 3


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_generated_categories_reconstruct(seed):
    inv = gen_inverse_category(seed)
    sd = strata_decomposition(inv)
    assert find_isomorphism(sd.reconstruction, inv.category) is not None


# properties

@settings(max_examples=40, deadline=None)
@given(seeds)
def test_generated_categories_associative_unital(seed):
    inv = gen_inverse_category(seed)
    C = inv.category
    assert validate_category(C) == []
    for f in C.morphisms:
        assert C.compose(f, C.identity(C.src(f))) == f
        assert C.compose(C.identity(C.tgt(f)), f) == f
        for g in C.out_arrows(C.tgt(f)):
            for h in C.out_arrows(C.tgt(g)):
                assert C.compose(h, C.compose(g, f)) == C.compose(C.compose(h, g), f)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_strata_are_groupoids(seed):
    inv = gen_inverse_category(seed)
    assert validate_inverse_structure(inv) == []
    for n in inv.degrees:
        assert stratum(inv, n).is_groupoid()


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_strict_coslice_sizes(seed):
    inv = gen_inverse_category(seed)
    C = inv.category
    for i in C.objects:
        cs = strict_coslice(inv, i)
        lowering = [m for m in C.out_arrows(i) if inv.is_lowering(m)]
        assert (cs.category.objects == ()) == (not lowering)
        assert sorted(cs.category.objects) == sorted(lowering)


def test_infer_inverse_structure():
    inv = infer_inverse_structure(span().category)
    assert inv.deg == {"0": 0, "1": 0, "2": 1}
    assert infer_inverse_structure(cyclic_group(2)).deg == {"o": 0}


# JSON and DOT

def test_json_round_trip():
    inv = span()
    C2, deg, weq = category_from_json(category_to_json(inv.category, inv.deg, ["q"]))
    assert C2.morphisms == inv.category.morphisms
    assert C2.composition == inv.category.composition
    assert deg == inv.deg and weq == frozenset({"q"})


def test_json_unknown_key_rejected():
    data = category_to_json(span().category)
    data["extra"] = 1
    with pytest.raises(ParseError):
        category_from_json(data)


def test_dot_dashes_weak_equivalences():
    out = to_dot(span().category, ["q"])
    assert '"2" -> "1" [label="q", style=dashed]' in out
    assert '"2" -> "0" [label="p"]' in out
