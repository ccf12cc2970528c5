"""The acceptance criteria as runnable checks, shared by the CLI and the tests.

Each criterion returns a :class:`CriterionResult`. ``count`` sets the number of
random instances per randomized criterion; ``count=0`` skips them and the
affected results carry a warning. Setting ``GLUTOP_CORRUPT=omega`` enlarges
the computed classifier so that criterion 2 fails (a negative control).
"""

from __future__ import annotations

import itertools
import os
import time
from dataclasses import dataclass, field
from typing import Callable

from .corpus import (
    arrow_exponential_data,
    corpus_categories,
    counterexample_diagrams,
    delta_inj_op,
    discrete,
    exponential,
    horn_3_2,
    span,
    walking_arrow,
)
from .diagcat import (
    Diagram,
    DiagramCategory,
    NatTrans,
    constant_diagram,
    is_iso_nat,
    make_diagram,
    restrict,
)
from .errors import GenerationFailed
from .fincat import collage, find_isomorphism, inclusion_functor, truncation
from .gluing import (
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
from .homotopy import (
    bounded_localization,
    check_all_epi,
    check_initiality,
    descend_diagram,
    pi_comparison,
    verify_phi_decomposition,
)
from .logicat import DEFAULT_CAP, FinSetMap, FinSetObj, finset_handle
from .matching import (
    char_inverse,
    coskeleton,
    glue_equivalence,
    matching_object,
    omega_inverse,
    pi_inverse,
    verify_restriction_compat,
)
from .oracle import (
    canonical_comparison,
    char_oracle,
    classifier_iso,
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

CORRUPT_ENV = "GLUTOP_CORRUPT"
DEFAULT_COUNT = 100
GLUE_COUNT = 10
MONOS_PER_CATEGORY = 20


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float
    limit: float | None = None
    warnings: list = field(default_factory=list)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] criterion {self.number} ({self.name}): {self.detail} [{self.seconds:.2f}s]"

    def as_dict(self) -> dict:
        return {"criterion": self.number, "name": self.name, "passed": self.passed,
                "detail": self.detail, "seconds": round(self.seconds, 3),
                "limit": self.limit, "warnings": list(self.warnings)}


class _Fail(Exception):
    pass


def _expect(cond: bool, msg: str) -> None:
    if not cond:
        raise _Fail(msg)


def _corrupted(what: str) -> bool:
    return os.environ.get(CORRUPT_ENV, "") == what


def _omega(inv, cap):
    Om, true = omega_inverse(inv, cap)
    if not _corrupted("omega"):
        return Om, true
    # an extra element fixed by every endomorphism of a degree-0 object
    C = inv.category
    o = inv.objects_of_degree(0)[0]
    sets = {c: list(Om.sets[c]) + (["junk"] if c == o else []) for c in C.objects}
    maps = {m: dict(Om.maps[m].table) for m in C.morphisms}
    for m in C.hom(o, o):
        maps[m]["junk"] = "junk"
    bad = make_diagram(C, sets, maps)
    comps = {c: FinSetMap(true.src.sets[c], bad.sets[c], true.components[c].table) for c in C.objects}
    return bad, NatTrans(true.src, bad, comps)


def _random_inverse(seed: int, need_degree: int = 0, **kw):
    for k in itertools.count():
        inv = gen_inverse_category(seed * 1000 + k, **kw)
        if inv.max_degree >= need_degree:
            return inv
        if k > 200:
            raise GenerationFailed(f"no inverse category of degree {need_degree} near seed {seed}")


def _random_pi_data(seed: int, inv, a_max: int = 3):
    A = gen_diagram(seed, inv, a_max)
    f = gen_over(seed, A, inv, 2, "B")
    g = gen_over(seed + 1000, f.src, inv, 2, "C")
    return A, f, g


# criterion 1

def crit_horn(cap: int = DEFAULT_CAP, **_) -> str:
    inv = delta_inj_op(3)
    X = horn_3_2()
    M = matching_object(inv, X, "[2]", cap)
    _expect(len(M.object) == 4, f"matching object at [2] has {len(M.object)} elements")
    low = truncation(inv, 1)
    inc = inclusion_functor(low.category, inv.category)
    res = restrict(X, inc)
    cosk = coskeleton(inv, res, 2, cap)
    sizes = tuple(len(cosk.sets[f"[{k}]"]) for k in range(3))
    _expect(sizes == (4, 6, 4), f"coskeleton sizes {sizes}")
    return "|M_[2]| = 4, coskeleton sizes (4, 6, 4)"


# criterion 2

def _check_classifier(inv, seed: int, cap: int, monos: int) -> str | None:
    Om, true = _omega(inv, cap)
    orc = omega_oracle(inv.category)
    iso = classifier_iso((Om, true), lambda m: char_inverse(inv, m, (Om, true)),
                         orc, lambda m: char_oracle(m, orc))
    if iso is None:
        return f"{inv.category.name}: no classifier isomorphism with the oracle"
    G = gen_diagram(seed, inv, 3)
    ms = [gen_mono(seed * MONOS_PER_CATEGORY + k, G) for k in range(monos)]
    v = verify_classifier((Om, true), ms, lambda m: char_inverse(inv, m, (Om, true)), cap)
    if v:
        return f"{inv.category.name}: {v[0].message}"
    return None


def crit_omega(cap: int = DEFAULT_CAP, seed: int = 0, count: int = DEFAULT_COUNT, **_) -> str:
    fixed = [("arrow", walking_arrow(), {"a": 3, "b": 2}),
             ("span", span(), {"0": 2, "1": 2, "2": 5}),
             ("dinj1", delta_inj_op(1), {"[0]": 2, "[1]": 5})]
    for name, inv, sizes in fixed:
        got = _omega(inv, cap)[0].sizes()
        _expect(got == sizes, f"{name}: Ω sizes {got}, expected {sizes}")
        err = _check_classifier(inv, seed, cap, MONOS_PER_CATEGORY)
        _expect(err is None, err or "")
    for k in range(count):
        inv = gen_inverse_category(seed + k, 4, 2, 3)
        err = _check_classifier(inv, seed + k, cap, MONOS_PER_CATEGORY)
        _expect(err is None, f"random seed {seed + k}: {err}")
    return f"3 fixed and {count} random categories agree with the cosieve oracle"


# criterion 3

def _all_small_diagrams(C, limit: int = 3):
    """Every diagram on the walking arrow with at most ``limit`` elements per object."""
    (m,) = C.non_identity()
    s, t = C.morphisms[m]
    for na in range(limit + 1):
        for nb in range(limit + 1):
            xs = [f"d{i}" for i in range(na)]
            ys = [f"e{i}" for i in range(nb)]
            for img in itertools.product(ys, repeat=na):
                yield make_diagram(C, {s: xs, t: ys}, {m: dict(zip(xs, img))})


def _pi_agrees(inv, f, g, tests, cap: int) -> str | None:
    dp = pi_inverse(inv, f, g, cap)
    orc = pi_oracle_sections(f, g, cap)
    if natural_iso_search(dp.obj, orc.obj, cap, over=(dp.proj, orc.proj)) is None:
        return f"no isomorphism over A with the oracle; sizes {dp.obj.sizes()} vs {orc.obj.sizes()}"
    if not is_iso_nat(canonical_comparison(dp, orc)):
        return "canonical comparison with the oracle is not invertible"
    v = verify_dependent_product(dp, tests, cap)
    if v:
        return v[0].message
    return None


def crit_pi(cap: int = DEFAULT_CAP, seed: int = 0, count: int = DEFAULT_COUNT, **_) -> str:
    inv = walking_arrow()
    X, Y = arrow_exponential_data()
    f, g = exponential(X, Y)
    dp = pi_inverse(inv, f, g, cap)
    _expect(dp.obj.sizes() == {"a": 2, "b": 1}, f"exponential sizes {dp.obj.sizes()}")
    H = DiagramCategory(inv.category, inv, cap)
    tests = [H.to_terminal(D) for D in _all_small_diagrams(inv.category)]
    n_fixed = len(tests)
    err = _pi_agrees(inv, f, g, tests, cap)
    _expect(err is None, f"arrow exponential: {err}")
    for k in range(count):
        s = seed + k
        rinv = gen_inverse_category(s)
        A, f, g = _random_pi_data(s, rinv)
        tests = [d for d in small_over_tests(s, A, rinv)
                 if max(d.src.sizes().values(), default=0) <= 3]
        err = _pi_agrees(rinv, f, g, tests, cap)
        _expect(err is None, f"random seed {s}: {err}")
    return f"arrow exponential ({n_fixed} test objects) and {count} random instances agree"


# criterion 4

def crit_gluing(cap: int = DEFAULT_CAP, seed: int = 0, count: int = GLUE_COUNT, **_) -> str:
    fs = finset_handle(cap)
    Om1, _ = gl_omega(identity_lex(fs))
    _expect(len(Om1.apex) == 3, f"Gl(id) classifier apex has {len(Om1.apex)} elements")
    J = discrete(["x", "y"]).category
    F = limit_lex(J, cap)
    Om2, true2 = gl_omega(F)
    _expect(len(Om2.apex) == 5, f"Gl(lim) classifier apex has {len(Om2.apex)} elements")
    K = collage(terminal_profunctor(J), "cone")
    _expect(find_isomorphism(K, span().category) is not None, "cone category is not the span")
    OmK = glued_to_cone_diagram(Om2, J, K)
    trueK = glued_map_to_cone(true2, J, K)
    orc = omega_oracle(K)
    chi = char_oracle(trueK, orc)
    _expect(is_iso_nat(chi), "translated classifier is not isomorphic to the cosieve classifier")
    G = constant_diagram(K, ["u", "v"])
    v = verify_classifier((OmK, trueK), [gen_mono(seed * 5 + k, G) for k in range(5)], cap=cap)
    _expect(not v, f"translated classifier: {v[0].message if v else ''}")
    for k in range(count):
        s = seed + k
        inv = _random_inverse(s, 1)
        n = inv.max_degree
        E = glue_equivalence(inv, n, cap)
        le = E.inv
        inc = inclusion_functor(le.category, inv.category)
        A, f, g = _random_pi_data(s, inv, 2)
        f, g = restrict(f, inc), restrict(g, inc)
        dpG = gl_pi(E.functor, E.forward_map(f), E.forward_map(g))
        back = E.backward(dpG.obj)
        proj = E.backward_map(dpG.proj)
        dp = pi_inverse(le, f, g, cap)
        iso = natural_iso_search(back, dp.obj, cap, over=(proj, dp.proj))
        _expect(iso is not None, f"random seed {s}: glued and inverse dependent products differ "
                                 f"({back.sizes()} vs {dp.obj.sizes()})")
    return f"apexes 3 and 5, cone classifier matches, {count} random top strata agree"


# criterion 5

def _round_trip(C, dp, d, cap: int) -> int:
    """Check flat and sharp are inverse on ``Hom_A(D, Π)`` and return its size."""
    homs = [u for u in C.hom(C.dom(d), dp.obj, cap) if C.equal(C.compose(dp.proj, u), d)]
    P = C.pullback(dp.f, d)
    over_B = [h for h in C.hom(P.apex, C.dom(dp.g), cap) if C.equal(C.compose(dp.g, h), P.leg1)]
    _expect(len(homs) == len(over_B), f"{len(homs)} maps into Π but {len(over_B)} over B")
    for u in homs:
        _expect(C.equal(dp.sharp(d, dp.flat(d, u)), u), "sharp of flat is not the identity")
    for h in over_B:
        _expect(C.equal(dp.flat(d, dp.sharp(d, h)), h), "flat of sharp is not the identity")
    return len(homs)


def _gl_round_trip(Gl, dp, d, cap: int) -> int:
    homs = [u for u in Gl.hom(Gl.dom(d), dp.obj, cap) if Gl.equal(Gl.compose(dp.proj, u), d)]
    P = Gl.pullback(dp.f, d)
    over_B = [h for h in Gl.hom(P.apex, Gl.dom(dp.g), cap) if Gl.equal(Gl.compose(dp.g, h), P.leg1)]
    _expect(len(homs) == len(over_B), f"{len(homs)} glued maps into Π but {len(over_B)} over B")
    for u in homs:
        _expect(Gl.equal(gl_sharp(dp, d, gl_flat(dp, d, u)), u), "glued sharp of flat differs")
    for h in over_B:
        _expect(Gl.equal(gl_flat(dp, d, gl_sharp(dp, d, h)), h), "glued flat of sharp differs")
    return len(homs)


def _glued_exponential(Gl, X, Y):
    return Gl.to_terminal(X), Gl.product(X, Y).leg1


def crit_transpose(cap: int = DEFAULT_CAP, **_) -> str:
    fs = finset_handle(cap)
    checked = 0
    A = FinSetObj(["a0", "a1"])
    B = FinSetObj(["b0", "b1", "b2"])
    Cs = FinSetObj(["c0", "c1", "c2", "c3"])
    f = FinSetMap(B, A, {"b0": "a0", "b1": "a0", "b2": "a1"})
    g = FinSetMap(Cs, B, {"c0": "b0", "c1": "b0", "c2": "b1", "c3": "b2"})
    dp = fs.pi(f, g)
    for n in range(4):
        D = FinSetObj([f"d{i}" for i in range(n)])
        for d in fs.hom(D, A, cap):
            checked += _round_trip(fs, dp, d, cap)
    # Gl(id_FinSet): the arrow category of FinSet
    Gl = gl_handle(identity_lex(fs), cap)
    X, Y = _gl_objects(Gl, fs)
    f, g = _glued_exponential(Gl, X, Y)
    gdp = gl_pi(Gl.F, f, g, handle=Gl)
    for D in (Gl.terminal(), X, Y):
        checked += _gl_round_trip(Gl, gdp, Gl.to_terminal(D), cap)
    # Gl(M_1) on the span
    E = glue_equivalence(span(), 1, cap)
    GlM = gl_handle(E.functor, cap)
    X, Y = (E.forward(Z) for Z in counterexample_diagrams())
    f, g = _glued_exponential(GlM, X, Y)
    mdp = gl_pi(GlM.F, f, g, handle=GlM)
    for D in (GlM.terminal(), X, Y):
        checked += _gl_round_trip(GlM, mdp, GlM.to_terminal(D), cap)
    return f"flat and sharp mutually inverse on {checked} maps in three categories"


def _gl_objects(Gl, fs):
    from .gluing import GluedObject

    e1 = FinSetObj(["p", "q"])
    c1 = FinSetObj(["u", "v"])
    X = GluedObject(e1, c1, FinSetMap(e1, c1, {"p": "u", "q": "u"}))
    e2 = FinSetObj(["r"])
    c2 = FinSetObj(["w", "z"])
    Y = GluedObject(e2, c2, FinSetMap(e2, c2, {"r": "z"}))
    return X, Y


# criteria 6 and 7

def homotopical_exponential(loc, X: Diagram, Y: Diagram):
    return exponential(descend_diagram(loc, X), descend_diagram(loc, Y))


def crit_counterexample(cap: int = DEFAULT_CAP, **_) -> str:
    inv = span()
    loc = bounded_localization(inv, {"q"})
    X, Y = counterexample_diagrams()
    f, g = homotopical_exponential(loc, X, Y)
    b = pi_comparison(loc, f, g, cap)
    top, base = b.dp_target.obj.sizes()["1"], b.dp_base.obj.sizes()["1"]
    _expect((top, base) == (2, 1), f"sizes at 1: {top} vs {base}")
    orc_top = pi_oracle_sections(f, g, cap)
    orc_base = pi_oracle_sections(b.dp_base.f, b.dp_base.g, cap)
    _expect(len(orc_top.obj.sets["1"]) == 2 and len(orc_base.obj.sets["1"]) == 1,
            "oracles disagree with the sizes at 1")
    phi1 = b.phi.components["1"]
    _expect(not (phi1.is_injective() and phi1.is_surjective()), "φ is bijective at 1")
    rep = {r["object"]: r for r in check_initiality(loc)}
    _expect(not rep["1"]["passes"], "initiality holds at 1")
    _expect({"morphism": "p∘q⁻¹", "reason": "empty"} in rep["1"]["failures"],
            f"comma over p∘q⁻¹ not reported empty: {rep['1']['failures']}")
    return "sizes 2 vs 1 at 1, φ not bijective, comma over p∘q⁻¹ empty"


def crit_full_inversion(cap: int = DEFAULT_CAP, **_) -> str:
    inv = span()
    C = inv.category
    loc = bounded_localization(inv, set(C.non_identity()))
    for xs, ys in ((["a", "b"], ["x", "y"]), (["a"], ["x", "y", "z"]), (["a", "b"], ["x"])):
        X, Y = constant_diagram(C, xs), constant_diagram(C, ys)
        b = pi_comparison(loc, *homotopical_exponential(loc, X, Y), cap)
        bad = [v["object"] for v in b.verdict if not v["phi_bijective"]]
        _expect(not bad, f"W = all, |X| = {len(xs)}, |Y| = {len(ys)}: φ not bijective at {bad}")
    loc = bounded_localization(inv, set())
    X, Y = counterexample_diagrams()
    b = pi_comparison(loc, *homotopical_exponential(loc, X, Y), cap)
    bad = [v["object"] for v in b.verdict if not (v["phi_bijective"] and v["kappa_bijective"])]
    _expect(not bad, f"W = identities: φ or κ not bijective at {bad}")
    faces = verify_phi_decomposition(b)
    _expect(not faces, f"W = identities: {faces[0].message if faces else ''}")
    return "W = all: φ bijective; W = identities: φ, κ bijective and all faces commute"


# criterion 8

def crit_restriction(cap: int = DEFAULT_CAP, seed: int = 0, **_) -> str:
    n = 0
    for name, inv in corpus_categories().items():
        v = verify_restriction_compat(inv, "omega", cap=cap)
        _expect(not v, f"{name}: {v[0].message if v else ''}")
        A, f, g = _random_pi_data(seed, inv, 2)
        v = verify_restriction_compat(inv, "pi", (f, g), cap)
        _expect(not v, f"{name}: {v[0].message if v else ''}")
        n += 1
    return f"classifier and dependent product restrict correctly on {n} corpus categories"


# criterion 9

def crit_localization(**_) -> str:
    inv = span()
    C = inv.category
    loc = bounded_localization(inv, {"q"})
    _expect(len(loc.target.morphisms) == 7, f"W = {{q}}: {len(loc.target.morphisms)} morphisms")
    epi = check_all_epi(loc.target)
    _expect(not epi, f"W = {{q}}: {epi[0].message if epi else ''}")
    full = bounded_localization(inv, set(C.non_identity()))
    _expect(len(full.target.morphisms) == 9, f"W = all: {len(full.target.morphisms)} morphisms")
    again = bounded_localization(inv, {"q"})
    _expect(again.target.morphisms == loc.target.morphisms
            and again.target.composition == loc.target.composition
            and again.words == loc.words, "repeated localization differs")
    return "7 morphisms all epi at W = {q}, 9 at W = all, deterministic"


CRITERIA: list[tuple[int, str, Callable, float | None, bool]] = [
    (1, "horn matching", crit_horn, 1.0, False),
    (2, "classifier cross-validation", crit_omega, 300.0, True),
    (3, "dependent-product cross-validation", crit_pi, 600.0, True),
    (4, "gluing consistency", crit_gluing, None, True),
    (5, "transpose round trips", crit_transpose, None, False),
    (6, "homotopical counterexample", crit_counterexample, None, False),
    (7, "full-inversion preservation", crit_full_inversion, None, False),
    (8, "restriction compatibility", crit_restriction, None, False),
    (9, "localization soundness", crit_localization, 1.0, False),
]


def run_criterion(number: int, seed: int = 0, count: int | None = None,
                  cap: int = DEFAULT_CAP) -> CriterionResult:
    num, name, fn, limit, randomized = next(c for c in CRITERIA if c[0] == number)
    kw = {"cap": cap, "seed": seed}
    warnings = []
    if randomized:
        default = GLUE_COUNT if num == 4 else DEFAULT_COUNT
        kw["count"] = default if count is None else count
        if kw["count"] == 0:
            warnings.append("no random instances were run; the random part passed vacuously")
    t0 = time.perf_counter()
    try:
        detail = fn(**kw)
        passed = True
    except _Fail as exc:
        detail, passed = str(exc), False
    dt = time.perf_counter() - t0
    if passed and limit is not None and dt > limit:
        passed, detail = False, f"took {dt:.2f}s, limit {limit:.0f}s"
    return CriterionResult(num, name, passed, detail, dt, limit, warnings)


def run_suite(seed: int = 0, count: int | None = None, cap: int = DEFAULT_CAP,
              only: list | None = None) -> list:
    return [run_criterion(c[0], seed, count, cap) for c in CRITERIA
            if only is None or c[0] in only]
