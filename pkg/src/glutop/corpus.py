"""Standard small categories and diagrams used by tests, the CLI and the
acceptance suite."""

from __future__ import annotations

from itertools import combinations

from .diagcat import Diagram, make_diagram
from .fincat import FinCategory, InverseStructure


def walking_arrow() -> InverseStructure:
    C = FinCategory.from_arrows(["a", "b"], [("f", "a", "b")], name="arrow")
    return InverseStructure(C, {"a": 1, "b": 0})


def span() -> InverseStructure:
    """``0 <-p- 2 -q-> 1``."""
    C = FinCategory.from_arrows(["0", "1", "2"], [("p", "2", "0"), ("q", "2", "1")], name="span")
    return InverseStructure(C, {"0": 0, "1": 0, "2": 1})


def discrete(names) -> InverseStructure:
    C = FinCategory.from_arrows(list(names), [], name="discrete")
    return InverseStructure(C, {o: 0 for o in C.objects})


def terminal_category() -> InverseStructure:
    return discrete(["*"])


def _face_id(k: int, subset) -> str:
    sep = "" if k < 10 else "."
    return f"d{k}:" + sep.join(str(s) for s in subset)


def delta_inj_op(n: int) -> InverseStructure:
    """Opposite of injective monotone maps between ``[0], ..., [n]``.

    The morphism ``dk:S`` goes from ``[k]`` to ``[m]`` and is the face picking the
    vertices ``S`` of ``[k]``; ``dk:01..k`` is the identity.
    """
    objs = [f"[{k}]" for k in range(n + 1)]
    mors, faces = {}, {}
    for k in range(n + 1):
        for m in range(k + 1):
            for S in combinations(range(k + 1), m + 1):
                mid = _face_id(k, S)
                mors[mid] = (f"[{k}]", f"[{m}]")
                faces[mid] = (k, S)
    ids = {f"[{k}]": _face_id(k, range(k + 1)) for k in range(n + 1)}
    comp = {}
    for a, (k, S) in faces.items():
        m = len(S) - 1
        for b, (m2, T) in faces.items():
            if m2 == m:
                comp[(b, a)] = _face_id(k, tuple(S[t] for t in T))
    C = FinCategory(tuple(objs), mors, ids, comp, f"Dinj_op<={n}")
    return InverseStructure(C, {f"[{k}]": k for k in range(n + 1)})


def face_subset(mid: str) -> tuple:
    body = mid.split(":", 1)[1]
    return tuple(int(c) for c in (body.split(".") if "." in body else body))


def face_action(subset, simplex: str) -> str:
    return "".join(simplex[s] for s in subset)


def semi_simplicial(n: int, simplices) -> Diagram:
    """Semi-simplicial set on ``Δ_inj^op`` truncated at ``n``; simplices are
    strings of increasing vertex labels, closed under faces."""
    inv = delta_inj_op(n)
    C = inv.category
    by_dim = {k: sorted(s for s in simplices if len(s) == k + 1) for k in range(n + 1)}
    sets = {f"[{k}]": by_dim[k] for k in range(n + 1)}
    maps = {}
    for mid, (a, b) in C.morphisms.items():
        maps[mid] = {x: face_action(face_subset(mid), x) for x in sets[a]}
    return make_diagram(C, sets, maps)


def _faces_closure(tops):
    out = set()
    for t in tops:
        for r in range(1, len(t) + 1):
            out.update("".join(c) for c in combinations(t, r))
    return out


def horn_3_2(n: int = 3) -> Diagram:
    """The horn missing the face opposite vertex 2, as a diagram on ``Δ_inj^op`` up to ``n``."""
    return semi_simplicial(n, _faces_closure(["012", "023", "123"]))


def simplex_3(n: int = 3) -> Diagram:
    return semi_simplicial(n, _faces_closure(["0123"]))


def edge_skeleton_3() -> Diagram:
    """Vertices and edges of the 3-simplex, on ``Δ_inj^op`` up to ``[1]``."""
    return semi_simplicial(1, _faces_closure(["01", "02", "03", "12", "13", "23"]))


def cyclic_group(k: int) -> FinCategory:
    """One object with automorphism group ``Z/k``."""
    mors = {f"g{i}": ("o", "o") for i in range(k)}
    comp = {(f"g{i}", f"g{j}"): f"g{(i + j) % k}" for i in range(k) for j in range(k)}
    return FinCategory(("o",), mors, {"o": "g0"}, comp, f"Z{k}")


def indiscrete(names) -> FinCategory:
    """Exactly one morphism between any two objects."""
    names = list(names)
    mors = {f"{a}>{b}": (a, b) for a in names for b in names}
    ids = {a: f"{a}>{a}" for a in names}
    comp = {(f"{b}>{c}", f"{a}>{b}"): f"{a}>{c}" for a in names for b in names for c in names}
    return FinCategory(tuple(names), mors, ids, comp, "indiscrete")


def counterexample_diagrams() -> tuple:
    """Diagrams on the span with singleton sets at ``1`` and ``2`` and two
    points at ``0``; ``p`` picks ``a`` in ``X`` and ``x`` in ``Y``."""
    C = span().category
    X = make_diagram(C, {"0": ["a", "b"], "1": ["*"], "2": ["*"]},
                     {"p": {"*": "a"}, "q": {"*": "*"}})
    Y = make_diagram(C, {"0": ["x", "y"], "1": ["*"], "2": ["*"]},
                     {"p": {"*": "x"}, "q": {"*": "*"}})
    return X, Y


def arrow_exponential_data() -> tuple:
    """``X`` with sizes (1, 2) and ``Y`` with sizes (2, 1) on the walking arrow."""
    C = walking_arrow().category
    X = make_diagram(C, {"a": ["x0"], "b": ["x1", "x2"]}, {"f": {"x0": "x1"}})
    Y = make_diagram(C, {"a": ["y0", "y1"], "b": ["z"]}, {"f": {"y0": "z", "y1": "z"}})
    return X, Y


def exponential(X: Diagram, Y: Diagram) -> tuple:
    """``(f, g)`` whose dependent product is ``Y^X``: ``f: X -> 1`` and the
    projection ``g: X × Y -> X``."""
    from .diagcat import DiagramCategory

    H = DiagramCategory(X.index)
    return H.to_terminal(X), H.product(X, Y).leg1


def split_pair() -> FinCategory:
    """``s: a -> b`` with two retractions ``r1, r2: b -> a``; ``s`` is not epi."""
    arrows = [("s", "a", "b"), ("r1", "b", "a"), ("r2", "b", "a"), ("e1", "b", "b"), ("e2", "b", "b")]
    comp = {("r1", "s"): "id_a", ("r2", "s"): "id_a", ("s", "r1"): "e1", ("s", "r2"): "e2",
            ("e1", "s"): "s", ("e2", "s"): "s", ("r1", "e1"): "r1", ("r1", "e2"): "r2",
            ("r2", "e1"): "r1", ("r2", "e2"): "r2", ("e1", "e1"): "e1", ("e1", "e2"): "e2",
            ("e2", "e1"): "e1", ("e2", "e2"): "e2"}
    return FinCategory.from_arrows(["a", "b"], arrows, comp, name="split_pair")


def corpus_categories() -> dict:
    """Named inverse categories used for corpus-wide checks."""
    return {
        "arrow": walking_arrow(),
        "span": span(),
        "discrete2": discrete(["u", "v"]),
        "terminal": terminal_category(),
        "dinj1": delta_inj_op(1),
        "dinj2": delta_inj_op(2),
        "dinj3": delta_inj_op(3),
    }
