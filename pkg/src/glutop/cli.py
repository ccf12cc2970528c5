"""Command-line entry point.

Exit codes: 0 success, 1 validation or suite failure, 2 parse error, 3 resource
budget exceeded. JSON output has sorted keys so repeated runs are byte-identical.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from typing import Any

from .diagcat import (
    Diagram,
    DiagramCategory,
    NatTrans,
    diagram_from_json,
    nat_from_json,
    validate_diagram,
    validate_nat,
)
from .elements import show
from .errors import (
    ExplosionLimit,
    GlutopError,
    InvalidCategory,
    ParseError,
    SaturationBudgetExceeded,
)
from .fincat import (
    FinCategory,
    InverseStructure,
    category_from_json,
    category_to_json,
    infer_inverse_structure,
    to_dot,
    truncation,
    validate_category,
    validate_inverse_structure,
)
from .logicat import DEFAULT_CAP, FinSetMap, FinSetObj

EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_BUDGET = 0, 1, 2, 3
CAP_ENV = "GLUTOP_CAP"


@dataclass(frozen=True)
class RunConfig:
    candidate_cap: int = DEFAULT_CAP
    word_cap: int = 16
    homset_cap: int = 64
    seed: int = 0
    output_format: str = "json"

    def __post_init__(self):
        if min(self.candidate_cap, self.word_cap, self.homset_cap) <= 0:
            raise ValueError("caps must be positive")


@dataclass
class Output:
    data: Any
    dot: str | None = None
    summary: list | None = None
    code: int = EXIT_OK


# serialization

def finset_json(S: FinSetObj) -> dict:
    return {"elements": [show(x) for x in S]}


def map_json(f: FinSetMap) -> dict:
    return {"src": finset_json(f.src), "tgt": finset_json(f.tgt),
            "table": {show(x): show(f.table[x]) for x in f.src}}


def diagram_json(d: Diagram) -> dict:
    return {"category": d.index.name,
            "sets": {o: [show(x) for x in d.sets[o]] for o in d.index.objects},
            "maps": {m: {show(x): show(d.maps[m].table[x]) for x in d.maps[m].src}
                     for m in d.index.non_identity()}}


def nat_json(t: NatTrans) -> dict:
    return {"components": {o: {show(x): show(y) for x, y in t.components[o].table.items()}
                           for o in t.src.index.objects}}


def diagram_dot(d: Diagram) -> str:
    lines = [f"digraph {json.dumps(d.index.name or 'X')} {{"]
    for o in d.index.objects:
        lines.append(f"  {json.dumps(o)} [label={json.dumps(f'{o} ({len(d.sets[o])})')}];")
    for m in d.index.non_identity():
        s, t = d.index.morphisms[m]
        lines.append(f"  {json.dumps(s)} -> {json.dumps(t)} [label={json.dumps(m)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def dumps(data: Any) -> str:
    return json.dumps(data, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _report(vs: list) -> list:
    return [v.as_dict() for v in vs]


# loading

def _read_json(path: str) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from exc


def load_category_file(path: str) -> tuple:
    return category_from_json(_read_json(path))


def _inverse(C: FinCategory, degrees) -> InverseStructure:
    if degrees is not None:
        inv = InverseStructure(C, degrees)
        rep = validate_inverse_structure(inv)
        if rep:
            raise InvalidCategory(rep[0].message, witness=rep[0].witness)
        return inv
    inv = infer_inverse_structure(C)
    if inv is None:
        raise InvalidCategory("category has no inverse structure; use --oracle")
    return inv


def _checked_category(path: str) -> tuple:
    C, degrees, weq = load_category_file(path)
    rep = validate_category(C)
    if rep:
        raise InvalidCategory(rep[0].message, witness=rep[0].witness)
    return C, degrees, weq


def _diagram(path: str, C: FinCategory) -> Diagram:
    d = diagram_from_json(_read_json(path), os.path.dirname(path), index=C)
    rep = validate_diagram(d)
    if rep:
        raise InvalidCategory(f"{path}: {rep[0].message}", witness=rep[0].witness)
    return d


def _nat(path: str, C: FinCategory) -> NatTrans:
    t = nat_from_json(_read_json(path), os.path.dirname(path))
    if t.src.index != C:
        raise InvalidCategory(f"{path}: natural transformation is not on the given category")
    rep = validate_nat(t)
    if rep:
        raise InvalidCategory(f"{path}: {rep[0].message}", witness=rep[0].witness)
    return t


# commands

def cmd_validate(args, cfg: RunConfig) -> Output:
    report = {}
    for path in args.paths:
        data = _read_json(path)
        if not isinstance(data, dict):
            raise ParseError(f"{path}: expected a JSON object")
        if "objects" in data:
            C, degrees, weq = category_from_json(data)
            vs = validate_category(C)
            if not vs and degrees is not None:
                vs += validate_inverse_structure(InverseStructure(C, degrees))
            if not vs and weq is not None:
                from .homotopy import validate_weq
                vs += validate_weq(C, weq)
        elif "sets" in data:
            vs = validate_diagram(diagram_from_json(data, os.path.dirname(path)))
        elif "components" in data:
            vs = validate_nat(nat_from_json(data, os.path.dirname(path)))
        else:
            raise ParseError(f"{path}: not a category, diagram or natural transformation")
        report[path] = _report(vs)
    ok = all(not v for v in report.values())
    lines = [f"{p}: {'ok' if not v else ', '.join(x['kind'] for x in v)}" for p, v in report.items()]
    return Output({"ok": ok, "report": report}, summary=lines, code=EXIT_OK if ok else EXIT_FAIL)


def _omega_of(C, degrees, cfg, use_oracle: bool):
    if use_oracle:
        from .oracle import char_oracle, omega_oracle
        om = omega_oracle(C)
        return om, (lambda m: char_oracle(m, om)), None
    from .matching import char_inverse, omega_inverse
    inv = _inverse(C, degrees)
    om = omega_inverse(inv, cfg.candidate_cap)
    return om, (lambda m: char_inverse(inv, m, om)), inv


def cmd_omega(args, cfg: RunConfig) -> Output:
    C, degrees, _ = _checked_category(args.category)
    (Om, true), char, _ = _omega_of(C, degrees, cfg, args.oracle)
    data = {"omega": diagram_json(Om), "true": nat_json(true), "sizes": Om.sizes()}
    code = EXIT_OK
    if args.check:
        from .oracle import char_oracle, classifier_iso, omega_oracle
        orc = omega_oracle(C)
        iso = classifier_iso((Om, true), char, orc, lambda m: char_oracle(m, orc))
        data["check"] = {"isomorphic": iso is not None,
                         "forward": nat_json(iso[0]) if iso else None,
                         "backward": nat_json(iso[1]) if iso else None}
        code = EXIT_OK if iso else EXIT_FAIL
    return Output(data, dot=diagram_dot(Om), summary=[f"Ω sizes {Om.sizes()}"], code=code)


def cmd_char(args, cfg: RunConfig) -> Output:
    C, degrees, _ = _checked_category(args.category)
    m = _nat(args.mono, C)
    (Om, _), char, _ = _omega_of(C, degrees, cfg, args.oracle)
    chi = char(m)
    return Output({"char": nat_json(chi)}, summary=[f"χ at {o}: {len(chi.components[o].table)} entries"
                                                    for o in C.objects])


def _pi_of(C, degrees, f, g, cfg, use_oracle: bool):
    if use_oracle:
        from .oracle import pi_oracle_sections
        return pi_oracle_sections(f, g, cfg.candidate_cap), None
    from .matching import pi_inverse
    inv = _inverse(C, degrees)
    return pi_inverse(inv, f, g, cfg.candidate_cap), inv


def _pi_json(dp) -> dict:
    return {"pi": diagram_json(dp.obj), "proj": nat_json(dp.proj),
            "counit": nat_json(dp.ev), "sizes": dp.obj.sizes()}


def cmd_pi(args, cfg: RunConfig) -> Output:
    C, degrees, _ = _checked_category(args.category)
    f, g = _nat(args.f, C), _nat(args.g, C)
    dp, inv = _pi_of(C, degrees, f, g, cfg, args.oracle)
    data = _pi_json(dp)
    code = EXIT_OK
    if args.check:
        from .oracle import (canonical_comparison, natural_iso_search, pi_oracle_sections,
                             small_over_tests, verify_dependent_product)
        from .diagcat import is_iso_nat
        orc = pi_oracle_sections(f, g, cfg.candidate_cap)
        iso = natural_iso_search(dp.obj, orc.obj, cfg.candidate_cap, over=(dp.proj, orc.proj))
        comparison_iso = is_iso_nat(canonical_comparison(dp, orc))
        inv = inv or infer_inverse_structure(C)
        tests = small_over_tests(cfg.seed, f.tgt, inv) if inv else [DiagramCategory(C).identity(f.tgt)]
        adj = verify_dependent_product(dp, tests, cfg.candidate_cap)
        data["check"] = {"isomorphic": iso is not None, "certificate": nat_json(iso) if iso else None,
                         "comparison_invertible": comparison_iso, "adjunction": _report(adj)}
        code = EXIT_OK if iso is not None and comparison_iso and not adj else EXIT_FAIL
    return Output(data, dot=diagram_dot(dp.obj), summary=[f"Π sizes {dp.obj.sizes()}"], code=code)


def cmd_matching(args, cfg: RunConfig) -> Output:
    from .matching import matching_object
    C, degrees, _ = _checked_category(args.category)
    inv = _inverse(C, degrees)
    X = _diagram(args.diagram, C)
    if args.object not in C.objects:
        raise InvalidCategory(f"unknown object {args.object}")
    M = matching_object(inv, X, args.object, cfg.candidate_cap)
    data = {"object": finset_json(M.object), "size": len(M.object),
            "legs": {u: map_json(leg) for u, leg in M.legs.items()},
            "matching_map": map_json(M.matching_map) if M.matching_map else None}
    return Output(data, summary=[f"M_{args.object} has {len(M.object)} elements"])


def cmd_cosk(args, cfg: RunConfig) -> Output:
    from .matching import coskeleton
    C, degrees, _ = _checked_category(args.category)
    inv = _inverse(C, degrees)
    data = _read_json(args.diagram)
    present = set(data.get("sets", {}))
    below = [n for n in inv.degrees if all(o in present for k in inv.degrees if k <= n
                                           for o in inv.objects_of_degree(k))]
    if not below:
        raise InvalidCategory("diagram must be given on all objects of degree 0")
    low = truncation(inv, max(below))
    keep = set(low.category.objects)
    data = {"sets": {o: xs for o, xs in data["sets"].items() if o in keep},
            "maps": {m: t for m, t in data.get("maps", {}).items() if m in low.category.morphisms}}
    X = diagram_from_json(data, index=low.category)
    rep = validate_diagram(X)
    if rep:
        raise InvalidCategory(rep[0].message, witness=rep[0].witness)
    Y = coskeleton(inv, X, args.n, cfg.candidate_cap)
    return Output({"coskeleton": diagram_json(Y), "sizes": Y.sizes()}, dot=diagram_dot(Y),
                  summary=[f"coskeleton sizes {Y.sizes()}"])


def cmd_glue_demo(args, cfg: RunConfig) -> Output:
    from .gluing import (gl_omega, glued_map_to_cone, glued_to_cone_diagram, identity_lex,
                         limit_lex, terminal_profunctor)
    from .logicat import finset_handle
    if args.functor == "identity":
        Om, true = gl_omega(identity_lex(finset_handle(cfg.candidate_cap)))
        data = {"functor": "identity", "apex": finset_json(Om.apex), "shadow": finset_json(Om.shadow),
                "structure": map_json(Om.structure), "true_apex": map_json(true.apex_map)}
        return Output(data, summary=[f"Gl(id) classifier: apex {len(Om.apex)}, shadow {len(Om.shadow)}"])
    from .corpus import discrete
    from .fincat import collage
    J = discrete(args.objects).category
    Om, true = gl_omega(limit_lex(J, cfg.candidate_cap))
    K = collage(terminal_profunctor(J), "cone")
    OmK = glued_to_cone_diagram(Om, J, K)
    data = {"functor": "limit", "objects": list(args.objects), "apex": finset_json(Om.apex),
            "cone_omega": diagram_json(OmK), "cone_true": nat_json(glued_map_to_cone(true, J, K)),
            "sizes": OmK.sizes()}
    return Output(data, dot=diagram_dot(OmK),
                  summary=[f"Gl(lim) classifier: apex {len(Om.apex)}, cone sizes {OmK.sizes()}"])


def _localization(args, cfg: RunConfig):
    from .homotopy import bounded_localization, localization_from_functor
    C, degrees, weq = _checked_category(args.category)
    inv = _inverse(C, degrees)
    if getattr(args, "localization", None):
        data = _read_json(args.localization)
        W = data.get("weak_equivalences", weq)
        if W is None or "target" not in data or "gamma" not in data:
            raise ParseError("localization file needs target, gamma and weak equivalences")
        target, _, _ = category_from_json(data["target"])
        return localization_from_functor(inv, W, target, data["gamma"])
    if weq is None:
        raise ParseError("category file has no weak_equivalences")
    return bounded_localization(inv, weq, cfg.word_cap, cfg.homset_cap)


def cmd_localize(args, cfg: RunConfig) -> Output:
    from .homotopy import INV, check_all_epi, check_initiality, validate_localization
    loc = _localization(args, cfg)
    H = loc.target
    epi = check_all_epi(H)
    init = check_initiality(loc)
    data = {"target": category_to_json(H),
            "gamma": dict(sorted(loc.gamma.mor_map.items())),
            "words": {m: [o, list(ls)] for m, (o, ls) in sorted(loc.words.items())},
            "violations": _report(validate_localization(loc)),
            "all_epi": not epi, "not_epi": _report(epi), "initiality": init}
    weak = {loc.gamma(w) for w in loc.weq} | {m for m in H.morphisms if m.endswith(INV)}
    lines = [f"{len(H.morphisms)} morphisms, all epi: {not epi}"]
    lines += [f"initiality at {r['object']}: {r['passes']}" for r in init]
    return Output(data, dot=to_dot(H, weak), summary=lines)


def cmd_homotopy(args, cfg: RunConfig) -> Output:
    from .corpus import exponential
    from .homotopy import check_all_epi, descend_diagram, descend_nat, pi_comparison
    loc = _localization(args, cfg)
    C = loc.base.category
    if args.exp:
        X, Y = (_diagram(p, C) for p in args.exp)
        f, g = exponential(descend_diagram(loc, X), descend_diagram(loc, Y))
    elif args.f and args.g:
        f0, g0 = _nat(args.f, C), _nat(args.g, C)
        A, B = descend_diagram(loc, f0.tgt), descend_diagram(loc, f0.src)
        Cd = descend_diagram(loc, g0.src)
        f, g = descend_nat(f0, B, A), descend_nat(g0, Cd, B)
    else:
        raise ParseError("homotopy needs F G or --exp X Y")
    b = pi_comparison(loc, f, g, cfg.candidate_cap)
    all_epi = not check_all_epi(loc.target)
    verdict = [dict(v, all_epi=all_epi) for v in b.verdict]
    data = {"verdict": verdict, "target_sizes": b.dp_target.obj.sizes(),
            "base_sizes": b.dp_base.obj.sizes(), "decomposition_unavailable": b.unavailable}
    lines = [" ".join(f"{k}={v[k]}" for k in ("object", "phi_bijective", "kappa_bijective",
                                              "initiality", "all_epi")) for v in verdict]
    return Output(data, summary=lines)


def cmd_oracle(args, cfg: RunConfig) -> Output:
    from .oracle import omega_oracle, pi_oracle_sections
    C, degrees, _ = _checked_category(args.category)
    if args.which == "omega":
        Om, true = omega_oracle(C)
        return Output({"omega": diagram_json(Om), "true": nat_json(true), "sizes": Om.sizes()},
                      dot=diagram_dot(Om), summary=[f"cosieve Ω sizes {Om.sizes()}"])
    if args.which == "pi":
        if not (args.f and args.g):
            raise ParseError("oracle pi needs --f and --g")
        dp = pi_oracle_sections(_nat(args.f, C), _nat(args.g, C), cfg.candidate_cap)
        return Output(_pi_json(dp), dot=diagram_dot(dp.obj), summary=[f"sections Π sizes {dp.obj.sizes()}"])
    return _oracle_verify(args, cfg, C, degrees)


def _oracle_verify(args, cfg, C, degrees) -> Output:
    from .oracle import (gen_diagram, gen_mono, small_over_tests, verify_classifier,
                         verify_dependent_product)
    (Om, true), char, inv = _omega_of(C, degrees, cfg, args.oracle)
    inv = inv or infer_inverse_structure(C)
    if inv is None:
        raise InvalidCategory("random test data needs an inverse structure")
    G = gen_diagram(cfg.seed, inv, 3)
    monos = [gen_mono(cfg.seed * 20 + k, G) for k in range(args.monos)]
    data = {"classifier": _report(verify_classifier((Om, true), monos, char, cfg.candidate_cap))}
    if args.f and args.g:
        f, g = _nat(args.f, C), _nat(args.g, C)
        dp, _ = _pi_of(C, degrees, f, g, cfg, args.oracle)
        tests = small_over_tests(cfg.seed, f.tgt, inv)
        data["dependent_product"] = _report(verify_dependent_product(dp, tests, cfg.candidate_cap))
    ok = all(not v for v in data.values())
    lines = [f"{k}: {'clean' if not v else v[0]['message']}" for k, v in data.items()]
    return Output(dict(data, ok=ok), summary=lines, code=EXIT_OK if ok else EXIT_FAIL)


def cmd_suite(args, cfg: RunConfig) -> Output:
    from .suite import run_suite
    results = run_suite(cfg.seed, args.count, cfg.candidate_cap, args.only)
    ok = all(r.passed for r in results)
    lines = [r.line() for r in results]
    warnings = [w for r in results for w in r.warnings]
    if args.count == 0:
        print("warning: --count 0 runs no random instances; the random checks pass vacuously",
              file=sys.stderr)
    total = sum(r.seconds for r in results)
    lines.append(f"{sum(r.passed for r in results)}/{len(results)} passed in {total:.2f}s")
    first = next((r for r in results if not r.passed), None)
    if first is not None:
        lines.append(f"first failure: criterion {first.number}: {first.detail}")
    data = {"ok": ok, "results": [r.as_dict() for r in results], "warnings": sorted(set(warnings))}
    return Output(data, summary=lines, code=EXIT_OK if ok else EXIT_FAIL)


# parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    sup = argparse.SUPPRESS
    common.add_argument("--cap", type=int, default=sup, help="candidate cap for enumerations")
    common.add_argument("--word-cap", type=int, default=sup, help="maximum zigzag word length")
    common.add_argument("--homset-cap", type=int, default=sup, help="maximum localized hom-set size")
    common.add_argument("--seed", type=int, default=sup)
    common.add_argument("--format", choices=["json", "dot", "summary"], default=sup)

    p = argparse.ArgumentParser(prog="glutop", parents=[common],
                                description="Classifiers and dependent products of finite diagrams.")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(fn=fn)
        return sp

    sp = add("validate", cmd_validate, "validate category, diagram or transformation files")
    sp.add_argument("paths", nargs="+")
    sp = add("omega", cmd_omega, "subobject classifier of a diagram category")
    sp.add_argument("category")
    sp.add_argument("--oracle", action="store_true", help="use the cosieve construction")
    sp.add_argument("--check", action="store_true", help="cross-check against the oracle")
    sp = add("char", cmd_char, "characteristic map of a mono")
    sp.add_argument("category")
    sp.add_argument("mono")
    sp.add_argument("--oracle", action="store_true")
    sp = add("pi", cmd_pi, "dependent product along f of g")
    sp.add_argument("category")
    sp.add_argument("f")
    sp.add_argument("g")
    sp.add_argument("--oracle", action="store_true", help="use the sections construction")
    sp.add_argument("--check", action="store_true", help="cross-check against the oracle")
    sp = add("matching", cmd_matching, "matching object of a diagram at an object")
    sp.add_argument("category")
    sp.add_argument("diagram")
    sp.add_argument("object")
    sp = add("cosk", cmd_cosk, "coskeleton of a diagram given on low degrees")
    sp.add_argument("category")
    sp.add_argument("diagram")
    sp.add_argument("n", type=int)
    sp = add("glue-demo", cmd_glue_demo, "classifier of a gluing category")
    sp.add_argument("functor", choices=["identity", "limit"])
    sp.add_argument("--objects", nargs="+", default=["x", "y"], help="objects of the discrete J")
    sp = add("localize", cmd_localize, "bounded localization at the weak equivalences")
    sp.add_argument("category")
    sp.add_argument("--localization", help="explicit target and gamma")
    sp = add("homotopy", cmd_homotopy, "homotopical dependent product comparison")
    sp.add_argument("category")
    sp.add_argument("f", nargs="?")
    sp.add_argument("g", nargs="?")
    sp.add_argument("--exp", nargs=2, metavar=("X", "Y"), help="use the exponential Y^X")
    sp.add_argument("--localization", help="explicit target and gamma")
    sp = add("oracle", cmd_oracle, "reference constructions and checkers")
    sp.add_argument("which", choices=["omega", "pi", "verify"])
    sp.add_argument("category")
    sp.add_argument("--f")
    sp.add_argument("--g")
    sp.add_argument("--monos", type=int, default=20)
    sp.add_argument("--oracle", action="store_true", help="verify the oracle itself")
    sp = add("suite", cmd_suite, "run the acceptance criteria")
    sp.add_argument("--count", type=int, default=None, help="random instances per criterion")
    sp.add_argument("--only", type=int, nargs="+", default=None, help="criterion numbers")
    return p


def config_from_args(args) -> RunConfig:
    cap = getattr(args, "cap", DEFAULT_CAP)
    if os.environ.get(CAP_ENV):
        cap = int(os.environ[CAP_ENV])
    return RunConfig(cap, getattr(args, "word_cap", 16), getattr(args, "homset_cap", 64),
                     getattr(args, "seed", 0), getattr(args, "format", "json"))


def emit(out: Output, fmt: str, stream=None) -> None:
    stream = stream or sys.stdout
    if fmt == "dot" and out.dot is not None:
        stream.write(out.dot)
    elif fmt == "summary" and out.summary is not None:
        stream.write("\n".join(out.summary) + "\n")
    else:
        stream.write(dumps(out.data))


def main(argv: list | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = config_from_args(args)
        out = args.fn(args, cfg)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ParseError as exc:
        print(f"ParseError: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (SaturationBudgetExceeded, ExplosionLimit) as exc:
        print(f"{exc.kind}: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except GlutopError as exc:
        print(dumps({"error": exc.kind, "message": str(exc)}), end="", file=sys.stdout)
        return EXIT_FAIL
    emit(out, cfg.output_format)
    return out.code


if __name__ == "__main__":
    sys.exit(main())
