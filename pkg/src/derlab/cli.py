"""Batch scenario runner: load an algebra and fixtures, execute named
suites, emit a machine-readable report plus human-readable explanations.

Exit codes: 0 all pass, 1 a verification failure, 2 an input/validation
error, 3 unknown verdicts present (so CI can tell "disproved" from
"undecided under budget").  Reports are deterministic given inputs and
seeds; wall time lives in a separate "meta" object.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple

from .algebra import AlgebraError, algebra_from_dict, is_self_injective
from .cats import CategoryError, category_from_dict, disjoint_union, functor_from_dict, identity_functor
from .field import Mat
from .modules import is_projective
from .diagrams import (
    Diagram,
    DiagramError,
    diagram_from_dict,
    dual_diagram,
    ext1,
    identity_diagram_map,
    hom_space_diagrams,
    restrict,
    stalk_diagram,
    zero_diagram_map,
)
from .gorenstein import (
    PreconditionError,
    VerificationError,
    approx_gproj,
    gproj_left_kan,
    gproj_witness_report,
    ginj_right_kan,
    hull_ginj,
    is_gproj,
    is_ginj,
    is_wtriv,
    stable_roundtrip_witness,
)
from .homotopy import der2_witness, is_weak_equivalence, lift_to_arrow_diagram
from .complexes import (
    LazyComplex,
    complete_resolution,
    contraction_on_window,
    is_termwise_contractible,
    sod_decompose,
)
from .dgkan import bar_resolution, crosscheck_kan, der4_check, restriction_weight
from .modules import regular_module


KNOWN_SUITES = [
    "validate",
    "gorenstein-report",
    "kan",
    "approx",
    "stable-equiv",
    "sod",
    "crosscheck",
    "derivator-axioms",
]


class ScenarioError(ValueError):
    pass


class Session:
    def __init__(self, scenario: dict, base: Path) -> None:
        self.scenario = scenario
        self.base = base
        self.seed = int(scenario.get("seed", 0))
        self.budget = int(scenario.get("budget", 4096))
        self.margin = int(scenario.get("window_margin", 2))
        self.alg = None
        self.categories: Dict[str, object] = {}
        self.functors: Dict[str, object] = {}
        self.diagrams: Dict[str, Diagram] = {}
        self.complexes: Dict[str, LazyComplex] = {}

    def _read(self, rel: str) -> dict:
        path = self.base / rel
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)

    def load(self) -> None:
        if "algebra" not in self.scenario:
            raise ScenarioError("scenario has no algebra")
        self.alg = algebra_from_dict(self._read(self.scenario["algebra"]))
        if not is_self_injective(self.alg):
            raise ScenarioError("algebra is not self-injective; session refused")
        for name, rel in self.scenario.get("categories", {}).items():
            cat = category_from_dict(self._read(rel))
            if not cat.objects:
                raise ScenarioError(f"category {name!r} is empty; sessions require non-empty shapes")
            self.categories[name] = cat
        for name, rel in self.scenario.get("functors", {}).items():
            data = self._read(rel)
            dom = self.categories[data["dom"]]
            cod = self.categories[data["cod"]]
            self.functors[name] = functor_from_dict(data, dom, cod)
        for name, rel in self.scenario.get("diagrams", {}).items():
            data = self._read(rel)
            shape = self.categories[data["shape"]]
            self.diagrams[name] = diagram_from_dict(shape, self.alg, data)
        for name, rel in self.scenario.get("complexes", {}).items():
            data = self._read(rel)
            shape = self.categories[data["shape"]]
            self.complexes[name] = self._complex_from_dict(shape, data)

    def _complex_from_dict(self, shape, data) -> LazyComplex:
        from .diagrams import DiagramMap, zero_diagram

        terms = {}
        for deg, ddata in data.get("terms", {}).items():
            terms[int(deg)] = diagram_from_dict(shape, self.alg, ddata)
        policy = data.get("policy", "zero-tails")
        periodic = isinstance(policy, dict) and "periodic" in policy
        period = int(policy["periodic"]["period"]) if periodic else None
        lo = min(terms) if terms else 0

        def term_at(k: int) -> Diagram:
            if periodic:
                return terms[lo + ((k - lo) % period)]
            return terms.get(k, zero_diagram(shape, self.alg))

        diffs = {}
        for deg, comps in data.get("diffs", {}).items():
            k = int(deg)
            src, tgt = term_at(k), term_at(k + 1)
            diffs[k] = DiagramMap(
                src,
                tgt,
                {
                    o: Mat(self.alg.p, comps[o])
                    if tgt.at(o).dim and src.at(o).dim
                    else Mat.zeros(self.alg.p, tgt.at(o).dim, src.at(o).dim)
                    for o in shape.objects
                },
            )
        if periodic:
            return LazyComplex.periodic(shape, self.alg, terms, diffs, period)
        return LazyComplex.bounded(shape, self.alg, terms, diffs)


def _item(item_id: str, suite: str, verdict: str, details: Optional[dict] = None) -> dict:
    return {"id": item_id, "suite": suite, "verdict": verdict, "details": details or {}}


def _guard(item_id: str, suite: str, fn: Callable[[], dict]) -> dict:
    try:
        return fn()
    except (VerificationError, PreconditionError, DiagramError) as exc:
        return _item(item_id, suite, "fail", {"error": str(exc)})


def _suite_validate(s: Session) -> List[dict]:
    items = [
        _item("validate/algebra", "validate", "pass", {"dim": s.alg.dim, "p": s.alg.p, "self_injective": True})
    ]
    for name, cat in s.categories.items():
        items.append(_item(f"validate/category/{name}", "validate", "pass", {"objects": len(cat.objects), "degrees": dict(sorted(cat.degree.items()))}))
    for name, d in s.diagrams.items():
        def check(name=name, d=d):
            d.validate()
            return _item(f"validate/diagram/{name}", "validate", "pass", {"dims": {o: d.at(o).dim for o in d.shape.objects}})
        items.append(_guard(f"validate/diagram/{name}", "validate", check))
    for name, c in s.complexes.items():
        def check(name=name, c=c):
            ok = c.is_acyclic_on(-s.margin, s.margin)
            return _item(f"validate/complex/{name}", "validate", "pass", {"acyclic_on_window": ok})
        items.append(_guard(f"validate/complex/{name}", "validate", check))
    return items


def _suite_gorenstein(s: Session) -> List[dict]:
    items = []
    reg = regular_module(s.alg)
    for name, d in s.diagrams.items():
        def check(name=name, d=d):
            rep = gproj_witness_report(d)
            gp = is_gproj(d)
            oracle = all(
                ext1(d, stalk_diagram(d.shape, s.alg, j, reg)).dim == 0 for j in d.shape.objects
            )
            verdict = "pass" if gp == oracle else "fail"
            return _item(
                f"gorenstein/{name}",
                "gorenstein-report",
                verdict,
                {"is_gproj": gp, "ext_oracle": oracle, "is_ginj": is_ginj(d), "is_wtriv": is_wtriv(d), "witness": rep},
            )
        items.append(_guard(f"gorenstein/{name}", "gorenstein-report", check))
    return items


def _suite_kan(s: Session) -> List[dict]:
    items = []
    for uname, u in s.functors.items():
        for dname, d in s.diagrams.items():
            if d.shape is not u.dom:
                continue
            if is_gproj(d):
                def check(uname=uname, dname=dname, u=u, d=d):
                    y = gproj_left_kan(u, d)
                    dims_ok = []
                    for yname, ydiag in s.diagrams.items():
                        if ydiag.shape is u.cod:
                            lhs = len(hom_space_diagrams(y, ydiag))
                            rhs = len(hom_space_diagrams(d, restrict(u, ydiag)))
                            dims_ok.append(lhs == rhs)
                    verdict = "pass" if all(dims_ok) else "fail"
                    return _item(f"kan/left/{uname}/{dname}", "kan", verdict, {"adjunction_dims_checked": len(dims_ok)})
                items.append(_guard(f"kan/left/{uname}/{dname}", "kan", check))
            if is_ginj(d):
                def check(uname=uname, dname=dname, u=u, d=d):
                    y = ginj_right_kan(u, d)
                    return _item(f"kan/right/{uname}/{dname}", "kan", "pass", {"target_dims": {o: y.at(o).dim for o in y.shape.objects}})
                items.append(_guard(f"kan/right/{uname}/{dname}", "kan", check))
    return items


def _suite_approx(s: Session) -> List[dict]:
    items = []
    for name, d in s.diagrams.items():
        def check(name=name, d=d):
            tr = approx_gproj(d)
            hull = hull_ginj(d)
            ok = tr.tags["wtriv"] and tr.tags["gproj"] and hull.tags["ginj"] and hull.tags["wtriv"]
            return _item(
                f"approx/{name}",
                "approx",
                "pass" if ok else "fail",
                {
                    "cover_tags": tr.tags,
                    "hull_tags": hull.tags,
                    "cover_dims": {o: tr.conflation.middle.at(o).dim for o in d.shape.objects},
                    "hull_dims": {o: hull.conflation.middle.at(o).dim for o in d.shape.objects},
                },
            )
        items.append(_guard(f"approx/{name}", "approx", check))
    return items


def _suite_stable_equiv(s: Session) -> List[dict]:
    items = []
    for name, d in s.diagrams.items():
        if not is_gproj(d):
            continue
        def check(name=name, d=d):
            psi, data = stable_roundtrip_witness(d)
            v = is_weak_equivalence(psi)
            return _item(
                f"stable-equiv/{name}",
                "stable-equiv",
                "pass" if v.is_true else "fail",
                {"roundtrip_weak_equivalence": v.status, "hull_dims": {o: data.image.at(o).dim for o in d.shape.objects}},
            )
        items.append(_guard(f"stable-equiv/{name}", "stable-equiv", check))
    return items


def _suite_sod(s: Session) -> List[dict]:
    items = []
    fixtures: List[Tuple[str, LazyComplex]] = list(s.complexes.items())
    for name, d in s.diagrams.items():
        if is_gproj(d):
            fixtures.append((f"res({name})", complete_resolution(d)))
    m = s.margin
    for name, c in fixtures:
        def check(name=name, c=c):
            res = sod_decompose(c, -m, m)
            tc_ok = is_termwise_contractible(res.tc_part, -m, m)
            from .diagrams import is_projective_diagram

            p_ok = all(is_projective_diagram(res.p_part.term(k)) for k in range(-m, m + 1))
            contracted = contraction_on_window(res.tc_part, -m - 1, m + 1) is not None if getattr(c, "seed", None) is not None else None
            verdict = "pass" if (tc_ok and p_ok and contracted is not False) else "fail"
            return _item(
                f"sod/{name}",
                "sod",
                verdict,
                {"tc_termwise_contractible": tc_ok, "p_terms_projective": p_ok, "tc_null_on_window": contracted, "window": [-m, m]},
            )
        items.append(_guard(f"sod/{name}", "sod", check))
    return items


def _suite_crosscheck(s: Session) -> List[dict]:
    items = []
    for uname, u in s.functors.items():
        for dname, d in s.diagrams.items():
            if d.shape is not u.dom or not is_gproj(d):
                continue
            def check(uname=uname, dname=dname, u=u, d=d):
                v = crosscheck_kan(u, d, budget=s.budget, seed=s.seed, margin=max(1, s.margin - 1))
                verdict = {"true": "pass", "false": "fail", "unknown": "unknown"}[v.status]
                return _item(f"crosscheck/{uname}/{dname}", "crosscheck", verdict, {"reason": v.reason})
            items.append(_guard(f"crosscheck/{uname}/{dname}", "crosscheck", check))
    return items


def _suite_derivator_axioms(s: Session) -> List[dict]:
    items = []
    # Der1: constructions over a disjoint union decompose componentwise
    cats = list(s.categories.values())
    if cats:
        c = cats[0]
        def der1(c=c):
            union, i1, i2 = disjoint_union(c, c)
            ok = True
            for name, d in s.diagrams.items():
                if d.shape is not c:
                    continue
                both = Diagram(
                    union,
                    s.alg,
                    {**{i1.on_obj(o): d.at(o) for o in c.objects}, **{i2.on_obj(o): d.at(o) for o in c.objects}},
                    {**{i1.on_mor(f): d.mat(f) for f in c.nonidentity_morphisms()}, **{i2.on_mor(f): d.mat(f) for f in c.nonidentity_morphisms()}},
                )
                ok = ok and (is_gproj(both) == is_gproj(d))
                from .diagrams import projective_cover_diagram

                cov_union = projective_cover_diagram(both)
                cov = projective_cover_diagram(d)
                for o in c.objects:
                    ok = ok and cov_union.middle.at(i1.on_obj(o)).dim == cov.middle.at(o).dim
                    ok = ok and cov_union.middle.at(i2.on_obj(o)).dim == cov.middle.at(o).dim
            return _item("derivator-axioms/der1", "derivator-axioms", "pass" if ok else "fail", {"union_objects": 2 * len(c.objects)})
        items.append(_guard("derivator-axioms/der1", "derivator-axioms", der1))
    # Der2: witnesses on identity and zero maps of loaded Gorenstein projectives
    for name, d in s.diagrams.items():
        if not is_gproj(d):
            continue
        def der2(name=name, d=d):
            rep_id = der2_witness(identity_diagram_map(d))
            rep_zero = der2_witness(zero_diagram_map(d, d))
            ok = rep_id["agree"] and rep_zero["agree"]
            return _item(f"derivator-axioms/der2/{name}", "derivator-axioms", "pass" if ok else "fail", {"identity": rep_id, "zero": rep_zero})
        items.append(_guard(f"derivator-axioms/der2/{name}", "derivator-axioms", der2))
    # Der3: successful construction of both adjoints on fixtures
    for uname, u in s.functors.items():
        for dname, d in s.diagrams.items():
            if d.shape is not u.dom:
                continue
            if is_gproj(d):
                def der3(uname=uname, dname=dname, u=u, d=d):
                    y = gproj_left_kan(u, d)
                    return _item(f"derivator-axioms/der3/left/{uname}/{dname}", "derivator-axioms", "pass", {"dims": {o: y.at(o).dim for o in y.shape.objects}})
                items.append(_guard(f"derivator-axioms/der3/left/{uname}/{dname}", "derivator-axioms", der3))
            if is_ginj(d):
                def der3r(uname=uname, dname=dname, u=u, d=d):
                    y = ginj_right_kan(u, d)
                    return _item(f"derivator-axioms/der3/right/{uname}/{dname}", "derivator-axioms", "pass", {"dims": {o: y.at(o).dim for o in y.shape.objects}})
                items.append(_guard(f"derivator-axioms/der3/right/{uname}/{dname}", "derivator-axioms", der3r))
    # Der4: slice-square comparison on loaded functors with stalk complexes
    for uname, u in s.functors.items():
        for dname, d in s.diagrams.items():
            if d.shape is not u.dom:
                continue
            def der4(uname=uname, dname=dname, u=u, d=d):
                t = LazyComplex.bounded(u.dom, s.alg, {0: d}, {})
                reports = {}
                ok = True
                for j in u.cod.objects:
                    rep = der4_check(u, j, t, -1, 1)
                    reports[j] = {"underived": rep.underived_ok, "derived": rep.derived_ok}
                    ok = ok and rep.ok
                return _item(f"derivator-axioms/der4/{uname}/{dname}", "derivator-axioms", "pass" if ok else "fail", reports)
            items.append(_guard(f"derivator-axioms/der4/{uname}/{dname}", "derivator-axioms", der4))
    # Der5: arrow lifts of identity classes
    for name, d in s.diagrams.items():
        if not is_gproj(d):
            continue
        def der5(name=name, d=d):
            z = lift_to_arrow_diagram(identity_diagram_map(d))
            return _item(f"derivator-axioms/der5/{name}", "derivator-axioms", "pass", {"lift_dims": {o: z.at(o).dim for o in z.shape.objects}})
        items.append(_guard(f"derivator-axioms/der5/{name}", "derivator-axioms", der5))
    return items


SUITE_RUNNERS = {
    "validate": _suite_validate,
    "gorenstein-report": _suite_gorenstein,
    "kan": _suite_kan,
    "approx": _suite_approx,
    "stable-equiv": _suite_stable_equiv,
    "sod": _suite_sod,
    "crosscheck": _suite_crosscheck,
    "derivator-axioms": _suite_derivator_axioms,
}


def run_scenario(scenario_path: str, workers: int = 1, seed: Optional[int] = None) -> Tuple[dict, int]:
    t0 = time.time()
    base = Path(scenario_path).resolve().parent
    try:
        with open(scenario_path, "r", encoding="utf-8") as fh:
            scenario = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        return {"error": f"cannot read scenario: {exc}", "items": []}, 2
    if seed is not None:
        scenario["seed"] = seed
    session = Session(scenario, base)
    try:
        session.load()
    except (ScenarioError, AlgebraError, CategoryError, DiagramError, KeyError, OSError) as exc:
        return {
            "error": str(exc),
            "items": [],
            "meta": {"wall_time_ms": int(1000 * (time.time() - t0))},
        }, 2

    suites = scenario.get("suites", [])
    for name in suites:
        if name not in KNOWN_SUITES:
            return {"error": f"unknown suite {name!r}", "items": []}, 2

    items: List[dict] = []
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for chunk in pool.map(lambda name: SUITE_RUNNERS[name](session), suites):
                items.extend(chunk)
    else:
        for name in suites:
            items.extend(SUITE_RUNNERS[name](session))
    items.sort(key=lambda it: it["id"])
    summary = {
        "pass": sum(1 for it in items if it["verdict"] == "pass"),
        "fail": sum(1 for it in items if it["verdict"] == "fail"),
        "unknown": sum(1 for it in items if it["verdict"] == "unknown"),
    }
    code = exit_code_for(summary)
    report = {
        "scenario": str(Path(scenario_path).name),
        "seed": session.seed,
        "budget": session.budget,
        "window_margin": session.margin,
        "suites": suites,
        "items": items,
        "summary": summary,
        "meta": {"wall_time_ms": int(1000 * (time.time() - t0))},
    }
    return report, code


def exit_code_for(summary: dict) -> int:
    """0 all pass; 1 a verification failure; 3 unknown verdicts present."""
    if summary.get("fail"):
        return 1
    if summary.get("unknown"):
        return 3
    return 0


def explain(report: dict, item_id: str) -> str:
    for it in report.get("items", []):
        if it["id"] == item_id:
            lines = [f"item: {it['id']}", f"suite: {it['suite']}", f"verdict: {it['verdict']}"]
            for key in sorted(it.get("details", {})):
                lines.append(f"{key}: {json.dumps(it['details'][key], sort_keys=True)}")
            return "\n".join(lines)
    raise KeyError(f"unknown item {item_id!r}")


def main(argv: Optional[List[str]] = None) -> int:
    parser = argparse.ArgumentParser(prog="derlab", description="Gorenstein diagram laboratory scenario runner")
    sub = parser.add_subparsers(dest="command", required=True)
    runp = sub.add_parser("run", help="run a scenario file")
    runp.add_argument("scenario")
    runp.add_argument("--workers", type=int, default=1)
    runp.add_argument("--seed", type=int, default=None)
    runp.add_argument("--report", default=None, help="write the JSON report here")
    exp = sub.add_parser("explain", help="render one report item")
    exp.add_argument("report")
    exp.add_argument("item")
    args = parser.parse_args(argv)

    if args.command == "run":
        report, code = run_scenario(args.scenario, workers=args.workers, seed=args.seed)
        text = json.dumps(report, sort_keys=True, indent=2)
        if args.report:
            with open(args.report, "w", encoding="utf-8") as fh:
                fh.write(text + "\n")
        if "error" in report:
            print(f"error: {report['error']}", file=sys.stderr)
        else:
            s = report["summary"]
            print(f"{s['pass']} pass, {s['fail']} fail, {s['unknown']} unknown ({report['meta']['wall_time_ms']} ms)")
            if not args.report:
                print(text)
        return code
    if args.command == "explain":
        with open(args.report, "r", encoding="utf-8") as fh:
            report = json.load(fh)
        try:
            print(explain(report, args.item))
        except KeyError as exc:
            print(str(exc), file=sys.stderr)
            return 2
        return 0
    return 2


if __name__ == "__main__":
    sys.exit(main())
