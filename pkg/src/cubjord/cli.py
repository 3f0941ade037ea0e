"""Command-line front end: build algebras from JSON recipes, run
verification suites and searches, emit machine-readable reports.

Exit codes: 0 all requested checks pass; 1 a check failed (first failing
identity is named on stderr); 2 recipe/schema/precondition error;
3 enumeration budget exceeded.

Reports are deterministic for a fixed recipe and seed except for the
volatile "meta" member (timestamp and wall-clock timings).
"""

import argparse
import datetime
import json
import sys
import time
from importlib import resources

from .errors import BudgetExceeded, CubjordError, PreconditionError, RecipeError
from . import linalg, serialize
from .cns import (
    CheckConfig,
    certify_map,
    fundamental_formula_check,
    jordan_from_cns,
    norm_composition_check,
    verify_cns_axioms,
)
from .commalg import (
    etale_from_poly,
    quadratic_etale_from_poly,
    split_cubic,
    split_quadratic,
)
from .composition import preset as composition_preset
from .constructions import (
    aplus,
    degree_three_from_cubic_etale,
    etale_tits_process,
    first_tits,
    first_tits_trace_gram,
    h_b_tau,
    mat3_assoc,
    mat3_degree_three,
    mat3_unitary_datum,
    second_tits,
    second_tits_bilse_gram,
)
from .skolem import (
    Embedding,
    initial_embedding,
    norm_membership,
    norm_one_witness,
    norm_class_witness_condition,
    second_generator_alpha,
    second_generator_element,
    cubic_subalgebra_etale,
    generated_subalgebra,
    weak_equivalence_check,
)
from .structure_group import outer_from_antiauto, sym3_operator, uw_operator


def _load_schema(name):
    with resources.files("cubjord.schemas").joinpath(name).open("r") as fh:
        return json.load(fh)


def validate_recipe(recipe):
    import jsonschema

    schema = _load_schema("recipe.schema.json")
    try:
        jsonschema.validate(recipe, schema)
    except jsonschema.ValidationError as exc:
        raise RecipeError(f"recipe schema violation: {exc.message}") from None


def _build_cubic_etale(F, desc):
    if desc == "split":
        return split_cubic(F)
    return etale_from_poly(F, tuple(desc["poly"]))


def _build_quadratic_etale(F, desc):
    if desc == "split":
        return split_quadratic(F)
    b, c = desc["poly"]
    return quadratic_etale_from_poly(F, b, c)


def _vec(F, obj):
    return serialize.vector_from_json(F, obj)


def _construct(F, clause, results, config):
    (kind, spec), = clause.items()
    if kind == "her3":
        C = composition_preset(spec["comp"], F)
        gamma = [F.from_json(g) for g in spec.get("gamma", [1, 1, 1])]
        return her_or_tits(results, "her3", lambda: _her3_build(C, gamma))
    if kind == "first_tits":
        if spec["algebra"] == "mat3":
            A3 = mat3_degree_three(F)
        else:
            A3 = degree_three_from_cubic_etale(_build_cubic_etale(F, spec["algebra"]["etale"]))
        mu = F.from_json(spec["mu"])
        return her_or_tits(results, "first_tits", lambda: first_tits(A3, mu))
    if kind == "second_tits":
        K = _build_quadratic_etale(F, spec["K"])
        gamma = [F.from_json(g) for g in spec.get("gamma", [1, 1, 1])]
        D = mat3_unitary_datum(K, gamma)
        u = _vec(F, spec["u"])
        mu = _vec(F, spec["mu"])
        return her_or_tits(results, "second_tits", lambda: second_tits(D, u, mu))
    if kind == "etale_tits":
        E = _build_cubic_etale(F, spec["E"])
        L = _build_quadratic_etale(F, spec["L"])
        u = _vec(F, spec["u"])
        b = _vec(F, spec["b"])
        return her_or_tits(results, "etale_tits", lambda: etale_tits_process(E, L, u, b))
    if kind == "aplus":
        A3 = mat3_degree_three(F)
        results.append({"name": "construct:aplus", "passed": True, "dim": 9})
        return A3.cns
    if kind == "h_b_tau":
        K = _build_quadratic_etale(F, spec["K"])
        gamma = [F.from_json(g) for g in spec.get("gamma", [1, 1, 1])]
        D = mat3_unitary_datum(K, gamma)
        return her_or_tits(results, "h_b_tau", lambda: h_b_tau(D))
    raise RecipeError(f"unknown construction {kind!r}")


def _her3_build(C, gamma):
    from .constructions import her3

    return her3(C, gamma)


def her_or_tits(results, name, builder):
    X = builder()
    results.append({"name": f"construct:{name}", "passed": True, "dim": X.dim, "label": X.label})
    return X


def _run_checks(X, checks, results, config):
    for check in checks:
        if check == "cns-axioms":
            rep = verify_cns_axioms(X, config)
            for r in rep.results:
                d = r.as_dict()
                d["name"] = f"cns-axioms:{d.pop('name')}"
                results.append(d)
            results.append(
                {"name": "cns-axioms:nondegenerate-trace", "passed": rep.nondegenerate}
            )
        elif check == "fundamental-formula":
            J = jordan_from_cns(X, config, verify=False)
            for r in fundamental_formula_check(J, config):
                d = r.as_dict()
                d["name"] = f"fundamental-formula:{d.pop('name')}"
                results.append(d)
        elif check == "norm-composition":
            r = norm_composition_check(X, config)
            results.append({"name": "norm-composition", "passed": r.passed, "mode": r.mode})
        elif check == "trace-formula":
            datum = getattr(X, "datum", None) or {}
            kind = datum.get("kind")
            if kind == "first-tits":
                ok = first_tits_trace_gram(X) == X.gram
            elif kind == "second-tits":
                ok = second_tits_bilse_gram(X) == X.gram
            else:
                raise RecipeError("trace-formula check requires a Tits construction output")
            results.append({"name": "trace-formula", "passed": ok})
        else:  # pragma: no cover - schema forbids
            raise RecipeError(f"unknown check {check!r}")


def _run_search(F, spec, results, config, budget, jobs):
    kind = spec["kind"]
    if kind == "norm-membership":
        E = _build_cubic_etale(F, spec["E"])
        L = _build_quadratic_etale(F, spec["L"])
        w = _vec(F, spec["w"])
        nc = norm_membership(E, L, w, budget=budget, jobs=jobs)
        entry = {"name": "search:norm-membership", "passed": nc.decision != "unknown"}
        entry.update(nc.as_dict())
        results.append(entry)
    elif kind == "nornor":
        E = _build_cubic_etale(F, spec["E"])
        L = _build_quadratic_etale(F, spec["L"])
        y = _vec(F, spec["y"])
        yp = norm_one_witness(E, L, y, budget=budget, jobs=jobs)
        results.append(
            {
                "name": "search:nornor",
                "passed": yp is not None,
                "witness": serialize.vector_to_json(F, yp) if yp else None,
            }
        )
    elif kind == "spliet-alpha":
        E = _build_cubic_etale(F, spec["E"])
        u0 = _vec(F, spec["u0"])
        alpha, dval = second_generator_alpha(E, u0)
        X, y = second_generator_element(E, u0, alpha)
        etale_ok = cubic_subalgebra_etale(X, y)
        u0J = list(u0) + [F.zero] * 6
        _, dim, gram_det = generated_subalgebra(X, u0J, y)
        results.append(
            {
                "name": "search:spliet-alpha",
                "passed": etale_ok,
                "alpha": F.to_json(alpha),
                "delta_y": F.to_json(dval),
                "witness": serialize.vector_to_json(F, y),
                "span_dim": dim,
                "gram_nonzero": not F.is_zero(gram_det),
            }
        )
    else:  # pragma: no cover
        raise RecipeError(f"unknown search {kind!r}")


def _run_equivalence(F, spec, results, config, budget):
    kind = spec["kind"]
    if kind == "extri":
        E = _build_cubic_etale(F, spec["E"])
        L = _build_quadratic_etale(F, spec["L"])
        u = _vec(F, spec["u"])
        b = _vec(F, spec["b"])
        etale_tits_process(E, L, u, b)  # validates admissibility
        table = []
        agree = True
        for w in E.units():
            if not F.is_one(E.norm(w)):
                continue
            left, wit = norm_class_witness_condition(E, L, b, w, budget=budget)
            right = norm_membership(E, L, w, budget=budget).trivial
            ok = left == right
            agree = agree and ok
            table.append(
                {
                    "w": serialize.vector_to_json(F, w),
                    "witness_condition": left,
                    "norm_membership": right,
                    "witness": serialize.vector_to_json(F, wit) if wit else None,
                    "agree": ok,
                }
            )
        results.append(
            {"name": "check:extri", "passed": agree, "cases": len(table), "table": table}
        )
    elif kind == "weak-equivalence":
        E = _build_cubic_etale(F, spec["E"])
        L = _build_quadratic_etale(F, spec["L"])
        u = _vec(F, spec["u"])
        b = _vec(F, spec["b"])
        X = etale_tits_process(E, L, u, b)
        i = initial_embedding(X)
        w = _vec(F, spec["w"])
        if "i_prime_twist" in spec:
            i_prime = i.twist(_vec(F, spec["i_prime_twist"]))
        else:
            i_prime = i
        M = serialize.matrix_from_json(F, spec["map"])
        verdict = weak_equivalence_check(i, i_prime, w, M)
        results.append(
            {
                "name": "check:weak-equivalence",
                "passed": verdict.accepted,
                "status": verdict.status,
                "reason": verdict.reason,
            }
        )
    else:  # pragma: no cover
        raise RecipeError(f"unknown equivalence check {kind!r}")


def _run_group(F, spec, results, config, budget):
    kind = spec["kind"]
    if kind in ("sym3", "uw"):
        comp = spec.get("comp", "zorn")
        C = composition_preset(comp, F)
        from .constructions import her3

        X = her3(C)
        if kind == "sym3":
            cert = sym3_operator(tuple(spec["sigma"]), X)
        else:
            w = [F.from_json(c) for c in spec["w"]]
            cert = uw_operator(w, X)
        entry = {"name": f"group:{kind}", "passed": cert.in_str and cert.fixes_norm}
        entry.update(cert.as_dict())
        entry["matrix"] = serialize.matrix_to_json(F, cert.matrix)
        results.append(entry)
    elif kind == "outer-check":
        K = _build_quadratic_etale(F, spec["K"])
        rep = outer_from_antiauto(K, cap=budget)
        entry = {"name": "group:outer-check", "passed": rep.verdict == "outer"}
        entry.update(rep.as_dict())
        results.append(entry)
    else:  # pragma: no cover
        raise RecipeError(f"unknown group operation {kind!r}")


def execute_recipe(recipe, seed=0, budget=10**7, identity_mode="auto", jobs=1):
    """Run a validated recipe; returns (report_dict, exit_code)."""
    timings = {}
    results = []
    config = CheckConfig(identity_mode=identity_mode, budget=min(budget, 10**7), seed=seed)
    exit_code = 0
    try:
        validate_recipe(recipe)
        F = serialize.field_from_json(recipe["field"])
        if "construct" in recipe:
            t0 = time.perf_counter()
            X = _construct(F, recipe["construct"], results, config)
            timings["construct"] = round(time.perf_counter() - t0, 6)
            if recipe.get("checks"):
                t0 = time.perf_counter()
                _run_checks(X, recipe["checks"], results, config)
                timings["checks"] = round(time.perf_counter() - t0, 6)
        if "search" in recipe:
            t0 = time.perf_counter()
            _run_search(F, recipe["search"], results, config, budget, jobs)
            timings["search"] = round(time.perf_counter() - t0, 6)
        if "equivalence" in recipe:
            t0 = time.perf_counter()
            _run_equivalence(F, recipe["equivalence"], results, config, budget)
            timings["equivalence"] = round(time.perf_counter() - t0, 6)
        if "group" in recipe:
            t0 = time.perf_counter()
            _run_group(F, recipe["group"], results, config, budget)
            timings["group"] = round(time.perf_counter() - t0, 6)
    except BudgetExceeded as exc:
        results.append({"name": "budget", "passed": False, "error": exc.code, "detail": str(exc)})
        exit_code = 3
    except (RecipeError, PreconditionError) as exc:
        results.append({"name": "recipe", "passed": False, "error": exc.code, "detail": str(exc)})
        exit_code = 2
    except CubjordError as exc:
        results.append({"name": "internal", "passed": False, "error": exc.code, "detail": str(exc)})
        exit_code = 1
    passed = all(r.get("passed") for r in results) and exit_code == 0
    if exit_code == 0 and not passed:
        exit_code = 1
    report = {
        "version": 1,
        "tool": "cubjord",
        "seed": seed,
        "budget": budget,
        "identity_mode": identity_mode,
        "jobs": jobs,
        "recipe": recipe,
        "results": results,
        "passed": passed,
        "exit_code": exit_code,
        "meta": {
            "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
            "timings": timings,
        },
    }
    return report, exit_code


def report_to_bytes(report):
    return (json.dumps(report, sort_keys=True, indent=1) + "\n").encode()


def strip_volatile(report):
    out = dict(report)
    out.pop("meta", None)
    return out


# ---------------------------------------------------------------------------
# report re-validation


def verify_report(report):
    """Re-validate every stored witness without redoing searches.

    Returns a list of (name, status) pairs; status is "ok", "failed" or
    "not-revalidatable" (verdicts that exist only as scan exhaustion)."""
    out = []
    recipe = report.get("recipe", {})
    try:
        F = serialize.field_from_json(recipe["field"])
    except Exception:
        return [("report", "failed")]
    for r in report.get("results", []):
        name = r.get("name", "?")
        try:
            status = _verify_result(F, recipe, r)
        except Exception:
            status = "failed"
        out.append((name, status))
    return out


def _verify_result(F, recipe, r):
    name = r.get("name", "")
    if name == "search:norm-membership" and r.get("decision") == "trivial":
        spec = recipe["search"]
        E = _build_cubic_etale(F, spec["E"])
        L = _build_quadratic_etale(F, spec["L"])
        from .commalg import EtaleTensor

        T = EtaleTensor(E, L)
        y = _vec(F, r["witness"])
        w = _vec(F, spec["w"])
        return "ok" if T.n_L(y) == w else "failed"
    if name == "search:nornor" and r.get("witness"):
        spec = recipe["search"]
        E = _build_cubic_etale(F, spec["E"])
        L = _build_quadratic_etale(F, spec["L"])
        from .commalg import EtaleTensor

        T = EtaleTensor(E, L)
        y = _vec(F, spec["y"])
        yp = _vec(F, r["witness"])
        ok = T.norm_over_L(yp) == T.norm_over_L(y) and T.n_L(yp) == list(E.unit)
        return "ok" if ok else "failed"
    if name == "search:spliet-alpha":
        spec = recipe["search"]
        E = _build_cubic_etale(F, spec["E"])
        u0 = _vec(F, spec["u0"])
        alpha = F.from_json(r["alpha"])
        X, y = second_generator_element(E, u0, alpha)
        ok = cubic_subalgebra_etale(X, y) and _vec(F, r["witness"]) == y
        return "ok" if ok else "failed"
    if name == "check:extri":
        spec = recipe["equivalence"]
        E = _build_cubic_etale(F, spec["E"])
        L = _build_quadratic_etale(F, spec["L"])
        from .commalg import EtaleTensor

        T = EtaleTensor(E, L)
        b = _vec(F, spec["b"])
        targets = [list(L.alg.unit), L.mul(L.conj(b), L.inv(b))]
        for row in r.get("table", []):
            if row.get("witness"):
                y = _vec(F, row["witness"])
                w = _vec(F, row["w"])
                if T.n_L(y) != w or T.norm_over_L(y) not in targets:
                    return "failed"
        return "ok"
    if name in ("group:sym3", "group:uw"):
        spec = recipe["group"]
        C = composition_preset(spec.get("comp", "zorn"), F)
        from .constructions import her3

        X = her3(C)
        M = serialize.matrix_from_json(F, r["matrix"])
        cert = certify_map(X, X, M)
        ok = cert.verified and F.is_one(cert.multiplier) == r["fixes_norm"]
        return "ok" if ok else "failed"
    return "not-revalidatable"


# ---------------------------------------------------------------------------
# argument parsing


def _add_common(parser):
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--budget", type=int, default=10**7)
    parser.add_argument(
        "--identity-mode", choices=["formal", "randomized", "auto"], default="auto"
    )
    parser.add_argument("--jobs", type=int, default=1)
    parser.add_argument("--out", default=None, help="write the report to FILE")


def build_parser():
    parser = argparse.ArgumentParser(prog="cubjord", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a full recipe")
    p_run.add_argument("recipe")
    _add_common(p_run)

    p_search = sub.add_parser("search", help="run a search recipe")
    p_search.add_argument("what", choices=["norm-membership", "nornor", "spliet-alpha"])
    p_search.add_argument("recipe")
    _add_common(p_search)

    p_check = sub.add_parser("check", help="run an equivalence check recipe")
    p_check.add_argument("what", choices=["extri", "weak-equivalence"])
    p_check.add_argument("recipe")
    _add_common(p_check)

    p_group = sub.add_parser("group", help="structure-group operators")
    p_group.add_argument("what", choices=["sym3", "uw", "outer-check"])
    p_group.add_argument("recipe")
    _add_common(p_group)

    p_verify = sub.add_parser("verify-report", help="re-validate a report's witnesses")
    p_verify.add_argument("report")
    return parser


def _load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise RecipeError(f"cannot read {path}: {exc}") from None


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "verify-report":
        try:
            report = _load_json(args.report)
        except RecipeError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        rows = verify_report(report)
        failed = [n for n, s in rows if s == "failed"]
        for n, s in rows:
            print(f"{s:18s} {n}")
        return 1 if failed else 0
    try:
        recipe = _load_json(args.recipe)
    except RecipeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.command in ("search", "check", "group"):
        clause = {"search": "search", "check": "equivalence", "group": "group"}[args.command]
        spec = recipe.get(clause)
        if not spec or spec.get("kind") != args.what:
            print(f"error: recipe does not contain a {args.command} clause of kind {args.what}", file=sys.stderr)
            return 2
    report, code = execute_recipe(
        recipe,
        seed=args.seed,
        budget=args.budget,
        identity_mode=args.identity_mode,
        jobs=args.jobs,
    )
    payload = report_to_bytes(report)
    if args.out:
        with open(args.out, "wb") as fh:
            fh.write(payload)
    else:
        sys.stdout.buffer.write(payload)
    for r in report["results"]:
        if not r.get("passed"):
            print(f"FAILED: {r.get('name')}", file=sys.stderr)
            break
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
