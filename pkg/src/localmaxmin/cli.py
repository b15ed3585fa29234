"""Command-line front end.

Exit codes: 0 success, 2 input error, 3 unsupported instance, 4 verification
failure, 5 resource budget exceeded.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional

from .algorithm import AlgoParams, run_local
from .errors import (ConstructionError, DomainError, MaxMinError, ParseError, ResourceBudgetError,
                     UnsupportedInstanceError, ValidationError)
from .io import assignment_to_dict, encode_instance, format_decimal, format_rational, load_instance
from .lowerbound import (GenerationLog, LowerBoundParams, SLayout, appendix_solution, build_S, build_Sk,
                         girth, graph_from_dict, graph_to_dict, growth_bound, high_girth_biregular,
                         relative_growth, utility_upper_bound)
from .lp import solve_max_min
from .model import (IdMode, MaxMinInstance, check_feasible, min_utility, utilities, validate_instance)
from .unfolding import consistency_check

EXIT_OK, EXIT_INPUT, EXIT_UNSUPPORTED, EXIT_VERIFY, EXIT_BUDGET = 0, 2, 3, 4, 5


def _rat(x: Fraction) -> str:
    return f"{format_rational(x)} (~{format_decimal(x)})"


def _dump(doc) -> str:
    return json.dumps(doc, indent=1, sort_keys=True)


def _write_json(path: Path, doc) -> None:
    path.write_text(_dump(doc) + "\n", encoding="utf-8")


def _load_valid(path) -> MaxMinInstance:
    inst = load_instance(path)
    report = validate_instance(inst)
    if not report.ok:
        raise ValidationError(report)
    return inst


# -- solve -------------------------------------------------------------------

def cmd_solve(args) -> int:
    inst = _load_valid(args.instance)
    omega, x = solve_max_min(inst)
    if args.json:
        print(_dump({"omega": format_rational(omega), "x": assignment_to_dict(x)}))
    else:
        print(f"omega = {_rat(omega)}")
        for v in sorted(x):
            print(f"x[{v}] = {_rat(x[v])}")
    return EXIT_OK


# -- run-local ---------------------------------------------------------------

def cmd_run_local(args) -> int:
    inst = _load_valid(args.instance)
    p = AlgoParams(args.delta_i, args.delta_k, args.L)
    subs: Optional[Dict] = {} if args.emit_subproblems else None
    x = run_local(inst, p, workers=args.workers, subproblems=subs)
    omega, _ = solve_max_min(inst)
    util = utilities(inst, x)
    violated = check_feasible(inst, x)
    short = sorted(k for k, u in util.items() if u * p.alpha < omega)
    ok = not violated and not short
    low = min_utility(inst, x)
    if subs is not None:
        out = Path(args.emit_subproblems)
        out.mkdir(parents=True, exist_ok=True)
        index = []
        for code in sorted(subs):
            name = hashlib.sha256(code).hexdigest()[:16] + ".json"
            (out / name).write_bytes(encode_instance(subs[code].instance))
            index.append(name)
        _write_json(out / "index.json", {"subproblems": index})
    if args.json:
        print(_dump({
            "x": assignment_to_dict(x), "min_utility": format_rational(low), "omega_star": format_rational(omega),
            "alpha": format_rational(p.alpha), "q": format_rational(p.q), "feasible": not violated,
            "violated_constraints": violated, "objectives_below_bound": short,
            "status": "PASS" if ok else "FAIL"}))
    else:
        for v in sorted(x):
            print(f"x[{v}] = {_rat(x[v])}")
        print(f"min utility = {_rat(low)}")
        print(f"omega* = {_rat(omega)}")
        print(f"alpha = {_rat(p.alpha)}")
        print(f"q = {_rat(p.q)}")
        print(f"feasible = {'yes' if not violated else 'no ' + str(violated)}")
        print(f"ratio check: {'PASS' if ok else 'FAIL'}")
    return EXIT_OK if ok else EXIT_VERIFY


# -- gen-lowerbound ----------------------------------------------------------

def _growth_j(params: LowerBoundParams, j: int) -> int:
    return j * (4 * params.s + 2)


def cmd_gen_lowerbound(args) -> int:
    params = LowerBoundParams(args.d_i, args.d_k, args.s, args.r)
    log = GenerationLog()
    q = high_girth_biregular(params.d_i, params.d_k, params.g, args.seed,
                             max_vertices=args.max_vertices, log=log)
    mode = IdMode(args.id_mode)
    S = build_S(q, params, mode)
    lay = SLayout(q, params.s)
    originals = lay.original_objectives
    if args.objectives == "all":
        chosen = originals
    elif args.objectives:
        chosen = [int(t) for t in args.objectives.split(",")]
        bad = [k for k in chosen if k not in set(originals)]
        if bad:
            raise DomainError(f"not original objectives of S: {bad}")
    else:
        chosen = originals[:1]

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _write_json(out / "Q.json", graph_to_dict(q))
    (out / "S.json").write_bytes(encode_instance(S))
    omega_s, _ = solve_max_min(S)
    sk_entries = []
    for k in chosen:
        Sk = build_Sk(S, k, params)
        name = f"S_k_{k}.json"
        (out / name).write_bytes(encode_instance(Sk))
        xa = appendix_solution(Sk, k, params.d_i, params.d_k)
        omega_k, _ = solve_max_min(Sk)
        sk_entries.append({"k": k, "file": name, "vertices": len(Sk.role),
                           "appendix_min_utility": format_rational(min_utility(Sk, xa)),
                           "omega": format_rational(omega_k)})
    manifest = {
        "command": "gen-lowerbound",
        "parameters": {"d_i": params.d_i, "d_k": params.d_k, "s": params.s, "r": params.r,
                       "seed": args.seed, "max_vertices": args.max_vertices, "id_mode": mode.value,
                       "growth_j": args.growth_j},
        "g_required": params.g,
        "girth": girth(q),
        "q_vertices": q.n_vertices,
        "q_edges": len(q.edges),
        "generation": [list(step) for step in log.steps],
        "files": {"Q": "Q.json", "S": "S.json"},
        "S_agents": len(S.agents),
        "omega_S": format_rational(omega_s),
        "utility_upper_bound": format_rational(utility_upper_bound(params.d_i, params.d_k, params.s)),
        "ratio_limit": format_rational(Fraction(params.d_i * (params.d_k - 1), params.d_k)),
        "S_k": sk_entries,
    }
    if args.growth_j:
        R = _growth_j(params, args.growth_j)
        manifest["growth"] = {"j": args.growth_j, "R": R,
                              "measured": format_rational(relative_growth(S, R)),
                              "bound": format_rational(growth_bound(args.growth_j, params.s))}
    _write_json(out / "manifest.json", manifest)
    print(f"girth {manifest['girth']} (required > {params.g - 1}) on {q.n_vertices} skeleton vertices")
    print(f"S: {len(S.agents)} agents, omega = {_rat(omega_s)}, "
          f"bound = {_rat(utility_upper_bound(params.d_i, params.d_k, params.s))}")
    for ent in sk_entries:
        print(f"S_k[{ent['k']}]: {ent['vertices']} vertices, omega = {ent['omega']}, "
              f"explicit solution utility = {ent['appendix_min_utility']}")
    print(f"wrote {out}")
    return EXIT_OK


# -- verify ------------------------------------------------------------------

def _verify_dir(directory: Path) -> List[dict]:
    try:
        manifest = json.loads((directory / "manifest.json").read_text(encoding="utf-8"))
        q = graph_from_dict(json.loads((directory / manifest["files"]["Q"]).read_text(encoding="utf-8")))
        S = load_instance(directory / manifest["files"]["S"])
        sks = [(ent, load_instance(directory / ent["file"])) for ent in manifest["S_k"]]
        par = manifest["parameters"]
        params = LowerBoundParams(par["d_i"], par["d_k"], par["s"], par["r"])
    except (KeyError, TypeError, json.JSONDecodeError) as exc:
        raise ParseError(f"bad manifest: {exc}") from None

    checks: List[dict] = []

    def record(name: str, ok: bool, detail: str = ""):
        checks.append({"check": name, "status": "PASS" if ok else "FAIL", "detail": detail})

    g = girth(q)
    record("girth", g == manifest.get("girth") and g >= params.g,
           f"measured {g}, manifest {manifest.get('girth')}, required >= {params.g}")
    record("skeleton biregular", q.is_biregular(params.d_i, params.d_k), f"({params.d_i}, {params.d_k})")

    rebuilt = build_S(q, params, S.id_mode) if q.is_biregular(params.d_i, params.d_k) else None
    record("structure of S", rebuilt is not None and rebuilt == S and validate_instance(S).ok,
           "S matches the construction from Q")

    lay = SLayout(q, params.s)
    sizes = [len(set(layer) & set(S.agents)) for layer in lay.layers()]
    record("layer counts", all(n == len(q.edges) for n in sizes), f"|V(j)| = {sizes}, m = {len(q.edges)}")

    omega_s, _ = solve_max_min(S)
    bound = utility_upper_bound(params.d_i, params.d_k, params.s)
    record("utility bound", omega_s <= bound and format_rational(omega_s) == manifest.get("omega_S"),
           f"omega(S) = {format_rational(omega_s)} <= {format_rational(bound)}")

    L0 = AlgoParams(max(params.d_i, 2), max(params.d_k, 2), 0)
    x_s = None
    if S.is_bipartite:
        try:
            x_s = run_local(S, L0)
        except (UnsupportedInstanceError, ValidationError) as exc:
            record("local run on S", False, str(exc))
    if x_s is not None:
        bad = consistency_check(S, x_s, L0.horizon)
        record("consistency on S", not bad, f"{len(bad)} violating pairs")

    for ent, Sk in sks:
        k = ent["k"]
        label = f"S_k[{k}]"
        try:
            expected = build_Sk(S, k, params)
        except MaxMinError as exc:
            record(f"{label} structure", False, str(exc))
            continue
        record(f"{label} structure", expected == Sk, "matches the ball around k in S")
        xa = appendix_solution(Sk, k, params.d_i, params.d_k)
        viol = check_feasible(Sk, xa)
        mu = min_utility(Sk, xa)
        record(f"{label} explicit solution", not viol and mu > params.d_k - 1
               and format_rational(mu) == ent.get("appendix_min_utility"),
               f"feasible={not viol}, utility {format_rational(mu)} > {params.d_k - 1}")
        omega_k, _ = solve_max_min(Sk)
        record(f"{label} optimum", format_rational(omega_k) == ent.get("omega") and omega_k > params.d_k - 1,
               f"omega = {format_rational(omega_k)}")
        if x_s is not None:
            vk = Sk.agents_of(k)
            try:
                x_k = run_local(Sk, L0)
                same = all(x_k[v] == x_s[v] for v in vk)
            except (UnsupportedInstanceError, ValidationError) as exc:
                same, x_k = False, None
                record(f"{label} indistinguishability", False, str(exc))
            if x_k is not None:
                record(f"{label} indistinguishability", same, f"outputs on V_k agree: {same}")

    if "growth" in manifest:
        gr = manifest["growth"]
        measured = relative_growth(S, gr["R"])
        bound_g = growth_bound(gr["j"], params.s)
        record("growth", measured <= bound_g and format_rational(measured) == gr.get("measured"),
               f"{format_rational(measured)} <= {format_rational(bound_g)} beyond R = {gr['R']}")
    return checks


def cmd_verify(args) -> int:
    directory = Path(args.dir)
    if not (directory / "manifest.json").is_file():
        raise FileNotFoundError(f"{directory / 'manifest.json'} not found")
    checks = _verify_dir(directory)
    ok = all(c["status"] == "PASS" for c in checks)
    if args.json:
        print(_dump({"status": "PASS" if ok else "FAIL", "checks": checks}))
    else:
        for c in checks:
            print(f"{c['status']} {c['check']}: {c['detail']}")
        print("PASS" if ok else "FAIL")
    return EXIT_OK if ok else EXIT_VERIFY


# -- entry point -------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="localmaxmin", description="Local algorithms for max-min LPs.")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("solve", help="exact global optimum of an instance")
    sp.add_argument("instance")
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("run-local", help="run the local algorithm and check its guarantee")
    sp.add_argument("--instance", required=True)
    sp.add_argument("--delta-i", type=int, required=True)
    sp.add_argument("--delta-k", type=int, required=True)
    sp.add_argument("--L", type=int, required=True)
    sp.add_argument("--emit-subproblems", metavar="DIR")
    sp.add_argument("--workers", type=int, default=None)
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_run_local)

    sp = sub.add_parser("gen-lowerbound", help="generate lower-bound instances")
    sp.add_argument("--d-i", type=int, required=True)
    sp.add_argument("--d-k", type=int, required=True)
    sp.add_argument("--s", type=int, required=True)
    sp.add_argument("--r", type=int, required=True)
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--objectives", default=None,
                    help="comma-separated original objective ids, or 'all' (default: the first)")
    sp.add_argument("--max-vertices", type=int, default=1 << 14)
    sp.add_argument("--id-mode", choices=[m.value for m in IdMode], default=IdMode.UNIQUE_IDS.value)
    sp.add_argument("--growth-j", type=int, default=None,
                    help="also measure relative growth beyond R = j(4s+2)")
    sp.set_defaults(func=cmd_gen_lowerbound)

    sp = sub.add_parser("verify", help="re-check a generated directory")
    sp.add_argument("dir")
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_verify)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UnsupportedInstanceError as exc:
        print(f"unsupported instance: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except ResourceBudgetError as exc:
        print(f"resource budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (ParseError, ValidationError, DomainError, OSError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ConstructionError as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return EXIT_VERIFY


if __name__ == "__main__":
    sys.exit(main())
