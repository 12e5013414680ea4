"""Command-line front end: reproducible experiments with JSON reports.

Exit codes: 0 success, 2 usage error, 3 claim failure (the mathematics
disagreed), 4 resource abort (a budget was hit, not a wrong answer).
Output is deterministic for fixed parameters and version; timing and
memory metadata are added only on request (--timing).
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from . import __version__, config
from .complexes import (
    build_delta,
    build_xi2,
    euler_characteristic,
    export_facets,
    link_complex,
)
from .errors import ConsistencyError, ResourceAbort
from .homology import betti_numbers, integral_homology
from .partitions import (
    MAX_PERMUTATION_N,
    count_admissible_permutations,
    double_factorial_formula,
    signed_euler_sum,
)
from .spectral import (
    e1_page_closed_form,
    e1_page_computed,
    e2_page,
    gm_identity_check,
    support_check,
    twisted_poincare_closed,
    twisted_poincare_from_page,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_CLAIM = 3
EXIT_RESOURCE = 4


def _report(command: str, parameters: dict, results: dict) -> dict:
    return {
        "command": command,
        "version": __version__,
        "parameters": parameters,
        "results": results,
    }


def _build_complex(kind: str, n: int):
    if kind == "delta":
        return build_delta(n)
    if kind == "boundary-delta":
        return link_complex(build_delta(n))
    if kind == "xi2":
        return build_xi2(n)
    raise ValueError(f"unknown complex kind {kind!r}")


def _cmd_betti(args, parser) -> tuple[int, dict]:
    if args.kind == "xi2" and args.n % 2 != 0:
        parser.error(
            "--kind xi2 needs an even N: the complex of not 2-divisible "
            "partitions is defined for even ground sets only"
        )
    c = _build_complex(args.kind, args.n)
    if args.facets_out:
        with open(args.facets_out, "w") as fh:
            fh.write(export_facets(c))
    if args.coeff == "q":
        summary = betti_numbers(c, reduced=args.reduced)
    else:
        if args.reduced:
            parser.error("--reduced is a rational-coefficients option")
        summary = integral_homology(c)
    results = {
        "f_vector": list(c.f_vector().counts[1:]),
        "euler_characteristic": c.euler(),
        "homology": summary.to_record(),
    }
    report = _report(
        "betti",
        {"kind": args.kind, "n": args.n, "coefficients": args.coeff.upper(),
         "reduced": bool(args.reduced)},
        results,
    )
    if args.format == "csv":
        lines = ["dim,betti,torsion"]
        for g in summary.to_record()["groups"]:
            tor = ";".join(map(str, g["torsion"]))
            lines.append(f"{g['dim']},{g['betti']},{tor}")
        report["csv"] = "\n".join(lines)
    return EXIT_OK, report


def _cmd_euler(args, parser) -> tuple[int, dict]:
    if args.n % 2 != 0:
        parser.error("the Euler cross-check is about even ground sets")
    methods = (
        ["simplex", "partition-sum", "permutation"]
        if args.method == "all"
        else [args.method]
    )
    values = {}
    for method in methods:
        if method == "simplex":
            values[method] = euler_characteristic(build_delta(args.n), build_xi2(args.n))
        elif method == "partition-sum":
            values[method] = signed_euler_sum(args.n)
        else:
            if args.n > MAX_PERMUTATION_N:
                parser.error(f"permutation method is capped at N={MAX_PERMUTATION_N}")
            values[method] = count_admissible_permutations(args.n)
    expected = double_factorial_formula(args.n)
    agree = all(v == expected for v in values.values())
    results = {
        "values": values,
        "double_factorial_formula": expected,
        "agree": agree,
    }
    code = EXIT_OK if agree else EXIT_CLAIM
    return code, _report("euler", {"n": args.n, "method": args.method}, results)


def _cmd_spectral(args, parser) -> tuple[int, dict]:
    if args.n % 2 != 0:
        parser.error("spectral pages need an even N")
    if args.m % 2 == 0 or args.m < 3:
        parser.error("m must be odd and at least 3 (the construction needs odd m)")
    if args.m <= args.n // 2 - 1 and not args.allow_small_m:
        parser.error(
            f"m={args.m} violates the acyclicity hypothesis m > N/2 - 1 = "
            f"{args.n // 2 - 1}; pass --allow-small-m to force an unverified run"
        )
    e1 = e1_page_closed_form(args.n, args.m)
    code = EXIT_OK
    results: dict = {}
    if args.check_computed:
        if args.n > 6:
            parser.error("--check-computed runs full homology and is capped at N=6")
        computed = e1_page_computed(args.n, args.m)
        results["computed_matches_closed_form"] = computed.cells == e1.cells
        if computed.cells != e1.cells:
            code = EXIT_CLAIM
    page = e1 if args.page == 1 else e2_page(e1, allow_small_m=args.allow_small_m)
    ok, violations = support_check(page)
    results["page"] = page.to_json_dict()
    results["support_ok"] = ok
    if violations:
        results["support_violations"] = violations
        code = EXIT_CLAIM
    if args.render:
        results["grid"] = page.render()
    return code, _report(
        "spectral",
        {"n": args.n, "m": args.m, "page": args.page,
         "allow_small_m": bool(args.allow_small_m)},
        results,
    )


def _cmd_report(args, parser) -> tuple[int, dict]:
    n, m = args.n, args.m
    if n % 2 != 0:
        parser.error("the reproduction bundle is defined for even N")
    if m % 2 == 0 or m < 3:
        parser.error("m must be odd and at least 3")
    if m <= n // 2 - 1:
        parser.error(
            f"m={m} violates the acyclicity hypothesis m > N/2 - 1 = {n // 2 - 1}"
        )
    claims = []

    def claim(name: str, passed: bool, detail: dict):
        claims.append({"claim": name, "pass": bool(passed), **detail})

    dff = double_factorial_formula(n)
    xi2 = build_xi2(n)

    rational = betti_numbers(xi2)
    expected = {d: 0 for d in range(1, xi2.dim + 1)}
    expected[n - 3] = dff
    got_positive = {d: rational.rank(d) for d in range(1, xi2.dim + 1)}
    claim(
        "rational_homology_concentrated",
        got_positive == expected,
        {"expected": expected, "got": got_positive, "b0": rational.rank(0)},
    )

    if xi2.f_vector().total_faces <= config.snf_face_limit():
        integral = integral_homology(xi2)
        claim(
            "integral_free_ranks_match",
            integral.betti == rational.betti,
            {"torsion_observed": {str(d): list(t) for d, t in (integral.torsion or {}).items()}},
        )
    else:
        claim("integral_free_ranks_match", True, {"skipped": "over SNF budget"})

    euler_values = {
        "simplex": euler_characteristic(build_delta(n), xi2),
        "partition-sum": signed_euler_sum(n),
    }
    if n <= MAX_PERMUTATION_N:
        euler_values["permutation"] = count_admissible_permutations(n)
    claim(
        "euler_three_ways",
        all(v == dff for v in euler_values.values()),
        {"expected": dff, "got": euler_values},
    )

    e1 = e1_page_closed_form(n, m)
    e2 = e2_page(e1)
    pages_ok = support_check(e1)[0] and support_check(e2)[0]
    detail = {"e1": e1.to_json_dict(), "e2": e2.to_json_dict()}
    if n <= 6:
        computed = e1_page_computed(n, m)
        pages_ok = pages_ok and computed.cells == e1.cells
        detail["computed_matches_closed_form"] = computed.cells == e1.cells
    claim("spectral_pages", pages_ok, detail)

    closed = twisted_poincare_closed(n, m)
    from_page = twisted_poincare_from_page(e2)
    claim(
        "twisted_poincare_cross_check",
        closed == from_page,
        {"closed_form": [list(p) for p in closed.to_pairs()],
         "from_page": [list(p) for p in from_page.to_pairs()]},
    )

    gm_ok, conf, arr = gm_identity_check(n, m)
    claim(
        "goresky_macpherson_identity",
        gm_ok,
        {"configuration_side": [list(p) for p in conf.to_pairs()],
         "arrangement_side": [list(p) for p in arr.to_pairs()]},
    )

    all_pass = all(c["pass"] for c in claims)
    code = EXIT_OK if all_pass else EXIT_CLAIM
    return code, _report(
        "report", {"n": n, "m": m}, {"claims": claims, "all_pass": all_pass}
    )


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="parthom",
        description="Exact homology of partition-poset order complexes.",
    )
    parser.add_argument("--timing", action="store_true",
                        help="add wall-clock and peak-memory metadata to the report")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p_betti = sub.add_parser("betti", help="Betti numbers of a built complex")
    p_betti.add_argument("--kind", required=True,
                         choices=["delta", "boundary-delta", "xi2"])
    p_betti.add_argument("--n", required=True, type=int)
    p_betti.add_argument("--coeff", default="q", choices=["q", "z"],
                         help="rational Betti or integral homology with torsion")
    p_betti.add_argument("--reduced", action="store_true")
    p_betti.add_argument("--format", default="json", choices=["json", "csv"])
    p_betti.add_argument("--facets-out", metavar="FILE",
                         help="also dump the complex in the facet file format")
    p_betti.set_defaults(handler=_cmd_betti)

    p_euler = sub.add_parser(
        "euler", help="compactly-supported Euler characteristic, three ways"
    )
    p_euler.add_argument("--n", required=True, type=int)
    p_euler.add_argument("--method", default="all",
                         choices=["simplex", "partition-sum", "permutation", "all"])
    p_euler.set_defaults(handler=_cmd_euler)

    p_spec = sub.add_parser("spectral", help="spectral-sequence rank pages")
    p_spec.add_argument("--n", required=True, type=int)
    p_spec.add_argument("--m", required=True, type=int)
    p_spec.add_argument("--page", default=1, type=int, choices=[1, 2])
    p_spec.add_argument("--render", action="store_true",
                        help="include an aligned text grid")
    p_spec.add_argument("--check-computed", action="store_true",
                        help="cross-validate the closed form against full homology")
    p_spec.add_argument("--allow-small-m", action="store_true",
                        help="bypass the m > N/2-1 hypothesis; output is marked unverified")
    p_spec.set_defaults(handler=_cmd_spectral)

    p_rep = sub.add_parser("report", help="one-shot reproduction bundle")
    p_rep.add_argument("--n", required=True, type=int)
    p_rep.add_argument("--m", default=3, type=int)
    p_rep.set_defaults(handler=_cmd_report)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    t0 = time.perf_counter()
    try:
        code, report = args.handler(args, parser)
    except ResourceAbort as exc:
        print(f"resource-abort: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except ConsistencyError as exc:
        print(f"claim-failure: {exc}", file=sys.stderr)
        return EXIT_CLAIM
    except ValueError as exc:
        parser.exit(EXIT_USAGE, f"{parser.prog}: error: {exc}\n")
    if args.timing:
        try:
            import resource

            peak_kb = resource.getrusage(resource.RUSAGE_SELF).ru_maxrss
        except ImportError:
            peak_kb = None
        report["timing"] = {
            "wall_seconds": round(time.perf_counter() - t0, 3),
            "peak_rss_kb": peak_kb,
        }
    print(json.dumps(report, indent=2, sort_keys=True))
    return code


if __name__ == "__main__":
    sys.exit(main())
