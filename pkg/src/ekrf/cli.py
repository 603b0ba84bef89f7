"""Command-line front end: construct | verify | profile | bound | search | structure | export | report.

Every file the tool writes gets a sibling ``<file>.manifest.json`` recording the
command line, parameters, tool version, elapsed time, and a sha256 digest of the
output bytes, so any artifact can be re-checked later.

Exit codes: 0 success (for ``search``: optimum proved), 1 condition violation
(``verify``) or failed strict audit, 2 usage or parameter error, 3 search ended
by a cap with the optimum unproved.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import sys
import time

from . import __version__
from .setcore import (
    CapExceeded,
    EkrfError,
    Family,
    GroundParams,
    load_family,
    save_family,
    serialize_family,
    serialize_family_json,
)
from .conditions import ConditionSpec, Variant, check_condition, threshold
from .constructions import (
    construct_star,
    construct_sunflower,
    construct_thm6,
    construct_thm8,
    f_profile,
    g_profile,
    rhs_bound,
)
from .structure import find_sunflower, kernel_decompose, lemma_audit, matching_number
from .search import (
    DEFAULT_TUPLE_CAP,
    SearchOptions,
    enumerate_bad_tuples,
    export_cnf,
    export_ilp,
    max_family,
)

# ---------------------------------------------------------------------------
# plumbing


def _die(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return 2


def _emit(payload: dict) -> None:
    print(json.dumps(payload, indent=2))


def _family_payload(family: Family) -> dict:
    return {
        "n": family.params.n,
        "k": family.params.k,
        "members": [list(ks.elements) for ks in family],
    }


def _write_manifest(path: str, command: str, argv: list[str], parameters: dict, elapsed: float) -> str:
    """Write <path>.manifest.json describing the file at `path`; returns the manifest path."""
    with open(path, "rb") as fh:
        blob = fh.read()
    manifest = {
        "command": command,
        "argv": list(argv),
        "parameters": parameters,
        "version": __version__,
        "elapsed_seconds": round(elapsed, 6),
        "output": {
            "path": path,
            "sha256": hashlib.sha256(blob).hexdigest(),
            "bytes": len(blob),
        },
    }
    mpath = path + ".manifest.json"
    with open(mpath, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")
    return mpath


def _write_output(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _condition_spec(args: argparse.Namespace) -> ConditionSpec:
    variant = Variant(args.variant)
    ell = args.ell
    if ell is None:
        if variant is Variant.PAIRWISE_T:
            ell = 2
        else:
            raise EkrfError("--ell is required for this variant")
    t = args.t
    if t is None:
        if variant in (Variant.EQ2, Variant.EQ10):
            t = 1  # these conditions are only defined at t = 1
        else:
            raise EkrfError("--t is required for this variant")
    slack = getattr(args, "s", None) or 0
    return ConditionSpec(t=t, ell=ell, variant=variant, slack=slack)


def _params_dict(args: argparse.Namespace, names: tuple[str, ...]) -> dict:
    out = {}
    for name in names:
        value = getattr(args, name, None)
        if value is not None:
            out[name] = value
    return out


# ---------------------------------------------------------------------------
# construct


_BUILDERS = {
    "thm6": (construct_thm6, ("n", "k", "t", "ell")),
    "thm8": (construct_thm8, ("n", "k", "ell", "s")),
    "star": (construct_star, ("n", "k", "t")),
    "sunflower": (construct_sunflower, ("n", "k", "t", "u")),
}


def _cmd_construct(args: argparse.Namespace, argv: list[str]) -> int:
    t0 = time.perf_counter()
    builder, needed = _BUILDERS[args.variant]
    kwargs = {}
    for name in needed:
        value = getattr(args, name)
        if value is None:
            return _die(f"construct --variant {args.variant} requires --{name}")
        kwargs[name] = value
    family = builder(**kwargs)
    if args.ell is not None and args.n < args.ell * args.k:
        print(
            f"warning: n={args.n} < ell*k={args.ell * args.k}; "
            "tightness witnesses may not exist at this size",
            file=sys.stderr,
        )
    if args.output:
        save_family(family, args.output)
        _write_manifest(
            args.output, "construct", argv,
            {"variant": args.variant, **_params_dict(args, ("n", "k", "t", "ell", "s", "u"))},
            time.perf_counter() - t0,
        )
        summary = {"output": args.output, "size": len(family), "n": args.n, "k": args.k}
        if args.json:
            _emit(summary)
        else:
            print(f"wrote {args.output}: {len(family)} sets over [{args.n}], k={args.k}")
    else:
        if args.json:
            print(serialize_family_json(family))
        else:
            sys.stdout.write(serialize_family(family))
    return 0


# ---------------------------------------------------------------------------
# verify


def _cmd_verify(args: argparse.Namespace, argv: list[str]) -> int:
    family = load_family(args.family)
    spec = _condition_spec(args)
    result = check_condition(family, spec, exact=not args.fast)
    if result.ok:
        payload = {
            "status": "ok",
            "min_pairsum": result.min_pairsum,
            "threshold": result.threshold,
        }
        if result.min_pairsum is None:
            payload["lower_bound"] = result.lower_bound
        payload["reason"] = result.reason
        if result.witness is not None:
            payload["witness_indices"] = list(result.witness)
            payload["witness_sets"] = [list(family[i].elements) for i in result.witness]
        _emit(payload)
        return 0
    violation = result.violation
    payload = {
        "status": "violation",
        "min_pairsum": result.min_pairsum,
        "threshold": result.threshold,
        "pair_sum": violation.pair_sum,
        "indices": list(violation.indices),
        "witness_sets": [list(family[i].elements) for i in violation.indices],
    }
    _emit(payload)
    return 1


# ---------------------------------------------------------------------------
# profile


def _cmd_profile(args: argparse.Namespace, argv: list[str]) -> int:
    if args.s is not None:
        if args.t not in (None, 1):
            return _die("the g-profile is defined at t=1; drop --t or pass --t 1")
        prof = g_profile(args.ell, args.s)
        which = "g"
    else:
        if args.t is None:
            return _die("profile requires --t (or --s for the g-profile)")
        prof = f_profile(args.t, args.ell)
        which = "f"
    payload = {
        "profile": which,
        "t": args.t if which == "f" else 1,
        "ell": args.ell,
        "s": args.s,
        "points": [{"x": pt.x, "value": pt.value} for pt in prof],
        "min_value": prof.min_value,
        "argmins": list(prof.argmins),
        "real_argmin": str(prof.real_argmin),
        "reference": prof.reference,
        "min_at_expected": prof.min_at_expected,
        "meets_reference": prof.meets_reference,
    }
    if args.json:
        _emit(payload)
        return 0
    width = max(5, *(len(str(pt.value)) for pt in prof))
    print(f"{'x':>3}  {'value':>{width}}")
    for pt in prof:
        print(f"{pt.x:>3}  {pt.value:>{width}}")
    argmins = ", ".join(str(x) for x in prof.argmins)
    print(f"min value {prof.min_value} at x in {{{argmins}}} (real argmin {prof.real_argmin})")
    expected = ", ".join(str(x) for x in prof.expected_argmins)
    print(f"min at expected x {{{expected}}}: {'yes' if prof.min_at_expected else 'no'}")
    print(f"reference value {prof.reference}: {'met' if prof.meets_reference else 'not met'}")
    return 0


# ---------------------------------------------------------------------------
# bound


_BOUND_ARGS = {
    "ekr": ("n", "k"),
    "t3": ("n", "k", "t"),
    "t5": ("n", "k", "ell"),
    "t6": ("n", "k", "t", "ell"),
    "t7": ("n", "k", "ell"),
    "t8": ("n", "k", "ell", "s"),
}


def _cmd_bound(args: argparse.Namespace, argv: list[str]) -> int:
    needed = _BOUND_ARGS[args.kind]
    kwargs = {}
    for name in needed:
        value = getattr(args, name)
        if value is None:
            return _die(f"bound --kind {args.kind} requires --{name}")
        kwargs[name] = value
    value = rhs_bound(args.kind, **kwargs)
    if args.json:
        _emit({"kind": args.kind, **kwargs, "value": value})
    else:
        print(value)
    return 0


# ---------------------------------------------------------------------------
# search


def _cmd_search(args: argparse.Namespace, argv: list[str]) -> int:
    t0 = time.perf_counter()
    params = GroundParams(args.n, args.k)
    spec = _condition_spec(args)
    incumbent = load_family(args.incumbent) if args.incumbent else None
    opts = SearchOptions(
        time_limit=args.time_limit,
        incumbent=incumbent,
        node_cap=args.node_cap,
        symmetry=args.symmetry,
        exhaustive=args.exhaustive,
    )
    result = max_family(params, spec, opts)
    payload = {
        "n": args.n,
        "k": args.k,
        "variant": spec.variant.value,
        "t": spec.t,
        "ell": spec.ell,
        "s": spec.slack,
        "threshold": threshold(spec),
        "size": result.size,
        "optimal": result.optimal,
        "bound": result.bound,
        "nodes": result.nodes,
        "elapsed_seconds": round(result.elapsed, 6),
        "best": _family_payload(result.best),
    }
    text = json.dumps(payload, indent=2) + "\n"
    sys.stdout.write(text)
    if args.output:
        _write_output(args.output, text)
        _write_manifest(
            args.output, "search", argv,
            {"variant": spec.variant.value, "t": spec.t, "ell": spec.ell, "s": spec.slack,
             "n": args.n, "k": args.k, "time_limit": args.time_limit,
             "node_cap": args.node_cap, "symmetry": args.symmetry},
            time.perf_counter() - t0,
        )
    return 0 if result.optimal else 3


# ---------------------------------------------------------------------------
# structure


def _cmd_structure(args: argparse.Namespace, argv: list[str]) -> int:
    family = load_family(args.family)
    if args.analysis == "sunflower":
        flower = find_sunflower(family, args.t, args.u)
        if flower is None:
            payload = {"found": False, "t": args.t, "u": args.u}
        else:
            payload = {
                "found": True,
                "t": args.t,
                "u": args.u,
                "kernel": list(flower.kernel),
                "member_indices": list(flower.member_indices),
                "petal_count": flower.petal_count,
            }
        _emit(payload)
        return 0
    if args.analysis == "matching":
        nu, witness = matching_number(family)
        _emit({"matching_number": nu, "witness_indices": list(witness)})
        return 0
    if args.analysis == "decompose":
        kernel = tuple(int(x) for x in args.kernel.split(","))
        dec = kernel_decompose(family, kernel)
        payload = {
            "kernel": list(dec.kernel),
            "sizes": {
                "kernel_full": len(dec.f_T_indices),
                "kernel_minus_one": {str(a): len(ix) for a, ix in dec.f_minus_indices.items()},
                "leftover": len(dec.leftover_indices),
            },
            "kernel_full_indices": list(dec.f_T_indices),
            "kernel_minus_one_indices": {str(a): list(ix) for a, ix in dec.f_minus_indices.items()},
            "leftover_indices": list(dec.leftover_indices),
        }
        _emit(payload)
        return 0
    # audit
    report = lemma_audit(family, args.t, args.ell)
    payload = {
        "case": report.case,
        "required_petals": report.required_petals,
        "kernel": list(report.kernel) if report.kernel is not None else None,
        "sunflower_member_indices": (
            list(report.sunflower.member_indices) if report.sunflower is not None else None
        ),
        "checks": [
            {
                "name": chk.name,
                "passed": chk.passed,
                "witness": list(chk.witness) if chk.witness is not None else None,
                "detail": chk.detail,
            }
            for chk in report.checks
        ],
        "passed": report.passed,
    }
    _emit(payload)
    if args.strict and report.passed is False:
        return 1
    return 0


# ---------------------------------------------------------------------------
# export


def _cmd_export(args: argparse.Namespace, argv: list[str]) -> int:
    t0 = time.perf_counter()
    params = GroundParams(args.n, args.k)
    spec = _condition_spec(args)
    if args.format == "ilp":
        text = export_ilp(params, spec, cap=args.cap)
    else:
        if args.target is None:
            return _die("export cnf requires --target (the family size to test)")
        text = export_cnf(params, spec, args.target, cap=args.cap)
    _write_output(args.output, text)
    _write_manifest(
        args.output, "export", argv,
        {"format": args.format, "n": args.n, "k": args.k,
         "variant": spec.variant.value, "t": spec.t, "ell": spec.ell, "s": spec.slack,
         "target": args.target, "cap": args.cap},
        time.perf_counter() - t0,
    )
    summary = {"output": args.output, "bytes": len(text.encode("utf-8")), "format": args.format}
    if args.json:
        _emit(summary)
    else:
        print(f"wrote {args.output} ({summary['bytes']} bytes, {args.format})")
    return 0


# ---------------------------------------------------------------------------
# report


_REPORT_COLUMNS = ("n", "k", "t", "ell", "s", "bound", "construction",
                   "solver", "optimal", "agree", "error")


def _report_row(values: tuple[int, ...], solve: bool, time_limit: float) -> dict:
    row = dict.fromkeys(_REPORT_COLUMNS)
    row["error"] = ""
    try:
        if len(values) == 4:
            n, k, t, ell = values
            row.update(n=n, k=k, t=t, ell=ell)
            bound = rhs_bound("t6", n=n, k=k, t=t, ell=ell)
            family = construct_thm6(n, k, t, ell)
            spec = ConditionSpec(t=t, ell=ell, variant=Variant.EQ4)
        elif len(values) == 5:
            n, k, t, ell, s = values
            if t != 1:
                raise EkrfError("rows with s are checked against the t=1 condition; use t=1")
            row.update(n=n, k=k, t=t, ell=ell, s=s)
            bound = rhs_bound("t8", n=n, k=k, ell=ell, s=s)
            family = construct_thm8(n, k, ell, s)
            spec = ConditionSpec(t=1, ell=ell, variant=Variant.EQ10, slack=s)
        else:
            raise EkrfError(f"grid entries need 4 or 5 numbers, got {len(values)}")
        row["bound"] = bound
        row["construction"] = len(family)
        if solve:
            result = max_family(GroundParams(n, k), spec,
                                SearchOptions(time_limit=time_limit, incumbent=family))
            row["solver"] = result.size
            row["optimal"] = result.optimal
            agree = row["construction"] == bound and result.size == bound
        else:
            agree = row["construction"] == bound
        row["agree"] = agree
    except EkrfError as exc:
        row["error"] = str(exc)
    return row


def _parse_grid(text: str) -> list[tuple[int, ...]]:
    grid = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        grid.append(tuple(int(x) for x in chunk.split(",")))
    return grid


def _render_cell(value) -> str:
    if value is None:
        return "-"
    if isinstance(value, bool):
        return "yes" if value else "no"
    return str(value)


def _cmd_report(args: argparse.Namespace, argv: list[str]) -> int:
    t0 = time.perf_counter()
    try:
        grid = _parse_grid(args.grid)
    except ValueError as exc:
        return _die(f"bad --grid: {exc}")
    rows = [_report_row(values, args.solve, args.time_limit) for values in grid]

    if args.csv:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(_REPORT_COLUMNS)
        for row in rows:
            writer.writerow(["" if row[c] is None else row[c] for c in _REPORT_COLUMNS])
        _write_output(args.csv, buf.getvalue())
        _write_manifest(
            args.csv, "report", argv,
            {"grid": args.grid, "solve": args.solve, "time_limit": args.time_limit},
            time.perf_counter() - t0,
        )

    if args.json:
        _emit({"rows": rows})
        return 0
    cells = [[_render_cell(row[c]) for c in _REPORT_COLUMNS] for row in rows]
    widths = [
        max(len(name), *(len(line[i]) for line in cells)) if cells else len(name)
        for i, name in enumerate(_REPORT_COLUMNS)
    ]
    print("  ".join(name.ljust(w) for name, w in zip(_REPORT_COLUMNS, widths)).rstrip())
    for line in cells:
        print("  ".join(cell.ljust(w) for cell, w in zip(line, widths)).rstrip())
    return 0


# ---------------------------------------------------------------------------
# parser


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--json", action="store_true", help="JSON output instead of text")
    parser.add_argument(
        "--seedless-deterministic", action="store_true",
        help="confirm deterministic operation (always on; the tool uses no randomness)",
    )
    parser.add_argument(
        "--threads", type=int, default=None,
        help="worker count (reserved; the current implementation is single-process; "
        "defaults to EKRF_THREADS when set)",
    )


def _add_condition_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--t", type=int, default=None, help="intersection parameter t")
    parser.add_argument("--ell", type=int, default=None, help="tuple size (defaults to 2 for pairwise)")
    parser.add_argument(
        "--variant", required=True, choices=["eq2", "eq3", "eq4", "eq10", "pairwise"],
        help="which pair-sum condition to use",
    )
    parser.add_argument("--s", type=int, default=None, help="slack parameter (eq10 only)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ekrf",
        description="Exact tools for k-uniform set families under pair-sum intersection conditions.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("construct", help="build a named extremal family")
    _add_common(p)
    p.add_argument("--variant", required=True, choices=sorted(_BUILDERS))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--t", type=int, default=None)
    p.add_argument("--ell", type=int, default=None)
    p.add_argument("--s", type=int, default=None)
    p.add_argument("--u", type=int, default=None, help="petal count (sunflower)")
    p.add_argument("-o", "--output", default=None, help="family file to write (.fam or .json)")
    p.set_defaults(func=_cmd_construct)

    p = sub.add_parser("verify", help="check a family file against a condition (JSON verdict)")
    _add_common(p)
    p.add_argument("--family", required=True, help="family file (.fam or .json)")
    _add_condition_flags(p)
    p.add_argument(
        "--fast", action="store_true",
        help="allow a decide-only check (min_pairsum may be null; a lower bound is reported)",
    )
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("profile", help="tabulate the f- or g-profile of threshold contributions")
    _add_common(p)
    p.add_argument("--t", type=int, default=None)
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--s", type=int, default=None, help="tabulate the g-profile at this slack")
    p.set_defaults(func=_cmd_profile)

    p = sub.add_parser("bound", help="evaluate a closed-form bound")
    _add_common(p)
    p.add_argument("--kind", required=True, choices=sorted(_BOUND_ARGS))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--t", type=int, default=None)
    p.add_argument("--ell", type=int, default=None)
    p.add_argument("--s", type=int, default=None)
    p.set_defaults(func=_cmd_bound)

    p = sub.add_parser("search", help="exact maximum-family search (JSON result)")
    _add_common(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    _add_condition_flags(p)
    p.add_argument("--time-limit", type=float, default=0.0, help="seconds; 0 = none")
    p.add_argument("--node-cap", type=int, default=0, help="search node cap; 0 = none")
    p.add_argument("--incumbent", default=None, help="family file used as a starting lower bound")
    p.add_argument("--symmetry", choices=["none", "element-order"], default="none")
    p.add_argument("--exhaustive", action="store_true",
                   help="disable pruning and visit every subfamily (tiny universes only)")
    p.add_argument("-o", "--output", default=None, help="write the JSON result here too")
    p.set_defaults(func=_cmd_search)

    p = sub.add_parser("structure", help="sunflowers, matchings, decompositions, audits (JSON)")
    _add_common(p)
    ssub = p.add_subparsers(dest="analysis", required=True)
    ps = ssub.add_parser("sunflower", help="find a sunflower with a given kernel size and petal count")
    ps.add_argument("--family", required=True)
    ps.add_argument("--t", type=int, required=True, help="kernel size")
    ps.add_argument("--u", type=int, required=True, help="petal count")
    ps.set_defaults(func=_cmd_structure)
    ps = ssub.add_parser("matching", help="maximum number of pairwise disjoint members")
    ps.add_argument("--family", required=True)
    ps.set_defaults(func=_cmd_structure)
    ps = ssub.add_parser("decompose", help="split members by overlap with a kernel set")
    ps.add_argument("--family", required=True)
    ps.add_argument("--kernel", required=True, help="comma-separated elements, e.g. 1,2")
    ps.set_defaults(func=_cmd_structure)
    ps = ssub.add_parser("audit", help="run the two-case structural audit")
    ps.add_argument("--family", required=True)
    ps.add_argument("--t", type=int, required=True)
    ps.add_argument("--ell", type=int, required=True)
    ps.add_argument("--strict", action="store_true", help="exit 1 when a case-1 check fails")
    ps.set_defaults(func=_cmd_structure)

    p = sub.add_parser("export", help="write an ILP (.lp) or CNF (.cnf) encoding of the search")
    _add_common(p)
    p.add_argument("format", choices=["ilp", "cnf"])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    _add_condition_flags(p)
    p.add_argument("--target", type=int, default=None,
                   help="cnf only: encode 'some feasible family has at least this many members'")
    p.add_argument("--cap", type=int, default=DEFAULT_TUPLE_CAP,
                   help="refuse when more qualifying tuples than this")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=_cmd_export)

    p = sub.add_parser("report", help="tabulate bound vs construction (vs solver) over a grid")
    _add_common(p)
    p.add_argument("--grid", required=True,
                   help="semicolon-separated tuples 'n,k,t,ell' or 'n,k,t,ell,s' (s-rows use t=1)")
    p.add_argument("--solve", action="store_true", help="also run the exact search per row")
    p.add_argument("--time-limit", type=float, default=0.0, help="per-row search time limit")
    p.add_argument("--csv", default=None, help="also write the table as CSV here")
    p.set_defaults(func=_cmd_report)

    return parser


def _resolve_threads(args: argparse.Namespace) -> int:
    value = getattr(args, "threads", None)
    if value is None:
        value = int(os.environ.get("EKRF_THREADS", "1"))
    if value < 1:
        raise EkrfError(f"--threads must be >= 1, got {value}")
    return value


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _resolve_threads(args)
        return args.func(args, argv)
    except CapExceeded as exc:
        return _die(str(exc))
    except EkrfError as exc:
        return _die(str(exc))
    except OSError as exc:
        return _die(str(exc))
    except ValueError as exc:
        return _die(str(exc))


if __name__ == "__main__":
    sys.exit(main())
