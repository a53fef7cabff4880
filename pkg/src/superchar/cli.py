"""Command-line front end: build groups, compute tables, run checks.

Exit codes: 0 success, 1 usage, 2 verification failure, 3 size guard
exceeded, 4 I/O error.  Identical invocations produce byte-identical
output files regardless of the parallelism degree.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .cyclotomic import CycloValue
from .errors import NonIntegralityError, ShapeError, SizeGuardError, SpringerUndefinedError
from .involution_group import GroupSpec, build_group, load_spec
from .orbits import (
    orbit_dump_lines,
    orbit_partition_dual,
    orbit_partition_u,
    two_sided_orbit_partition_g,
)
from .sct import (
    algebra_group_sct,
    alternate_theta,
    ambient_group,
    intersection_check,
    standard_theta,
    supercharacters,
    superclasses,
    verify_algebra_axioms,
    verify_axioms,
    verify_duality,
    verify_induction,
    verify_springer_independence,
    verify_structure,
    verify_subfield_independence,
    verify_theta_independence,
)
from .triangular import MirrorPoset
from .unitary import (
    degree_audit,
    ennola_degree_check,
    enumerate_labeled,
    enumerate_twisted,
    formula_grid_check,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VERIFY = 2
EXIT_GUARD = 3
EXIT_IO = 4


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _add_spec_args(sub):
    sub.add_argument("--spec", help="JSON spec file (overrides the inline flags)")
    sub.add_argument("--family", choices=["UT", "UO", "USp", "UU"])
    sub.add_argument("--n", type=int)
    sub.add_argument("--p", type=int)
    sub.add_argument("--e", type=int, default=1)
    sub.add_argument("--k", type=int, default=None)
    sub.add_argument("--poset", help="poset file (first line n, then 'i j' generators)")
    sub.add_argument("--force", action="store_true", help="override the size guards")
    sub.add_argument(
        "--threads",
        type=int,
        default=None,
        help="parallelism degree (default: SUPERCHAR_THREADS or 1)",
    )


def _spec_from_args(args) -> GroupSpec:
    if args.spec:
        return load_spec(args.spec)
    if not (args.family and args.n and args.p):
        raise _UsageError("need either --spec or --family/--n/--p")
    k = args.k if args.k is not None else (2 if args.family == "UU" else 1)
    poset = MirrorPoset.from_file(args.poset) if args.poset else None
    return GroupSpec(family=args.family, n=args.n, p=args.p, e=args.e, k=k, poset=poset)


def _threads(args) -> int:
    if args.threads is not None:
        n = args.threads
    else:
        n = int(os.environ.get("SUPERCHAR_THREADS", "1"))
    if n < 1:
        raise _UsageError("parallelism degree must be >= 1")
    return n


def _spec_json(spec: GroupSpec) -> dict:
    out = {"family": spec.family, "n": spec.n, "p": spec.p, "e": spec.e, "k": spec.k}
    if spec.poset is not None:
        out["poset_pairs"] = sorted(list(p) for p in spec.poset.pairs)
    return out


def _write_output(args, text: str):
    if getattr(args, "output", None):
        try:
            with open(args.output, "w") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"error: cannot write {args.output}: {exc}", file=sys.stderr)
            raise
    else:
        print(text, end="" if text.endswith("\n") else "\n")


# -- table -------------------------------------------------------------------


def _table_payload(spec, springer_name, theta_name, classes, rows) -> dict:
    return {
        "spec": _spec_json(spec),
        "springer": springer_name,
        "theta": theta_name,
        "superclasses": [
            {"rep": list(K.rep.serialize()), "size": K.size} for K in classes
        ],
        "rows": [
            {
                "lambda": list(r.lam),
                "n_lambda": r.n_lambda,
                "degree": r.degree,
                "values": [v.to_json() for v in r.values],
            }
            for r in rows
        ],
    }


def _table_csv(classes, rows) -> str:
    header = ["lambda", "n_lambda", "degree"] + [
        "K" + "_".join(str(x) for x in K.rep.serialize()) for K in classes
    ]
    lines = [",".join(header)]
    for r in rows:
        cells = ["|".join(str(c) for c in r.lam), str(r.n_lambda), str(r.degree)]
        cells += [v.to_string() for v in r.values]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def cmd_table(args) -> int:
    spec = _spec_from_args(args)
    threads = _threads(args)
    bg = build_group(spec, force=args.force)
    if spec.family == "UT":
        th = algebra_group_sct(bg, threads=threads)
        classes, rows = th.classes, th.rows
        theta_name = th.theta.name
        springer = "g-1"
    else:
        theta = alternate_theta(bg) if args.theta == "alternate" else standard_theta(bg)
        sct = superclasses(bg, args.springer, threads=threads)
        scht = supercharacters(bg, args.springer, theta, sc_table=sct, threads=threads)
        classes, rows = sct.classes, scht.rows
        theta_name = theta.name
        springer = args.springer
    if args.format == "csv":
        _write_output(args, _table_csv(classes, rows))
    else:
        payload = _table_payload(spec, springer, theta_name, classes, rows)
        _write_output(args, json.dumps(payload, indent=2) + "\n")
    return EXIT_OK


# -- verify ------------------------------------------------------------------


_INVOLUTION_CHECKS = [
    "structure",
    "axioms",
    "induction",
    "duality",
    "intersection",
    "springer-independence",
    "theta-independence",
]
_UNITARY_CHECKS = ["unitary-formula", "ennola-degrees", "degree-audit"]
_OPTIONAL_CHECKS = ["subfield-independence"]


def _run_check(name, bg, args, state) -> list:
    threads = _threads(args)

    def tables():
        if "tables" not in state:
            theta = (
                alternate_theta(bg) if args.theta == "alternate" else standard_theta(bg)
            )
            sct = superclasses(bg, args.springer, threads=threads)
            scht = supercharacters(bg, args.springer, theta, sc_table=sct, threads=threads)
            if args.inject_fault:
                row = scht.rows[min(1, len(scht.rows) - 1)]
                cid = min(1, len(row.values) - 1)
                row.values[cid] = row.values[cid] + CycloValue.integer(bg.tower.p, 1)
            state["tables"] = (sct, scht)
        return state["tables"]

    if name == "structure":
        return verify_structure(bg).results
    if name == "axioms":
        sct, scht = tables()
        return verify_axioms(bg, sct, scht).results
    if name == "induction":
        sct, scht = tables()
        return verify_induction(bg, sct, scht).results
    if name == "duality":
        return verify_duality(bg).results
    if name == "intersection":
        return intersection_check(bg, args.springer, threads=threads).results
    if name == "springer-independence":
        return verify_springer_independence(bg).results
    if name == "theta-independence":
        return verify_theta_independence(bg, args.springer).results
    if name == "unitary-formula":
        sct, scht = tables()
        return formula_grid_check(bg, sct, scht).results
    if name == "ennola-degrees":
        _, scht = tables()
        return ennola_degree_check(scht).results
    if name == "degree-audit":
        out = []
        from .sct import CheckResult

        rows = degree_audit(bg)
        for row in rows:
            out.append(CheckResult("degree-audit", None, row.line()))
        flagged = [r for r in rows if not r.all_match]
        out.append(
            CheckResult(
                "degree-audit-discrepancies",
                None,
                f"{len(flagged)} elementary degree formulas disagree with brute force"
                " (reported, not patched)",
            )
        )
        return out
    if name == "subfield-independence":
        return verify_subfield_independence(bg).results
    raise _UsageError(f"unknown check {name!r}")


def cmd_verify(args) -> int:
    spec = _spec_from_args(args)
    threads = _threads(args)
    bg = build_group(spec, force=args.force)
    if spec.family == "UT":
        if args.check and args.check not in ("axioms",):
            raise _UsageError("family UT supports only the 'axioms' check")
        th = algebra_group_sct(bg, threads=threads)
        results = verify_algebra_axioms(bg, th).results
    else:
        checks = list(_INVOLUTION_CHECKS)
        if spec.family == "UU":
            checks += _UNITARY_CHECKS
        if args.check:
            valid = checks + _OPTIONAL_CHECKS
            if args.check not in valid:
                raise _UsageError(
                    f"unknown or inapplicable check {args.check!r}; choose from {valid}"
                )
            checks = [args.check]
        state: dict = {}
        results = []
        for name in checks:
            results.extend(_run_check(name, bg, args, state))
    lines = [f"== verify {spec.label()} =="]
    lines += [r.line() for r in results]
    failed = [r for r in results if r.passed is False]
    lines.append(
        f"== {len(results) - len(failed)}/{len(results)} checks passed"
        + (f"; FAILED: {', '.join(r.name for r in failed)}" if failed else "")
    )
    _write_output(args, "\n".join(lines) + "\n")
    return EXIT_VERIFY if failed else EXIT_OK


# -- orbits ---------------------------------------------------------------------


def cmd_orbits(args) -> int:
    spec = _spec_from_args(args)
    threads = _threads(args)
    bg = build_group(spec, force=args.force)
    if args.space in ("u", "dual") and spec.family == "UT":
        raise _UsageError("family UT has no involution; use --space two-sided")
    if args.space == "u":
        oi = orbit_partition_u(bg, threads=threads)
        lines = orbit_dump_lines(oi)
    elif args.space == "dual":
        oi = orbit_partition_dual(bg, threads=threads)
        lines = orbit_dump_lines(oi)
    else:
        amb = ambient_group(bg) if spec.family != "UT" else bg
        oi = two_sided_orbit_partition_g(amb, threads=threads)
        lines = orbit_dump_lines(oi)
    _write_output(args, "\n".join(lines) + "\n")
    return EXIT_OK


# -- unitary-check -----------------------------------------------------------------


def cmd_unitary_check(args) -> int:
    spec = _spec_from_args(args)
    threads = _threads(args)
    if spec.family != "UU":
        raise _UsageError("unitary-check requires --family UU")
    bg = build_group(spec, force=args.force)
    theta = alternate_theta(bg) if args.theta == "alternate" else standard_theta(bg)
    sct = superclasses(bg, args.springer, threads=threads)
    scht = supercharacters(bg, args.springer, theta, sc_table=sct, threads=threads)
    lines = []
    grid = formula_grid_check(bg, sct, scht)
    lines += grid.lines()
    lines += ennola_degree_check(scht).lines()
    lines.append(f"== degree audit {bg.label()}")
    rows = degree_audit(bg)
    lines += [r.line() for r in rows]
    flagged = [r for r in rows if not r.all_match]
    lines.append(
        f"== {len(flagged)} printed degree formulas disagree with brute force"
        " (reported, not patched)"
    )
    _write_output(args, "\n".join(lines) + "\n")
    failed = [r for r in grid.results if r.passed is False]
    return EXIT_VERIFY if failed else EXIT_OK


# -- count-partitions ----------------------------------------------------------------


def cmd_count_partitions(args) -> int:
    spec = _spec_from_args(args)
    if spec.family == "UU":
        count = len(enumerate_twisted(spec.n, spec.tower))
        kind = "twisted"
    elif spec.family == "UT":
        count = enumerate_labeled(spec.n, spec.tower.size - 1)
        kind = "labeled"
    else:
        raise _UsageError("count-partitions supports families UU and UT")
    _write_output(args, f"{kind} set partitions of [{spec.n}]: {count}\n")
    return EXIT_OK


# -- entry point ------------------------------------------------------------------------


def build_parser() -> _Parser:
    parser = _Parser(prog="superchar", description=__doc__)
    subs = parser.add_subparsers(dest="command", required=True)

    t = subs.add_parser("table", help="compute and write a supercharacter table")
    _add_spec_args(t)
    t.add_argument("--springer", choices=["cayley", "log"], default="cayley")
    t.add_argument("--theta", choices=["standard", "alternate"], default="standard")
    t.add_argument("--format", choices=["json", "csv"], default="json")
    t.add_argument("--output", "-o")
    t.set_defaults(func=cmd_table)

    v = subs.add_parser("verify", help="run the named verification checks")
    _add_spec_args(v)
    v.add_argument("--springer", choices=["cayley", "log"], default="cayley")
    v.add_argument("--theta", choices=["standard", "alternate"], default="standard")
    v.add_argument("--check", help="run a single named check")
    v.add_argument("--output", "-o")
    v.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)
    v.set_defaults(func=cmd_verify)

    o = subs.add_parser("orbits", help="dump an orbit partition as JSON lines")
    _add_spec_args(o)
    o.add_argument("--space", choices=["u", "dual", "two-sided"], default="u")
    o.add_argument("--output", "-o")
    o.set_defaults(func=cmd_orbits)

    u = subs.add_parser(
        "unitary-check", help="closed-form value grid and degree audit (UU)"
    )
    _add_spec_args(u)
    u.add_argument("--springer", choices=["cayley", "log"], default="cayley")
    u.add_argument("--theta", choices=["standard", "alternate"], default="standard")
    u.add_argument("--output", "-o")
    u.set_defaults(func=cmd_unitary_check)

    c = subs.add_parser("count-partitions", help="count the indexing set partitions")
    _add_spec_args(c)
    c.set_defaults(func=cmd_count_partitions)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SizeGuardError as exc:
        print(f"size guard: {exc} (use --force to override)", file=sys.stderr)
        return EXIT_GUARD
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (NonIntegralityError, AssertionError) as exc:
        print(f"verification failure: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except (ValueError, ShapeError, SpringerUndefinedError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
