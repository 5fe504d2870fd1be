"""Command-line front end.

Subcommands: ``check`` (profile validation), ``verify`` (identity sweeps),
``hurwitz`` (evaluate one profile by one or more method), ``fit``
(solve an intersection table from the oracle), ``localize`` (per-piece
contribution report).

Exit codes: 0 success, 1 verification or mathematical failure, 2 usage
error.  All output is UTF-8 and byte-identical across runs for fixed
inputs.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from multiprocessing import Pool

from . import elsv, localize
from .charsym import DEFAULT_CHARACTER_BOUND
from .combi import EmptySpace, SpinProfile, coarse_root_degree, spin_bundle_degree, validate
from .errors import RelsvError
from .hurwitz import (
    DEFAULT_BRUTE_BRANCH_BOUND,
    DEFAULT_BRUTE_SIZE_BOUND,
    HurwitzOracle,
    HurwitzQuery,
)
from .ratcore import nonequivariant_limit

USAGE_ERROR = 2
MATH_FAILURE = 1


def _parse_mu(text: str) -> tuple[int, ...]:
    try:
        parts = tuple(int(x) for x in text.replace(" ", "").split(",") if x)
    except ValueError:
        raise argparse.ArgumentTypeError(f"cannot parse partition {text!r}")
    if not parts:
        raise argparse.ArgumentTypeError("partition must have at least one part")
    return parts


def _parse_config(path: str) -> dict[str, str]:
    out = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise argparse.ArgumentTypeError(f"bad config line: {line!r}")
            key, value = line.split("=", 1)
            out[key.strip().replace("-", "_")] = value.strip()
    return out


def _emit(rows: list[dict], columns: list[str], fmt: str, stream=None):
    stream = stream or sys.stdout
    if fmt == "json":
        json.dump(rows, stream, sort_keys=True)
        stream.write("\n")
    elif fmt == "csv":
        stream.write(",".join(columns) + "\n")
        for row in rows:
            stream.write(",".join(str(row.get(c, "")) for c in columns) + "\n")
    else:
        widths = {c: max(len(c), *(len(str(r.get(c, ""))) for r in rows)) if rows else len(c) for c in columns}
        stream.write("  ".join(c.ljust(widths[c]) for c in columns) + "\n")
        for row in rows:
            stream.write("  ".join(str(row.get(c, "")).ljust(widths[c]) for c in columns) + "\n")


def _oracle_from_args(args) -> HurwitzOracle:
    return HurwitzOracle(
        char_bound=args.char_bound,
        brute_size_bound=args.brute_size_bound,
        brute_branch_bound=args.brute_branch_bound,
    )


# ---------------------------------------------------------------------------
# check
# ---------------------------------------------------------------------------


def cmd_check(args) -> int:
    profile = validate(args.g, args.r, args.mu)
    obj = profile.to_json_obj()
    if args.format == "json":
        print(json.dumps(obj, sort_keys=True))
    else:
        for key in sorted(obj):
            print(f"{key}: {obj[key]}")
    return 0


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


def _verify_one(task) -> dict:
    g, r, mu, mutate = task
    p = validate(g, r, mu)
    assert isinstance(p, SpinProfile)
    identity = localize.check_identity(p, mutation=mutate)
    try:
        nonequivariant_limit(localize.hurwitz_class(p))
        limit_ok = True
    except RelsvError:
        limit_ok = False
    degree_ok = (
        p.r * spin_bundle_degree(p) == 2 * p.g - 2 - sum(p.a)
        and coarse_root_degree(p) == spin_bundle_degree(p) + sum(1 for x in p.mu if x % p.r == 0)
    )
    return {
        "g": g,
        "r": r,
        "mu": "+".join(map(str, mu)),
        "identity": identity,
        "limit": limit_ok,
        "degree": degree_ok,
    }


def _grid(args):
    import itertools

    for g in range(args.g_max + 1):
        for r in range(1, args.r_max + 1):
            for l in range(1, args.l_max + 1):
                for mu in itertools.product(range(1, args.mu_max + 1), repeat=l):
                    p = validate(g, r, mu)
                    if isinstance(p, SpinProfile):
                        yield (g, r, mu, args.mutate)


def cmd_verify(args) -> int:
    tasks = sorted(_grid(args))
    if args.workers > 1:
        with Pool(args.workers) as pool:
            rows = pool.map(_verify_one, tasks, chunksize=64)
    else:
        rows = [_verify_one(t) for t in tasks]
    columns = ["g", "r", "mu", "identity", "limit", "degree"]
    failures = [r for r in rows if not (r["identity"] and r["limit"] and r["degree"])]
    if args.summary_only:
        summary = [{
            "profiles": len(rows),
            "failures": len(failures),
        }]
        _emit(summary, ["profiles", "failures"], args.format)
    else:
        _emit(rows, columns, args.format)
    if failures:
        first = failures[0]
        print(
            f"FAIL: minimal failing profile g={first['g']} r={first['r']} mu={first['mu']}",
            file=sys.stderr,
        )
        return MATH_FAILURE
    return 0


# ---------------------------------------------------------------------------
# hurwitz
# ---------------------------------------------------------------------------


def cmd_hurwitz(args) -> int:
    profile = validate(args.g, args.r, args.mu)
    methods = (
        ["oracle", "elsv", "localize"]
        if args.method == "all"
        else [m.strip() for m in args.method.split(",") if m.strip()]
    )
    unknown = set(methods) - {"oracle", "elsv", "localize"}
    if unknown:
        print(f"unknown methods: {sorted(unknown)}", file=sys.stderr)
        return USAGE_ERROR

    rows = []
    if isinstance(profile, EmptySpace):
        for method in methods:
            rows.append({
                "g": args.g, "r": args.r, "mu": "+".join(map(str, args.mu)),
                "method": method, "H": "0", "valid": False,
            })
        _emit(rows, ["g", "r", "mu", "method", "H", "valid"], args.format)
        return 0

    oracle = _oracle_from_args(args)
    cache = elsv.TableCache(args.cache_dir)
    values: dict[str, Fraction] = {}
    try:
        for method in methods:
            if method == "oracle":
                values[method] = oracle.evaluate(HurwitzQuery(profile))
            elif method == "elsv":
                values[method] = elsv.evaluate(
                    profile, elsv.Backend.solve(), oracle=oracle, cache=cache
                )
            else:
                if profile.regime == "general":
                    table = cache.get(profile.g, profile.r, profile.a)
                    if table is None:
                        table = elsv.fit_table(profile.g, profile.r, profile.a, oracle)
                        cache.put(table)
                    values[method] = localize.integrate_with_table(profile, table)
                else:
                    values[method] = localize.hurwitz_scalar(profile)
    except RelsvError as exc:
        print(f"computation failed: {exc}", file=sys.stderr)
        return MATH_FAILURE

    agree = len(set(values.values())) == 1
    for method in methods:
        rows.append({
            "g": args.g, "r": args.r, "mu": "+".join(map(str, args.mu)),
            "method": method, "H": str(values[method]), "valid": True,
            "agree": agree,
        })
    _emit(rows, ["g", "r", "mu", "method", "H", "valid", "agree"], args.format)
    return 0 if agree else MATH_FAILURE


# ---------------------------------------------------------------------------
# fit
# ---------------------------------------------------------------------------


def cmd_fit(args) -> int:
    residues = args.residues
    a = tuple(args.r - 1 - (x % args.r) for x in residues)
    oracle = _oracle_from_args(args)
    try:
        table = elsv.fit_table(
            args.g, args.r, a, oracle, held_out=args.held_out, max_degree=args.char_bound
        )
    except RelsvError as exc:
        print(f"fit failed: {exc}", file=sys.stderr)
        return MATH_FAILURE
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(table.to_json_obj(), fh, sort_keys=True, indent=2)
            fh.write("\n")
    cache = elsv.TableCache(args.cache_dir)
    cache.put(table)
    rows = [
        {"b": "+".join(map(str, b)), "k": k, "value": str(v)}
        for (b, k), v in table.entries
    ]
    _emit(rows, ["b", "k", "value"], args.format)
    return 0


# ---------------------------------------------------------------------------
# localize
# ---------------------------------------------------------------------------


def cmd_localize(args) -> int:
    profile = validate(args.g, args.r, args.mu)
    if isinstance(profile, EmptySpace):
        print(json.dumps(profile.to_json_obj(), sort_keys=True))
        return 0
    report = localize.verify_identity(profile)
    if args.format == "json":
        print(json.dumps(report.to_json_obj(), sort_keys=True))
    else:
        obj = report.to_json_obj()
        for key in ("base", "vertex", "flag", "edge_twist"):
            print(f"{key}: {obj[key]}")
        for i, edge in enumerate(obj["edges"], start=1):
            print(f"edge_{i}: {edge}")
        print(f"combined_from_lemmas: {obj['combined_from_lemmas']}")
        print(f"closed_form: {obj['closed_form']}")
        print(f"identity_holds: {report.identity_holds}")
    return 0 if report.identity_holds else MATH_FAILURE


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="relsv",
        description="Exact spin Hurwitz numbers by localization, with an independent oracle.",
    )
    parser.add_argument("--config", help="key=value file supplying option defaults")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp, profile=True):
        sp.add_argument("--format", choices=["json", "csv", "text"], default="text")
        sp.add_argument("--cache-dir", default=None, help="intersection table cache directory")
        sp.add_argument("--char-bound", type=int, default=DEFAULT_CHARACTER_BOUND)
        sp.add_argument("--brute-size-bound", type=int, default=DEFAULT_BRUTE_SIZE_BOUND)
        sp.add_argument("--brute-branch-bound", type=int, default=DEFAULT_BRUTE_BRANCH_BOUND)
        if profile:
            sp.add_argument("--g", type=int, required=True)
            sp.add_argument("--r", type=int, required=True)

    sp = sub.add_parser("check", help="validate a profile and print its derived data")
    common(sp)
    sp.add_argument("--mu", type=_parse_mu, required=True)
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("verify", help="run the identity suite over a profile grid")
    common(sp, profile=False)
    sp.add_argument("--g-max", type=int, default=2)
    sp.add_argument("--l-max", type=int, default=3)
    sp.add_argument("--r-max", type=int, default=4)
    sp.add_argument("--mu-max", type=int, default=8)
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--summary-only", action="store_true")
    sp.add_argument(
        "--mutate", action="store_true",
        help="test hook: perturb the combined class so every identity fails",
    )
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("hurwitz", help="evaluate one Hurwitz number by several routes")
    common(sp)
    sp.add_argument("--mu", type=_parse_mu, required=True)
    sp.add_argument("--method", default="all", help="all or comma list of oracle,elsv,localize")
    sp.set_defaults(func=cmd_hurwitz)

    sp = sub.add_parser("fit", help="fit an intersection table from the oracle")
    common(sp)
    sp.add_argument("--residues", type=_parse_mu, required=True,
                    help="comma list of part residues mod r (fixes the component)")
    sp.add_argument("--held-out", type=int, default=3)
    sp.add_argument("--out", default=None, help="write the table JSON here")
    sp.set_defaults(func=cmd_fit)

    sp = sub.add_parser("localize", help="print the per-piece contribution report")
    common(sp)
    sp.add_argument("--mu", type=_parse_mu, required=True)
    sp.set_defaults(func=cmd_localize)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args, remaining = parser.parse_known_args(argv)
    if remaining:
        parser.error(f"unrecognized arguments: {' '.join(remaining)}")
    if args.config:
        defaults = _parse_config(args.config)
        # config values fill in anything the command line left at its default
        parser.set_defaults(**{k: v for k, v in defaults.items()})
        args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, argparse.ArgumentTypeError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except RelsvError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return MATH_FAILURE


if __name__ == "__main__":
    sys.exit(main())
