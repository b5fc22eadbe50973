"""Command line interface: ``mumford <command> ...``.

Every report is JSON with ``"schema": "v1"``.  Exit status is 0 on success,
1 when the mathematics says no (non-integral genus, fixed points outside
Q_p, ...), and 2 for bad input; errors go to stderr as JSON.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import warnings
from fractions import Fraction

from . import bttree as bt
from . import enumeration as en
from . import graphs, groups, quotients, subrao, verification
from .padic import InsufficientPrecision

SCHEMA = "v1"


class UsageError(Exception):
    pass


MATH_ERRORS = (
    graphs.NonIntegralGenus,
    quotients.DisconnectedCover,
    quotients.IncompatibleEdge,
    bt.ExtensionRequired,
    bt.NotAStabilizer,
    bt.NotEllipticOrParabolic,
    InsufficientPrecision,
    en.NoPositiveVolume,
)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def emit(obj, out=None):
    out = sys.stdout if out is None else out
    out.write(json.dumps({"schema": SCHEMA, **obj}, sort_keys=False) + "\n")


def _read_json(path: str):
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc


def load_graph(path: str) -> graphs.DecoratedGraph:
    try:
        g = graphs.DecoratedGraph.from_json(_read_json(path))
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"malformed graph: {exc}") from exc
    problems = graphs.validate(g)
    if problems:
        raise UsageError("invalid graph: " + "; ".join(problems))
    return g


def load_quotient(path: str) -> quotients.AbelianQuotient:
    try:
        return quotients.AbelianQuotient.from_json(_read_json(path))
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"malformed quotient: {exc}") from exc


def default_jobs() -> int:
    raw = os.environ.get("MUMFORD_JOBS", "1")
    try:
        jobs = int(raw)
    except ValueError:
        raise UsageError(f"MUMFORD_JOBS must be an integer, got {raw!r}")
    if jobs < 1:
        raise UsageError("MUMFORD_JOBS must be positive")
    return jobs


# -- graph ------------------------------------------------------------------


def cmd_graph(args):
    g = load_graph(args.graph)
    if args.graph_cmd == "volume":
        emit({"mu": graphs.rat_str(graphs.volume(g)), "tree_mu": graphs.rat_str(graphs.tree_volume(g))})
    elif args.graph_cmd == "curvature":
        curv = graphs.curvatures(g)
        emit({
            "curvatures": {v: graphs.rat_str(c) for v, c in curv.items()},
            "total": graphs.rat_str(sum(curv.values(), Fraction(0))),
        })
    elif args.graph_cmd == "reduce":
        r = graphs.reduce(g)
        emit({"graph": r.to_json(), "mu": graphs.rat_str(graphs.volume(r)), "reduced": graphs.is_reduced(r)})
    elif args.graph_cmd == "genus":
        if args.quotient:
            rep = _gauss_bonnet(g, args.quotient)
            emit({"genus": rep.genus, "index": rep.quotient_order, "mu": graphs.rat_str(rep.volume), "method": "cover"})
        elif args.index is not None:
            with warnings.catch_warnings(record=True) as caught:
                warnings.simplefilter("always", graphs.LowGenusWarning)
                genus = graphs.genus_from_index(g, args.index)
            out = {"genus": genus, "index": args.index, "mu": graphs.rat_str(graphs.volume(g)), "method": "formula"}
            if caught:
                out["warnings"] = [str(w.message) for w in caught]
            emit(out)
        else:
            raise UsageError("graph genus needs --index or --quotient")
    elif args.graph_cmd == "check-gb":
        if not args.quotient:
            raise UsageError("check-gb needs --quotient")
        rep = _gauss_bonnet(g, args.quotient)
        emit(rep.to_json())
        return 0 if rep.holds else 1
    return 0


def _gauss_bonnet(g, path):
    q = load_quotient(path)
    try:
        return quotients.check_gauss_bonnet(g, q)
    except (quotients.NonInjectiveEmbedding, quotients.MissingEmbedding, ValueError) as exc:
        if isinstance(exc, MATH_ERRORS):
            raise
        raise UsageError(f"bad quotient: {exc}") from exc


# -- enumerate ---------------------------------------------------------------


def cmd_enumerate(args):
    jobs = args.jobs or default_jobs()
    modes = [m for m in ("census", "min_volume", "verify_bound") if getattr(args, m)]
    if args.scan_l is not None:
        modes.append("scan")
    if len(modes) > 1:
        raise UsageError("choose at most one of --census, --min-volume, --verify-bound, --scan-l")
    max_star = args.max_star
    if modes == ["census"] and max_star is None:
        max_star = 6
    try:
        params = en.EnumParams(args.p, args.max_vertices, args.max_order, max_star)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc

    mode = modes[0] if modes else "trees"
    if mode == "census":
        emit(en.curvature_census(params).to_json())
    elif mode == "min_volume":
        mu, wits = en.min_positive_volume(params, jobs)
        emit({"min": graphs.rat_str(mu), "witnesses": [en.short_name(g) for g in wits]})
    elif mode == "verify_bound":
        rep = en.verify_main_bound(params, jobs)
        for rec in rep.records:
            emit(rec)
        emit({"summary": rep.to_json()})
    elif mode == "scan":
        if args.s is None:
            raise UsageError("--scan-l needs --s")
        try:
            rep = en.elementary_abelian_scan(params, args.scan_l, args.s, jobs)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        for rec in rep.records:
            emit(rec)
        summary = rep.to_json()
        summary.pop("records")
        emit({"summary": summary})
    else:
        for g in en.enumerate_trees(params, jobs):
            emit(en.tree_record(g))
    return 0


# -- bt -------------------------------------------------------------------------


def _matrix(text, flag="--matrix"):
    if text is None:
        raise UsageError(f"{flag} is required")
    try:
        return bt.ProjMat.parse(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad matrix {text!r}: {exc}") from exc


def _ends(text, flag):
    if text is None:
        raise UsageError(f"{flag} is required")
    parts = [x for x in text.split(",")]
    if len(parts) != 2:
        raise UsageError(f"{flag} expects two ends separated by a comma")
    try:
        return tuple(bt.parse_end(x) for x in parts)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad end in {text!r}: {exc}") from exc


def _window(text):
    if text is None:
        return (-4, 4)
    try:
        if ":" in text:
            lo, hi = text.split(":")
            return (int(lo), int(hi))
        r = int(text)
    except ValueError:
        raise UsageError(f"bad window {text!r}; use R or LO:HI")
    return (-r, r)


def _radius(text):
    lo, hi = _window(text)
    return max(-lo, hi)


def cmd_bt(args):
    p = args.p
    c = args.bt_cmd
    if c == "classify":
        emit(bt.classify(_matrix(args.matrix), p).to_json())
    elif c == "fixed-points":
        M = _matrix(args.matrix)
        if M.is_scalar():
            raise UsageError("scalar matrices fix every end")
        pts = bt.fixed_points(M, p, args.precision)
        emit({"fixed_points": [bt.end_str(z) for z in pts], "precision": args.precision})
    elif c == "geodesic":
        e1, e2 = _ends(args.ends, "--ends")
        lo, hi = _window(args.window)
        path = bt.geodesic(e1, e2, (lo, hi), p)
        emit({"vertices": [str(v) for v in path], "window": [lo, hi]})
    elif c == "intersect":
        g1, g2 = _ends(args.g1, "--g1"), _ends(args.g2, "--g2")
        emit(bt.geodesic_intersection(g1, g2, _window(args.window), p).to_json())
    elif c == "mirror":
        M = _matrix(args.matrix)
        r = _radius(args.window)
        m = bt.mirror(M, p, r)
        emit({**m.to_json(), "radius": r})
    elif c == "rho":
        M = _matrix(args.matrix)
        try:
            v = bt.parse_vertex(args.vertex, p) if args.vertex else bt.base_vertex(p)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        img = bt.rho(v, M, p)
        emit({"vertex": str(v), "rho": list(img), "in_kernel": img == (1, 0, 0, 1)})
    elif c == "pair":
        M1, M2 = _matrix(args.matrix, "--matrix"), _matrix(args.matrix2, "--matrix2")
        emit(bt.pair_type(M1, M2, p, _radius(args.window)).to_json())
    return 0


# -- subrao / verify -----------------------------------------------------------


def cmd_subrao(args):
    if args.r < 1:
        raise UsageError("--r must be at least 1")
    try:
        c = None if args.c is None else Fraction(args.c)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"bad --c value {args.c!r}")
    rep = subrao.subrao_bound_report(args.p, args.r, c)
    if args.format == "table":
        print(rep.table())
    else:
        emit(rep.to_json())
    return 0


def cmd_verify(args):
    jobs = args.jobs or default_jobs()
    only = set(args.only) if args.only else None
    results = verification.run_all(only, jobs)
    if args.format == "table":
        for r in results:
            print(r.line())
    else:
        out = {"criteria": [r.to_json() for r in results], "passed": all(r.passed for r in results)}
        if only is None or 10 in only:
            out["findings"] = verification.findings()
        emit(out)
    return 0 if all(r.passed for r in results) else 1


# -- parser ---------------------------------------------------------------------


def _prime(text):
    try:
        p = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer")
    if not groups.is_prime(p):
        raise argparse.ArgumentTypeError(f"{p} is not prime")
    return p


def _positive(text):
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer")
    if n < 1:
        raise argparse.ArgumentTypeError(f"{n} is not positive")
    return n


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mumford", description="Graphs of groups, Bruhat-Tits trees and Mumford curve automorphisms.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("graph", help="volume, curvature, reduction and genus of a graph JSON file")
    g.add_argument("graph_cmd", choices=["genus", "volume", "curvature", "reduce", "check-gb"])
    g.add_argument("graph", help="graph JSON file, or - for stdin")
    g.add_argument("--index", type=_positive)
    g.add_argument("--quotient", help="quotient JSON file with factors and embeddings")
    g.set_defaults(func=cmd_graph)

    e = sub.add_parser("enumerate", help="enumerate reduced admissible trees")
    e.add_argument("--p", type=_prime, required=True)
    e.add_argument("--max-vertices", type=_positive, default=4)
    e.add_argument("--max-order", type=_positive, default=12)
    e.add_argument("--max-star", type=_positive)
    e.add_argument("--census", action="store_true")
    e.add_argument("--min-volume", action="store_true")
    e.add_argument("--verify-bound", action="store_true")
    e.add_argument("--scan-l", type=_prime)
    e.add_argument("--s", type=_positive)
    e.add_argument("--jobs", type=_positive)
    e.set_defaults(func=cmd_enumerate)

    b = sub.add_parser("bt", help="Bruhat-Tits tree computations")
    b.add_argument("bt_cmd", choices=["classify", "fixed-points", "geodesic", "intersect", "mirror", "rho", "pair"])
    b.add_argument("--p", type=_prime, required=True)
    b.add_argument("--matrix")
    b.add_argument("--matrix2")
    b.add_argument("--ends", help="two ends for geodesic, e.g. '0,inf'")
    b.add_argument("--g1")
    b.add_argument("--g2")
    b.add_argument("--vertex", help="vertex for rho, e.g. '(n=1,u=0)'")
    b.add_argument("--window", help="radius R or level range LO:HI")
    b.add_argument("--precision", type=_positive, default=10)
    b.set_defaults(func=cmd_bt)

    s = sub.add_parser("subrao", help="report for the curve (y^q-y)(x^q-x)=c")
    s.add_argument("--p", type=_prime, required=True)
    s.add_argument("--r", type=int, default=1)
    s.add_argument("--c", help="curve parameter, recorded only (e.g. 1/3)")
    s.add_argument("--format", choices=["json", "table"], default="json")
    s.set_defaults(func=cmd_subrao)

    v = sub.add_parser("verify", help="run the acceptance checks")
    v.add_argument("--only", type=int, nargs="+", choices=sorted(verification.CRITERIA))
    v.add_argument("--jobs", type=_positive)
    v.add_argument("--format", choices=["json", "table"], default="json")
    v.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        emit({"error": "UsageError", "message": str(exc)}, sys.stderr)
        return 2
    except MATH_ERRORS as exc:
        emit({"error": type(exc).__name__, "message": str(exc)}, sys.stderr)
        return 1
    except groups.InadmissibleGroup as exc:
        emit({"error": "InadmissibleGroup", "message": str(exc)}, sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
