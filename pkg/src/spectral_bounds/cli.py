"""Command-line entry point: ``spectral-bounds <command> ...``.

Exit codes: 0 success, 1 an inequality check was violated, 2 input or usage
error, 3 resource or numeric failure, 4 a check could not be certified.
"""
from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .bounds import compare_report, evaluate, search_best_family, verify_dirichlet, verify_main
from .errors import InputError, NumericError, ResourceError, SemanticsError
from .generators import (MeshSpec, chain_of_cliques, mesh_Ma, mesh_domain_with_boundary,
                         random_weighted_graph)
from .graph_core import format_graph_tsv, read_family_json, read_graph_tsv, write_family_json, write_graph_tsv
from .multiway import multiway_constant
from .p_variational import brute_force_nu, nu_upper
from .reporting import FAIL, INCONCLUSIVE, PASS, SCHEMA_VERSION, dumps, to_jsonable
from .spectral import dirichlet_spectrum, full_spectrum, partial_spectrum
from .verify import SUITES, run_suite

EXIT_OK, EXIT_VIOLATED, EXIT_INPUT, EXIT_RESOURCE, EXIT_INCONCLUSIVE = 0, 1, 2, 3, 4
DEFAULT_SEED = 7


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise InputError(f"{self.prog}: {message}")


def _vertex_list(text: str):
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated vertex ids, got {text!r}") from None


def _add_output(p):
    p.add_argument("--format", choices=("json", "table"), default="json")
    p.add_argument("--report", dest="report_out", metavar="PATH", help="write the report here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="spectral-bounds", description="Eigenvalue upper bounds from separated subset families.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    gen = sub.add_parser("gen", help="generate graphs")
    gsub = gen.add_subparsers(dest="kind", required=True, parser_class=_Parser)
    g = gsub.add_parser("chain", help="chain of cliques")
    g.add_argument("--k", type=int, required=True)
    g.add_argument("--clique", type=int, required=True)
    g.add_argument("--path", type=int, required=True)
    g = gsub.add_parser("ma", help="comb mesh M_a")
    g.add_argument("--k", type=int, required=True)
    g.add_argument("--a", type=float, required=True)
    g.add_argument("--h", type=float, required=True)
    g.add_argument("--which", choices=("A", "B"), default="A", help="family written to --family")
    g = gsub.add_parser("mesh", help="mesh of a domain with boundary")
    g.add_argument("--shape", choices=("square", "rectangle", "disk"), required=True)
    g.add_argument("--h", type=float, required=True)
    g.add_argument("--width", type=float, default=1.0)
    g.add_argument("--height", type=float, default=1.0)
    g.add_argument("--radius", type=float, default=1.0)
    g = gsub.add_parser("random", help="seeded random connected graph")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--edge-prob", type=float, required=True)
    g.add_argument("--weights", choices=("unit", "uniform", "exponential"), default="uniform")
    g.add_argument("--seed", type=int, default=DEFAULT_SEED)
    for g in gsub.choices.values():
        g.add_argument("--out", metavar="PATH", help="graph TSV path (stdout when omitted)")
        g.add_argument("--family", metavar="PATH", help="family/boundary JSON path")
        _add_output(g)

    s = sub.add_parser("spectrum", help="Laplacian spectrum")
    s.add_argument("--graph", required=True)
    s.add_argument("--k", type=int, help="only lambda_0..lambda_k")
    s.add_argument("--vectors", action="store_true")
    s.add_argument("--omega", type=_vertex_list, help="Dirichlet domain")
    s.add_argument("--clamp", type=_vertex_list, help="clamped vertices (default: vertex boundary)")
    _add_output(s)

    s = sub.add_parser("poincare", help="p-Poincare constants")
    s.add_argument("--graph", required=True)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--p", type=float, default=2.0)
    s.add_argument("--flavor", choices=("neumann", "modified", "dirichlet"), default="neumann")
    mx = s.add_mutually_exclusive_group()
    mx.add_argument("--grid-levels", type=int, help="brute-force oracle on this grid (tiny graphs)")
    mx.add_argument("--restarts", type=int, help="random restarts of the minimizer")
    s.add_argument("--seed", type=int, default=DEFAULT_SEED)
    s.add_argument("--omega", type=_vertex_list)
    s.add_argument("--clamp", type=_vertex_list)
    _add_output(s)

    b = sub.add_parser("bound", help="subset-family bounds")
    bsub = b.add_subparsers(dest="action", required=True, parser_class=_Parser)
    x = bsub.add_parser("eval")
    x.add_argument("--graph", required=True)
    x.add_argument("--family", required=True)
    x.add_argument("--p", type=float, default=2.0)
    x.add_argument("--verify", action="store_true", help="check against the exact p = 2 spectrum")
    _add_output(x)
    x = bsub.add_parser("search")
    x.add_argument("--graph", required=True)
    x.add_argument("--k", type=int, required=True)
    x.add_argument("--mode", choices=("exhaustive", "greedy", "anneal"), default="greedy")
    x.add_argument("--budget", type=float, default=1e6)
    x.add_argument("--seed", type=int, default=DEFAULT_SEED)
    x.add_argument("--save-family", metavar="PATH")
    _add_output(x)
    x = bsub.add_parser("verify")
    x.add_argument("--graph")
    x.add_argument("--family")
    x.add_argument("--exhaustive", action="store_true", help="exhaustive sweep over random small graphs")
    x.add_argument("--max-v", type=int, default=9)
    x.add_argument("--graphs", type=int, default=300)
    x.add_argument("--seed", type=int, default=DEFAULT_SEED)
    _add_output(x)

    c = sub.add_parser("cheeger", help="multiway Cheeger constants")
    c.add_argument("action", nargs="?", choices=("compute", "verify"), default="compute")
    c.add_argument("--graph")
    c.add_argument("--k", type=int, default=1)
    c.add_argument("--mode", choices=("exhaustive", "heuristic"), default="exhaustive")
    c.add_argument("--partition", action="store_true", help="hat I_k (sets must partition V)")
    c.add_argument("--sweep", type=int, metavar="MAX_V", help="verify: sweep graphs up to this size")
    c.add_argument("--graphs", type=int, default=40)
    c.add_argument("--seed", type=int, default=DEFAULT_SEED)
    _add_output(c)

    v = sub.add_parser("verify", help="verification suites")
    v.add_argument("--suite", choices=SUITES + ("all",), default="all")
    v.add_argument("--seed", type=int, default=DEFAULT_SEED)
    v.add_argument("--full", action="store_true", help="acceptance scale")
    v.add_argument("--exhaustive", action="store_true", help="alias for --full")
    v.add_argument("--max-v", type=int, help="vertex cap for enumeration suites")
    v.add_argument("--graphs", type=int, help="number of random graphs")
    _add_output(v)

    m = sub.add_parser("compare", help="compare the main bound with CGY and Gozlan-Herry")
    m.add_argument("--graph", required=True)
    m.add_argument("--family", required=True)
    m.add_argument("--p", type=float, default=2.0)
    m.add_argument("--c", type=float, help="Gozlan-Herry constant (default log 5 / 4)")
    _add_output(m)
    return ap


# -- helpers ---------------------------------------------------------------------

def _load_graph(path):
    try:
        return read_graph_tsv(path)
    except OSError as exc:
        raise InputError(f"--graph {path}: {exc.strerror}") from None
    except InputError as exc:
        raise InputError(f"--graph {path}: {exc}") from None


def _load_family(path, g):
    try:
        return read_family_json(path, g)
    except OSError as exc:
        raise InputError(f"--family {path}: {exc.strerror}") from None
    except InputError as exc:
        raise InputError(f"--family {path}: {exc}") from None


def _exit_for(status: str) -> int:
    return {PASS: EXIT_OK, FAIL: EXIT_VIOLATED, INCONCLUSIVE: EXIT_INCONCLUSIVE}.get(status, EXIT_OK)


def _flatten(obj, prefix=""):
    if isinstance(obj, dict):
        for k in sorted(obj):
            yield from _flatten(obj[k], f"{prefix}.{k}" if prefix else str(k))
    elif isinstance(obj, list) and obj and all(isinstance(x, dict) for x in obj):
        for i, x in enumerate(obj):
            yield from _flatten(x, f"{prefix}[{i}]")
    else:
        yield prefix, obj


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.6g}"
    if isinstance(v, list):
        return "[" + ", ".join(_fmt(x) for x in v) + "]"
    return str(v)


def format_table(result) -> str:
    """Aligned two-column key/value rendering of a nested report."""
    if hasattr(result, "to_table"):
        return result.to_table()
    rows = list(_flatten(to_jsonable(result)))
    width = max((len(k) for k, _ in rows), default=0)
    return "".join(f"{k.ljust(width)}  {_fmt(v)}\n" for k, v in rows)


def _config(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("format", "report_out")}


def _emit(args, result, out) -> None:
    if args.format == "table":
        text = format_table(result)
    else:
        payload = result.to_json() if hasattr(result, "to_json") else result
        text = dumps({"schema_version": SCHEMA_VERSION, "toolkit_version": __version__,
                      "config": _config(args), "result": payload}) + "\n"
    if args.report_out:
        with open(args.report_out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        out.write(text)


# -- commands -------------------------------------------------------------------

def _cmd_gen(args, out):
    boundary = None
    if args.kind == "chain":
        g, fam = chain_of_cliques(args.k, args.clique, args.path)
    elif args.kind == "ma":
        g, A, B = mesh_Ma(args.k, args.a, args.h)
        fam = A if args.which == "A" else B
    elif args.kind == "mesh":
        g, boundary = mesh_domain_with_boundary(MeshSpec(args.shape, args.h, width=args.width,
                                                         height=args.height, radius=args.radius))
        fam = None
    else:
        g = random_weighted_graph(args.n, args.edge_prob, args.weights, seed=args.seed)
        fam = None
    if args.family:
        if fam is not None:
            write_family_json(fam, args.family, boundary)
        elif boundary is not None:
            with open(args.family, "w", encoding="utf-8") as fh:
                json.dump({"sets": [], "boundary": sorted(boundary)}, fh)
                fh.write("\n")
        else:
            raise InputError("--family: this generator produces no family")
    if not args.out:
        out.write(format_graph_tsv(g))
        return EXIT_OK
    write_graph_tsv(g, args.out)
    summary = {"vertices": g.n, "edges": int(g.edges[0].size), "volume": g.volume, "spacing": g.spacing}
    if fam is not None:
        summary["family"] = fam.to_json(boundary)
        summary["separation"] = fam.separation if len(fam) >= 2 else None
    if boundary is not None:
        summary["boundary_size"] = len(boundary)
    _emit(args, summary, out)
    return EXIT_OK


def _cmd_spectrum(args, out):
    g = _load_graph(args.graph)
    if args.omega is not None:
        res = dirichlet_spectrum(g, args.omega, clamp=args.clamp, k=args.k)
    elif args.clamp is not None:
        raise InputError("--clamp requires --omega")
    elif args.k is not None and args.k + 1 < g.n:
        res = partial_spectrum(g, args.k)
    else:
        res = full_spectrum(g, vectors=args.vectors)
    _emit(args, res.to_json(include_vectors=args.vectors), out)
    return EXIT_OK


def _cmd_poincare(args, out):
    g = _load_graph(args.graph)
    if args.grid_levels is not None:
        est = brute_force_nu(g, args.k, args.p, args.flavor, args.grid_levels, omega=args.omega, clamp=args.clamp)
    else:
        est = nu_upper(g, args.k, args.p, args.flavor, omega=args.omega, clamp=args.clamp,
                       restarts=16 if args.restarts is None else args.restarts, seed=args.seed)
    _emit(args, est, out)
    return EXIT_OK


def _cmd_bound(args, out):
    if args.action == "eval":
        g = _load_graph(args.graph)
        fam, boundary = _load_family(args.family, g)
        rep = evaluate(fam, args.p, boundary=boundary, verify=args.verify)
        _emit(args, rep, out)
        return _exit_for(rep.verification["status"]) if rep.verification else EXIT_OK
    if args.action == "search":
        g = _load_graph(args.graph)
        fam, rep = search_best_family(g, args.k, args.mode, args.budget, args.seed)
        if args.save_family:
            write_family_json(fam, args.save_family)
        _emit(args, rep, out)
        return EXIT_OK
    if args.exhaustive:
        if args.graph or args.family:
            raise InputError("--exhaustive cannot be combined with --graph/--family")
        rep = run_suite("main", args.seed, full=True, max_v=args.max_v, n_graphs=args.graphs)
        _emit(args, rep, out)
        return _exit_for(rep["status"])
    if not (args.graph and args.family):
        raise InputError("bound verify needs --graph and --family, or --exhaustive")
    g = _load_graph(args.graph)
    fam, boundary = _load_family(args.family, g)
    rep = verify_main(fam) if boundary is None else verify_dirichlet(fam, boundary)
    _emit(args, rep.to_json(), out)
    return _exit_for(rep.status)


def _cmd_cheeger(args, out):
    if args.action == "verify":
        if args.graph:
            raise InputError("cheeger verify takes --sweep, not --graph")
        rep = run_suite("multiway", args.seed, full=True, max_v=args.sweep or 8, n_graphs=args.graphs)
        _emit(args, rep, out)
        return _exit_for(rep["status"])
    if not args.graph:
        raise InputError("cheeger needs --graph")
    g = _load_graph(args.graph)
    prof = multiway_constant(g, args.k, args.mode, partition_required=args.partition, seed=args.seed)
    _emit(args, prof, out)
    return EXIT_OK


def _cmd_verify(args, out):
    overrides = {}
    if args.suite in ("main", "dirichlet", "multiway", "sandwich") and args.max_v is not None:
        overrides["max_v"] = args.max_v
    elif args.max_v is not None:
        raise InputError(f"--max-v does not apply to suite {args.suite!r}")
    if args.graphs is not None:
        if args.suite not in ("main", "dirichlet", "multiway", "sandwich"):
            raise InputError(f"--graphs does not apply to suite {args.suite!r}")
        overrides["n_graphs"] = args.graphs
    rep = run_suite(args.suite, args.seed, full=args.full or args.exhaustive, **overrides)
    _emit(args, rep, out)
    return _exit_for(rep["status"])


def _cmd_compare(args, out):
    g = _load_graph(args.graph)
    fam, boundary = _load_family(args.family, g)
    if boundary is not None:
        raise InputError("--family: compare works on Neumann families (no boundary)")
    kwargs = {} if args.c is None else {"c": args.c}
    _emit(args, compare_report(fam, args.p, **kwargs), out)
    return EXIT_OK


_COMMANDS = {"gen": _cmd_gen, "spectrum": _cmd_spectrum, "poincare": _cmd_poincare, "bound": _cmd_bound,
             "cheeger": _cmd_cheeger, "verify": _cmd_verify, "compare": _cmd_compare}


def run(argv=None, out=None, err=None) -> int:
    """Parse ``argv``, run the command and return the exit code."""
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    try:
        args = build_parser().parse_args(argv)
        return _COMMANDS[args.command](args, out)
    except SemanticsError as exc:
        err.write(f"inconclusive: {exc}\n")
        return EXIT_INCONCLUSIVE
    except InputError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_INPUT
    except (ResourceError, NumericError, MemoryError) as exc:
        err.write(f"resource error: {exc}\n")
        return EXIT_RESOURCE
    except OSError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_INPUT


def main(argv=None) -> int:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
