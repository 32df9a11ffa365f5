"""Command-line interface.

Exit status: 0 success, 1 verification failure, 2 usage or parse error,
3 budget exhausted.
"""

from __future__ import annotations

import argparse
import random
import sys
from pathlib import Path

from . import corpus, families, hypercube
from .hypercube import HypercubeExpr
from .io import read_object, to_dot, write_object
from .models import Circuit, expand, model_eval
from .poly import BudgetExceeded, TropPoly, canonicalize, format_poly, poly_eval
from .semiring import Mode, format_value, parse_value
from .transforms.report import PASS_NAMES, parse_pass, run_pass
from .verify import counterexample_search, width2_survey

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


class UsageError(ValueError):
    pass


# -- helpers ------------------------------------------------------------------------


def _read(path: str):
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"{path}: {exc.strerror}") from None
    try:
        return read_object(text)
    except ValueError as exc:
        raise UsageError(f"{path}: {exc}") from None


def _emit(args, text: str) -> None:
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)


def _emit_dot(args, obj) -> None:
    if getattr(args, "dot", None) and not isinstance(obj, (TropPoly, families.CostGraph)):
        Path(args.dot).write_text(to_dot(obj))


def _point(text: str, arity: int) -> tuple:
    try:
        pt = tuple(parse_value(t) for t in text.split(",") if t.strip())
    except ValueError as exc:
        raise UsageError(f"bad point {text!r}: {exc}") from None
    if len(pt) != arity:
        raise UsageError(f"point {text!r} has {len(pt)} coordinates, expected {arity}")
    return pt


def _as_poly(obj, args) -> TropPoly:
    if isinstance(obj, TropPoly):
        return obj
    if isinstance(obj, HypercubeExpr):
        return hypercube.hypercube_expand(obj, args.max_terms)
    if isinstance(obj, families.CostGraph):
        raise UsageError("a graph is not a polynomial; use 'gen path' or 'gen matching'")
    return expand(obj, args.max_terms)


def _mode(text: str) -> Mode:
    try:
        return Mode.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


# -- subcommands -----------------------------------------------------------------------


def cmd_gen(args) -> int:
    rng = random.Random(args.seed)
    fam, mode = args.family, args.mode
    if fam in ("perm", "hc"):
        obj = families.perm_poly(args.n, mode) if fam == "perm" else families.hc_poly(args.n, mode)
    elif fam in ("path", "matching"):
        if not args.graph:
            raise UsageError(f"gen {fam} needs --graph")
        g = _read(args.graph)
        if not isinstance(g, families.CostGraph):
            raise UsageError(f"{args.graph}: not a graph file")
        if fam == "path":
            obj = families.shortest_path_poly(g, args.s, args.t, mode, args.max_terms)
        else:
            obj = families.k_matching_poly(g, args.k, mode, args.max_terms)
    elif fam == "inner":
        obj = families.inner_product_poly(args.k, mode)
    elif fam == "complete":
        obj = families.complete_graph(args.n)
    elif fam == "bipartite":
        obj = families.complete_bipartite(args.n, args.k)
    elif fam == "poly":
        obj = corpus.random_poly(rng, mode, args.vars, args.degree, args.terms, args.cmin, args.cmax)
    elif fam == "formula":
        obj = corpus.random_formula(rng, mode, args.vars, args.size)
    elif fam == "alternating":
        obj = corpus.random_alternating_formula(rng, mode, args.vars, args.p, args.size)
    elif fam == "circuit":
        obj = corpus.random_circuit(rng, mode, args.vars, args.size)
    elif fam == "md":
        obj = corpus.random_md_circuit(rng, mode, args.vars, args.size)
    elif fam == "abp":
        obj = corpus.random_abp(rng, mode, args.vars, args.layers, args.width)
    elif fam == "hyper":
        obj = corpus.random_hypercube_expr(rng, mode, args.vars, args.y, args.r, args.size)
    else:  # pragma: no cover - argparse restricts choices
        raise UsageError(f"unknown family {fam!r}")
    _emit(args, write_object(obj))
    _emit_dot(args, obj)
    return EXIT_OK


def cmd_eval(args) -> int:
    obj = _read(args.file)
    if isinstance(obj, families.CostGraph):
        raise UsageError("cannot evaluate a graph")
    arity = obj.x_vars if isinstance(obj, HypercubeExpr) else obj.arity
    out = []
    for at in args.at:
        pt = _point(at, arity)
        if isinstance(obj, TropPoly):
            v = poly_eval(obj, pt)
        elif isinstance(obj, HypercubeExpr):
            v = hypercube.hypercube_eval(obj, pt, args.engine)
        else:
            v = model_eval(obj, pt)
        out.append(format_value(v))
    _emit(args, "\n".join(out) + "\n")
    return EXIT_OK


def cmd_hyper_eval(args) -> int:
    obj = _read(args.file)
    if not isinstance(obj, HypercubeExpr):
        raise UsageError(f"{args.file}: not a hypercube sum")
    return cmd_eval(args)


def cmd_expand(args) -> int:
    obj = _read(args.file)
    _emit(args, format_poly(canonicalize(_as_poly(obj, args))) + "\n")
    return EXIT_OK


def cmd_transform(args) -> int:
    try:
        name, params = parse_pass(args.pass_name)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    obj = _read(args.file)
    try:
        out, rep = run_pass(name, obj, params, args.max_size)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"{name}: {exc}") from None
    _emit(args, write_object(out))
    _emit_dot(args, out)
    text = rep.to_kv() if args.report_format == "kv" else rep.to_text()
    if args.report:
        Path(args.report).write_text(text + "\n")
    else:
        sys.stderr.write(text + "\n")
    status = EXIT_OK if rep.ok else EXIT_FAIL
    if args.check:
        w = counterexample_search(out, _as_poly(obj, args), "canonical", max_terms=args.max_terms)
        if w is not None:
            sys.stderr.write(f"check=fail witness={_fmt_point(w.point)}\n")
            status = EXIT_FAIL
    return status


def _fmt_point(pt) -> str:
    return ",".join(format_value(v) for v in pt)


def cmd_verify_equal(args) -> int:
    a, b = _read(args.a), _read(args.b)
    fb = _as_poly(b, args)
    arity_a = a.x_vars if isinstance(a, HypercubeExpr) else a.arity
    if arity_a != fb.arity:
        raise UsageError(f"arity mismatch: {arity_a} vs {fb.arity}")
    ma = _as_poly(a, args) if isinstance(a, HypercubeExpr) else a
    if isinstance(ma, families.CostGraph):
        raise UsageError("cannot compare a graph")
    w = counterexample_search(ma, fb, args.strategy, random.Random(args.seed), max_terms=args.max_terms)
    lines = [f"equal={int(w is None)}", f"strategy={args.strategy}", f"seed={args.seed}"]
    if w is not None:
        lines += [
            f"witness={_fmt_point(w.point)}",
            f"value.a={format_value(w.model_value)}",
            f"value.b={format_value(w.target_value)}",
            f"found_by={w.strategy}",
        ]
    elif args.strategy not in ("all", "canonical"):
        lines.append("complete=0")
    _emit(args, "\n".join(lines) + "\n")
    return EXIT_OK if w is None else EXIT_FAIL


def cmd_encode(args) -> int:
    kind = args.kind
    if kind in ("perm", "hc"):
        if args.n is None:
            raise UsageError(f"encode {kind} needs --n")
        fn = hypercube.perm_encoding if kind == "perm" else hypercube.hc_encoding
        out = fn(args.n, args.mode)
    else:
        if not args.file:
            raise UsageError(f"encode {kind} needs an input file")
        obj = _read(args.file)
        if kind == "eliminate":
            if not isinstance(obj, HypercubeExpr):
                raise UsageError(f"{args.file}: not a hypercube sum")
            out = hypercube.eliminate_complements(obj)
        elif kind == "md":
            if not isinstance(obj, Circuit):
                raise UsageError(f"{args.file}: not a circuit")
            out = hypercube.make_multiplicatively_disjoint(obj)
        else:
            if isinstance(obj, HypercubeExpr):
                e = obj
            elif isinstance(obj, Circuit):
                if not hypercube.is_multiplicatively_disjoint(obj):
                    raise UsageError(f"{args.file}: circuit is not multiplicatively disjoint (run 'encode md' first)")
                e = hypercube.vnf_encoding(obj)
            else:
                raise UsageError(f"{args.file}: expected a circuit")
            if kind == "width2":
                out = hypercube.width2_summand(e)
            elif kind == "linear":
                out = hypercube.linear_form_summand(e)
            else:
                out = e
    _emit(args, write_object(out))
    _emit_dot(args, out)
    return EXIT_OK


def cmd_survey(args) -> int:
    if args.target in ("inner3", "inner2"):
        target = families.inner_product_poly(int(args.target[-1]), args.mode)
    else:
        target = _read(args.target)
        if not isinstance(target, TropPoly):
            raise UsageError(f"{args.target}: not a polynomial")
    rep = width2_survey(
        target,
        max_layers=args.max_layers,
        samples=args.samples,
        seed=args.seed,
        exhaustive=args.exhaustive,
    )
    _emit(args, rep.to_kv() + "\n")
    if args.archive:
        d = Path(args.archive)
        d.mkdir(parents=True, exist_ok=True)
        for i, a in enumerate(rep.matches):
            (d / f"match_{i:03d}.abp").write_text(write_object(a))
        for i, a in enumerate(rep.near_misses):
            (d / f"near_{i:03d}.abp").write_text(write_object(a))
    if args.expect_none and rep.match_count:
        return EXIT_FAIL
    return EXIT_OK


def cmd_dot(args) -> int:
    obj = _read(args.file)
    if isinstance(obj, (TropPoly, families.CostGraph)):
        raise UsageError("dot takes a model or hypercube file")
    _emit(args, to_dot(obj))
    return EXIT_OK


# -- parser ---------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    common.add_argument("--max-terms", type=int, default=100_000, help="expansion budget in terms")
    common.add_argument("--max-size", type=int, default=1_000_000, help="model size budget")
    common.add_argument("-o", "--output", help="write the result here instead of stdout")
    common.add_argument("--dot", help="also write the resulting model as DOT")

    p = argparse.ArgumentParser(prog="tropabp", description="Min-plus polynomials, circuits and branching programs.")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", parents=[common], help="generate a polynomial family, graph or random model")
    g.add_argument(
        "family",
        choices=[
            "perm", "hc", "path", "matching", "inner", "complete", "bipartite",
            "poly", "formula", "alternating", "circuit", "md", "abp", "hyper",
        ],
    )
    g.add_argument("--mode", type=_mode, default=Mode.RPLUS)
    g.add_argument("--n", type=int, default=2)
    g.add_argument("--k", type=int, default=2)
    g.add_argument("--graph")
    g.add_argument("--s", type=int)
    g.add_argument("--t", type=int)
    g.add_argument("--vars", type=int, default=2)
    g.add_argument("--size", type=int, default=15)
    g.add_argument("--p", type=int, default=1)
    g.add_argument("--degree", type=int, default=4)
    g.add_argument("--terms", type=int, default=4)
    g.add_argument("--cmin", type=int, default=-5, help="smallest random coefficient")
    g.add_argument("--cmax", type=int, default=5, help="largest random coefficient")
    g.add_argument("--layers", type=int, default=4)
    g.add_argument("--width", type=int, default=2)
    g.add_argument("--y", type=int, default=3)
    g.add_argument("--r", type=int, default=1)
    g.set_defaults(func=cmd_gen)

    for name, func, what in (
        ("eval", cmd_eval, "evaluate at points"),
        ("hyper-eval", cmd_hyper_eval, "evaluate a hypercube sum at points"),
    ):
        e = sub.add_parser(name, parents=[common], help=what)
        e.add_argument("file")
        e.add_argument("--at", action="append", required=True, help="comma-separated point, repeatable")
        e.add_argument("--engine", choices=["auto", "brute", "factored"], default="auto")
        e.set_defaults(func=func)

    x = sub.add_parser("expand", parents=[common], help="expand to a polynomial")
    x.add_argument("file")
    x.set_defaults(func=cmd_expand)

    t = sub.add_parser("transform", parents=[common], help="run a compilation pass")
    t.add_argument("--pass", dest="pass_name", required=True, help=f"one of {', '.join(PASS_NAMES)}, e.g. widthreduce:p=2")
    t.add_argument("file")
    t.add_argument("--report", help="write the pass report here instead of stderr")
    t.add_argument("--report-format", choices=["text", "kv"], default="kv")
    t.add_argument("--check", action="store_true", help="verify the output against the input")
    t.set_defaults(func=cmd_transform)

    v = sub.add_parser("verify-equal", parents=[common], help="compare two models or polynomials")
    v.add_argument("a")
    v.add_argument("b")
    v.add_argument("--strategy", choices=["all", "structured", "random", "canonical"], default="all")
    v.set_defaults(func=cmd_verify_equal)

    c = sub.add_parser("encode", parents=[common], help="build a hypercube encoding")
    c.add_argument("kind", choices=["perm", "hc", "vnf", "width2", "linear", "eliminate", "md"])
    c.add_argument("file", nargs="?")
    c.add_argument("--n", type=int)
    c.add_argument("--mode", type=_mode, default=Mode.RPLUS)
    c.set_defaults(func=cmd_encode)

    s = sub.add_parser("survey", parents=[common], help="search weakest width-2 ABPs for a target")
    s.add_argument("--target", default="inner3", help="inner3, inner2 or a polynomial file")
    s.add_argument("--mode", type=_mode, default=Mode.R)
    s.add_argument("--max-layers", type=int, default=6)
    s.add_argument("--samples", type=int, default=100_000)
    s.add_argument("--exhaustive", action="store_true")
    s.add_argument("--archive", help="directory for matches and near misses")
    s.add_argument("--expect-none", action="store_true", help="exit 1 if any match is found")
    s.set_defaults(func=cmd_survey)

    d = sub.add_parser("dot", parents=[common], help="export a model as DOT")
    d.add_argument("file")
    d.set_defaults(func=cmd_dot)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except BudgetExceeded as exc:
        sys.stderr.write(f"tropabp: budget exceeded: {exc}\n")
        return EXIT_BUDGET
    except (UsageError, ValueError) as exc:
        sys.stderr.write(f"tropabp: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
