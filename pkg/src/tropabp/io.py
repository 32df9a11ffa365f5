"""Line-oriented text formats for models, hypercube sums and DOT export.

Circuits and formulas::

    circuit mode=r vars=2            # or: formula ... [profile=2,3]
    node 0 leaf var=0
    node 1 leaf const=5
    node 2 gate op=min l=0 r=1
    root 2

ABPs (the label is the last field; linear forms use the polynomial term
syntax over x0, x1, ... with ``;`` between terms)::

    abp mode=rplus vars=2 kind=weakest layers=1,2,1
    edge L=0 f=0 t=1 label=var:0
    edge L=1 f=1 t=0 label=lin:x0;x1;3

Hypercube sums append a section to the model block::

    hyper x=2 y=1 comp=0
    wire slot=0 -> x:0
    wire slot=3 -> ybar:0

``#`` starts a comment.  Parse errors name the offending line.
"""

from __future__ import annotations

import re
from typing import Iterable

from .hypercube import HypercubeExpr
from .models import Abp, Circuit, Const, Edge, Formula, Gate, Leaf, Lin, Model, Var
from .poly import TropPoly, default_names, format_poly, format_terms, parse_poly, parse_terms
from .semiring import Mode, format_value, parse_value


class ParseError(ValueError):
    def __init__(self, lineno: int, msg: str):
        super().__init__(f"line {lineno}: {msg}")
        self.lineno = lineno


def _lines(text: str) -> Iterable[tuple[int, str]]:
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line


def _fields(tokens: list[str], lineno: int) -> dict[str, str]:
    out = {}
    for tok in tokens:
        k, eq, v = tok.partition("=")
        if not eq:
            raise ParseError(lineno, f"expected key=value, got {tok!r}")
        out[k] = v
    return out


def _need(fields: dict, key: str, lineno: int) -> str:
    if key not in fields:
        raise ParseError(lineno, f"missing {key}=")
    return fields[key]


def _int(text: str, lineno: int, what: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise ParseError(lineno, f"{what} must be an integer, got {text!r}") from None


# -- labels -------------------------------------------------------------------


def format_label(lab, arity: int) -> str:
    if isinstance(lab, Var):
        return f"var:{lab.index}"
    if isinstance(lab, Const):
        return f"const:{format_value(lab.value)}"
    return "lin:" + format_terms(lab.poly, default_names(arity), sep=";")


def parse_label(text: str, mode: Mode, arity: int, lineno: int):
    kind, sep, arg = text.partition(":")
    if not sep:
        raise ParseError(lineno, f"label {text!r} needs a var:, const: or lin: prefix")
    try:
        if kind == "var":
            return Var(int(arg))
        if kind == "const":
            return Const(parse_value(arg))
        if kind == "lin":
            if arg.strip() == "inf":
                return Lin(TropPoly.empty(mode, arity))
            return Lin(parse_terms(arg, default_names(arity), mode))
    except ValueError as exc:
        raise ParseError(lineno, str(exc)) from None
    raise ParseError(lineno, f"unknown label kind {kind!r}")


# -- models -------------------------------------------------------------------


def format_model(m: Model) -> str:
    if isinstance(m, Abp):
        head = f"abp mode={m.mode} vars={m.arity} kind={m.kind} layers={','.join(map(str, m.layers))}"
        lines = [head]
        for e in m.edges:
            lines.append(f"edge L={e.layer} f={e.src} t={e.dst} label={format_label(e.label, m.arity)}")
        return "\n".join(lines) + "\n"
    head = f"{m.kind} mode={m.mode} vars={m.arity}"
    prof = getattr(m, "level_profile", None)
    if prof is not None:
        head += f" profile={','.join(map(str, prof))}"
    lines = [head]
    for i, nd in enumerate(m.nodes):
        if isinstance(nd, Leaf):
            if isinstance(nd.label, Var):
                lines.append(f"node {i} leaf var={nd.label.index}")
            else:
                lines.append(f"node {i} leaf const={format_value(nd.label.value)}")
        else:
            lines.append(f"node {i} gate op={nd.op} l={nd.left} r={nd.right}")
    lines.append(f"root {m.root}")
    return "\n".join(lines) + "\n"


def _parse_model_lines(lines: list[tuple[int, str]]) -> Model:
    if not lines:
        raise ParseError(1, "empty model file")
    lineno, head = lines[0]
    toks = head.split()
    kind = toks[0]
    f = _fields(toks[1:], lineno)
    try:
        mode = Mode.parse(_need(f, "mode", lineno))
    except ValueError as exc:
        raise ParseError(lineno, str(exc)) from None
    arity = _int(_need(f, "vars", lineno), lineno, "vars")
    if kind == "abp":
        akind = f.get("kind", "weakest")
        layers = [_int(x, lineno, "layer size") for x in _need(f, "layers", lineno).split(",") if x]
        edges = []
        for ln, line in lines[1:]:
            pre, sep, lab = line.partition("label=")
            toks = pre.split()
            if not toks or toks[0] != "edge" or not sep:
                raise ParseError(ln, "expected 'edge L=.. f=.. t=.. label=..'")
            ef = _fields(toks[1:], ln)
            label = parse_label(lab.strip(), mode, arity, ln)
            edges.append(
                Edge(
                    _int(_need(ef, "L", ln), ln, "L"),
                    _int(_need(ef, "f", ln), ln, "f"),
                    _int(_need(ef, "t", ln), ln, "t"),
                    label,
                )
            )
        try:
            return Abp(mode, arity, layers, edges, akind)
        except ValueError as exc:
            raise ParseError(lineno, str(exc)) from None
    if kind not in ("circuit", "formula"):
        raise ParseError(lineno, f"unknown model kind {kind!r}")
    nodes: dict[int, object] = {}
    root = None
    for ln, line in lines[1:]:
        toks = line.split()
        if toks[0] == "root":
            if len(toks) != 2:
                raise ParseError(ln, "expected 'root <id>'")
            root = _int(toks[1], ln, "root")
            continue
        if toks[0] != "node" or len(toks) < 3:
            raise ParseError(ln, "expected a node or root line")
        nid = _int(toks[1], ln, "node id")
        if nid in nodes:
            raise ParseError(ln, f"node {nid} defined twice")
        nf = _fields(toks[3:], ln)
        if toks[2] == "leaf":
            if "var" in nf:
                vi = _int(nf["var"], ln, "var")
                if not 0 <= vi < arity:
                    raise ParseError(ln, f"variable {vi} out of range 0..{arity - 1}")
                nodes[nid] = (ln, Leaf(Var(vi)))
            elif "const" in nf:
                try:
                    nodes[nid] = (ln, Leaf(Const(parse_value(nf["const"]))))
                except ValueError as exc:
                    raise ParseError(ln, str(exc)) from None
            else:
                raise ParseError(ln, "leaf needs var= or const=")
        elif toks[2] == "gate":
            op = _need(nf, "op", ln)
            if op not in ("min", "plus"):
                raise ParseError(ln, f"unknown op {op!r}")
            nodes[nid] = (ln, Gate(op, _int(_need(nf, "l", ln), ln, "l"), _int(_need(nf, "r", ln), ln, "r")))
        else:
            raise ParseError(ln, f"unknown node type {toks[2]!r}")
    if root is None:
        raise ParseError(lines[-1][0], "missing root line")
    ids = sorted(nodes)
    if ids != list(range(len(ids))):
        raise ParseError(lineno, "node ids must be 0..n-1")
    for nid in ids:
        ln, nd = nodes[nid]
        if isinstance(nd, Gate) and not (nd.left < nid and nd.right < nid):
            raise ParseError(ln, "gate children must have smaller ids")
    try:
        seq = [nodes[i][1] for i in ids]
        if kind == "formula":
            prof = f.get("profile")
            prof_t = tuple(_int(x, lineno, "profile") for x in prof.split(",")) if prof else None
            out = Formula(mode, arity, seq, root, prof_t)
            if any(x > 1 for x in out.fanout()):
                raise ParseError(lineno, "formula has a node with fan-out above 1")
            return out
        return Circuit(mode, arity, seq, root)
    except ParseError:
        raise
    except ValueError as exc:
        raise ParseError(lineno, str(exc)) from None


def parse_model(text: str) -> Model:
    return _parse_model_lines(list(_lines(text)))


# -- hypercube sums ---------------------------------------------------------------

_WIRE = re.compile(r"^wire\s+slot=(\S+)\s*->\s*(x|y|ybar|const):(\S+)$")


def format_hyper(e: HypercubeExpr) -> str:
    lines = [format_model(e.inner).rstrip("\n")]
    comp = ",".join(str(j) for j in sorted(e.complemented))
    lines.append(f"hyper x={e.x_vars} y={e.y_vars} comp={comp}")
    for k, (kind, arg) in enumerate(e.wiring):
        val = format_value(arg) if kind == "const" else str(arg)
        lines.append(f"wire slot={k} -> {kind}:{val}")
    return "\n".join(lines) + "\n"


def parse_hyper(text: str) -> HypercubeExpr:
    model_lines = []
    head = None
    wires: dict[int, tuple] = {}
    for ln, line in _lines(text):
        if line.startswith("hyper"):
            if head is not None:
                raise ParseError(ln, "second hyper header")
            head = (ln, _fields(line.split()[1:], ln))
        elif line.startswith("wire"):
            m = _WIRE.match(line)
            if not m:
                raise ParseError(ln, "expected 'wire slot=<k> -> x:<i>|y:<j>|ybar:<j>|const:<v>'")
            k = _int(m.group(1), ln, "slot")
            if k in wires:
                raise ParseError(ln, f"slot {k} wired twice")
            kind = m.group(2)
            try:
                arg = parse_value(m.group(3)) if kind == "const" else int(m.group(3))
            except ValueError as exc:
                raise ParseError(ln, str(exc)) from None
            wires[k] = (ln, (kind, arg))
        else:
            model_lines.append((ln, line))
    if head is None:
        raise ParseError(1, "missing 'hyper' header")
    ln, f = head
    inner = _parse_model_lines(model_lines)
    used_x = [arg + 1 for _, (kind, arg) in wires.values() if kind == "x"]
    x = _int(f["x"], ln, "x") if "x" in f else max(used_x, default=0)
    y = _int(_need(f, "y", ln), ln, "y")
    comp = frozenset(_int(c, ln, "comp") for c in f.get("comp", "").split(",") if c)
    if sorted(wires) != list(range(inner.arity)):
        raise ParseError(ln, f"wire lines must cover slots 0..{inner.arity - 1}")
    try:
        return HypercubeExpr(inner, x, y, comp, tuple(wires[k][1] for k in range(inner.arity)))
    except ValueError as exc:
        raise ParseError(ln, str(exc)) from None


# -- detection ------------------------------------------------------------------------


def detect_kind(text: str) -> str:
    """'poly', 'graph', 'hyper' or the model kind of the first line."""
    first = None
    for _, line in _lines(text):
        if first is None:
            first = line.split()[0]
        if line.startswith("hyper"):
            return "hyper"
    if first is None:
        raise ParseError(1, "empty input")
    if first in ("poly", "graph", "abp", "circuit", "formula"):
        return first
    raise ParseError(1, f"unknown file kind {first!r}")


def read_object(text: str):
    """Parse a polynomial, graph, model or hypercube sum."""
    from .families import parse_graph

    kind = detect_kind(text)
    if kind == "poly":
        try:
            return parse_poly(text)[0]
        except ValueError as exc:
            raise ParseError(1, str(exc)) from None
    if kind == "graph":
        try:
            return parse_graph(text)
        except ParseError:
            raise
        except ValueError as exc:
            msg = str(exc)
            m = re.match(r"line (\d+): (.*)", msg)
            if m:
                raise ParseError(int(m.group(1)), m.group(2)) from None
            raise ParseError(1, msg) from None
    if kind == "hyper":
        return parse_hyper(text)
    return parse_model(text)


def write_object(obj) -> str:
    from .families import CostGraph, format_graph

    if isinstance(obj, TropPoly):
        return format_poly(obj) + "\n"
    if isinstance(obj, HypercubeExpr):
        return format_hyper(obj)
    if isinstance(obj, CostGraph):
        return format_graph(obj)
    return format_model(obj)


# -- DOT --------------------------------------------------------------------------------


def _dot_label(lab, arity: int) -> str:
    if isinstance(lab, Var):
        return f"x{lab.index}"
    if isinstance(lab, Const):
        return format_value(lab.value)
    return format_terms(lab.poly, default_names(arity), sep=" ⊕ ")


def to_dot(m: Model) -> str:
    if isinstance(m, HypercubeExpr):
        m = m.inner
    lines = ["digraph G {", "  rankdir=LR;"]
    if isinstance(m, Abp):
        for k, n in enumerate(m.layers):
            ids = " ".join(f"v{k}_{i};" for i in range(n))
            lines.append(f"  {{ rank=same; {ids} }}")
            for i in range(n):
                lines.append(f'  v{k}_{i} [label="{k}:{i}", shape=circle];')
        for e in m.edges:
            lab = _dot_label(e.label, m.arity).replace('"', "'")
            lines.append(f'  v{e.layer}_{e.src} -> v{e.layer + 1}_{e.dst} [label="{lab}"];')
    else:
        lines[1] = "  rankdir=BT;"
        for i in m.reachable():
            nd = m.nodes[i]
            if isinstance(nd, Leaf):
                lines.append(f'  n{i} [label="{_dot_label(nd.label, m.arity)}", shape=box];')
            else:
                sym = "⊕" if nd.op == "min" else "⊗"
                lines.append(f'  n{i} [label="{sym}", shape=circle];')
                lines.append(f"  n{nd.left} -> n{i};")
                lines.append(f"  n{nd.right} -> n{i};")
    lines.append("}")
    return "\n".join(lines) + "\n"


__all__ = [
    "ParseError",
    "format_model",
    "parse_model",
    "format_hyper",
    "parse_hyper",
    "format_label",
    "parse_label",
    "detect_kind",
    "read_object",
    "write_object",
    "to_dot",
]
