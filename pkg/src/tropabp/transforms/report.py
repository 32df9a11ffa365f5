"""Pass reports and the named pass registry used by the command line."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from ..models import Abp, Formula, as_formula, stats
from ..poly import TropPoly
from .alternating import NLeaf, alt_formula_to_abp, nary_height, normalize_alternating, to_nary
from .brent import brent_depth_reduce, depth_bound
from .factor import factor_formula, univariate_factor
from .width import abp_width_reduce
from .width2 import bivariate_to_width2, bridge_size_bound, univariate_to_width2

PASS_NAMES = ("brent", "alt2abp", "widthreduce", "biv2w2", "uni2w2", "factor")


@dataclass(frozen=True)
class BoundCheck:
    name: str
    claimed: float
    measured: float

    @property
    def ok(self) -> bool:
        return self.measured <= self.claimed


@dataclass
class PassReport:
    name: str
    params: dict
    input_stats: dict
    output_stats: dict
    bounds: list[BoundCheck] = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(b.ok for b in self.bounds)

    def to_text(self) -> str:
        lines = [f"pass {self.name} {_fmt_params(self.params)}".rstrip()]
        lines.append("  input:  " + _fmt_stats(self.input_stats))
        lines.append("  output: " + _fmt_stats(self.output_stats))
        for b in self.bounds:
            verdict = "ok" if b.ok else "FAIL"
            lines.append(f"  bound {b.name}: measured {_num(b.measured)} <= claimed {_num(b.claimed)} {verdict}")
        for k, v in self.extra.items():
            lines.append(f"  {k}: {v}")
        return "\n".join(lines)

    def to_kv(self) -> str:
        out = [f"pass={self.name}"]
        out += [f"param.{k}={v}" for k, v in self.params.items()]
        out += [f"in.{k}={_kv(v)}" for k, v in self.input_stats.items()]
        out += [f"out.{k}={_kv(v)}" for k, v in self.output_stats.items()]
        for b in self.bounds:
            out.append(f"bound.{b.name}.claimed={_num(b.claimed)}")
            out.append(f"bound.{b.name}.measured={_num(b.measured)}")
            out.append(f"bound.{b.name}.ok={int(b.ok)}")
        out += [f"extra.{k}={_kv(v)}" for k, v in self.extra.items()]
        out.append(f"ok={int(self.ok)}")
        return "\n".join(out)


def _num(v) -> str:
    if isinstance(v, float) and not v.is_integer():
        return f"{v:.4f}"
    return str(int(v)) if isinstance(v, float) else str(v)


def _kv(v) -> str:
    if isinstance(v, (tuple, list)):
        return ",".join(_kv(x) for x in v)
    return "none" if v is None else str(v)


def _fmt_params(params: dict) -> str:
    return " ".join(f"{k}={v}" for k, v in params.items())


def _fmt_stats(st: dict) -> str:
    return " ".join(f"{k}={_kv(v)}" for k, v in st.items())


def poly_stats(f: TropPoly) -> dict:
    return {"kind": "poly", "terms": len(f), "degree": f.degree(), "arity": f.arity}


def levels_needed(f: Formula) -> int:
    """Smallest p for which the formula fits 2p alternating levels."""
    tree = to_nary(f)
    if isinstance(tree, NLeaf):
        return 1
    h = nary_height(tree) + (1 if tree.op == "plus" else 0)
    return max(1, math.ceil(h / 2))


def parse_pass(text: str) -> tuple[str, dict]:
    """'widthreduce:p=2' -> ('widthreduce', {'p': 2})."""
    name, _, rest = text.partition(":")
    if name not in PASS_NAMES:
        raise ValueError(f"unknown pass {name!r}; expected one of {', '.join(PASS_NAMES)}")
    params: dict = {}
    for part in filter(None, rest.split(",")):
        k, eq, v = part.partition("=")
        if not eq:
            raise ValueError(f"malformed pass parameter {part!r}")
        params[k.strip()] = int(v) if v.strip().lstrip("-").isdigit() else v.strip()
    return name, params


def run_pass(name: str, obj, params: dict | None = None, max_size: int | None = 1_000_000):
    """Run a named pass; returns (result, PassReport)."""
    params = dict(params or {})
    if name == "brent":
        f = _need_formula(obj)
        out = brent_depth_reduce(f)
        s = len(f.nodes)
        bounds = [
            BoundCheck("depth", depth_bound(s), stats(out)["depth"]),
            BoundCheck("size", float(s) ** 3, len(out.nodes)),
        ]
        return out, PassReport(name, params, stats(f), stats(out), bounds)
    if name == "alt2abp":
        f = _need_formula(obj)
        p = int(params.get("p", levels_needed(f)))
        params["p"] = p
        g = normalize_alternating(f, p)
        out = alt_formula_to_abp(g, max_matrices=max_size)
        s = len(f.nodes)
        bounds = [
            BoundCheck("width", 2 * p + 1, out.width),
            BoundCheck("size", 10 * p * s, stats(out)["size"]),
        ]
        extra = {"size_per_p_s": round(stats(out)["size"] / (p * s), 4)}
        return out, PassReport(name, params, stats(f), stats(out), bounds, extra)
    if name == "widthreduce":
        if not isinstance(obj, Abp):
            raise ValueError("widthreduce takes an ABP")
        p = int(params.get("p", 1))
        params["p"] = p
        out = abp_width_reduce(obj, p, max_size)
        bounds = [BoundCheck("width", 2 * p + 1, out.width)]
        return out, PassReport(name, params, stats(obj), stats(out), bounds)
    if name in ("biv2w2", "uni2w2", "factor"):
        if not isinstance(obj, TropPoly):
            raise ValueError(f"{name} takes a polynomial")
        if name == "biv2w2":
            out = bivariate_to_width2(obj)
            bounds = [BoundCheck("width", 2, out.width), BoundCheck("size", bridge_size_bound(obj), stats(out)["size"])]
            return out, PassReport(name, params, poly_stats(obj), stats(out), bounds)
        if name == "uni2w2":
            out = univariate_to_width2(obj)
            bounds = [BoundCheck("width", 2, out.width), BoundCheck("layers", obj.degree() + 2, len(out.layers))]
            return out, PassReport(name, params, poly_stats(obj), stats(out), bounds)
        fac = univariate_factor(obj)
        out = factor_formula(fac, obj.mode)
        roots = " ".join(f"{r}^{m}" for r, m in fac.roots) or "none"
        extra = {"roots": roots, "leading": fac.leading, "low_power": fac.low_power}
        return out, PassReport(name, params, poly_stats(obj), stats(out), [], extra)
    raise ValueError(f"unknown pass {name!r}")


def _need_formula(obj) -> Formula:
    if isinstance(obj, Formula):
        return obj
    if isinstance(obj, Abp) or isinstance(obj, TropPoly):
        raise ValueError("this pass takes a formula")
    return as_formula(obj)


__all__ = ["PassReport", "BoundCheck", "run_pass", "parse_pass", "levels_needed", "PASS_NAMES", "poly_stats"]
