"""Command-line front end and the line-oriented report format.

Reports are tab-separated records, one per line:

    augteich-report<TAB>1
    meta<TAB>key<TAB>value
    table<TAB>name<TAB>col1<TAB>col2 ...
    row<TAB>v1<TAB>v2 ...
    end
    warning<TAB>"text"

Scalars are JSON strings, true/false, integers, or floats printed with 17
significant digits (always containing '.', 'e', 'inf' or 'nan'), so that
parse_report(format_report(r)) == r.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import re
import sys
import warnings
from dataclasses import dataclass, field

import jsonschema

from . import __version__
from .collar_hexagon import ContainmentError
from .hyp_core import DegeneracyError, NotStarShapedError
from .moduli import ModulusDomainError, annulus_modulus, grotzsch_mu, lambda_of_K, mu_inverse
from .qc_bounds import (
    BoundDomainError,
    BoundVacuousError,
    UniversalConstants,
    extension_constant,
    k_eps_report,
    k_hat,
    k_tilde_report,
)
from .standard_maps import OrientationError, annulus_map, pants_map, pants_map_distortion, measure_distortion
from .teich import (
    ComplexError,
    Curve,
    FNPoint,
    PantsComplex,
    build_surface,
    cuff_word,
    curve_word,
    holonomy,
    length_from_trace,
    verify_conditions,
)

CONSTANTS_ENV = "AUGTEICH_CONSTANTS"
EXIT_OK, EXIT_DOMAIN, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3


class InputError(ValueError):
    pass


# --- report format -----------------------------------------------------------------


@dataclass
class Table:
    name: str
    columns: list
    rows: list = field(default_factory=list)


@dataclass
class Report:
    meta: list = field(default_factory=list)      # (key, value) pairs in order
    tables: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    def add(self, key, value):
        self.meta.append((key, value))

    def table(self, name, columns) -> Table:
        t = Table(name, list(columns))
        self.tables.append(t)
        return t

    def get(self, key):
        for k, v in self.meta:
            if k == key:
                return v
        raise KeyError(key)


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        s = format(v, ".17g")
        return s if any(ch in s for ch in ".en") else s + ".0"
    if isinstance(v, str):
        return json.dumps(v)
    raise TypeError(f"cannot serialise {type(v).__name__}")


_INT = re.compile(r"^-?\d+$")


def _parse(tok: str):
    if tok.startswith('"'):
        return json.loads(tok)
    if tok in ("true", "false"):
        return tok == "true"
    if _INT.match(tok):
        return int(tok)
    return float(tok)


def format_report(r: Report) -> str:
    lines = ["augteich-report\t1"]
    for k, v in r.meta:
        lines.append(f"meta\t{k}\t{_fmt(v)}")
    for t in r.tables:
        lines.append("\t".join(["table", t.name] + [_fmt(c) for c in t.columns]))
        for row in t.rows:
            lines.append("\t".join(["row"] + [_fmt(v) for v in row]))
        lines.append("end")
    for w in r.warnings:
        lines.append(f"warning\t{_fmt(w)}")
    return "\n".join(lines) + "\n"


def parse_report(text: str) -> Report:
    lines = text.splitlines()
    if not lines or lines[0] != "augteich-report\t1":
        raise InputError("not an augteich report")
    r, cur = Report(), None
    for ln in lines[1:]:
        parts = ln.split("\t")
        kind = parts[0]
        if kind == "meta":
            r.meta.append((parts[1], _parse(parts[2])))
        elif kind == "table":
            cur = Table(parts[1], [_parse(c) for c in parts[2:]])
            r.tables.append(cur)
        elif kind == "row":
            cur.rows.append([_parse(v) for v in parts[1:]])
        elif kind == "end":
            cur = None
        elif kind == "warning":
            r.warnings.append(_parse(parts[1]))
        else:
            raise InputError(f"unknown record {kind!r}")
    return r


def format_csv(r: Report) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    for t in r.tables:
        w.writerow(["table", t.name])
        w.writerow(t.columns)
        for row in t.rows:
            w.writerow([_fmt(v) if not isinstance(v, str) else v for v in row])
    return buf.getvalue()


# --- input documents ----------------------------------------------------------------------

_SLOT = {
    "type": "object",
    "required": ["pants", "slot"],
    "properties": {"pants": {"type": "string"}, "slot": {"type": "integer", "minimum": 1, "maximum": 3}},
    "additionalProperties": False,
}
_NUM = {"type": "number"}
_NONNEG = {"type": "number", "minimum": 0}

PANTS_SCHEMA = {
    "type": "object",
    "required": ["schema_version", "pants", "gluings"],
    "additionalProperties": False,
    "properties": {
        "schema_version": {"const": 1},
        "pants": {"type": "array", "items": {"type": "string"}, "minItems": 1},
        "gluings": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["a", "b", "length"],
                "additionalProperties": False,
                "properties": {"name": {"type": "string"}, "a": _SLOT, "b": _SLOT,
                               "length": _NONNEG, "twist": _NUM},
            },
        },
        "boundary": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["pants", "slot", "length"],
                "additionalProperties": False,
                "properties": {"pants": {"type": "string"},
                               "slot": {"type": "integer", "minimum": 1, "maximum": 3},
                               "length": _NONNEG},
            },
        },
        "sequence": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["lengths"],
                "additionalProperties": False,
                "properties": {"lengths": {"type": "array", "items": _NONNEG},
                               "twists": {"type": "array", "items": _NUM},
                               "boundary": {"type": "array", "items": _NONNEG}},
            },
        },
    },
}

CONSTANTS_SCHEMA = {
    "type": "object",
    "required": ["schema_version", "beta0", "beta1"],
    "additionalProperties": False,
    "properties": {"schema_version": {"const": 1}, "beta0": _NUM, "beta1": _NUM},
}


def _path(err) -> str:
    out = ""
    for p in err.absolute_path:
        out += f"[{p}]" if isinstance(p, int) else (f".{p}" if out else p)
    return out or "<root>"


def _validate(doc, schema, what):
    v = jsonschema.Draft202012Validator(schema)
    errs = sorted(v.iter_errors(doc), key=lambda e: list(map(str, e.absolute_path)))
    if errs:
        e = errs[0]
        raise InputError(f"{what}: {_path(e)}: {e.message}")


def _load_json(path: str, what: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as e:
        raise InputError(f"{what}: cannot read {path}: {e.strerror}") from e
    except json.JSONDecodeError as e:
        raise InputError(f"{what}: {path}:{e.lineno}:{e.colno}: {e.msg}") from e


@dataclass
class PantsDocument:
    complex: PantsComplex
    fn: FNPoint
    sequence: list


def load_pants_document(path: str) -> PantsDocument:
    doc = _load_json(path, "pants file")
    _validate(doc, PANTS_SCHEMA, "pants file")
    ids = doc["pants"]
    if len(set(ids)) != len(ids):
        raise InputError("pants file: pants: ids must be unique")
    index = {p: k for k, p in enumerate(ids)}

    def slot(d, where):
        if d["pants"] not in index:
            raise InputError(f"pants file: {where}.pants: unknown pants id {d['pants']!r}")
        return index[d["pants"]], d["slot"] - 1

    curves = []
    for k, g in enumerate(doc["gluings"]):
        curves.append(Curve(slot(g["a"], f"gluings[{k}].a"), slot(g["b"], f"gluings[{k}].b"),
                            g.get("name", f"c{k}")))
    try:
        c = PantsComplex(len(ids), tuple(curves))
    except ComplexError as e:
        raise InputError(f"pants file: gluings: {e}") from e
    bmap = {}
    for k, b in enumerate(doc.get("boundary", [])):
        s = slot(b, f"boundary[{k}]")
        if s not in c.free or s in bmap:
            raise InputError(f"pants file: boundary[{k}]: slot is glued or listed twice")
        bmap[s] = b["length"]
    missing = [s for s in c.free if s not in bmap]
    if missing:
        p, s = missing[0]
        raise InputError(f"pants file: boundary: no length for pants {ids[p]!r} slot {s + 1}")
    boundary = tuple(bmap[s] for s in c.free)
    fn = FNPoint(tuple(g["length"] for g in doc["gluings"]),
                 tuple(g.get("twist", 0.0) for g in doc["gluings"]), boundary)
    seq = []
    for k, row in enumerate(doc.get("sequence", [])):
        n = len(curves)
        tw = row.get("twists", [0.0] * n)
        bd = row.get("boundary", list(boundary))
        if len(row["lengths"]) != n or len(tw) != n:
            raise InputError(f"pants file: sequence[{k}]: expected {n} lengths and twists")
        if len(bd) != len(boundary):
            raise InputError(f"pants file: sequence[{k}].boundary: expected {len(boundary)} values")
        seq.append(FNPoint(tuple(row["lengths"]), tuple(tw), tuple(bd)))
    return PantsDocument(c, fn, seq)


def load_constants(args) -> UniversalConstants:
    b0, b1 = 2.0, 1.0
    path = os.environ.get(CONSTANTS_ENV)
    if path:
        doc = _load_json(path, "constants file")
        _validate(doc, CONSTANTS_SCHEMA, "constants file")
        b0, b1 = doc["beta0"], doc["beta1"]
    if args.b0 is not None:
        b0 = args.b0
    if args.b1 is not None:
        b1 = args.b1
    return UniversalConstants(float(b0), float(b1))


# --- commands ----------------------------------------------------------------------------------


def cmd_special(args) -> Report:
    x = args.argument
    fn = {"mu": (grotzsch_mu, "agm"), "mu-inverse": (mu_inverse, "bisection"),
          "lambda": (lambda_of_K, "bisection"), "annulus-mod": (annulus_modulus, "closed_form")}
    f, method = fn[args.function]
    r = Report()
    r.add("command", "special")
    r.add("function", args.function)
    r.add("argument", x)
    r.add("method", method)
    r.add("value", float(f(x)))
    return r


def cmd_bounds(args) -> Report:
    c = load_constants(args)
    r = Report()
    r.add("command", "bounds")
    r.add("which", args.which)
    r.add("beta0", c.beta0)
    r.add("beta1", c.beta1)
    if args.which.startswith("extension"):
        try:
            rad = float(args.which.split(":", 1)[1]) if ":" in args.which else args.r
        except ValueError as e:
            raise InputError(f"bad extension radius in {args.which!r}") from e
        if rad is None:
            raise InputError("extension needs a radius: extension:<r> or --r")
        r.add("r", rad)
        r.add("value", extension_constant(rad, c))
        return r
    if args.K is None or args.eps is None:
        raise InputError(f"{args.which} needs --K and --eps")
    make = {"k-eps": k_eps_report, "k-tilde": k_tilde_report, "k-hat": k_hat}.get(args.which)
    if make is None:
        raise InputError(f"unknown bound {args.which!r}")
    rep = make(args.K, args.eps, c)
    r.add("K", float(args.K))
    r.add("eps", float(args.eps))
    for k, v in rep.intermediates.items():
        r.add(k, float(v))
    r.add("value", float(rep.value))
    return r


def cmd_surface(args) -> Report:
    doc = load_pants_document(args.file)
    s = build_surface(doc.complex, doc.fn)
    c = doc.complex
    r = Report()
    r.add("command", "surface")
    r.add("action", args.action)
    r.add("pants", c.n_pants)
    r.add("curves", len(c.curves))
    if args.action == "lengths":
        t = r.table("lengths", ["curve", "input", "measured", "residual"])
        for k in range(len(c.curves)):
            p, w = curve_word(c, k)
            m = length_from_trace(holonomy(s, w, p).trace)
            t.rows.append([c.curve_name(k), s.fn.lengths[k], m, abs(m - s.fn.lengths[k])])
    elif args.action == "holonomy-traces":
        t = r.table("traces", ["curve", "length", "abs_trace", "expected", "residual"])
        loops = [(c.curve_name(k), *curve_word(c, k), s.fn.lengths[k]) for k in range(len(c.curves))]
        loops += [(f"b{k}", p, cuff_word(sl), s.fn.boundary[k]) for k, (p, sl) in enumerate(c.free)]
        for name, p, w, ell in loops:
            tr = abs(holonomy(s, w, p).trace)
            ex = 2 * math.cosh(ell / 2)
            t.rows.append([name, ell, tr, ex, abs(tr - ex)])
        r.add("tolerance", 1e-9)
    else:
        t = r.table("collars", ["pants", "slot", "curve", "chart", "length", "t", "width",
                                "outer_length"])
        for p, sl, label, ell, tt, width, outer in s.collar_table():
            t.rows.append([p, sl + 1, label, "cusp" if ell == 0 else "fermi", ell, tt,
                           float(width), float(outer)])
    return r


def cmd_converge(args) -> Report:
    doc = load_pants_document(args.file)
    if not doc.sequence:
        raise InputError("pants file: sequence: converge needs a sequence block")
    target = build_surface(doc.complex, doc.fn)
    seq = [build_surface(doc.complex, fn) for fn in doc.sequence]
    levels = tuple(args.levels)
    rep = verify_conditions(target, seq, grid=args.grid, levels=levels, tol=args.tol,
                            metric_tol=args.metric_tol)
    r = Report()
    r.add("command", "converge")
    r.add("grid", args.grid)
    r.add("tol", args.tol)
    r.add("metric_tol", args.metric_tol)
    r.add("terms", len(seq))
    coord = rep.coordinate
    t = r.table("residuals", ["n"] + list(coord.residuals))
    for n in range(len(seq)):
        t.rows.append([n] + [float(v[n]) for v in coord.residuals.values()])
    cols = ["n", "eps_thick", "K_thick"]
    cols += [f"eps_F{j}" for j in levels] + [f"K_F{j}" for j in levels] + ["continuity"]
    t = r.table("metric", cols)
    for row in rep.rows:
        t.rows.append([row.n, row.eps_core, row.K_core, *row.eps_F, *row.K_F, row.continuity])
    t = r.table("coordinates", ["coordinate", "converges"])
    for k, v in coord.per_coordinate.items():
        t.rows.append([k, v])
    for k in coord.inert:
        r.warnings.append(f"{k} ignored: target curve is a node")
    r.add("coordinates_converge", coord.converges)
    r.add("eps_thick_decreasing", rep.eps_decreasing)
    r.add("K_thick_decreasing", rep.K_decreasing)
    for j, a, b in zip(levels, rep.eps_F_decreasing, rep.K_F_decreasing):
        r.add(f"eps_F{j}_decreasing", a)
        r.add(f"K_F{j}_decreasing", b)
    r.add("metric_converges", rep.metric_converges)
    r.add("distortion_converges", rep.distortion_converges)
    r.add("exhaustion_converges", rep.exhaustion_converges)
    r.add("coherent", rep.coherent)
    return r


def cmd_distortion(args) -> Report:
    r = Report()
    r.add("command", "distortion")
    r.add("kind", args.kind)
    r.add("grid", args.grid)
    if args.kind == "annulus":
        m = annulus_map(args.ell, args.ell_t, args.theta, args.t, args.t_t)
        r.add("ell", args.ell)
        r.add("ell_t", args.ell_t)
        r.add("theta", args.theta)
        pts = m.chart_grid(args.grid)
        if not m.source.is_cusp:
            pts = pts[pts.real > 0]
        d = measure_distortion(m.eval_halfplane, pts, resolution=args.grid)
    else:
        if len(args.h) != 3 or len(args.h_t) != 3 or len(args.twists) != 3:
            raise InputError("--h, --h-t and --twists take three values each")
        m = pants_map(tuple(args.h), tuple(args.h_t), tuple(args.twists))
        for i in range(3):
            r.add(f"h{i + 1}", float(args.h[i]))
        for i in range(3):
            r.add(f"h_t{i + 1}", float(args.h_t[i]))
        for i in range(3):
            r.add(f"twist{i + 1}", float(args.twists[i]))
        d = pants_map_distortion(m, args.grid)
    r.add("samples", int(d.points.size))
    r.add("skipped_fraction", float(d.skipped))
    r.add("sup_K", d.sup_K)
    r.add("sup_eps", d.sup_eps)
    r.add("sup_eps_inverse", d.sup_eps_inverse)
    return r


# --- entry point -----------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="augteich", description="Teichmueller-space convergence toolkit")
    ap.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the report to this path")
    common.add_argument("--format", choices=("table", "csv"), default="table")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("special", parents=[common], help="special functions")
    p.add_argument("function", choices=("mu", "mu-inverse", "lambda", "annulus-mod"))
    p.add_argument("argument", type=float)
    p.set_defaults(run=cmd_special)

    p = sub.add_parser("bounds", parents=[common], help="distortion constants")
    p.add_argument("--K", type=float)
    p.add_argument("--eps", type=float)
    p.add_argument("--b0", type=float)
    p.add_argument("--b1", type=float)
    p.add_argument("--r", type=float, help="radius for the extension constant")
    p.add_argument("which", help="k-eps, k-tilde, k-hat or extension:<r>")
    p.set_defaults(run=cmd_bounds)

    p = sub.add_parser("surface", parents=[common], help="build a surface from a pants file")
    p.add_argument("file")
    p.add_argument("action", choices=("lengths", "holonomy-traces", "collars"))
    p.set_defaults(run=cmd_surface)

    p = sub.add_parser("converge", parents=[common], help="convergence checks for a sequence")
    p.add_argument("file")
    p.add_argument("--grid", type=int, default=64)
    p.add_argument("--tol", type=float, default=0.1)
    p.add_argument("--metric-tol", type=float, default=0.5)
    p.add_argument("--levels", type=int, nargs="+", default=[2, 4, 8])
    p.set_defaults(run=cmd_converge)

    p = sub.add_parser("distortion", parents=[common], help="standard map distortion sweeps")
    p.add_argument("kind", choices=("annulus", "pants"))
    p.add_argument("--grid", type=int, default=64)
    p.add_argument("--ell", type=float, default=2.0)
    p.add_argument("--ell-t", type=float, default=2.0)
    p.add_argument("--theta", type=float, default=0.0)
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--t-t", type=float)
    p.add_argument("--h", type=float, nargs="+", default=[1.0, 1.0, 1.0])
    p.add_argument("--h-t", type=float, nargs="+", default=[1.0, 1.0, 1.0])
    p.add_argument("--twists", type=float, nargs="+", default=[0.0, 0.0, 0.0])
    p.set_defaults(run=cmd_distortion)
    return ap


_NUMERIC = (ContainmentError, OrientationError, NotStarShapedError, DegeneracyError,
            ArithmeticError)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            report = args.run(args)
        report.warnings.extend(str(w.message) for w in caught)
    except (InputError, ComplexError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except _NUMERIC as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except (BoundVacuousError, BoundDomainError, ModulusDomainError, ValueError) as e:
        print(f"domain error: {e}", file=sys.stderr)
        return EXIT_DOMAIN
    text = format_csv(report) if args.format == "csv" else format_report(report)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
