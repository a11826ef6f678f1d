"""Command-line front end.  Every artifact carries the full run config and version."""
import argparse
import csv
import io
import json
import os
import sys
from decimal import Decimal, localcontext
from fractions import Fraction

from . import __version__
from .algebraic import parse_qi
from .balls import to_fraction
from .config import Limits
from .errors import ContractError, IntegrityError, PcfGeomError, ResourceError

EXIT_OK, EXIT_USAGE, EXIT_RESOURCE, EXIT_INTEGRITY, EXIT_IO = 0, 2, 3, 4, 5


# --- formatting -----------------------------------------------------------------

def dec(x, digits=30):
    """Decimal string of an arb midpoint rounded to ``digits`` significant digits."""
    q = to_fraction(x)
    if q == 0:
        return "0"
    with localcontext() as ctx:
        ctx.prec = digits
        v = +(Decimal(q.numerator) / Decimal(q.denominator))
    s = format(v.normalize(), "f") if abs(v.adjusted()) < 40 else format(v.normalize(), "e")
    return s


def dec_complex(b, digits=30):
    return dec(b.real.mid(), digits), dec(b.imag.mid(), digits)


def _meta(args, extra=None):
    cfg = {k: v for k, v in sorted(vars(args).items()) if k != "func"}
    out = {"tool": "pcfgeom", "version": __version__, "command": args.command, "config": cfg}
    if extra:
        out.update(extra)
    return out


def _csv_text(meta, header, rows):
    buf = io.StringIO()
    buf.write("# " + json.dumps(meta, sort_keys=True) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow(r)
    return buf.getvalue()


def _json_text(obj):
    return json.dumps(obj, sort_keys=True, indent=1) + "\n"


def _fmt_for(args):
    if args.format:
        return args.format
    if args.output and args.output.endswith(".csv"):
        return "csv"
    return "json"


def _emit(args, text, binary=False):
    if args.output in (None, "-"):
        if binary:
            sys.stdout.buffer.write(text)
        else:
            sys.stdout.write(text)
        return
    mode = "wb" if binary else "w"
    with open(args.output, mode, **({} if binary else {"encoding": "utf-8", "newline": ""})) as fh:
        fh.write(text)


def _limits(args):
    kw = {}
    if getattr(args, "precision_ceiling", None):
        kw["precision_ceiling"] = args.precision_ceiling
    if getattr(args, "incidence_ceiling", None):
        kw["incidence_ceiling"] = args.incidence_ceiling
    return Limits(**kw)


def _load(args):
    from .pcfcatalog import load_catalog
    return load_catalog(args.catalog, limits=_limits(args))


def _cat_meta(cat):
    return {"catalog": {"bound": cat.bound, "precision": cat.precision, "size": len(cat)}}


def _parse_points(text):
    """'x1,y1;x2,y2;...' with Gaussian rationals or catalog ids."""
    pts = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        parts = chunk.split(",")
        if len(parts) != 2:
            raise ContractError(f"point {chunk!r} must be 'x,y'")
        pts.append(tuple(_coord(p) for p in parts))
    return pts


def _coord(s):
    s = s.strip()
    if s.startswith("p") and "_" in s:
        return s
    return parse_qi(s)


def _qi_str(q):
    return str(q)


# --- commands --------------------------------------------------------------------

def cmd_catalog(args):
    from .pcfcatalog import build_catalog, dumps_catalog
    cat = build_catalog(args.bound, args.precision, workers=args.workers, method=args.method,
                        limits=_limits(args))
    _emit(args, dumps_catalog(cat, meta=_meta(args)))


def _line_rows(cat, recs):
    rows = []
    for r in recs:
        a, b, c = r.line.normalized(cat)
        rows.append([*dec_complex(a), *dec_complex(b), *dec_complex(c), r.kind.value,
                     " ".join(f"{p.x}:{p.y}" for p in r.support), len(r.support), r.bits])
    return rows


_LINE_HEADER = ["a_re", "a_im", "b_re", "b_im", "r_re", "r_im", "classification", "support",
                "support_size", "bits"]


def cmd_lines(args):
    from .incidence import find_lines
    cat = _load(args)
    recs = find_lines(cat, args.k, nonspecial_only=args.nonspecial_only,
                      max_type_sum=args.max_type_sum, max_degree=args.max_degree,
                      limits=_limits(args))
    rows = _line_rows(cat, recs)
    meta = _meta(args, _cat_meta(cat))
    if _fmt_for(args) == "csv":
        _emit(args, _csv_text(meta, _LINE_HEADER, rows))
    else:
        _emit(args, _json_text({"meta": meta, "lines": [dict(zip(_LINE_HEADER, r)) for r in rows]}))


def cmd_reallines(args):
    from .realgeom import real_line_search
    cat = _load(args)
    recs = real_line_search(cat, args.k, limits=_limits(args))
    header = ["a", "b", "r", "classification", "support", "support_size", "bits"]
    rows = []
    for r in recs:
        a, b, c = r.line.normalized_balls(cat)
        rows.append([dec(a.real.mid()), dec(b.real.mid()), dec(c.real.mid()),
                     "RealAxis" if r.is_real_axis else r.kind.value, " ".join(r.support),
                     len(r.support), r.bits])
    meta = _meta(args, _cat_meta(cat))
    if _fmt_for(args) == "csv":
        _emit(args, _csv_text(meta, header, rows))
    else:
        _emit(args, _json_text({"meta": meta, "lines": [dict(zip(header, r)) for r in rows]}))


def _curve_payload(curve, cat, count):
    out = curve.to_json(cat)
    if count is not None:
        out["special_count"] = count.count
        out["special_support"] = [f"{p.x}:{p.y}" for p in count.support]
        out["complete"] = count.complete
    return out


def cmd_fit(args):
    from .curvefit import SolutionFamily, count_special_on_curve, fit_curve
    cat = _load(args) if args.catalog else None
    pts = _parse_points(args.points)
    res = fit_curve(pts, args.degree, cat)
    meta = _meta(args, _cat_meta(cat) if cat else None)
    if isinstance(res, SolutionFamily):
        body = {"family_dimension": res.dimension, "basis": [c.to_json(cat) for c in res.basis]}
    else:
        count = count_special_on_curve(res, cat) if cat else None
        body = {"curve": _curve_payload(res, cat, count)}
    _emit(args, _json_text({"meta": meta, **body}))


def cmd_conic(args):
    from .curvefit import count_special_on_curve, symmetric_conic, symmetric_conic_curve
    cat = _load(args) if args.catalog else None
    pts = _parse_points(args.points)
    if len(pts) != 3:
        raise ContractError("a symmetric conic needs exactly three points")
    A, B, C = symmetric_conic(*pts, cat=cat)
    curve = symmetric_conic_curve(*pts, cat=cat)
    count = count_special_on_curve(curve, cat) if cat else None
    body = {"A": dec_complex(A), "B": dec_complex(B), "C": dec_complex(C),
            "curve": _curve_payload(curve, cat, count)}
    _emit(args, _json_text({"meta": _meta(args, _cat_meta(cat) if cat else None), **body}))


def cmd_heights(args):
    from .heights import canonical_height, green_mandelbrot
    out = {"canonical_height": [], "green_mandelbrot": []}
    for v in _split(args.values):
        q = Fraction(v)
        h = canonical_height(q, bits=args.bits)
        out["canonical_height"].append({
            "c": str(q), "value": repr(h.value), "error": repr(h.error), "exact": h.exact,
            "places": [[str(p), repr(x)] for p, x in h.place_breakdown]})
    for v in _split(args.green):
        z = parse_qi(v)
        g = green_mandelbrot(z, bits=args.bits)
        out["green_mandelbrot"].append({"c": _qi_str(z), "value": repr(g.value),
                                        "lo": repr(g.lo), "hi": repr(g.hi),
                                        "escaped": g.escaped, "iterations": g.iterations})
    _emit(args, _json_text({"meta": _meta(args), **out}))


def _split(text):
    return [t.strip() for t in (text or "").split(",") if t.strip()] if text else []


def _int_range(text):
    if ".." in text:
        a, b = text.split("..")
        return list(range(int(a), int(b) + 1))
    return [int(t) for t in text.split(",")]


def cmd_equidist(args):
    from .equidist import convergence_table, reports_to_csv
    reps = []
    trends = {}
    for zs in _split(args.z):
        z = parse_qi(zs)
        rs, dec_ok = convergence_table(z, _int_range(args.n))
        reps.extend(rs)
        trends[zs] = dec_ok
    meta = _meta(args, {"strictly_decreasing": trends})
    if _fmt_for(args) == "csv":
        body = reports_to_csv(reps)
        _emit(args, "# " + json.dumps(meta, sort_keys=True) + "\n" + body)
    else:
        rows = [{"n": r.n, "z": [repr(r.z.real), repr(r.z.imag)], "empirical": repr(r.empirical),
                 "reference": repr(r.reference), "discrepancy": repr(r.discrepancy),
                 "root_residual": repr(r.root_residual)} for r in reps]
        _emit(args, _json_text({"meta": meta, "reports": rows}))


def cmd_render(args):
    from .render import RenderConfig, ppm_bytes, render_mandelbrot, svg_text
    region = tuple(float(t) for t in args.region.split(","))
    if len(region) != 4:
        raise ContractError("region is re_min,re_max,im_min,im_max")
    markers, traces = (), ()
    overlays = set(_split(args.overlay))
    if "pcf" in overlays:
        if not args.catalog:
            raise ContractError("--overlay pcf needs --catalog")
        cat = _load(args)
        markers = tuple(p.approx() for p in cat)
    if args.lines:
        traces = tuple(_read_real_traces(args.lines))
    cfg = RenderConfig(region=region, width=args.res, height=args.height or 0,
                       max_iter=args.max_iter, markers=markers, traces=traces)
    fmt = args.format or ("svg" if (args.output or "").endswith(".svg") else "ppm")
    if fmt == "svg":
        _emit(args, svg_text(cfg))
    else:
        _emit(args, ppm_bytes(render_mandelbrot(cfg)), binary=True)


def _read_real_traces(path):
    """Real lines a,b,r from a reallines JSON artifact."""
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise IntegrityError(f"{path}: {exc}") from exc
    for rec in data.get("lines", []):
        yield float(rec["a"]), float(rec["b"]), float(rec["r"])


# --- parser -----------------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(prog="pcfgeom", description=__doc__)
    p.add_argument("--version", action="version", version=f"pcfgeom {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, catalog=True, catalog_required=True):
        sp.add_argument("-o", "--output", default=None)
        sp.add_argument("--format", choices=["json", "csv", "ppm", "svg"], default=None)
        sp.add_argument("--precision-ceiling", type=int, default=None)
        sp.add_argument("--incidence-ceiling", type=int, default=None)
        if catalog:
            sp.add_argument("--catalog", required=catalog_required)

    s = sub.add_parser("catalog", help="build a certified PCF catalog")
    s.add_argument("--bound", type=int, default=8)
    s.add_argument("--precision", default="1e-40")
    s.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    s.add_argument("--method", choices=["factor", "classify"], default="factor")
    common(s, catalog=False)
    s.set_defaults(func=cmd_catalog)

    s = sub.add_parser("lines", help="lines through >= k special points")
    s.add_argument("--k", type=int, default=3)
    s.add_argument("--nonspecial-only", action="store_true")
    s.add_argument("--max-type-sum", type=int, default=None)
    s.add_argument("--max-degree", type=int, default=None)
    common(s)
    s.set_defaults(func=cmd_lines)

    s = sub.add_parser("reallines", help="real lines through >= k PCF parameters")
    s.add_argument("--k", type=int, default=3)
    common(s)
    s.set_defaults(func=cmd_reallines)

    s = sub.add_parser("fit", help="curve of degree d through points")
    s.add_argument("--points", required=True, help="'x,y;x,y;...' numbers or catalog ids")
    s.add_argument("--degree", type=int, default=1)
    common(s, catalog_required=False)
    s.set_defaults(func=cmd_fit)

    s = sub.add_parser("conic", help="symmetric conic through three points")
    s.add_argument("--points", required=True)
    common(s, catalog_required=False)
    s.set_defaults(func=cmd_conic)

    s = sub.add_parser("heights", help="canonical heights and Green function values")
    s.add_argument("--values", default="", help="comma-separated rationals")
    s.add_argument("--green", default="", help="comma-separated Gaussian rationals")
    s.add_argument("--bits", type=int, default=128)
    common(s, catalog=False)
    s.set_defaults(func=cmd_heights)

    s = sub.add_parser("equidist", help="empirical potentials of p_n roots")
    s.add_argument("--z", default="2,3,1+2i,10")
    s.add_argument("--n", default="2..8", help="'a..b' or comma list")
    common(s, catalog=False)
    s.set_defaults(func=cmd_equidist)

    s = sub.add_parser("render", help="escape-time picture with overlays")
    s.add_argument("--region", default="-2.2,0.8,-1.5,1.5")
    s.add_argument("--res", type=int, default=600)
    s.add_argument("--height", type=int, default=0)
    s.add_argument("--max-iter", type=int, default=200)
    s.add_argument("--overlay", default="")
    s.add_argument("--lines", default=None, help="reallines JSON to trace")
    common(s, catalog_required=False)
    s.set_defaults(func=cmd_render)
    return p


_VALUE_FLAGS = ("--region", "--z", "--values", "--green", "--points")


def _glue_negative_values(argv):
    """--region -2.2,0.8,... would otherwise be read as an unknown option."""
    out, it = [], iter(argv)
    for a in it:
        if a in _VALUE_FLAGS:
            nxt = next(it, None)
            if nxt is not None and nxt.startswith("-") and not nxt.startswith("--"):
                out.append(f"{a}={nxt}")
                continue
            out.append(a)
            if nxt is not None:
                out.append(nxt)
        else:
            out.append(a)
    return out


def main(argv=None):
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    args = parser.parse_args(_glue_negative_values(argv))
    try:
        args.func(args)
    except ContractError as exc:
        print(f"pcfgeom: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ResourceError as exc:
        print(f"pcfgeom: resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except IntegrityError as exc:
        print(f"pcfgeom: integrity: {exc}", file=sys.stderr)
        return EXIT_INTEGRITY
    except PcfGeomError as exc:
        print(f"pcfgeom: {exc}", file=sys.stderr)
        return exc.exit_code
    except (ValueError, ZeroDivisionError) as exc:
        print(f"pcfgeom: bad argument: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"pcfgeom: I/O: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
