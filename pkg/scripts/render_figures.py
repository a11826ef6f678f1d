"""Mandelbrot pictures with the cataloged parameters marked, plus the real-line overlay."""
import argparse
from pathlib import Path

from pcfgeom.pcfcatalog import build_catalog
from pcfgeom.realgeom import real_line_search
from pcfgeom.render import RenderConfig, render_mandelbrot, svg_text, write_ppm


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--bound", type=int, default=6)
    ap.add_argument("--res", type=int, default=1200)
    ap.add_argument("--outdir", default="figures")
    args = ap.parse_args(argv)

    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    cat = build_catalog(args.bound)
    markers = tuple(p.approx() for p in cat)
    cfg = RenderConfig(region=(-2.2, 0.8, -1.5, 1.5), width=args.res, markers=markers)
    write_ppm(out / "pcf_parameters.ppm", render_mandelbrot(cfg))

    traces = [r.line.approx(cat) for r in real_line_search(cat, 3)]
    cfg = RenderConfig(region=cfg.region, width=args.res, markers=markers, traces=tuple(traces))
    write_ppm(out / "real_lines.ppm", render_mandelbrot(cfg))
    (out / "real_lines.svg").write_text(svg_text(cfg))
    print(f"wrote {len(markers)} markers and {len(traces)} traces to {out}/")


if __name__ == "__main__":
    main()
