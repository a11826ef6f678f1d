"""Fit curves through random special points and count the special points they pick up.

Degree 1 uses 2 points, degree 2 uses 5; exceptions are printed with family tags.
"""
import argparse
import random
from collections import Counter

from pcfgeom.curvefit import SolutionFamily, count_special_on_curve, fit_curve, n_d
from pcfgeom.incidence import family_tags, line_through
from pcfgeom.pcfcatalog import SpecialPoint, build_catalog


def sample_points(rng, ids, m, distinct):
    while True:
        coords = [rng.choice(ids) for _ in range(2 * m)]
        if distinct and len(set(coords)) < 2 * m:
            continue
        pts = [SpecialPoint(coords[2 * i], coords[2 * i + 1]) for i in range(m)]
        if len(set(pts)) == m:
            return pts


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--bound", type=int, default=5)
    ap.add_argument("--degree", type=int, default=1)
    ap.add_argument("--samples", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=20261014)
    ap.add_argument("--loose", action="store_true",
                    help="allow repeated coordinate values across points")
    args = ap.parse_args(argv)

    cat = build_catalog(args.bound)
    rng = random.Random(args.seed)
    m = n_d(args.degree)
    hist, families = Counter(), 0
    for _ in range(args.samples):
        pts = sample_points(rng, cat.ids(), m, not args.loose)
        res = fit_curve(pts, args.degree, cat)
        if isinstance(res, SolutionFamily):
            families += 1
            continue
        c = count_special_on_curve(res, cat)
        hist[c.count] += 1
        if c.count != m:
            tags = family_tags(line_through(*pts, cat), c.support, cat) if args.degree == 1 else []
            extra = [str(p) for p in c.support if p not in pts]
            shown = " ".join(extra[:6]) + (" ..." if len(extra) > 6 else "")
            print("exception", " ".join(str(p) for p in pts), "count", c.count, "extra", shown,
                  tags[1:])
    print(f"bound {args.bound}, degree {args.degree}, {args.samples} samples, "
          f"{families} degenerate fits")
    for k in sorted(hist):
        print(f"  {k} special points: {hist[k]}")


if __name__ == "__main__":
    main()
