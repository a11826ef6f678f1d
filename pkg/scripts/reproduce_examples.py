"""Print the worked examples: catalog counts, the three lines through the origin,
the symmetric conic, heights, Green values and the two real axes."""
from fractions import Fraction

from pcfgeom.curvefit import conic_from_abc, count_special_on_curve, symmetric_conic
from pcfgeom.heights import canonical_height, green_mandelbrot
from pcfgeom.incidence import find_lines
from pcfgeom.pcfcatalog import build_catalog
from pcfgeom.realgeom import real_line_search


def fmt(z):
    z = complex(z)
    return f"{z.real:+.4f}{z.imag:+.4f}i"


def main():
    cats = {b: build_catalog(b) for b in (3, 4, 5, 6)}
    for b, cat in cats.items():
        print(f"bound {b}: {len(cat)} parameters")

    cat4 = cats[4]
    print("\nnonspecial lines through the origin, bound 4")
    for r in find_lines(cat4, 3, nonspecial_only=True):
        if any(cat4[p.x].approx() == 0 and cat4[p.y].approx() == 0 for p in r.support):
            pts = ", ".join(f"({fmt(cat4[p.x].approx())}, {fmt(cat4[p.y].approx())})" for p in r.support)
            print("  ", pts)

    A, B, C = symmetric_conic((0, -1), (-1, -2), (-2, 0))
    print(f"\nsymmetric conic A,B,C = {fmt(A.mid())}, {fmt(B.mid())}, {fmt(C.mid())}")
    conic = conic_from_abc(1, 3, 2)
    for b in (3, 4, 5):
        print(f"  special points at bound {b}: {count_special_on_curve(conic, cats[b]).count}")

    print("\ncanonical heights")
    for c in (-1, 1, Fraction(1, 2), 2):
        h = canonical_height(c)
        print(f"  h({c}) = {h.value:.6f} +- {h.error:.1e}  places {dict(h.place_breakdown)}")
    print("Green function")
    for c in (2, 10, complex(1, 2)):
        print(f"  G({c}) = {green_mandelbrot(c).value:.9f}")

    print("\nreal lines with >= 3 PCF parameters, bound 6")
    cat6 = cats[6]
    for r in real_line_search(cat6, 3):
        label = "real axis" if r.is_real_axis else r.kind.value
        print(f"  {label}: {len(r.support)} parameters")


if __name__ == "__main__":
    main()
