"""Certified incidences among special points (pairs of PCF parameters).

Coordinates are symbols in the catalog (exact constants where known), so a
collinearity determinant is an exact ``AlgExpr``; its vanishing is decided
by ``decide_zero``.  Floating point is used only to propose candidates.
"""
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .algebraic import QI, AlgExpr, decide_zero
from .balls import precision
from .config import resolve
from .errors import ContractError, ResourceError
from .heights import green_mandelbrot
from .pcfcatalog import SpecialPoint
from .rootcert import Tri


class Verdict(Enum):
    COLLINEAR = "CollinearCertified"
    NOT_COLLINEAR = "NotCollinear"
    UNDECIDED = "Undecided"


@dataclass(frozen=True)
class IncidenceVerdict:
    kind: Verdict
    bits: int = 0

    @property
    def certified(self):
        return self.kind is Verdict.COLLINEAR


class LineKind(Enum):
    VERTICAL = "SpecialVertical"
    HORIZONTAL = "SpecialHorizontal"
    DIAGONAL = "SpecialDiagonal"
    NONSPECIAL = "NonSpecial"
    UNKNOWN = "Unknown"

    @property
    def special(self):
        return self in (LineKind.VERTICAL, LineKind.HORIZONTAL, LineKind.DIAGONAL)


def coord_symbol(c, cat):
    """AlgExpr for a coordinate: a catalog id or an exact number."""
    if isinstance(c, str) and c in cat:
        return cat.symbol(c)
    return AlgExpr.const(QI.of(c))


def _point_symbols(p, cat):
    if isinstance(p, SpecialPoint):
        return cat.symbol(p.x), cat.symbol(p.y)
    x, y = p
    return coord_symbol(x, cat), coord_symbol(y, cat)


@dataclass(frozen=True)
class Line2:
    """a*x + b*y = r with exact symbolic coefficients."""

    a: AlgExpr
    b: AlgExpr
    r: AlgExpr
    source: tuple = ()

    def contains_expr(self, x, y):
        return self.a * x + self.b * y - self.r

    def balls(self, cat, bits=None):
        bits = bits or cat.precision_bits
        names = sorted(set(self.a.variables()) | set(self.b.variables()) | set(self.r.variables()))
        with precision(bits + 32):
            vals = {v: cat.ball(v, bits) for v in names}
            return tuple(e.evaluate(vals) for e in (self.a, self.b, self.r))

    def normalized(self, cat, bits=None):
        """Balls (a, b, r) divided by the larger of |a|, |b|; ties go to a."""
        bits = bits or cat.precision_bits
        with precision(bits + 32):
            a, b, r = self.balls(cat, bits)
            fa, fb = abs(complex(a.mid())), abs(complex(b.mid()))
            piv = a if fa >= fb * (1 - 1e-12) else b
            return a / piv, b / piv, r / piv


def line_through(p, q, cat):
    x1, y1 = _point_symbols(p, cat)
    x2, y2 = _point_symbols(q, cat)
    a, b, r = y2 - y1, x1 - x2, x1 * y2 - x2 * y1
    if a.is_zero() and b.is_zero():
        raise ContractError("a line needs two distinct points")
    return Line2(a, b, r, (p, q))


def _det3(p, q, s, cat):
    x1, y1 = _point_symbols(p, cat)
    x2, y2 = _point_symbols(q, cat)
    x3, y3 = _point_symbols(s, cat)
    return x1 * (y2 - y3) - x2 * (y1 - y3) + x3 * (y1 - y2)


def collinear3(p, q, s, cat, limits=None):
    v = decide_zero(_det3(p, q, s, cat), cat, limits)
    if v.state is Tri.YES:
        return IncidenceVerdict(Verdict.COLLINEAR, v.bits)
    if v.state is Tri.NO:
        return IncidenceVerdict(Verdict.NOT_COLLINEAR, v.bits)
    return IncidenceVerdict(Verdict.UNDECIDED, v.bits)


def on_line(L, p, cat, limits=None):
    x, y = _point_symbols(p, cat)
    return decide_zero(L.contains_expr(x, y), cat, limits)


# --- classification -----------------------------------------------------------

def _value_in_catalog(num, den, cat, limits):
    """Tri: is num/den (symbolic) certified equal to some catalog parameter."""
    with precision(cat.precision_bits + 32):
        vals = {v: cat.ball(v) for v in set(num.variables()) | set(den.variables())}
        z = complex((num.evaluate(vals) / den.evaluate(vals)).mid())
    undecided = False
    for p in cat:
        if abs(p.approx() - z) > 1e-6:
            continue
        v = decide_zero(num - den * cat.symbol(p.id), cat, limits)
        if v.state is Tri.YES:
            return Tri.YES, p.id
        if v.state is Tri.UNDECIDED:
            undecided = True
    if undecided:
        return Tri.UNDECIDED, None
    return Tri.NO, z


def classify_line(L, cat, limits=None):
    za = decide_zero(L.a, cat, limits).state
    zb = decide_zero(L.b, cat, limits).state
    if Tri.UNDECIDED in (za, zb):
        return LineKind.UNKNOWN
    if za is Tri.YES and zb is Tri.YES:
        raise ContractError("degenerate line")
    if zb is Tri.YES or za is Tri.YES:
        lead = L.a if zb is Tri.YES else L.b
        kind = LineKind.VERTICAL if zb is Tri.YES else LineKind.HORIZONTAL
        state, where = _value_in_catalog(L.r, lead, cat, limits)
        if state is Tri.YES:
            return kind
        if state is Tri.NO:
            num, den = L.r.constant_value(), lead.constant_value()
            if num is not None and den is not None:
                return kind if gaussian_is_pcf(num / den) else LineKind.NONSPECIAL
            if green_mandelbrot(complex(where)).escaped:
                return LineKind.NONSPECIAL
        return LineKind.UNKNOWN
    zr = decide_zero(L.r, cat, limits).state
    zs = decide_zero(L.a + L.b, cat, limits).state
    if zr is Tri.YES and zs is Tri.YES:
        return LineKind.DIAGONAL
    if Tri.UNDECIDED in (zr, zs):
        return LineKind.UNKNOWN
    return LineKind.NONSPECIAL


def gaussian_is_pcf(q, max_steps=64):
    """Exact test for a Gaussian rational.  PCF parameters are algebraic integers."""
    if q.denominator() != 1:
        return False
    z, seen = QI(0), set()
    for _ in range(max_steps):
        if z in seen:
            return True
        seen.add(z)
        if z.re * z.re + z.im * z.im > 4 * max(1, q.re * q.re + q.im * q.im):
            return False
        z = z * z + q
    return False


# --- special points and subvarieties -------------------------------------------

def _coordinate_is_special(c, cat, limits):
    if isinstance(c, str):
        return Tri.YES if c in cat else Tri.UNDECIDED
    q = QI.of(c)
    for p in cat:
        if p.exact is not None:
            if p.exact == q:
                return Tri.YES
            continue
        if abs(p.approx() - complex(q)) < 1e-6:
            from .polycore import exact_type_factor
            f = exact_type_factor(p.index)
            if f.poly(q).is_zero():
                return Tri.YES
    return Tri.YES if gaussian_is_pcf(q) else Tri.NO


def is_special_point(values, cat, limits=None):
    """YES if every coordinate is a catalog parameter, NO if one provably is not PCF."""
    states = [_coordinate_is_special(c, cat, limits) for c in values]
    if all(s is Tri.YES for s in states):
        return Tri.YES
    if any(s is Tri.NO for s in states):
        return Tri.NO
    return Tri.UNDECIDED


@dataclass(frozen=True)
class SpecialSubvariety:
    """Coordinates in ``constants`` are fixed (index -> catalog id); each block is a diagonal.

    Indices are 0-based.  Dimension = number of free blocks.
    """

    n: int
    constants: tuple      # ((index, pid), ...)
    blocks: tuple         # (frozenset of indices, ...)

    def __post_init__(self):
        seen = [i for i, _ in self.constants]
        for blk in self.blocks:
            if not blk:
                raise ContractError("free blocks must be nonempty")
            seen.extend(blk)
        if sorted(seen) != list(range(self.n)):
            raise ContractError("blocks must partition the coordinate indices")

    @property
    def dimension(self):
        return len(self.blocks)


def _coords_equal(u, v, cat, limits):
    su = coord_symbol(u, cat)
    sv = coord_symbol(v, cat)
    return decide_zero(su - sv, cat, limits).state


def subvariety_contains(Z, point, cat, limits=None):
    if len(point) != Z.n:
        raise ContractError(f"point has {len(point)} coordinates, Z lives in dimension {Z.n}")
    states = []
    for i, pid in Z.constants:
        states.append(_coords_equal(point[i], pid, cat, limits))
    for blk in Z.blocks:
        idx = sorted(blk)
        for j in idx[1:]:
            states.append(_coords_equal(point[idx[0]], point[j], cat, limits))
    if any(s is Tri.NO for s in states):
        return Tri.NO
    if all(s is Tri.YES for s in states):
        return Tri.YES
    return Tri.UNDECIDED


# --- searches --------------------------------------------------------------------

@dataclass(frozen=True)
class LineRecord:
    line: Line2
    support: tuple        # sorted SpecialPoints
    kind: LineKind
    bits: int

    @property
    def support_ids(self):
        return [str(p) for p in self.support]


def family_tags(L, support, cat, limits=None):
    """Structural reasons a line may carry more than two special points.

    Every line through a special point belongs to the first family, so that tag is
    always present; the finer tags say which sharper pattern the line follows.
    """
    tags = ["through a special point"]
    if classify_line(L, cat, limits).special:
        tags.append("special")
    if decide_zero(L.a - L.b, cat, limits).state is Tri.YES:
        tags.append("x + y constant")
    if any(p.y == q.x for p in support for q in support if p != q):
        tags.append("shared cross coordinate")
    return tags


def select_ids(cat, ids=None, max_type_sum=None, max_degree=None):
    out = []
    for p in cat:
        if ids is not None and p.id not in ids:
            continue
        if max_type_sum is not None and p.index.size > max_type_sum:
            continue
        if max_degree is not None and p.degree > max_degree:
            continue
        out.append(p.id)
    return out


def _slope_groups(dz, tol):
    """Group indices whose projective directions dz = (dx, dy) agree within tol."""
    dx, dy = dz
    ax, ay = np.abs(dx), np.abs(dy)
    charts = []
    with np.errstate(all="ignore"):
        s0 = np.where(ax >= ay, dy / dx, np.nan)
        s1 = np.where(ay >= ax, dx / dy, np.nan)
    # near |dx| = |dy| a direction goes in both charts
    both = (ax > 0.9 * ay) & (ay > 0.9 * ax)
    s0 = np.where(both, dy / np.where(ax > 0, dx, 1), s0)
    s1 = np.where(both, dx / np.where(ay > 0, dy, 1), s1)
    for s in (s0, s1):
        idx = np.nonzero(np.isfinite(s))[0]
        if idx.size == 0:
            continue
        vals = s[idx]
        order = np.lexsort((vals.imag, vals.real))
        idx, vals = idx[order], vals[order]
        groups, cur = [], [0]
        for t in range(1, idx.size):
            if abs(vals[t].real - vals[cur[0]].real) <= tol and any(
                    abs(vals[t] - vals[u]) <= tol for u in cur):
                cur.append(t)
            else:
                groups.append(cur)
                cur = [t]
        groups.append(cur)
        # the real-part sweep can split a cluster whose imaginary parts interleave
        charts.extend([list(idx[g]) for g in groups])
    return charts


def _cluster_directions(anchor, others, coords, tol):
    x0, y0 = coords[anchor]
    pts = np.array([coords[j] for j in others], dtype=complex).reshape(-1, 2)
    dz = (pts[:, 0] - x0, pts[:, 1] - y0)
    scale = np.maximum(1.0, np.maximum(np.abs(dz[0]), np.abs(dz[1])))
    dz = (dz[0] / scale, dz[1] / scale)
    return [[others[t] for t in g] for g in _slope_groups(dz, tol)]


def _verify_support(anchor, group, points, cat, limits, undecided):
    """Split ``group`` into certified-collinear supports through points[anchor]."""
    out = []
    pending = list(group)
    while pending:
        base, rest = pending[0], pending[1:]
        keep, later, bits = [base], [], 0
        for j in rest:
            v = collinear3(points[anchor], points[base], points[j], cat, limits)
            bits = max(bits, v.bits)
            if v.kind is Verdict.COLLINEAR:
                keep.append(j)
            elif v.kind is Verdict.NOT_COLLINEAR:
                later.append(j)
            else:
                undecided.append((points[anchor], points[base], points[j]))
        out.append((keep, bits))
        pending = later
    return out


def _search(cat, points, anchors, k, tol, limits, nonspecial_only):
    coords = [(cat[p.x].approx(), cat[p.y].approx()) for p in points]
    covered = set()
    undecided = []
    records = []
    for i in anchors:
        others = [j for j in range(i + 1, len(points)) if (i, j) not in covered]
        if len(others) < k - 1:
            continue
        for group in _cluster_directions(i, others, coords, tol):
            if len(group) < k - 1:
                continue
            for keep, bits in _verify_support(i, sorted(group), points, cat, limits, undecided):
                support = sorted({i, *keep})
                if len(support) < k:
                    continue
                if all((min(u, v), max(u, v)) in covered for u in support for v in support if u < v):
                    continue
                for u in support:
                    for v in support:
                        if u < v:
                            covered.add((u, v))
                L = line_through(points[support[0]], points[support[1]], cat)
                kind = classify_line(L, cat, limits)
                if nonspecial_only and kind.special:
                    continue
                records.append(LineRecord(L, tuple(sorted(points[u] for u in support)), kind, bits))
    if undecided:
        raise ResourceError(f"{len(undecided)} collinearity tests undecided at the ceiling: "
                            + ", ".join(f"({a},{b},{c})" for a, b, c in undecided[:5]))
    records.sort(key=lambda r: [(p.x, p.y) for p in r.support])
    return records


def find_lines(cat, k=3, *, nonspecial_only=False, ids=None, max_type_sum=None,
               max_degree=None, tol=1e-8, limits=None):
    """Every line through >= k special points built from the selected parameters."""
    if k < 3:
        raise ContractError("k must be at least 3")
    lim = resolve(limits)
    sel = select_ids(cat, ids, max_type_sum, max_degree)
    points = cat.points(sel)
    if len(points) * (len(points) - 1) // 2 > lim.pair_budget:
        raise ResourceError(f"{len(points)} points exceed the pair budget {lim.pair_budget}")
    return _search(cat, points, list(range(len(points))), k, tol, lim, nonspecial_only)


def pencil_two_point_lines(P, cat, *, ids=None, tol=1e-8, limits=None):
    """One line per direction from P to another special point, with full support."""
    lim = resolve(limits)
    sel = select_ids(cat, ids)
    points = cat.points(sel)
    if not points:
        return []
    if P not in points:
        points = [P] + points
    anchor = points.index(P)
    coords = [(cat[p.x].approx(), cat[p.y].approx()) for p in points]
    others = [j for j in range(len(points)) if j != anchor]
    undecided, out = [], []
    for group in _cluster_directions(anchor, others, coords, tol):
        for keep, bits in _verify_support(anchor, sorted(group), points, cat, lim, undecided):
            support = tuple(sorted(points[u] for u in {anchor, *keep}))
            L = line_through(P, points[keep[0]], cat)
            out.append(LineRecord(L, support, classify_line(L, cat, lim), bits))
    if undecided:
        raise ResourceError(f"{len(undecided)} pencil tests undecided at the ceiling")
    # a direction can show up in both slope charts
    uniq = {}
    for r in out:
        uniq.setdefault(r.support, r)
    return sorted(uniq.values(), key=lambda r: [(p.x, p.y) for p in r.support])


@dataclass(frozen=True)
class SumGroup:
    value: complex          # approximation of lambda
    pairs: tuple            # unordered (a, b) id pairs with a + b = lambda
    line: Line2             # x + y = lambda
    support: tuple          # special points (a, b) and (b, a)


def sum_spectrum(cat, *, ids=None, tol=1e-8, limits=None):
    """Group unordered parameter pairs by certified-equal sums a + b."""
    sel = select_ids(cat, ids)
    approx = cat.approx_map()
    pairs = [(a, b) for i, a in enumerate(sel) for b in sel[i:]]
    pairs.sort(key=lambda ab: ((approx[ab[0]] + approx[ab[1]]).real,
                               (approx[ab[0]] + approx[ab[1]]).imag, ab))
    groups = []
    for a, b in pairs:
        s = approx[a] + approx[b]
        placed = False
        for g in groups:
            if abs(g["value"] - s) > tol:
                continue
            ra, rb = g["pairs"][0]
            expr = cat.symbol(a) + cat.symbol(b) - cat.symbol(ra) - cat.symbol(rb)
            v = decide_zero(expr, cat, limits).state
            if v is Tri.UNDECIDED:
                raise ResourceError(f"sum comparison undecided for {a}+{b}")
            if v is Tri.YES:
                g["pairs"].append((a, b))
                placed = True
                break
        if not placed:
            groups.append({"value": s, "pairs": [(a, b)]})
    out = []
    for g in groups:
        ra, rb = g["pairs"][0]
        lam = cat.symbol(ra) + cat.symbol(rb)
        support = sorted({SpecialPoint(a, b) for a, b in g["pairs"]}
                         | {SpecialPoint(b, a) for a, b in g["pairs"]})
        line = Line2(AlgExpr.const(1), AlgExpr.const(1), lam)
        out.append(SumGroup(g["value"], tuple(g["pairs"]), line, tuple(support)))
    out.sort(key=lambda g: (round(g.value.real, 12), round(g.value.imag, 12), g.pairs))
    return out


def horizontal_pair_search(cat, *, ids=None, limits=None):
    """Pairs c1 != c2 with equal nonzero imaginary parts, with the line x + y = c1 + conj(c2)."""
    sel = select_ids(cat, ids)
    approx = cat.approx_map()
    out = []
    for a in sel:
        for b in sel:
            if a == b or abs(approx[a].imag - approx[b].imag) > 1e-6:
                continue
            im_a = cat.symbol(a) - cat.conj_symbol(a)
            im_b = cat.symbol(b) - cat.conj_symbol(b)
            if decide_zero(im_a, cat, limits).state is not Tri.NO:
                continue
            if decide_zero(im_a - im_b, cat, limits).state is not Tri.YES:
                continue
            lam = cat.symbol(a) + cat.conj_symbol(b)
            out.append(((a, b), Line2(AlgExpr.const(1), AlgExpr.const(1), lam)))
    return out
