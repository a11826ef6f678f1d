"""Plane curves through special points, symmetric conics and special-point counts.

Curves carry exact coefficients: ``AlgExpr`` polynomials in catalog symbols
(constants when the inputs are exact numbers).  The curve through N_d points
is read off as the cofactor vector of the evaluation matrix, so membership of
a further point is the vanishing of an exact determinant.
"""
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .algebraic import QI, AlgExpr, decide_zero
from .balls import precision
from .errors import ContractError, DegeneracyError, ResourceError
from .incidence import coord_symbol, select_ids
from .pcfcatalog import SpecialPoint
from .rootcert import Tri


def n_d(d):
    if not isinstance(d, int) or d < 1:
        raise ContractError("degree must be a positive integer")
    return d * (d + 3) // 2


def monomials(d):
    """Exponents (i, j) of x^i y^j, i + j <= d, graded-lex with x before y."""
    out = []
    for t in range(d + 1):
        for i in range(t, -1, -1):
            out.append((i, t - i))
    return out


def _pt_symbols(p, cat):
    if isinstance(p, SpecialPoint):
        if cat is None:
            raise ContractError("catalog ids need a catalog")
        return cat.symbol(p.x), cat.symbol(p.y)
    x, y = p
    return coord_symbol(x, cat) if cat is not None else AlgExpr.const(QI.of(x)), \
        coord_symbol(y, cat) if cat is not None else AlgExpr.const(QI.of(y))


def _row(xs, ys, d):
    px = [AlgExpr.const(1)]
    py = [AlgExpr.const(1)]
    for _ in range(d):
        px.append(px[-1] * xs)
        py.append(py[-1] * ys)
    return [px[i] * py[j] for i, j in monomials(d)]


@dataclass(frozen=True)
class PlaneCurve:
    d: int
    coeffs: tuple            # AlgExpr per monomial, in ``monomials(d)`` order
    through: tuple = ()      # defining points, if fitted

    def __post_init__(self):
        if len(self.coeffs) != (self.d + 1) * (self.d + 2) // 2:
            raise ContractError("wrong number of coefficient slots")

    @classmethod
    def from_numbers(cls, d, coeffs):
        """Curve from a {(i, j): number} map or a full coefficient list."""
        if isinstance(coeffs, dict):
            slots = [AlgExpr.const(QI.of(coeffs.get(m, 0))) for m in monomials(d)]
        else:
            slots = [AlgExpr.lift(c) if isinstance(c, AlgExpr) else AlgExpr.const(QI.of(c))
                     for c in coeffs]
        return cls(d, tuple(slots))

    def at(self, x, y):
        """Exact value of the defining polynomial at symbolic (x, y)."""
        acc = AlgExpr()
        for c, mono in zip(self.coeffs, _row(x, y, self.d)):
            if not c.is_zero():
                acc = acc + c * mono
        return acc

    def contains(self, p, cat=None, limits=None):
        x, y = _pt_symbols(p, cat)
        e = self.at(x, y)
        if cat is None:
            val = e.constant_value()
            if val is None:
                raise ContractError("symbolic points need a catalog")
            return Tri.YES if val.is_zero() else Tri.NO
        return decide_zero(e, cat, limits).state

    def is_certified_nonzero(self, cat=None, limits=None):
        for c in self.coeffs:
            if c.is_zero():
                continue
            if cat is None:
                return True
            if decide_zero(c, cat, limits).state is Tri.NO:
                return True
        return False

    def balls(self, cat=None, bits=128):
        with precision(bits + 32):
            vals = {}
            if cat is not None:
                names = {v for c in self.coeffs for v in c.variables()}
                vals = {v: cat.ball(v, bits) for v in names}
            return [c.evaluate(vals) for c in self.coeffs]

    def approx(self, cat=None):
        return np.array([complex(b.mid()) for b in self.balls(cat, 64)])

    def normalized(self, cat=None, bits=128):
        """Coefficient balls divided by the largest-magnitude one (first wins a tie)."""
        bs = self.balls(cat, bits)
        mags = [abs(complex(b.mid())) for b in bs]
        top = max(mags)
        piv = next(k for k, m in enumerate(mags) if m >= top * (1 - 1e-12))
        with precision(bits + 32):
            return [b / bs[piv] for b in bs]

    def equals(self, other, cat=None, limits=None):
        """Certified proportionality of coefficient vectors."""
        if self.d != other.d:
            return False
        mags = np.abs(self.approx(cat))
        k = int(np.argmax(mags))
        for a, b in zip(self.coeffs, other.coeffs):
            e = a * other.coeffs[k] - b * self.coeffs[k]
            if e.is_zero():
                continue
            if cat is None:
                return False
            if decide_zero(e, cat, limits).state is not Tri.YES:
                return False
        return not other.coeffs[k].is_zero() or cat is not None

    def to_json(self, cat=None, bits=128):
        from .balls import ball_to_strings
        out = []
        for (i, j), b in zip(monomials(self.d), self.balls(cat, bits)):
            re, im, rad = ball_to_strings(b)
            out.append([i, j, re, im, rad])
        return {"d": self.d, "coeffs": out}


@dataclass(frozen=True)
class SolutionFamily:
    """Rank-deficient fit: every curve in the span of ``basis`` passes through the points.

    ``dimension`` is projective: a pencil has dimension 1 and two basis curves.
    """

    d: int
    dimension: int
    basis: tuple             # PlaneCurves
    rank: int = 0


def _det(rows):
    """Determinant of a square AlgExpr matrix by expansion with minor memoisation."""
    n = len(rows)
    if n == 0:
        return AlgExpr.const(1)
    memo = {}

    def minor(r, cols):
        if r == n:
            return AlgExpr.const(1)
        key = (r, cols)
        hit = memo.get(key)
        if hit is not None:
            return hit
        acc = AlgExpr()
        sign = 1
        for pos, c in enumerate(cols):
            entry = rows[r][c]
            if not entry.is_zero():
                sub = minor(r + 1, cols[:pos] + cols[pos + 1:])
                term = entry * sub
                acc = acc + term if sign > 0 else acc - term
            sign = -sign
        memo[key] = acc
        return acc

    return minor(0, tuple(range(n)))


def _float_rank(M):
    s = np.linalg.svd(M, compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > s[0] * 1e-9))


def _certified_rank(rows, cat, limits):
    """Rank with a certified nonzero r-minor, pivots chosen from a float elimination."""
    m, n = len(rows), len(rows[0])
    approx = np.array([[_approx_expr(e, cat) for e in row] for row in rows])
    r = _float_rank(approx)
    # pivot rows/cols via full pivoting on the float matrix
    A = approx.copy()
    prow, pcol = [], []
    rows_left, cols_left = list(range(m)), list(range(n))
    for _ in range(r):
        sub = np.abs(A[np.ix_(rows_left, cols_left)])
        a, b = np.unravel_index(int(np.argmax(sub)), sub.shape)
        i, j = rows_left[a], cols_left[b]
        prow.append(i)
        pcol.append(j)
        for t in rows_left:
            if t != i:
                A[t] -= A[t, j] / A[i, j] * A[i]
        rows_left.remove(i)
        cols_left.remove(j)
    prow.sort()
    pcol.sort()

    def minor(rs, cs):
        return _det([[rows[i][j] for j in cs] for i in rs])

    if r:
        v = decide_zero(minor(prow, pcol), cat, limits).state if cat else _const_state(minor(prow, pcol))
        if v is Tri.UNDECIDED:
            raise ResourceError("pivot minor undecided at the precision ceiling")
        if v is Tri.YES:
            raise ResourceError("floating rank estimate was not certified")
    for i in range(m):
        if i in prow:
            continue
        for j in range(n):
            if j in pcol:
                continue
            e = minor(sorted(prow + [i]), sorted(pcol + [j]))
            v = decide_zero(e, cat, limits).state if cat else _const_state(e)
            if v is Tri.UNDECIDED:
                raise ResourceError("bordering minor undecided at the precision ceiling")
            if v is Tri.NO:
                raise ResourceError("floating rank estimate too low; rank not certified")
    return r, prow, pcol


def _const_state(e):
    val = e.constant_value()
    if val is None:
        raise ContractError("symbolic entries need a catalog")
    return Tri.YES if val.is_zero() else Tri.NO


def _approx_expr(e, cat):
    val = e.constant_value()
    if val is not None:
        return complex(val)
    with precision(96):
        return complex(e.evaluate({v: cat.ball(v) for v in e.variables()}).mid())


def fit_curve(points, d, cat=None, limits=None):
    """Curve of degree d through the points, or the family when the points impose fewer conditions."""
    N = n_d(d)
    if len(points) > N:
        raise ContractError(f"at most {N} points for degree {d}")
    rows = [_row(*_pt_symbols(p, cat), d) for p in points]
    ncols = N + 1
    if not rows:
        basis = tuple(PlaneCurve.from_numbers(d, {m: 1}) for m in monomials(d))
        return SolutionFamily(d, ncols - 1, basis, 0)
    r, prow, pcol = _certified_rank(rows, cat, limits)
    free = [j for j in range(ncols) if j not in pcol]
    basis = []
    sub = [rows[i] for i in prow]
    for f in free:
        # Cramer: kernel vector with a 1-entry scaled to det on the free column f
        cols = pcol + [f]
        vec = [AlgExpr() for _ in range(ncols)]
        for pos, c in enumerate(cols):
            others = cols[:pos] + cols[pos + 1:]
            cof = _det([[row[j] for j in others] for row in sub])
            vec[c] = cof if pos % 2 == 0 else -cof
        basis.append(PlaneCurve(d, tuple(vec), tuple(points)))
    if len(basis) == 1:
        return basis[0]
    return SolutionFamily(d, len(basis) - 1, tuple(basis), r)


def _symmetric_system(pts, cat, limits):
    rows, rhs = [], []
    for p in pts:
        x, y = _pt_symbols(p, cat)
        rows.append([x * y, x + y, AlgExpr.const(1)])
        rhs.append(-(x * x + y * y))
    D = _det(rows)
    state = decide_zero(D, cat, limits).state if cat else _const_state(D)
    if state is not Tri.NO:
        for a, b in combinations(range(3), 2):
            if all(_is_zero(rows[a][k] - rows[b][k], cat, limits) for k in range(3)):
                raise DegeneracyError(f"points {pts[a]} and {pts[b]} give identical constraints "
                                      "(a point and its swap, or a repeated point)")
        if state is Tri.UNDECIDED:
            raise ResourceError("conic system determinant undecided")
        raise DegeneracyError("the three constraints are linearly dependent")
    nums = []
    for k in range(3):
        mat = [[rhs[i] if j == k else rows[i][j] for j in range(3)] for i in range(3)]
        nums.append(_det(mat))
    return nums, D


def symmetric_conic(p1, p2, p3, cat=None, limits=None, bits=128):
    """Balls (A, B, C) with x^2 + y^2 + A xy + B (x + y) + C = 0 through the points.

    Exact inputs give exact (radius zero) balls when the values are dyadic.
    """
    nums, D = _symmetric_system([p1, p2, p3], cat, limits)
    dv = D.constant_value()
    if dv is not None:
        exact = [AlgExpr({m: c / dv for m, c in e.terms.items()}) for e in nums]
        if all(e.constant_value() is not None for e in exact):
            with precision(bits + 32):
                return tuple(e.constant_value().to_acb() for e in exact)
    curve = symmetric_conic_curve(p1, p2, p3, cat, limits)
    bs = curve.balls(cat, bits)
    with precision(bits + 32):
        lead = bs[monomials(2).index((2, 0))]
        return (bs[monomials(2).index((1, 1))] / lead, bs[monomials(2).index((1, 0))] / lead,
                bs[0] / lead)


def symmetric_conic_curve(p1, p2, p3, cat=None, limits=None):
    """The symmetric conic as an exact PlaneCurve (scaled by the system determinant)."""
    (na, nb, nc), D = _symmetric_system([p1, p2, p3], cat, limits)
    dv = D.constant_value()
    if dv is not None:
        na, nb, nc = (AlgExpr({m: c / dv for m, c in e.terms.items()}) for e in (na, nb, nc))
        D = AlgExpr.const(1)
    slot = {(0, 0): nc, (1, 0): nb, (0, 1): nb, (2, 0): D, (1, 1): na, (0, 2): D}
    return PlaneCurve(2, tuple(slot.get(m, AlgExpr()) for m in monomials(2)), (p1, p2, p3))


def _is_zero(e, cat, limits):
    if e.is_zero():
        return True
    if cat is None:
        return _const_state(e) is Tri.YES
    return decide_zero(e, cat, limits).state is Tri.YES


def conic_from_abc(A, B, C):
    """PlaneCurve x^2 + y^2 + A xy + B x + B y + C."""
    A, B, C = (AlgExpr.lift(t) for t in (A, B, C))
    one = AlgExpr.const(1)
    slot = {(0, 0): C, (1, 0): B, (0, 1): B, (2, 0): one, (1, 1): A, (0, 2): one}
    return PlaneCurve(2, tuple(slot.get(m, AlgExpr()) for m in monomials(2)))


@dataclass(frozen=True)
class CountResult:
    count: int
    support: tuple           # SpecialPoints on the curve
    undecided: tuple = field(default=())

    @property
    def complete(self):
        return not self.undecided


def count_special_on_curve(C, cat, *, ids=None, limits=None, filter_margin=1e-9):
    """Exact count of catalog special points on C.

    A float sweep over all pairs discards points where |C| exceeds
    ``filter_margin`` times the sum of term magnitudes (orders of magnitude
    above double rounding for these degrees); the rest get certified verdicts.
    """
    sel = select_ids(cat, ids)
    if not sel:
        return CountResult(0, ())
    z = np.array([cat[p].approx() for p in sel])
    coef = C.approx(cat)
    X, Y = np.meshgrid(z, z, indexing="ij")
    val = np.zeros_like(X)
    mag = np.zeros(X.shape)
    for c, (i, j) in zip(coef, monomials(C.d)):
        if c == 0:
            continue
        t = c * X ** i * Y ** j
        val += t
        mag += np.abs(t)
    cand = np.argwhere(np.abs(val) <= filter_margin * np.maximum(mag, 1e-300))
    support, undecided = [], []
    for a, b in cand:
        P = SpecialPoint(sel[a], sel[b])
        v = decide_zero(C.at(cat.symbol(P.x), cat.symbol(P.y)), cat, limits).state
        if v is Tri.YES:
            support.append(P)
        elif v is Tri.UNDECIDED:
            undecided.append(P)
    support.sort()
    return CountResult(len(support), tuple(support), tuple(sorted(undecided)))
