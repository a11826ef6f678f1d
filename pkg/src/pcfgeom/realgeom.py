"""Real curves in R^2 = C and the complex curves they induce in C^2.

A parameter c = x + iy lies on the real curve P(x, y) = 0 exactly when
(c, conj(c)) lies on the complex curve obtained by x = (u + v)/2,
y = (u - v)/(2i).
"""
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .algebraic import QI, AlgExpr, decide_zero
from .balls import precision
from .config import resolve
from .curvefit import PlaneCurve, monomials
from .errors import ContractError, ResourceError
from .incidence import Line2, classify_line, select_ids
from .rootcert import Tri

_HALF = QI(Fraction(1, 2))
_HALF_OVER_I = QI(0, Fraction(-1, 2))     # 1/(2i)


def _lift(c):
    return c if isinstance(c, AlgExpr) else AlgExpr.const(QI.of(c))


@dataclass(frozen=True)
class RealLine:
    """a*x + b*y = r in R^2, coefficients real (exact numbers or real-valued AlgExprs)."""

    a: object
    b: object
    r: object

    def __post_init__(self):
        for name in ("a", "b", "r"):
            object.__setattr__(self, name, _lift(getattr(self, name)))
        if self.a.is_zero() and self.b.is_zero():
            raise ContractError("(a, b) must not both vanish")

    def normalized_balls(self, cat, bits=None):
        """(a, b, r) enclosures scaled so the larger of |a|, |b| is 1."""
        bits = bits or cat.precision_bits
        names = sorted({v for e in (self.a, self.b, self.r) for v in e.variables()})
        with precision(bits + 32):
            vals = {v: cat.ball(v) for v in names}
            a, b, r = (e.evaluate(vals) for e in (self.a, self.b, self.r))
            amag, bmag = abs(complex(a.mid())), abs(complex(b.mid()))
            piv = a if amag >= bmag * (1 - 1e-12) else b
            return a / piv, b / piv, r / piv

    def approx(self, cat):
        return tuple(float(x.real.mid()) for x in self.normalized_balls(cat))


def real_line_to_complex(L):
    """Line (a - ib)/2 * x + (a + ib)/2 * y = r in C^2."""
    i = AlgExpr.const(QI(0, 1))
    a = (L.a - i * L.b) * _HALF
    b = (L.a + i * L.b) * _HALF
    return Line2(a, b, L.r)


def _as_real_poly(P):
    """{(i, j): QI} from a dict, a PlaneCurve with constant coefficients, or a monomial list."""
    if isinstance(P, PlaneCurve):
        out = {}
        for m, c in zip(monomials(P.d), P.coeffs):
            v = c.constant_value()
            if v is None:
                raise ContractError("real curves need numeric coefficients")
            if not v.is_zero():
                out[m] = v
        return out
    if isinstance(P, dict):
        items = P.items()
    else:
        items = ((tuple(t[:2]), t[2]) for t in P)
    out = {}
    for (i, j), c in items:
        q = QI.of(c)
        if not q.is_real():
            raise ContractError("real curves need real coefficients")
        if not q.is_zero():
            out[(int(i), int(j))] = out.get((int(i), int(j)), QI(0)) + q
    if not out:
        raise ContractError("the zero polynomial defines no curve")
    return out


def real_curve_to_complex(P):
    """Substitute x = (u+v)/2, y = (u-v)/(2i); the result is a PlaneCurve in (u, v)."""
    poly = _as_real_poly(P)
    d = max(i + j for i, j in poly)
    if d < 1:
        raise ContractError("a curve needs degree at least 1")
    u, v = AlgExpr.var("u"), AlgExpr.var("v")
    x = (u + v) * _HALF
    y = (u - v) * _HALF_OVER_I
    total = AlgExpr()
    for (i, j), c in poly.items():
        total = total + (x ** i) * (y ** j) * c
    coeffs = []
    for (i, j) in monomials(d):
        mono = tuple(m for m in (("u", i), ("v", j)) if m[1])
        coeffs.append(AlgExpr.const(total.terms.get(mono, QI(0))))
    return PlaneCurve(d, tuple(coeffs))


def pcf_on_real_curve(P, cat, *, ids=None, limits=None):
    """Catalog ids c with (c, conj c) certified on the complexified curve."""
    C = real_curve_to_complex(P)
    sel = select_ids(cat, ids)
    coef = C.approx()
    out, undecided = [], []
    for pid in sel:
        z = cat[pid].approx()
        val, mag = 0j, 0.0
        for c, (i, j) in zip(coef, monomials(C.d)):
            t = c * z ** i * z.conjugate() ** j
            val += t
            mag += abs(t)
        if abs(val) > 1e-9 * max(mag, 1e-300):
            continue
        e = C.at(cat.symbol(pid), cat.conj_symbol(pid))
        v = decide_zero(e, cat, limits).state
        if v is Tri.YES:
            out.append(pid)
        elif v is Tri.UNDECIDED:
            undecided.append(pid)
    if undecided:
        raise ResourceError(f"membership undecided for {undecided}")
    return out


def _real_line_through(p, q, cat):
    cp, cq = cat.symbol(p), cat.symbol(q)
    bp, bq = cat.conj_symbol(p), cat.conj_symbol(q)
    dz, dzb = cq - cp, bq - bp
    dx = (dz + dzb) * _HALF
    dy = (dz - dzb) * _HALF_OVER_I
    xp = (cp + bp) * _HALF
    yp = (cp - bp) * _HALF_OVER_I
    return RealLine(dy, -dx, dy * xp - dx * yp)


@dataclass(frozen=True)
class RealLineRecord:
    line: RealLine
    support: tuple            # catalog ids
    kind: object              # LineKind of the complexified line
    bits: int = 0

    @property
    def is_real_axis(self):
        return self.kind.name == "DIAGONAL"


def _on_real_line(p, q, s, cat, limits):
    """Exact test that s lies on the real line through p and q."""
    cp, cq, cs = cat.symbol(p), cat.symbol(q), cat.symbol(s)
    bp, bq, bs = cat.conj_symbol(p), cat.conj_symbol(q), cat.conj_symbol(s)
    e = (cs - cp) * (bq - bp) - (bs - bp) * (cq - cp)
    return decide_zero(e, cat, limits)


def real_line_search(cat, k=3, *, ids=None, tol=1e-9, limits=None):
    """All real lines carrying at least k catalog parameters."""
    if k < 3:
        raise ContractError("k must be at least 3")
    lim = resolve(limits)
    sel = select_ids(cat, ids)
    z = np.array([cat[p].approx() for p in sel])
    covered = set()
    undecided = []
    records = []
    for i in range(len(sel)):
        others = np.array([j for j in range(i + 1, len(sel)) if (i, j) not in covered], dtype=int)
        if others.size < k - 1:
            continue
        d = z[others] - z[i]
        w = d * d / np.abs(d) ** 2         # doubled direction angle, sign-free
        order = np.lexsort((w.imag, w.real))
        groups, cur = [], [order[0]]
        for t in order[1:]:
            if abs(w[t] - w[cur[0]]) <= tol:
                cur.append(t)
            else:
                groups.append(cur)
                cur = [t]
        groups.append(cur)
        # angles near the branch cut w = -1 approach from both sides of the real sweep
        extra = [t for t in range(others.size) if abs(w[t] + 1) <= tol]
        if len(extra) > 1:
            groups.append(extra)
        for g in groups:
            pending = sorted(int(others[t]) for t in g)
            while len(pending) >= k - 1:
                base, rest = pending[0], pending[1:]
                keep, later, bits = [base], [], 0
                for j in rest:
                    v = _on_real_line(sel[i], sel[base], sel[j], cat, lim)
                    bits = max(bits, v.bits)
                    if v.state is Tri.YES:
                        keep.append(j)
                    elif v.state is Tri.NO:
                        later.append(j)
                    else:
                        undecided.append((sel[i], sel[base], sel[j]))
                pending = later
                support = sorted({i, *keep})
                if len(support) < k:
                    continue
                if all((u, v) in covered for u in support for v in support if u < v):
                    continue
                covered.update((u, v) for u in support for v in support if u < v)
                L = _real_line_through(sel[support[0]], sel[support[1]], cat)
                kind = classify_line(real_line_to_complex(L), cat, lim)
                records.append(RealLineRecord(L, tuple(sel[u] for u in support), kind, bits))
    if undecided:
        raise ResourceError(f"{len(undecided)} real collinearity tests undecided")
    records.sort(key=lambda r: r.support)
    return records
