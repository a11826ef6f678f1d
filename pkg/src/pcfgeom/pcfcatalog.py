"""Catalog of PCF parameters c (f_c(z) = z^2 + c) with m + n <= bound.

Each parameter carries its exact type (m, n), a certified isolating ball for
a root of the exact-type factor, and, for the few rational or Gaussian
rational parameters (0, -1, -2, +-i), the exact value.
"""
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
import json
import math

from flint import acb

from . import __version__
from .algebraic import QI, AlgExpr
from .balls import (ball_from_strings, ball_key, ball_to_strings, pow2_below,
                    radius_fraction, to_fraction)
from .config import resolve
from .errors import (ContractError, InexactDivisionError, IntegrityError,
                     ParseError, ResourceError)
from .polycore import (OrbitIndex, critical_relation_polynomial, divisors,
                       exact_type_factor, orbit_indices, prime_divisors,
                       squarefree_part)
from .rootcert import (Tri, contains_root, isolate_roots, pairwise_disjoint,
                       refine)


@dataclass(eq=False)
class PcfParam:
    id: str
    index: OrbitIndex
    ball: acb
    degree: int                  # degree of the exact-type factor, bounds deg Q(c)/Q
    exact: QI | None = None
    conj_id: str = ""

    @property
    def m(self):
        return self.index.m

    @property
    def n(self):
        return self.index.n

    def approx(self):
        if self.exact is not None:
            return complex(self.exact)
        return complex(self.ball.mid())

    def key(self):
        return (self.id, self.index, ball_key(self.ball), self.degree, self.exact)

    def __repr__(self):
        z = self.approx()
        return f"PcfParam({self.id}, type={self.index}, ~{z.real:.6g}{z.imag:+.6g}i)"


@dataclass(frozen=True, order=True)
class SpecialPoint:
    """A pair (x, y) of catalog parameter ids."""

    x: str
    y: str

    def swap(self):
        return SpecialPoint(self.y, self.x)

    def __str__(self):
        return f"({self.x},{self.y})"


def period_center_count(n):
    """Number of exact period-n centres: sum over d | n of mu(n/d) 2^(d-1)."""
    if n < 1:
        raise ContractError("n must be positive")
    return sum(_mobius(n // d) * 2 ** (d - 1) for d in divisors(n))


def _mobius(n):
    out, p = 1, 2
    while p * p <= n:
        if n % p == 0:
            n //= p
            if n % p == 0:
                return 0
            out = -out
        p += 1
    return -out if n > 1 else out


class Catalog:
    def __init__(self, bound, precision, params, limits=None):
        self.bound = int(bound)
        self.precision = str(precision)
        self.params = tuple(params)
        self.limits = resolve(limits)
        self._by_id = {p.id: p for p in self.params}
        if len(self._by_id) != len(self.params):
            raise IntegrityError("duplicate parameter ids")
        self.precision_bits = -pow2_below(self.precision)
        self._refined = {}

    # --- access
    def __len__(self):
        return len(self.params)

    def __iter__(self):
        return iter(self.params)

    def __getitem__(self, pid):
        try:
            return self._by_id[pid]
        except KeyError:
            raise ContractError(f"unknown parameter id {pid!r}") from None

    def __contains__(self, pid):
        return pid in self._by_id

    def ids(self):
        return [p.id for p in self.params]

    def __eq__(self, other):
        return (isinstance(other, Catalog) and self.bound == other.bound
                and self.precision == other.precision
                and [p.key() for p in self.params] == [p.key() for p in other.params])

    def counts_by_type(self):
        return Counter(p.index for p in self.params)

    def by_value(self, z, tol=1e-12):
        """Id of the parameter whose approximation is within tol of z, or None."""
        z = complex(z)
        for p in self.params:
            if abs(p.approx() - z) < tol:
                return p.id
        return None

    def conj(self, pid):
        return self[pid].conj_id

    def points(self, ids=None):
        ids = self.ids() if ids is None else list(ids)
        return [SpecialPoint(a, b) for a in ids for b in ids]

    def symbol(self, pid):
        p = self[pid]
        return AlgExpr.const(p.exact) if p.exact is not None else AlgExpr.var(pid)

    def conj_symbol(self, pid):
        p = self[pid]
        if p.exact is not None:
            return AlgExpr.const(p.exact.conj())
        return AlgExpr.var(p.conj_id)

    def ball(self, pid, bits=None):
        """Enclosure of the parameter with radius <= 2^-bits (refined and cached)."""
        p = self[pid]
        if p.exact is not None:
            return p.exact.to_acb()
        if bits is None or bits <= self.precision_bits:
            return p.ball
        key = (pid, bits)
        hit = self._refined.get(key)
        if hit is None:
            factor = exact_type_factor(p.index, self.limits)
            lim = self.limits
            if lim.precision_ceiling < bits + 64:
                lim = type(lim)(**{**lim.as_dict(), "precision_ceiling": bits + 256})
            hit = refine(p.ball, factor.poly, Fraction(1, 2 ** bits), limits=lim)
            self._refined[key] = hit
        return hit

    def approx_map(self):
        return {p.id: p.approx() for p in self.params}

    def restricted(self, ids):
        """Sub-catalog on the given ids (conjugate links may dangle)."""
        keep = set(ids)
        sub = Catalog.__new__(Catalog)
        sub.bound, sub.precision, sub.limits = self.bound, self.precision, self.limits
        sub.params = tuple(p for p in self.params if p.id in keep)
        sub._by_id = {p.id: p for p in sub.params}
        sub.precision_bits = self.precision_bits
        sub._refined = self._refined
        return sub


# --- building -------------------------------------------------------------------

def _cell_roots(t, precision_str, limits, method):
    """Isolating balls (as decimal strings) of the exact-type-t parameters."""
    if t.m == 1:
        return []
    if method == "factor":
        try:
            f = exact_type_factor(t, limits)
        except InexactDivisionError:
            return _cell_roots(t, precision_str, limits, "classify")
        if f.poly.degree < 1:
            return []
        rs = isolate_roots(f.poly, precision_str, form=f.form, limits=limits)
        balls = rs.balls()
        for b in balls:
            if not _is_exact_type(b, t, limits):
                raise ResourceError(f"root of type-{t} factor failed the exactness check")
    elif method == "classify":
        g = squarefree_part(critical_relation_polynomial(t, limits))
        rs = isolate_roots(g, precision_str, limits=limits)
        balls = [b for b in rs.balls() if classify_exact_type(b, t, limits) == t]
    else:
        raise ContractError(f"unknown build method {method!r}")
    return [ball_to_strings(b) for b in balls]


def _cell_worker(args):
    m, n, precision_str, limits, method = args
    return _cell_roots(OrbitIndex(m, n), precision_str, limits, method)


def build_catalog(bound=8, precision="1e-40", *, workers=1, method="factor", limits=None):
    """Enumerate all PCF parameters of exact type (m, n) with m + n <= bound."""
    if not isinstance(bound, int) or bound < 1:
        raise ContractError("bound must be a positive integer")
    lim = resolve(limits)
    if 2 ** (bound - 1) > lim.degree_budget:
        raise ResourceError(f"bound {bound} needs degree {2 ** (bound - 1)}, "
                            f"budget is {lim.degree_budget}")
    precision = str(precision)
    if Fraction(_parse_decimal(precision, "precision")) <= 0:
        raise ContractError("precision must be positive")
    cells = orbit_indices(bound)
    jobs = [(t.m, t.n, precision, lim, method) for t in cells]
    if workers and workers > 1:
        from multiprocessing import get_context
        with get_context("spawn").Pool(workers) as pool:
            results = pool.map(_cell_worker, jobs)
    else:
        results = [_cell_worker(j) for j in jobs]
    params = []
    for t, strs in zip(cells, results):
        deg = exact_type_factor(t, lim).poly.degree if t.m != 1 else 0
        balls = [ball_from_strings(*s) for s in strs]
        params.extend(_make_params(t, balls, deg))
    cat = Catalog(bound, precision, params, lim)
    _link_conjugates(cat)
    if not pairwise_disjoint([p.ball for p in cat.params]):
        raise IntegrityError("isolating balls of distinct parameters overlap")
    return cat


def _make_params(t, balls, degree):
    balls = sorted(balls, key=_mid_key)
    exacts = _exact_roots(exact_type_factor(t).poly) if degree in (1, 2) else []
    out = []
    for k, b in enumerate(balls):
        exact = None
        for q in exacts:
            if b.contains(q.to_acb()):
                exact = q
        out.append(PcfParam(f"p{t.m}_{t.n}_{k}", t, b, degree, exact))
    return out


def _mid_key(b):
    return (to_fraction(b.real), to_fraction(b.imag))


def _exact_roots(f):
    """Gaussian-rational roots of a degree 1 or 2 integer polynomial."""
    if f.degree == 1:
        return [QI(Fraction(-f.coeffs[0], f.coeffs[1]))]
    c0, c1, c2 = f.coeffs
    disc = c1 * c1 - 4 * c2 * c0
    r = math.isqrt(abs(disc))
    if r * r != abs(disc):
        return []
    if disc >= 0:
        return [QI(Fraction(-c1 + s * r, 2 * c2)) for s in (1, -1)]
    return [QI(Fraction(-c1, 2 * c2), Fraction(s * r, 2 * c2)) for s in (1, -1)]


def _link_conjugates(cat):
    keys = {}
    for p in cat.params:
        keys[(p.index, ball_key(p.ball))] = p.id
    for p in cat.params:
        partner = keys.get((p.index, ball_key(p.ball.conjugate())))
        if partner is None:
            # tolerate non-exact conjugate boxes from external files
            cands = [q.id for q in cat.params
                     if q.index == p.index and q.ball.overlaps(p.ball.conjugate())]
            if len(cands) != 1:
                raise IntegrityError(f"{p.id}: no unique conjugate partner")
            partner = cands[0]
        p.conj_id = partner


def _is_exact_type(b, t, limits):
    """Certified: b holds no root of G_{m-1,n} nor of G_{m,n/p}."""
    checks = []
    if t.m >= 1:
        checks.append(OrbitIndex(t.m - 1, t.n))
    for p in prime_divisors(t.n):
        checks.append(OrbitIndex(t.m, t.n // p))
    for s in checks:
        if contains_root(_sqf_relation(s, limits), b, limits=limits) is not Tri.NO:
            return False
    return True


_SQF = {}


def _sqf_relation(t, limits=None):
    hit = _SQF.get(t)
    if hit is None:
        hit = _SQF[t] = squarefree_part(critical_relation_polynomial(t, limits))
    return hit


def classify_exact_type(b, t, limits=None):
    """Minimal (m0, n0), m0 <= m, n0 | n, with a certified root of G_{m0,n0} in b."""
    t = t if isinstance(t, OrbitIndex) else OrbitIndex(*t)
    candidates = [m for m in range(0, t.m + 1) if m != 1]
    m0 = None
    for m in candidates:
        v = contains_root(_sqf_relation(OrbitIndex(m, t.n), limits), b, limits=limits)
        if v is Tri.YES:
            m0 = m
            break
        if v is Tri.UNDECIDED:
            raise ResourceError(f"type of ball near {complex(b.mid())} undecided at m={m}")
    if m0 is None:
        raise ContractError("ball does not isolate a root of the given relation")
    for d in divisors(t.n):
        v = contains_root(_sqf_relation(OrbitIndex(m0, d), limits), b, limits=limits)
        if v is Tri.YES:
            return OrbitIndex(m0, d)
        if v is Tri.UNDECIDED:
            raise ResourceError(f"period of ball near {complex(b.mid())} undecided")
    raise ContractError("inconsistent type data")


# --- persistence -----------------------------------------------------------------

def catalog_to_dict(cat, meta=None):
    params = []
    for p in cat.params:
        re, im, rad = ball_to_strings(p.ball)
        params.append({"id": p.id, "m": p.m, "n": p.n, "mid": [re, im], "rad": rad,
                       "poly_degree": p.degree})
    out = {"bound": cat.bound, "precision": cat.precision, "params": params}
    if meta is not None:
        out["meta"] = meta
    return out


def dumps_catalog(cat, meta=None):
    return json.dumps(catalog_to_dict(cat, meta), indent=1, sort_keys=True) + "\n"


def save_catalog(cat, path, meta=None):
    if meta is None:
        meta = {"version": __version__}
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_catalog(cat, meta))


def load_catalog(path, limits=None):
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    return loads_catalog(text, limits)


def loads_catalog(text, limits=None):
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return catalog_from_dict(data, limits)


def _parse_decimal(s, where):
    from decimal import Decimal, InvalidOperation
    if not isinstance(s, str):
        raise ParseError(f"{where}: expected a decimal string")
    try:
        d = Decimal(s)
    except InvalidOperation:
        raise ParseError(f"{where}: {s!r} is not a decimal") from None
    if not d.is_finite():
        raise ParseError(f"{where}: non-finite value")
    return d


def _field(obj, name, where, kind):
    if not isinstance(obj, dict) or name not in obj:
        raise ParseError(f"{where}: missing field {name!r}")
    v = obj[name]
    if kind is int and (not isinstance(v, int) or isinstance(v, bool)):
        raise ParseError(f"{where}.{name}: expected an integer")
    if kind is str and not isinstance(v, str):
        raise ParseError(f"{where}.{name}: expected a string")
    if kind is list and not isinstance(v, list):
        raise ParseError(f"{where}.{name}: expected a list")
    return v


def catalog_from_dict(data, limits=None):
    lim = resolve(limits)
    bound = _field(data, "bound", "catalog", int)
    prec = _field(data, "precision", "catalog", str)
    _parse_decimal(prec, "catalog.precision")
    raw = _field(data, "params", "catalog", list)
    params = []
    for k, item in enumerate(raw):
        where = f"params[{k}]"
        pid = _field(item, "id", where, str)
        m = _field(item, "m", where, int)
        n = _field(item, "n", where, int)
        mid = _field(item, "mid", where, list)
        if len(mid) != 2:
            raise ParseError(f"{where}.mid: expected [re, im]")
        rad = _field(item, "rad", where, str)
        deg = _field(item, "poly_degree", where, int)
        for j, s in enumerate(mid):
            _parse_decimal(s, f"{where}.mid[{j}]")
        _parse_decimal(rad, f"{where}.rad")
        try:
            t = OrbitIndex(m, n)
            b = ball_from_strings(mid[0], mid[1], rad)
        except ContractError as exc:
            raise ParseError(f"{where}: {exc}") from None
        params.append((pid, t, b, deg))
    return _validated(bound, prec, params, lim)


def _validated(bound, prec, raw, lim):
    if bound < 1 or 2 ** (bound - 1) > lim.degree_budget:
        raise IntegrityError(f"bound {bound} outside the degree budget")
    target = Fraction(_parse_decimal(prec, "precision"))
    by_type = {}
    for pid, t, b, deg in raw:
        if t.m == 1 or t.size > bound:
            raise IntegrityError(f"{pid}: type {t} not admissible for bound {bound}")
        f = exact_type_factor(t, lim)
        if deg != f.poly.degree:
            raise IntegrityError(f"{pid}: poly_degree {deg}, expected {f.poly.degree}")
        if radius_fraction(b) > target:
            raise IntegrityError(f"{pid}: radius exceeds the recorded precision")
        # the ball must certify a root of G_t that has exact type t
        if contains_root(f.poly, b, limits=lim) is not Tri.YES:
            raise IntegrityError(f"{pid}: ball does not certify a root of its factor")
        if contains_root(_sqf_relation(t, lim), b, limits=lim) is not Tri.YES:
            raise IntegrityError(f"{pid}: ball does not certify a root of G{t}")
        if not _is_exact_type(b, t, lim):
            raise IntegrityError(f"{pid}: exact type {t} not certified")
        by_type.setdefault(t, []).append((pid, b))
    for t in orbit_indices(bound):
        want = exact_type_factor(t, lim).poly.degree if t.m != 1 else 0
        have = len(by_type.get(t, []))
        if have != want:
            raise IntegrityError(f"type {t}: {have} parameters, expected {want}")
    params = []
    for t in sorted(by_type):
        f = exact_type_factor(t, lim)
        exacts = _exact_roots(f.poly) if f.poly.degree in (1, 2) else []
        for pid, b in by_type[t]:
            exact = next((q for q in exacts if b.contains(q.to_acb())), None)
            params.append(PcfParam(pid, t, b, f.poly.degree, exact))
    order = {pid: k for k, (pid, *_rest) in enumerate(raw)}
    params.sort(key=lambda p: order[p.id])
    cat = Catalog(bound, prec, params, lim)
    if not pairwise_disjoint([p.ball for p in cat.params]):
        raise IntegrityError("isolating balls overlap")
    _link_conjugates(cat)
    return cat
