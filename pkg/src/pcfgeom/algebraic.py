"""Exact expressions in catalog parameters and certified zero tests.

An ``AlgExpr`` is a polynomial with Gaussian-rational coefficients in
variables that name catalog parameters.  Parameters with a known exact value
(0, -1, -2, +-i, ...) enter as constants, so many incidences cancel
symbolically.  Otherwise the expression is evaluated in ball arithmetic and
compared against a separation bound:

every catalog parameter is an algebraic integer whose conjugates are PCF
parameters too, hence of modulus <= 2.  For E = sum a_t * prod x^e with
common denominator L, L*E is an algebraic integer in a field of degree
D <= prod deg(x) (times 2 if some coefficient is non-real), and every
conjugate of L*E is bounded by B = L * sum |a_t| 2^{deg t}.  If E != 0 the
norm of L*E is a nonzero integer, so |E| >= B^{-(D-1)} / L.
"""
from dataclasses import dataclass
from fractions import Fraction
import math

from flint import acb, arb

from .balls import arb_rational, precision
from .config import resolve
from .errors import ContractError
from .rootcert import Tri


@dataclass(frozen=True)
class QI:
    """Gaussian rational re + im*i."""

    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "re", Fraction(self.re))
        object.__setattr__(self, "im", Fraction(self.im))

    @classmethod
    def of(cls, z):
        if isinstance(z, QI):
            return z
        if isinstance(z, complex):
            return cls(Fraction(z.real), Fraction(z.imag))
        if isinstance(z, str):
            return parse_qi(z)
        return cls(Fraction(z), 0)

    def __add__(self, o):
        o = QI.of(o)
        return QI(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return QI(-self.re, -self.im)

    def __sub__(self, o):
        return self + (-QI.of(o))

    def __rsub__(self, o):
        return QI.of(o) - self

    def __mul__(self, o):
        o = QI.of(o)
        return QI(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, o):
        o = QI.of(o)
        n = o.re * o.re + o.im * o.im
        if n == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        return self * QI(o.re / n, -o.im / n)

    def __rtruediv__(self, o):
        return QI.of(o) / self

    def __pow__(self, k):
        out = QI(1)
        for _ in range(k):
            out = out * self
        return out

    def conj(self):
        return QI(self.re, -self.im)

    def is_zero(self):
        return self.re == 0 and self.im == 0

    def is_real(self):
        return self.im == 0

    def abs_upper(self):
        return abs(self.re) + abs(self.im)

    def denominator(self):
        return math.lcm(self.re.denominator, self.im.denominator)

    def to_acb(self):
        return acb(arb_rational(self.re), arb_rational(self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return f"{self.im}i"
        sign = "+" if self.im > 0 else "-"
        return f"{self.re}{sign}{abs(self.im)}i"


def parse_qi(s):
    """Parse 'a', 'a/b', 'a+bi', '-i', '1/2-3/4i'."""
    t = s.strip().replace(" ", "").replace("j", "i")
    if not t:
        raise ContractError("empty number")
    if not t.endswith("i"):
        return QI(Fraction(t))
    body = t[:-1]
    # split at the last sign that is not at position 0 or after 'e'
    cut = -1
    for k in range(len(body) - 1, 0, -1):
        if body[k] in "+-" and body[k - 1] not in "eE/":
            cut = k
            break
    if cut == -1:
        re, im = "0", body
    else:
        re, im = body[:cut], body[cut:]
    if im in ("", "+"):
        im = "1"
    elif im == "-":
        im = "-1"
    try:
        return QI(Fraction(re), Fraction(im))
    except (ValueError, ZeroDivisionError) as exc:
        raise ContractError(f"cannot parse {s!r} as a Gaussian rational") from exc


ONE = QI(1)
ZERO = QI(0)
I = QI(0, 1)


class AlgExpr:
    """Sparse polynomial: {monomial: QI}, a monomial is a sorted tuple of (var, exp)."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {m: c for m, c in (terms or {}).items() if not c.is_zero()}

    @classmethod
    def const(cls, q):
        q = QI.of(q)
        return cls({(): q}) if not q.is_zero() else cls()

    @classmethod
    def var(cls, name):
        return cls({((name, 1),): ONE})

    @staticmethod
    def lift(x):
        return x if isinstance(x, AlgExpr) else AlgExpr.const(x)

    def __add__(self, o):
        o = AlgExpr.lift(o)
        out = dict(self.terms)
        for m, c in o.terms.items():
            out[m] = out[m] + c if m in out else c
        return AlgExpr(out)

    __radd__ = __add__

    def __neg__(self):
        return AlgExpr({m: -c for m, c in self.terms.items()})

    def __sub__(self, o):
        return self + (-AlgExpr.lift(o))

    def __rsub__(self, o):
        return AlgExpr.lift(o) - self

    def __mul__(self, o):
        o = AlgExpr.lift(o)
        out = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in o.terms.items():
                m = _mono_mul(m1, m2)
                c = c1 * c2
                out[m] = out[m] + c if m in out else c
        return AlgExpr(out)

    __rmul__ = __mul__

    def __pow__(self, k):
        out = AlgExpr.const(1)
        for _ in range(k):
            out = out * self
        return out

    def is_zero(self):
        return not self.terms

    def constant_value(self):
        """The QI value if the expression has no variables, else None."""
        if not self.terms:
            return ZERO
        if len(self.terms) == 1 and () in self.terms:
            return self.terms[()]
        return None

    def variables(self):
        return sorted({v for m in self.terms for v, _ in m})

    def total_degree(self, mono):
        return sum(e for _, e in mono)

    def evaluate(self, values):
        """acb value given acb balls for every variable (current precision)."""
        acc = acb(0)
        for m, c in self.terms.items():
            t = c.to_acb()
            for v, e in m:
                t *= values[v] ** e
            acc += t
        return acc

    def log2_height(self):
        """log2 of sum |coef| * 2^deg, the bound on every conjugate."""
        total = Fraction(0)
        for m, c in self.terms.items():
            total += c.abs_upper() * 2 ** self.total_degree(m)
        return _log2_fraction_upper(total)

    def denominator(self):
        L = 1
        for c in self.terms.values():
            L = math.lcm(L, c.denominator())
        return L

    def has_nonreal_coefficient(self):
        return any(not c.is_real() for c in self.terms.values())

    def __eq__(self, o):
        return isinstance(o, AlgExpr) and self.terms == o.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for m in sorted(self.terms):
            c = self.terms[m]
            mono = "*".join(v if e == 1 else f"{v}^{e}" for v, e in m)
            parts.append(f"({c})" + (f"*{mono}" if mono else ""))
        return " + ".join(parts)


def _mono_mul(a, b):
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for v, e in b:
        d[v] = d.get(v, 0) + e
    return tuple(sorted(d.items()))


def _log2_fraction_upper(q):
    if q <= 0:
        return 0.0
    return math.log2(q.numerator) - math.log2(q.denominator) + 1e-9


@dataclass(frozen=True)
class ZeroVerdict:
    state: Tri          # YES: certified zero, NO: certified nonzero
    bits: int           # precision used (0 for symbolic decisions)

    @property
    def is_zero(self):
        return self.state is Tri.YES

    @property
    def is_nonzero(self):
        return self.state is Tri.NO


def gap_log2(log2_bound, degree, denominator):
    """log2 of the separation bound |E| >= max(B,1)^{-(D-1)} / L."""
    log2_L = math.log2(denominator)
    log2_B = max(log2_bound + log2_L, 0.0)
    return -(degree - 1) * log2_B - log2_L


def certify_zero(evaluate, *, log2_bound, degree, denominator, start_bits, ceiling):
    """Generic escalation: ``evaluate(bits)`` returns an acb enclosure of E."""
    gap = gap_log2(log2_bound, degree, denominator)
    need = int(-gap + log2_bound + 40)
    bits = max(int(start_bits), 64)
    tried = set()
    while True:
        bits = min(bits, ceiling)
        tried.add(bits)
        with precision(bits + 32):
            v = evaluate(bits)
            if not v.contains(0):
                return ZeroVerdict(Tri.NO, bits)
            mag = abs(v).upper()
            if mag.is_finite() and mag < arb(2) ** int(math.floor(gap)):
                return ZeroVerdict(Tri.YES, bits)
        if bits >= ceiling:
            return ZeroVerdict(Tri.UNDECIDED, bits)
        nxt = 2 * bits
        if len(tried) >= 2:
            nxt = max(nxt, need)
        bits = nxt


def decide_zero(expr, cat, limits=None):
    """ZeroVerdict for an AlgExpr over the parameters of ``cat``."""
    if expr.is_zero():
        return ZeroVerdict(Tri.YES, 0)
    const = expr.constant_value()
    if const is not None:
        return ZeroVerdict(Tri.NO, 0)
    lim = resolve(limits)
    names = expr.variables()
    degree = 1
    for v in names:
        degree *= cat[v].degree
    if expr.has_nonreal_coefficient():
        degree *= 2

    def evaluate(bits):
        return expr.evaluate({v: cat.ball(v, bits) for v in names})

    return certify_zero(evaluate, log2_bound=expr.log2_height(), degree=degree,
                        denominator=expr.denominator(),
                        start_bits=cat.precision_bits, ceiling=lim.incidence_ceiling)
