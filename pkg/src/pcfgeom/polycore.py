"""Exact integer polynomials in c for the critical orbit of f_c(z) = z^2 + c.

Orbit polynomials: p_0 = 0, p_{k+1} = p_k^2 + c.  The critical relation
G_{m,n} = p_{m+n} - p_m vanishes exactly when the critical orbit satisfies
f^{m+n}(0) = f^m(0).

Besides dense coefficients we keep a multiplicative description ("orbit
form") of the exact-type factors, as a product of powers of p_k and of the
sums p_a + p_b.  Evaluating that form through the recurrence is far better
conditioned than Horner on the dense coefficients, which matters for the
floating-point root approximation stage.
"""
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd as igcd

import numpy as np
from flint import fmpz_poly

from .config import resolve
from .errors import ContractError, InexactDivisionError, ResourceError


@dataclass(frozen=True)
class IntPoly:
    """Polynomial with integer coefficients, constant term first.

    The zero polynomial has no coefficients and degree -1.
    """

    coeffs: tuple = ()

    def __post_init__(self):
        cs = [int(a) for a in self.coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    @classmethod
    def x(cls):
        return cls((0, 1))

    @classmethod
    def const(cls, a):
        return cls((a,))

    @classmethod
    def from_flint(cls, f):
        return cls(tuple(int(a) for a in f.coeffs()))

    def to_flint(self):
        return _flint_cache(self.coeffs)

    @property
    def degree(self):
        return len(self.coeffs) - 1

    @property
    def leading(self):
        return self.coeffs[-1] if self.coeffs else 0

    def is_zero(self):
        return not self.coeffs

    def is_monic(self):
        return self.leading == 1

    def __add__(self, other):
        other = _as_poly(other)
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = other.coeffs + (0,) * (n - len(other.coeffs))
        return IntPoly(tuple(u + v for u, v in zip(a, b)))

    __radd__ = __add__

    def __neg__(self):
        return IntPoly(tuple(-a for a in self.coeffs))

    def __sub__(self, other):
        return self + (-_as_poly(other))

    def __rsub__(self, other):
        return _as_poly(other) - self

    def __mul__(self, other):
        other = _as_poly(other)
        if not self.coeffs or not other.coeffs:
            return IntPoly()
        if len(self.coeffs) * len(other.coeffs) > 4096:
            return IntPoly.from_flint(self.to_flint() * other.to_flint())
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return IntPoly(tuple(out))

    __rmul__ = __mul__

    def __pow__(self, k):
        out = IntPoly.const(1)
        for _ in range(k):
            out = out * self
        return out

    def __call__(self, x):
        # Horner; works for int, Fraction, complex and anything ring-like
        acc = 0
        for a in reversed(self.coeffs):
            acc = acc * x + a
        return acc

    def derivative(self):
        return IntPoly(tuple(k * a for k, a in enumerate(self.coeffs) if k))

    def content(self):
        g = 0
        for a in self.coeffs:
            g = igcd(g, a)
        return g

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for k in range(self.degree, -1, -1):
            a = self.coeffs[k]
            if a == 0:
                continue
            mono = "" if k == 0 else ("c" if k == 1 else f"c^{k}")
            if k and abs(a) == 1:
                term = mono
            else:
                term = f"{abs(a)}*{mono}" if mono else str(abs(a))
            sign = "-" if a < 0 else "+"
            parts.append((sign, term))
        first_sign, first = parts[0]
        s = ("-" if first_sign == "-" else "") + first
        for sign, term in parts[1:]:
            s += f" {sign} {term}"
        return s


@lru_cache(maxsize=4096)
def _flint_cache(coeffs):
    return fmpz_poly(list(coeffs))


def _as_poly(a):
    if isinstance(a, IntPoly):
        return a
    if isinstance(a, int):
        return IntPoly.const(a)
    raise TypeError(f"cannot treat {type(a).__name__} as IntPoly")


@dataclass(frozen=True, order=True)
class OrbitIndex:
    """Preperiod m >= 0 and period n >= 1 of a critical orbit."""

    m: int
    n: int

    def __post_init__(self):
        if not (isinstance(self.m, int) and isinstance(self.n, int)):
            raise ContractError("orbit index entries must be integers")
        if self.m < 0 or self.n < 1:
            raise ContractError(f"invalid orbit index ({self.m}, {self.n})")

    @property
    def size(self):
        return self.m + self.n

    def __str__(self):
        return f"({self.m},{self.n})"


def _check_budget(deg, limits):
    budget = resolve(limits).degree_budget
    if deg > budget:
        raise ResourceError(f"degree {deg} exceeds budget {budget}")


@lru_cache(maxsize=None)
def _orbit(k):
    if k == 0:
        return IntPoly()
    prev = _orbit(k - 1)
    return prev * prev + IntPoly.x()


def orbit_polynomial(k, limits=None):
    """p_k(c) = f_c^k(0), degree 2^(k-1) for k >= 1."""
    if k < 0:
        raise ContractError("k must be non-negative")
    if k >= 1:
        _check_budget(2 ** (k - 1), limits)
    return _orbit(k)


def critical_relation_polynomial(t, limits=None):
    """G_{m,n} = p_{m+n} - p_m; its roots have preperiod <= m and period dividing n."""
    t = _as_index(t)
    _check_budget(2 ** (t.m + t.n - 1), limits)
    return _orbit(t.m + t.n) - _orbit(t.m)


def exact_divide(a, b):
    """Quotient a / b, raising InexactDivisionError unless the remainder is zero."""
    if b.is_zero():
        raise ContractError("division by the zero polynomial")
    if a.is_zero():
        return IntPoly()
    if a.degree < b.degree:
        raise InexactDivisionError("remainder is nonzero", a.degree)
    lb = b.leading
    if abs(lb) == 1:
        rem = list(a.coeffs)
        q = [0] * (a.degree - b.degree + 1)
        for k in range(len(q) - 1, -1, -1):
            coef = rem[k + b.degree] * lb  # lb is its own inverse
            q[k] = coef
            if coef:
                for j, bj in enumerate(b.coeffs):
                    rem[k + j] -= coef * bj
        rdeg = _last_nonzero(rem)
        if rdeg >= 0:
            raise InexactDivisionError("remainder is nonzero", rdeg)
        return IntPoly(tuple(q))
    q, r = divmod(a.to_flint(), b.to_flint())
    # flint's fmpz_poly division truncates, so recheck over the rationals
    if r != 0 or q * b.to_flint() != a.to_flint():
        rem = _rational_remainder(a, b)
        raise InexactDivisionError("quotient is not integral", _last_nonzero(rem))
    return IntPoly.from_flint(q)


def _rational_remainder(a, b):
    rem = [Fraction(x) for x in a.coeffs]
    lb = Fraction(b.leading)
    for k in range(a.degree - b.degree, -1, -1):
        coef = rem[k + b.degree] / lb
        for j, bj in enumerate(b.coeffs):
            rem[k + j] -= coef * bj
    rem = rem[: b.degree]
    if all(x == 0 for x in rem):
        # zero remainder but fractional quotient: report the quotient's degree
        return [1] * (a.degree - b.degree + 1)
    return rem


def _last_nonzero(xs):
    for k in range(len(xs) - 1, -1, -1):
        if xs[k] != 0:
            return k
    return -1


def poly_gcd(a, b):
    """Monic-up-to-sign gcd with positive leading coefficient (flint backend)."""
    return IntPoly.from_flint(a.to_flint().gcd(b.to_flint()))


def squarefree_part(a):
    """a / gcd(a, a'): same roots, all simple.  Constants are returned as is."""
    if a.degree <= 0:
        return a
    g = poly_gcd(a, a.derivative())
    out = exact_divide(a, g)
    if out.leading < 0:
        out = -out
    return out


def squarefree_decomposition(a):
    """Yun's algorithm: list of (factor, multiplicity), factors squarefree and coprime."""
    if a.degree <= 0:
        return []
    out = []
    da = a.derivative()
    g = poly_gcd(a, da)
    b = exact_divide(a, g)
    c = exact_divide(da, g)
    d = c - b.derivative()
    k = 1
    while b.degree > 0:
        f = poly_gcd(b, d)
        if f.degree > 0:
            out.append((f, k))
        b = exact_divide(b, f)
        c = exact_divide(d, f)
        d = c - b.derivative()
        k += 1
    return out


def divisors(n):
    return [d for d in range(1, n + 1) if n % d == 0]


def prime_divisors(n):
    ps, p = [], 2
    while p * p <= n:
        if n % p == 0:
            ps.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        ps.append(n)
    return ps


def _as_index(t):
    if isinstance(t, OrbitIndex):
        return t
    m, n = t
    return OrbitIndex(m, n)


# --- orbit forms -------------------------------------------------------------

@dataclass(frozen=True)
class OrbitForm:
    """Product of powers of orbit pieces.

    A piece ``(a, b)`` with ``b < 0`` stands for p_a, otherwise for p_a + p_b.
    """

    pieces: tuple

    def degree(self):
        deg = 0
        for (a, b), e in self.pieces:
            d = _piece_degree(a, b)
            deg += e * d
        return deg

    def expand(self):
        num, den = IntPoly.const(1), IntPoly.const(1)
        for (a, b), e in self.pieces:
            base = _piece_poly(a, b)
            if e > 0:
                num = num * base ** e
            else:
                den = den * base ** (-e)
        return exact_divide(num, den)

    def depth(self):
        return max([max(a, b) for (a, b), _ in self.pieces], default=0)

    def log_derivative(self, z):
        """f'/f at complex points z (numpy array), via the orbit recurrence.

        Works with log p_k and r_k = p_k'/p_k so large |z| cannot overflow.
        """
        z = np.asarray(z, dtype=complex)
        depth = self.depth()
        logs, ratios = [None], [None]
        with np.errstate(all="ignore"):
            if depth:
                logs.append(np.log(z))
                ratios.append(1 / z)
            for _ in range(1, depth):
                L, r = logs[-1], ratios[-1]
                inv2 = np.exp(-2 * L)          # 1 / p_k^2
                logs.append(2 * L + np.log1p(z * inv2))
                ratios.append((2 * r + inv2) / (1 + z * inv2))
            out = np.zeros_like(z)
            for (a, b), e in self.pieces:
                if b <= 0:
                    out += e * ratios[a]
                    continue
                # (p_a' + p_b')/(p_a + p_b) with rho = p_b/p_a
                d = logs[b] - logs[a]
                small = d.real <= 0
                rho = np.exp(np.where(small, d, -d))
                out += e * np.where(small,
                                    (ratios[a] + ratios[b] * rho) / (1 + rho),
                                    (ratios[a] * rho + ratios[b]) / (rho + 1))
        return out


    def ball_value_and_derivative(self, z):
        """(f(z), f'(z)) for an acb z, through the recurrence in ball arithmetic.

        Sound because the form expands exactly to the dense factor.
        """
        from flint import acb
        depth = self.depth()
        w, dw = [acb(0)], [acb(0)]
        for _ in range(depth):
            w.append(w[-1] * w[-1] + z)
            dw.append(2 * w[-2] * dw[-1] + 1)
        vals, ders = [], []
        for (a, b), e in self.pieces:
            if b <= 0:
                vals.append(w[a])
                ders.append(dw[a])
            else:
                vals.append(w[a] + w[b])
                ders.append(dw[a] + dw[b])
        exps = [e for _, e in self.pieces]
        f = acb(1)
        for v, e in zip(vals, exps):
            f *= v ** e
        # product rule, so a vanishing piece never appears in a denominator
        df = acb(0)
        for k, (v, d, e) in enumerate(zip(vals, ders, exps)):
            term = e * d * v ** (e - 1)
            for j, (u, ej) in enumerate(zip(vals, exps)):
                if j != k:
                    term *= u ** ej
            df += term
        return f, df


def _piece_degree(a, b):
    if b < 0:
        return 0 if a == 0 else 2 ** (a - 1)
    return max(_piece_degree(a, -1), _piece_degree(b, -1))


def _piece_poly(a, b):
    if b < 0:
        return _orbit(a)
    return _orbit(a) + _orbit(b)


def _merge(*forms_with_sign):
    acc = {}
    for form, sign in forms_with_sign:
        for piece, e in form.pieces:
            acc[piece] = acc.get(piece, 0) + sign * e
    return OrbitForm(tuple(sorted((p, e) for p, e in acc.items() if e)))


@lru_cache(maxsize=None)
def _gleason(n):
    num = _orbit(n)
    form = OrbitForm((((n, -1), 1),))
    for d in divisors(n)[:-1]:
        poly_d, form_d = _gleason(d)
        num = exact_divide(num, poly_d)
        form = _merge((form, 1), (form_d, -1))
    return num, form


@lru_cache(maxsize=None)
def _misiurewicz(m, n):
    # G_{m,n} = G_{m-1,n} * (p_{m+n-1} + p_{m-1}); the new roots of the
    # second factor, minus the periodic ones and the lower periods.
    a, b = m + n - 1, m - 1
    num = _orbit(a) + _orbit(b)
    form = OrbitForm((((a, b), 1),))
    for j in divisors(igcd(m - 1, n)):
        poly_j, form_j = _gleason(j)
        num = exact_divide(num, poly_j)
        form = _merge((form, 1), (form_j, -1))
    for k in divisors(n)[:-1]:
        poly_k, form_k = _misiurewicz(m, k)
        num = exact_divide(num, poly_k)
        form = _merge((form, 1), (form_k, -1))
    return num, form


@dataclass(frozen=True)
class ExactTypeFactor:
    index: OrbitIndex
    poly: IntPoly
    form: OrbitForm


def exact_type_factor(t, limits=None):
    """Factor of G_{m,n} whose roots have exact preperiod m and exact period n.

    Built from exact divisions only; raises InexactDivisionError if the
    expected multiplicity structure were ever violated.  Type (1, n) is empty:
    G_{1,n} = p_n^2, so the factor is the constant 1.
    """
    t = _as_index(t)
    _check_budget(2 ** (t.m + t.n - 1), limits)
    if t.m == 0:
        poly, form = _gleason(t.n)
    elif t.m == 1:
        poly, form = IntPoly.const(1), OrbitForm(())
    else:
        poly, form = _misiurewicz(t.m, t.n)
    return ExactTypeFactor(t, poly, form)


def orbit_indices(bound):
    """All (m, n) with m + n <= bound, m != 1, in (m, n) order."""
    out = []
    for m in range(0, bound):
        if m == 1:
            continue
        for n in range(1, bound - m + 1):
            out.append(OrbitIndex(m, n))
    return out
