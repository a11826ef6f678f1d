"""Canonical heights of the critical point of z^2 + c and the Green function of M.

lambda_inf(c) = lim 2^-k log|z_k| with z_0 = 0, z_{k+1} = z_k^2 + c.  Once
|z_k| > R = max(|c|, 4) the remaining terms are bounded by
2^-k * (-log(1 - |c|/|z_k|^2)), and without escape the orbit bound gives
lambda_inf <= 2^-K log(2R).  G_M = 2 lambda_inf.
"""
from dataclasses import dataclass
from fractions import Fraction
import math

from flint import acb, arb

from .balls import arb_rational, precision
from .config import resolve
from .errors import ContractError


@dataclass(frozen=True)
class GreenValue:
    """Escape rate enclosure: value in [lo, hi] with value = midpoint."""

    lo: float
    hi: float
    escaped: bool
    iterations: int
    enclosure: object = None      # arb, for high-precision consumers

    @property
    def value(self):
        return 0.0 if not self.escaped else 0.5 * (self.lo + self.hi)

    @property
    def error(self):
        return self.hi - self.value


@dataclass(frozen=True)
class HeightValue:
    value: float
    error: float
    place_breakdown: tuple        # (("inf", x), (2, y), ...)
    exact: bool = False


def _as_ball(c):
    if isinstance(c, acb):
        return c
    if isinstance(c, arb):
        return acb(c)
    if isinstance(c, complex):
        return acb(arb_rational(Fraction(c.real)), arb_rational(Fraction(c.imag)))
    if hasattr(c, "re") and hasattr(c, "im"):
        return acb(arb_rational(c.re), arb_rational(c.im))
    return acb(arb_rational(Fraction(c)))


def _exact_rational(c):
    if isinstance(c, (int, Fraction)):
        return Fraction(c)
    if isinstance(c, str):
        return Fraction(c)
    if hasattr(c, "re") and hasattr(c, "im") and c.im == 0:
        return Fraction(c.re)
    return None


def escape_rate_arch(c, *, shift=0, bits=128, tail_bits=None, limits=None):
    """lambda_inf(c), or 2^shift * lambda_inf(c) read off the shifted orbit.

    ``c`` may be a rational, complex number or acb ball.  Real rationals in
    [-2, 1/4] have bounded orbits and return an exact zero.
    """
    cap = resolve(limits).iteration_cap
    tail_bits = bits - 8 if tail_bits is None else tail_bits
    q = _exact_rational(c)
    if q is not None and Fraction(-2) <= q <= Fraction(1, 4):
        return GreenValue(0.0, 0.0, False, 0, arb(0))
    with precision(bits + 32):
        cb = _as_ball(c)
        R = max(float(abs(cb).upper()), 4.0)
        Rb = arb(R)
        z = acb(0)
        bounded_k = 0
        for k in range(1, cap + 1):
            z = z * z + cb
            a = abs(z)
            if not a.is_finite():
                break
            if a.upper() <= Rb:
                bounded_k = k
                continue
            if a.lower() > Rb:
                return _escaped(z, k, cb, shift, tail_bits)
            if not (a.rad() < 1):
                # ball too wide to tell; stop with the bound we have
                break
        return _not_escaped(bounded_k, R, shift)


def _escaped(z, k, cb, shift, tail_bits):
    cabs = abs(cb).upper()
    while True:
        w = cabs / (abs(z).lower() ** 2)
        tail = -((1 - w).log()) * arb(2) ** (-(k - shift))
        if tail.upper() < arb(2) ** (-tail_bits) or k > 4000:
            break
        z = z * z + cb
        k += 1
    base = abs(z).log() * arb(2) ** (-(k - shift))
    t = tail.upper()
    lo = (base - t).lower()
    hi = (base + t).upper()
    if lo < 0:
        lo = arb(0)
    return GreenValue(float(lo), float(hi), True, k, _interval(lo, hi))


def _interval(lo, hi):
    return arb((lo + hi) / 2, (hi - lo) / 2)


def _not_escaped(K, R, shift):
    bound = math.log(2 * R) * 2.0 ** (shift - K) if K else math.inf
    return GreenValue(0.0, bound, False, K, arb(0, bound) if math.isfinite(bound) else None)


def green_mandelbrot(c, **kw):
    """G_M(c) = 2 lambda_inf(c)."""
    g = escape_rate_arch(c, **kw)
    scale = arb(2)
    enc = g.enclosure * scale if g.enclosure is not None else None
    return GreenValue(2 * g.lo, 2 * g.hi, g.escaped, g.iterations, enc)


def _is_prime(p):
    if p < 2:
        return False
    k = 2
    while k * k <= p:
        if p % k == 0:
            return False
        k += 1
    return True


def local_height_nonarch(c, p):
    """lambda_p(c): 1/2 log|c|_p if |c|_p > 1, else 0."""
    if not _is_prime(p):
        raise ContractError(f"{p} is not prime")
    c = Fraction(c)
    v = 0
    den = c.denominator
    while den % p == 0:
        den //= p
        v += 1
    return 0.5 * v * math.log(p)


def _factor(n):
    out, p = [], 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def is_preperiodic_rational(c, max_steps=64):
    """Exact test over Q.  Non-integers never qualify because denominators grow."""
    c = Fraction(c)
    if c.denominator != 1:
        return False
    z, seen = Fraction(0), set()
    for _ in range(max_steps):
        if z in seen:
            return True
        seen.add(z)
        if abs(z) > max(abs(c), 2):
            return False
        z = z * z + c
    return False


def canonical_height(c, **kw):
    c = Fraction(c)
    if is_preperiodic_rational(c):
        return HeightValue(0.0, 0.0, (("inf", 0.0),), exact=True)
    g = escape_rate_arch(c, **kw)
    parts = [("inf", g.value)]
    total = g.value
    for p in _factor(c.denominator):
        lp = local_height_nonarch(c, p)
        parts.append((p, lp))
        total += lp
    return HeightValue(total, g.error, tuple(parts))


def h_crit(values, **kw):
    """Sum of canonical heights over a tuple of rationals."""
    values = list(values)
    if not values:
        raise ContractError("h_crit needs a nonempty tuple")
    hs = [canonical_height(v, **kw) for v in values]
    merged = {}
    for h in hs:
        for place, x in h.place_breakdown:
            merged[place] = merged.get(place, 0.0) + x
    order = sorted(merged, key=lambda p: (p != "inf", p if p != "inf" else 0))
    return HeightValue(sum(h.value for h in hs), sum(h.error for h in hs),
                       tuple((p, merged[p]) for p in order),
                       exact=all(h.exact for h in hs))
