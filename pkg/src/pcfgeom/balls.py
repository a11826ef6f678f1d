"""Helpers around flint ``acb`` balls.

A ball here is an ``acb`` whose real and imaginary radii are equal, so it is
the closed square (max-norm disk) of that radius about its midpoint.
Midpoints are dyadic, which makes decimal serialisation exact.
"""
from contextlib import contextmanager
from decimal import Decimal
from fractions import Fraction

from flint import acb, arb, ctx, fmpq, fmpz

from .errors import ContractError


@contextmanager
def precision(bits):
    old = ctx.prec
    ctx.prec = max(int(bits), 30)
    try:
        yield
    finally:
        ctx.prec = old


def arb_exact(x):
    """Exact arb for an int, Fraction-like dyadic or finite float.

    Non-dyadic rationals raise, use ``arb_rational`` for those.
    """
    if isinstance(x, arb):
        return x
    if isinstance(x, float):
        x = Fraction(x)
    x = Fraction(x)
    den = x.denominator
    if den & (den - 1):
        raise ContractError(f"{x} is not dyadic")
    k = den.bit_length() - 1
    # enough precision that the product is exact
    with precision(abs(x.numerator).bit_length() + 16):
        return arb(fmpz(x.numerator)) * arb(2) ** (-k)


def arb_rational(q):
    """Enclosure of a rational at the current working precision."""
    q = Fraction(q)
    return arb(fmpq(q.numerator, q.denominator))


def pow2_below(target):
    """Largest e with 2^e < target (strict, leaving room for outward rounding)."""
    t = Fraction(target) if not isinstance(target, str) else Fraction(Decimal(target))
    if t <= 0:
        raise ContractError("target radius must be positive")
    e = t.numerator.bit_length() - t.denominator.bit_length()
    while Fraction(2) ** e > t:
        e -= 1
    while Fraction(2) ** (e + 1) <= t:
        e += 1
    return e - 1


def arb_with_radius(m, r):
    """arb with exact midpoint m and radius exactly r (a dyadic with a 30-bit mantissa).

    flint rounds a radius up by one ulp even when it is representable, so we
    hand it a value slightly below r and let the rounding land on r.
    """
    r = Fraction(r)
    if r == 0:
        return arb(arb_exact_mid(m))
    with precision(abs(r.numerator).bit_length() + 80):
        below = arb_exact(r) * (1 - arb(2) ** -48)
    return arb(arb_exact_mid(m), below)


def make_ball(re_mid, im_mid, rad_exp):
    """Square ball about exact (re_mid, im_mid) with radius 2^rad_exp."""
    r = Fraction(2) ** rad_exp
    return acb(arb_with_radius(re_mid, r), arb_with_radius(im_mid, r))


def arb_exact_mid(x):
    if isinstance(x, arb):
        return x.mid()
    return arb_exact(x)


def mid(b):
    return b.mid()


def radius(b):
    """Upper bound (float) of the max-norm radius."""
    r = max(_mag_fraction(b.real.rad()), _mag_fraction(b.imag.rad()))
    return float(r)


def radius_fraction(b):
    return max(_mag_fraction(b.real.rad()), _mag_fraction(b.imag.rad()))


def _mag_fraction(r):
    man, exp = r.man_exp()
    man = int(man)
    return Fraction(man) * Fraction(2) ** int(exp)


def to_fraction(x):
    """Exact value of an exact (dyadic) arb, typically a midpoint."""
    man, exp = x.mid().man_exp()
    return Fraction(int(man)) * Fraction(2) ** int(exp)


def fraction_to_str(q):
    """Exact decimal string of a dyadic rational."""
    q = Fraction(q)
    den = q.denominator
    if den & (den - 1):
        raise ContractError("only dyadic values have finite decimal expansions")
    k = den.bit_length() - 1
    num = q.numerator * 5 ** k
    sign = "-" if num < 0 else ""
    digits = str(abs(num))
    if k == 0:
        return sign + digits
    digits = digits.rjust(k + 1, "0")
    head, tail = digits[:-k], digits[-k:].rstrip("0")
    return sign + head + ("." + tail if tail else "")


def str_to_fraction(s):
    if not isinstance(s, str):
        raise ContractError(f"expected a decimal string, got {type(s).__name__}")
    return Fraction(Decimal(s))


def ball_to_strings(b):
    """(re, im, rad) exact decimal strings."""
    return (fraction_to_str(to_fraction(b.real)),
            fraction_to_str(to_fraction(b.imag)),
            fraction_to_str(radius_fraction(b)))


def ball_from_strings(re, im, rad):
    r = str_to_fraction(rad)
    if r < 0:
        raise ContractError("negative radius")
    return acb(arb_with_radius(str_to_fraction(re), r),
               arb_with_radius(str_to_fraction(im), r))


def ball_key(b):
    """Exact hashable identity of a ball (midpoint and radii)."""
    return (to_fraction(b.real), to_fraction(b.imag),
            _mag_fraction(b.real.rad()), _mag_fraction(b.imag.rad()))


def conj_ball(b):
    return b.conjugate()


def is_real_centred(b):
    return b.imag.mid() == 0


def point(z):
    """acb for an exact or complex point (int, Fraction, complex, Gaussian rational)."""
    if isinstance(z, acb):
        return z
    if hasattr(z, "re") and hasattr(z, "im"):
        return acb(arb_rational(z.re), arb_rational(z.im))
    if isinstance(z, complex):
        return acb(arb_exact(z.real), arb_exact(z.imag))
    if isinstance(z, (int, Fraction, float)):
        return acb(arb_rational(z) if not isinstance(z, float) else arb_exact(z))
    return acb(z)


def approx(b):
    return complex(b.mid())

