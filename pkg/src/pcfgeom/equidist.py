"""Empirical potentials of the roots of p_n against the Green function of M.

For p_n of degree 2^(n-1), (1/2^(n-1)) * sum log|z - r| = 2^-(n-1) log|p_n(z)|
is the n-th Green approximant, so its distance to G_M(z) shrinks like the
escape-rate tail.  Roots are isolated and sums are taken in ball arithmetic
at a precision that resolves that tail.
"""
from dataclasses import dataclass
import csv
import io
import math

from flint import acb, arb

from .algebraic import QI
from .balls import point, precision
from .config import Limits, resolve
from .errors import PreconditionError
from .heights import green_mandelbrot
from .polycore import OrbitForm, orbit_polynomial
from .rootcert import isolate_roots

DEFAULT_POINTS = (2, 3, complex(1, 2), 10)


@dataclass(frozen=True)
class PotentialReport:
    n: int
    z: complex
    empirical: float
    reference: float
    discrepancy: float
    root_residual: float
    bits: int = 0


def _coerce(z):
    if isinstance(z, str):
        z = QI.of(z)
    if isinstance(z, QI):
        return z, complex(z)
    if isinstance(z, complex):
        return z, z
    return QI.of(z), complex(z)


def working_bits(n, g):
    """Bits that resolve 2^-(n-1) log|p_n(z)| against G_M(z) ~ g."""
    est = 2.0 ** (n - 1) * g / math.log(2)
    return int(2 * est + 2 * n + 96)


def _roots(n, bits, limits):
    lim = resolve(limits)
    lim = Limits(**{**lim.as_dict(), "degree_budget": max(lim.degree_budget, 2 ** n),
                    "precision_ceiling": max(lim.precision_ceiling, 2 * bits)})
    p = orbit_polynomial(n, lim)
    rs = isolate_roots(p, f"1e-{int(bits * 0.30103) + 1}", form=OrbitForm((((n, -1), 1),)),
                       limits=lim)
    return p, rs


def empirical_potential(n, z, *, limits=None):
    if n < 1:
        raise PreconditionError("n must be at least 1")
    exact, zc = _coerce(z)
    g = green_mandelbrot(exact, bits=64)
    if not g.escaped:
        raise PreconditionError(f"z = {zc} is not certified outside M")
    bits = working_bits(n, g.value)
    p, rs = _roots(n, bits, limits)
    with precision(bits + 64):
        zb = point(exact)
        total = arb(0)
        for r, mult in rs.roots:
            total += mult * abs(zb - r).log()
        logp = abs(acb(p.to_flint()(zb))).log()
        ref = green_mandelbrot(exact, bits=bits + 32, tail_bits=bits).enclosure
        emp = total / arb(2) ** (n - 1)
        disc = abs(emp - ref)
        resid = abs(total - logp)
        return PotentialReport(n, zc, float(emp.mid()), float(ref.mid()),
                               float(disc.mid()), float(resid.upper()), bits)


def convergence_table(z, n_range, *, limits=None):
    """Reports for each n plus whether the discrepancies strictly decrease."""
    reps = [empirical_potential(n, z, limits=limits) for n in n_range]
    ds = [r.discrepancy for r in reps]
    decreasing = all(a > b for a, b in zip(ds, ds[1:]))
    return reps, decreasing


def _fmt_complex(z):
    if z.imag == 0:
        return repr(z.real)
    return f"{z.real!r}{'+' if z.imag >= 0 else '-'}{abs(z.imag)!r}i"


def reports_to_csv(reps):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "z", "empirical", "reference", "discrepancy", "root_residual"])
    for r in reps:
        w.writerow([r.n, _fmt_complex(r.z), repr(r.empirical), repr(r.reference),
                    repr(r.discrepancy), repr(r.root_residual)])
    return buf.getvalue()
