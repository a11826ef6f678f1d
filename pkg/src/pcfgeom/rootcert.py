"""Certified isolation and refinement of roots of integer polynomials.

Pipeline: floating-point Aberth iterations give approximations, Newton
polishes them in ball arithmetic, and the Krawczyk test proves that each
small box contains exactly one root.  Work precision doubles until every
root is certified or the ceiling is hit.  A full set of pairwise disjoint
certified boxes, one per degree, is a proof of completeness.

Real roots get real-centred boxes.  Each non-real root's partner is the exact
conjugate box.
"""
from dataclasses import dataclass
from enum import Enum
import math

import numpy as np
from flint import acb, arb

from .balls import make_ball, pow2_below, precision, radius
from .config import resolve
from .errors import ContractError, ResourceError
from .polycore import squarefree_decomposition, squarefree_part


class Tri(Enum):
    YES = "yes"
    NO = "no"
    UNDECIDED = "undecided"


@dataclass(frozen=True)
class RootSet:
    poly: object
    roots: tuple        # ((acb, multiplicity), ...) sorted by midpoint
    bits: int           # highest working precision used

    def balls(self):
        return [b for b, _ in self.roots]

    def __len__(self):
        return len(self.roots)


def precision_schedule(start, ceiling):
    bits = max(int(start), 64)
    out = []
    while bits < ceiling:
        out.append(bits)
        bits *= 2
    out.append(int(ceiling))
    return out


# --- small ball utilities -----------------------------------------------------

def _log2_upper(x):
    """Integer e with |x| <= 2^e (x an arb); very negative for zero."""
    u = abs(x).upper()
    if u == 0:
        return -(10 ** 6)
    man, exp = u.man_exp()
    return int(exp) + int(man).bit_length()


def krawczyk(F, dF, box):
    """True if ``box`` provably contains exactly one root of F (current precision)."""
    z = box.mid()
    dB = dF(box)
    if dB.contains(0):
        return False
    dz = dF(z)
    if dz.contains(0):
        return False
    K = z - F(z) / dz + (1 - dB / dz) * (box - z)
    return box.contains_interior(K)


def _polish(F, dF, z, bits, real, steps=40):
    """Newton iterations on midpoints.  Returns (z, |last step| upper log2) or None."""
    last = 0
    for _ in range(steps):
        dz = dF(z)
        if dz.contains(0):
            return None
        step = F(z) / dz
        if real:
            step = acb(step.real)
        if not step.is_finite():
            return None
        z = (z - step).mid()
        if real:
            z = acb(z.real)
        e = _log2_upper(step)
        scale = max(_log2_upper(z.real) if not z.is_zero() else 0, 0)
        if e < -bits + 8 + scale or (e >= last - 1 and e < -bits // 2):
            return z, e
        last = e
    return z, last


def _certify_at(F, dF, z, step_e, bits, target_exp, real):
    scale = max(_log2_upper(abs(z)) if not z.is_zero() else 0, 0)
    floor_e = -bits + 24 + scale
    e0 = min(target_exp, max(step_e + 4, floor_e))
    tried = []
    for e in (e0, e0 + 6, e0 + 12):
        e = min(e, target_exp)
        if e in tried:
            continue
        tried.append(e)
        box = make_ball(z.real.mid(), arb(0) if real else z.imag.mid(), e)
        if krawczyk(F, dF, box):
            return box
    return None


def pairwise_disjoint(balls):
    """Certified: no two boxes overlap.  Sweep on real lower bounds."""
    order = sorted(range(len(balls)), key=lambda i: float(balls[i].real.lower()))
    active = []
    for i in order:
        b = balls[i]
        lo = b.real.lower()
        active = [j for j in active if balls[j].real.upper() >= lo]
        for j in active:
            if b.overlaps(balls[j]):
                return False
        active.append(i)
    return True


# --- floating-point approximation ---------------------------------------------

def _dense_logder(coeffs):
    a = np.array([float(c) for c in coeffs], dtype=float)

    def logder(z):
        p = np.zeros_like(z)
        dp = np.zeros_like(z)
        for c in a[::-1]:
            dp = dp * z + p
            p = p * z + c
        with np.errstate(all="ignore"):
            return dp / p
    return logder


def _fujiwara(coeffs):
    n = len(coeffs) - 1
    lead = abs(coeffs[-1])
    best = 0.0
    for k in range(1, n + 1):
        a = abs(coeffs[n - k])
        if a:
            # log form avoids overflow on large coefficients
            v = math.exp((math.log(a) - math.log(lead)) / k)
            if k == n:
                v = v / 2 ** (1 / n)
            best = max(best, v)
    return 2 * best if best else 1.0


def aberth_double(logder, n, radius0, max_iter=2000, tol=1e-15):
    """Simultaneous Aberth-Ehrlich iteration in complex doubles."""
    k = np.arange(n)
    z = radius0 * np.exp(1j * (2 * np.pi * k / n + 0.4))
    active = np.ones(n, dtype=bool)
    best = np.full(n, np.inf)
    stall = np.zeros(n, dtype=int)
    for _ in range(max_iter):
        idx = np.nonzero(active)[0]
        if idx.size == 0:
            break
        zi = z[idx]
        r = logder(zi)
        d = zi[:, None] - z[None, :]
        d[np.arange(idx.size), idx] = 1.0
        with np.errstate(all="ignore"):
            inv = 1.0 / d
        inv[np.arange(idx.size), idx] = 0.0
        s = inv.sum(axis=1)
        with np.errstate(all="ignore"):
            w = 1.0 / (r - s)
        w[~np.isfinite(w)] = 0.0
        z[idx] = zi - w
        rel = np.abs(w) / np.maximum(1.0, np.abs(z[idx]))
        # freeze a root once converged or once its correction stops shrinking
        improved = rel < 0.5 * best[idx]
        best[idx] = np.minimum(best[idx], rel)
        stall[idx] = np.where(improved, 0, stall[idx] + 1)
        done = (rel < tol) | ((stall[idx] > 8) & (best[idx] < 1e-9))
        active[idx[done]] = False
    return z


def _aberth_mp(F, dF, zs, bits, iters=30):
    """Aberth in ball midpoints at ``bits``; repairs clustered or stuck guesses."""
    with precision(bits):
        zs = [acb(complex(z)) if not isinstance(z, acb) else z.mid() for z in zs]
        n = len(zs)
        for _ in range(iters):
            worst = -(10 ** 6)
            for i in range(n):
                zi = zs[i]
                fz = F(zi)
                if fz.is_zero():
                    continue
                r = dF(zi) / fz
                s = acb(0)
                for j in range(n):
                    if j != i:
                        s += 1 / (zi - zs[j])
                w = 1 / (r - s)
                if not w.is_finite():
                    continue
                zs[i] = (zi - w).mid()
                worst = max(worst, _log2_upper(w))
            if worst < -bits + 16:
                break
    return [complex(z) for z in zs], zs


# --- isolation ------------------------------------------------------------------

def evaluators(f, form=None):
    """Ball evaluators (F, F') for f; the orbit form, when given, is tighter near |c| = 2."""
    if form is None:
        F = f.to_flint()
        return F, F.derivative()
    return (lambda z: form.ball_value_and_derivative(z)[0],
            lambda z: form.ball_value_and_derivative(z)[1])


def _isolate_squarefree(f, target_exp, form, ceiling, start_bits=64):
    n = f.degree
    F, dF = evaluators(f, form)
    if form is not None:
        logder = form.log_derivative
        r0 = 2.1
    else:
        logder = _dense_logder(f.coeffs)
        r0 = _fujiwara(f.coeffs)
    approx = list(aberth_double(logder, n, r0))
    mp_approx = None
    last_bits = start_bits
    for bits in precision_schedule(start_bits, ceiling):
        last_bits = bits
        with precision(bits):
            seeds = mp_approx if mp_approx is not None else [acb(z) for z in approx]
            boxes = _certify_all(F, dF, seeds, bits, target_exp)
            if boxes is not None and len(boxes) == n and pairwise_disjoint(boxes):
                return boxes, bits
        if bits >= 256:
            approx, mp_approx = _aberth_mp(F, dF, seeds, bits)
    raise ResourceError(f"could not certify all {n} roots below {ceiling} bits",
                        achieved=last_bits)


def _certify_all(F, dF, seeds, bits, target_exp):
    reals, uppers = [], []
    n_lower = 0
    for z in seeds:
        zc = complex(z.mid())
        tiny = abs(zc.imag) <= 1e-9 * max(1.0, abs(zc))
        if tiny:
            pol = _polish(F, dF, acb(z.real.mid()), bits, real=True)
            if pol is not None:
                box = _certify_at(F, dF, pol[0], pol[1], bits, target_exp, True)
                if box is not None:
                    reals.append(box)
                    continue
        if zc.imag < 0:
            n_lower += 1
            continue
        pol = _polish(F, dF, z.mid(), bits, real=False)
        if pol is None:
            return None
        zz = pol[0]
        if zz.imag.mid() < 0:
            # Newton crossed the axis; use the conjugate representative
            zz = zz.conjugate()
        box = _certify_at(F, dF, zz, pol[1], bits, target_exp, False)
        if box is None:
            return None
        if box.imag.contains(0):
            return None
        uppers.append(box)
    if n_lower != len(uppers):
        return None
    return reals + uppers + [b.conjugate() for b in uppers]


def _sort_key(b):
    return (float(b.real.mid()), float(b.imag.mid()))


def isolate_roots(p, target_radius="1e-30", *, form=None, limits=None):
    """Certified isolating balls of radius <= target for every distinct root.

    ``form`` (an OrbitForm expanding to p) drives both the floating-point
    stage and the ball evaluations, which stay tight near |c| = 2 where
    dense Horner evaluation loses hundreds of bits.
    """
    if p.degree < 1:
        raise ContractError("polynomial must be non-constant")
    lim = resolve(limits)
    target_exp = pow2_below(target_radius)
    if form is not None:
        parts = [(p, 1)]
    else:
        parts = squarefree_decomposition(p)
    out, used = [], 64
    for f, k in parts:
        fs = f if f.leading > 0 else -f
        start = 64
        while start < -target_exp + 32 and start < lim.precision_ceiling:
            start *= 2
        boxes, bits = _isolate_squarefree(fs, target_exp, form, lim.precision_ceiling,
                                          start_bits=min(start, lim.precision_ceiling))
        used = max(used, bits)
        out.extend((b, k) for b in boxes)
    if len(parts) > 1 and not pairwise_disjoint([b for b, _ in out]):
        raise ResourceError("factor roots not separated")
    out.sort(key=lambda bk: _sort_key(bk[0]))
    return RootSet(p, tuple(out), used)


def refine(b, p, target_radius, *, limits=None, _certified_bits=None):
    """Shrink an isolating ball of a simple root of p to radius <= target.

    The returned ball lies inside ``b`` and contains the same root.
    """
    lim = resolve(limits)
    target_exp = pow2_below(target_radius)
    f = squarefree_part(p)
    F = f.to_flint()
    dF = F.derivative()
    real = b.imag.mid() == 0 and b.imag.rad() == b.real.rad()
    start = _certified_bits
    if start is None:
        start = None
        for bits in precision_schedule(64, lim.precision_ceiling):
            with precision(bits):
                if krawczyk(F, dF, b):
                    start = bits
                    break
        if start is None:
            raise ContractError("ball does not certify a unique simple root")
    need = max(start, -target_exp + 64)
    for bits in precision_schedule(need, max(need, lim.precision_ceiling)):
        with precision(bits):
            z = b.mid()
            pol = _polish(F, dF, acb(z.real) if real else z, bits, real)
            if pol is None:
                continue
            box = _certify_at(F, dF, pol[0], pol[1], bits, target_exp, real)
            if box is not None and b.contains(box):
                return box
    raise ResourceError("refinement exceeded the precision ceiling",
                        achieved=radius(b))


def contains_root(p, b, *, limits=None):
    """YES: b provably contains a root of p.  NO: p provably has none in b."""
    if p.is_zero():
        return Tri.YES
    if p.degree == 0:
        return Tri.NO
    lim = resolve(limits)
    f = squarefree_part(p)
    F = f.to_flint()
    dF = F.derivative()
    for bits in precision_schedule(64, lim.precision_ceiling):
        with precision(bits):
            v = F(b)
            if not v.contains(0):
                return Tri.NO
            if krawczyk(F, dF, b):
                return Tri.YES
            if _root_inside(F, dF, b, bits):
                return Tri.YES
    return Tri.UNDECIDED


def _root_inside(F, dF, b, bits):
    c = b.mid()
    hr = acb(b.real.rad()) / 2
    hi = acb(0, b.imag.rad()) / 2
    for z0 in (c, c + hr, c - hr, c + hi, c - hi):
        if not z0.is_finite():
            continue
        pol = _polish(F, dF, z0.mid(), bits, real=False)
        if pol is None:
            continue
        z, e = pol
        if not b.contains(z):
            continue
        box = _certify_at(F, dF, z, e, bits, 0, False)
        if box is not None and b.contains(box):
            return True
    return False
