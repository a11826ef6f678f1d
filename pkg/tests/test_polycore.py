import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from pcfgeom.config import Limits
from pcfgeom.errors import ContractError, InexactDivisionError, ResourceError
from pcfgeom.polycore import (IntPoly, OrbitForm, OrbitIndex, critical_relation_polynomial,
                              divisors, exact_divide, exact_type_factor, orbit_indices,
                              orbit_polynomial, poly_gcd, squarefree_decomposition,
                              squarefree_part)

X = IntPoly.x()
small_polys = st.lists(st.integers(-20, 20), min_size=1, max_size=7).map(IntPoly)
nonzero_polys = small_polys.filter(lambda p: not p.is_zero())


def P(*coeffs):
    return IntPoly(coeffs)


def test_orbit_polynomial_small():
    assert orbit_polynomial(1) == X
    assert orbit_polynomial(2) == P(0, 1, 1)
    assert orbit_polynomial(3) == P(0, 1, 1, 2, 1)
    assert orbit_polynomial(0).is_zero()


@pytest.mark.parametrize("k", range(1, 9))
def test_orbit_recurrence_degree_monic(k):
    p = orbit_polynomial(k)
    assert p.degree == 2 ** (k - 1)
    assert p.is_monic()
    assert orbit_polynomial(k + 1 if k < 8 else k) == (p * p + X if k < 8 else p)


def test_orbit_budget():
    with pytest.raises(ResourceError, match="256"):
        orbit_polynomial(9)
    assert orbit_polynomial(9, Limits(degree_budget=256)).degree == 256


def test_critical_relation_examples():
    assert critical_relation_polynomial(OrbitIndex(0, 2)) == P(0, 1, 1)
    assert critical_relation_polynomial(OrbitIndex(2, 1)) == P(0, 0, 0, 2, 1)
    g = critical_relation_polynomial(OrbitIndex(1, 2))
    assert g == P(0, 0, 1, 2, 1)
    assert g == (X * X) * (X + 1) ** 2


def test_orbit_index_validation():
    with pytest.raises(ContractError):
        OrbitIndex(-1, 2)
    with pytest.raises(ContractError):
        OrbitIndex(0, 0)
    assert OrbitIndex(2, 3).size == 5


def test_exact_divide_examples():
    assert exact_divide(P(0, 1, 1), X) == X + 1
    assert exact_divide(orbit_polynomial(3), X) == P(1, 1, 2, 1)
    with pytest.raises(InexactDivisionError) as err:
        exact_divide(P(0, 1, 1), X + 2)
    assert err.value.remainder_degree == 0


def test_squarefree_examples():
    assert squarefree_part(P(0, 0, 0, 2, 1)) == P(0, 2, 1)
    assert squarefree_part(P(0, 1, 1)) == P(0, 1, 1)
    assert squarefree_part(IntPoly.const(5)) == IntPoly.const(5)


def test_squarefree_decomposition_multiplicities():
    p = X ** 2 * (X + 1) ** 3
    parts = dict((k, f) for f, k in squarefree_decomposition(p))
    assert parts[2] == X and parts[3] == X + 1


@given(nonzero_polys, nonzero_polys)
def test_exact_divide_round_trip(a, b):
    assert exact_divide(a * b, b) == a


@given(nonzero_polys, nonzero_polys)
def test_gcd_matches_sympy(a, b):
    c = sp.symbols("c")
    ours = poly_gcd(a, b)
    ref = sp.Poly(sp.gcd(sp.Poly(list(reversed(a.coeffs)), c), sp.Poly(list(reversed(b.coeffs)), c)), c)
    ref_coeffs = [int(t) for t in reversed(ref.all_coeffs())]
    # gcd is defined up to sign
    assert ours.coeffs in (tuple(ref_coeffs), tuple(-t for t in ref_coeffs))


@given(small_polys, st.integers(-5, 5))
def test_horner_matches_expansion(p, x):
    assert p(x) == sum(a * x ** k for k, a in enumerate(p.coeffs))


# degrees of the exact-period factors for n = 1..8, from 2^(n-1) = sum over d | n
GLEASON_DEGREES = {1: 1, 2: 1, 3: 3, 4: 6, 5: 15, 6: 27, 7: 63, 8: 120}


@pytest.mark.parametrize("n,deg", sorted(GLEASON_DEGREES.items()))
def test_gleason_degrees(n, deg):
    assert exact_type_factor(OrbitIndex(0, n)).poly.degree == deg


@pytest.mark.parametrize("n", range(1, 9))
def test_divisor_sum_identity(n):
    assert sum(exact_type_factor(OrbitIndex(0, d)).poly.degree for d in divisors(n)) == 2 ** (n - 1)


def test_gleason_factors_against_sympy():
    c = sp.symbols("c")
    for n in range(1, 6):
        p = sp.Poly(sp.expand(_sym_orbit(c, n)), c)
        lower = [sp.Poly(sp.expand(_sym_orbit(c, d)), c) for d in range(1, n) if n % d == 0]
        new = sp.Integer(1)
        for f, _ in sp.factor_list(p)[1]:
            if not any(sp.rem(q, f).is_zero for q in lower):
                new *= f.as_expr()
        ours = exact_type_factor(OrbitIndex(0, n)).poly
        assert sp.Poly(new, c).all_coeffs() == [sp.Integer(t) for t in reversed(ours.coeffs)]


def _sym_orbit(c, k):
    z = sp.Integer(0)
    for _ in range(k):
        z = sp.expand(z * z + c)
    return z


def test_preperiod_one_is_empty():
    for n in range(1, 7):
        assert exact_type_factor(OrbitIndex(1, n)).poly.degree == 0


def test_misiurewicz_examples():
    assert exact_type_factor(OrbitIndex(2, 1)).poly == X + 2
    assert exact_type_factor(OrbitIndex(2, 2)).poly == X * X + 1


@pytest.mark.parametrize("t", orbit_indices(8))
def test_form_expands_to_factor(t):
    f = exact_type_factor(t)
    assert f.form.expand() == f.poly


def test_counts_by_bound():
    tot = {b: sum(exact_type_factor(t).poly.degree for t in orbit_indices(b)) for b in (4, 5, 6, 8)}
    assert tot == {4: 17, 5: 48, 6: 122, 8: 731}


@settings(max_examples=30, deadline=None)
@given(st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False))
def test_log_derivative_matches_dense(z):
    import numpy as np
    p = orbit_polynomial(5)
    dense = np.polynomial.Polynomial(p.coeffs)
    val, der = dense(z), dense.deriv()(z)
    if abs(val) < 1e-6:
        return
    got = OrbitForm((((5, -1), 1),)).log_derivative(np.array([z]))[0]
    assert abs(got - der / val) <= 1e-8 * max(1, abs(der / val))
