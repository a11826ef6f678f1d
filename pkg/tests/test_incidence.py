import itertools

import pytest
from hypothesis import given, settings, strategies as st

from pcfgeom.algebraic import QI, AlgExpr
from pcfgeom.balls import make_ball
from pcfgeom.errors import ContractError, ResourceError
from pcfgeom.config import Limits
from pcfgeom.incidence import (Line2, LineKind, SpecialSubvariety, Verdict, classify_line,
                               collinear3, family_tags, find_lines, horizontal_pair_search,
                               is_special_point, line_through, pencil_two_point_lines,
                               subvariety_contains, sum_spectrum)
from pcfgeom.pcfcatalog import Catalog, PcfParam, SpecialPoint
from pcfgeom.polycore import OrbitIndex
from pcfgeom.rootcert import Tri


def ids(cat, *zs):
    return [cat.by_value(z) for z in zs]


def pt(cat, x, y):
    return SpecialPoint(cat.by_value(x), cat.by_value(y))


def const_line(a, b, r):
    return Line2(AlgExpr.const(QI.of(a)), AlgExpr.const(QI.of(b)), AlgExpr.const(QI.of(r)))


@pytest.mark.parametrize("pts,verdict", [
    (((0, 0), (1j, -1j), (-1j, 1j)), Verdict.COLLINEAR),
    (((0, 0), (-1, -1j), (1j, -1)), Verdict.COLLINEAR),
    (((0, 0), (-1, 0), (0, -1)), Verdict.NOT_COLLINEAR),
])
def test_collinear3_examples(cat4, pts, verdict):
    P = [pt(cat4, *p) for p in pts]
    assert collinear3(*P, cat4).kind is verdict


def test_collinear3_exact_values_without_ids(cat4):
    v = collinear3((0, 0), (QI(0, 1), QI(0, -1)), (QI(0, -1), QI(0, 1)), cat4)
    assert v.certified


def test_collinear3_needs_gap_certificate(cat4):
    # three points on the diagonal through non-rational parameters
    a, b, c = [p.id for p in cat4 if p.exact is None][:3]
    v = collinear3(SpecialPoint(a, a), SpecialPoint(b, b), SpecialPoint(c, c), cat4)
    assert v.certified


def test_collinear3_algebraic_zero_certified_numerically(cat5):
    # a support certified with the separation bound (not a symbolic cancellation)
    recs = find_lines(cat5, 3, nonspecial_only=True)
    numeric = [r for r in recs if r.bits > 0]
    assert numeric
    p, q, s = numeric[0].support[:3]
    v = collinear3(p, q, s, cat5)
    assert v.certified and v.bits > 0


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_collinear3_permutation_invariant(cat4, data):
    pts = cat4.points()
    trip = [data.draw(st.sampled_from(pts)) for _ in range(3)]
    kinds = {collinear3(*perm, cat4).kind for perm in itertools.permutations(trip)}
    assert len(kinds) == 1


def test_classify_line_examples(cat4):
    assert classify_line(const_line(1, 0, -1), cat4) is LineKind.VERTICAL
    assert classify_line(const_line(0, 1, -2), cat4) is LineKind.HORIZONTAL
    assert classify_line(const_line(1, -1, 0), cat4) is LineKind.DIAGONAL
    assert classify_line(const_line(1, 1, 0), cat4) is LineKind.NONSPECIAL
    # x = 1: not PCF at all, since 1 escapes
    assert classify_line(const_line(1, 0, 1), cat4) is LineKind.NONSPECIAL
    # rational intercepts are decided exactly
    assert classify_line(const_line(2, 0, -1), cat4) is LineKind.NONSPECIAL
    assert classify_line(const_line(1, 0, QI(-1, 1)), cat4) is LineKind.NONSPECIAL
    p3 = next(p.id for p in cat4 if p.index == OrbitIndex(0, 3) and abs(p.approx().imag) < 1e-9)
    line = Line2(AlgExpr.const(1), AlgExpr(), cat4.symbol(p3))
    assert classify_line(line, cat4) is LineKind.VERTICAL
    # x = c/2 for a period-3 center: inside M, not in the catalog, not provably non-PCF here
    half = Line2(AlgExpr.const(2), AlgExpr(), cat4.symbol(p3))
    assert classify_line(half, cat4) is LineKind.UNKNOWN
    with pytest.raises(ContractError):
        classify_line(const_line(0, 0, 1), cat4)


def test_line_normalization_fixed_point(cat4):
    L = line_through(pt(cat4, 0, 0), pt(cat4, 1j, -1j), cat4)
    a, b, r = L.normalized(cat4)
    assert complex(a.mid()) == 1 and abs(complex(b.mid())) <= 1
    M = Line2(L.a * QI(3, -2), L.b * QI(3, -2), L.r * QI(3, -2))
    a2, b2, r2 = M.normalized(cat4)
    assert abs(complex(b2.mid()) - complex(b.mid())) < 1e-30
    assert abs(complex(r2.mid()) - complex(r.mid())) < 1e-30


def test_is_special_point(cat4):
    assert is_special_point((0, -1), cat4) is Tri.YES
    assert is_special_point((1, 0), cat4) is Tri.NO
    assert is_special_point((QI(0, 1), -2), cat4) is Tri.YES
    assert is_special_point(tuple(ids(cat4, 1j, -2)), cat4) is Tri.YES
    assert is_special_point((QI(1, 1), 0), cat4) is Tri.NO


def test_subvariety_contains(cat4):
    i, z, m1 = ids(cat4, 1j, 0, -1)
    Z = SpecialSubvariety(2, (), (frozenset({0, 1}),))
    assert subvariety_contains(Z, (i, i), cat4) is Tri.YES
    Z3 = SpecialSubvariety(3, ((0, z),), (frozenset({1, 2}),))
    assert subvariety_contains(Z3, (z, m1, m1), cat4) is Tri.YES
    Z1 = SpecialSubvariety(2, ((0, z),), (frozenset({1}),))
    assert subvariety_contains(Z1, (m1, m1), cat4) is Tri.NO
    assert Z3.dimension == 1
    with pytest.raises(ContractError):
        subvariety_contains(Z, (i,), cat4)
    with pytest.raises(ContractError):
        SpecialSubvariety(2, (), (frozenset({0}),))


def test_diagonal_saturation(cat5):
    Z = SpecialSubvariety(2, (), (frozenset({0, 1}),))
    assert all(subvariety_contains(Z, (p, p), cat5) is Tri.YES for p in cat5.ids())


@pytest.fixture(scope="module")
def lines4(cat4):
    return find_lines(cat4, 3)


def _supports(cat, recs):
    return {frozenset((cat[p.x].approx(), cat[p.y].approx()) for p in r.support) for r in recs}


def test_find_lines_origin_supports(cat4, lines4):
    sup = _supports(cat4, [r for r in lines4 if not r.kind.special])
    for want in [{(0, 0), (1j, -1j), (-1j, 1j)}, {(0, 0), (-1, -1j), (1j, -1)},
                 {(0, 0), (-1, 1j), (-1j, -1)}]:
        want = frozenset((complex(x), complex(y)) for x, y in want)
        assert any(want <= s for s in sup)


def test_find_lines_flags_special(cat4, lines4):
    kinds = [r.kind for r in lines4]
    assert kinds.count(LineKind.DIAGONAL) == 1
    assert kinds.count(LineKind.VERTICAL) == len(cat4)
    assert kinds.count(LineKind.HORIZONTAL) == len(cat4)
    diag = next(r for r in lines4 if r.kind is LineKind.DIAGONAL)
    assert len(diag.support) >= len(cat4)


def test_find_lines_soundness(cat4, lines4):
    for r in lines4:
        p, q = r.support[:2]
        for s in r.support[2:]:
            assert collinear3(p, q, s, cat4).kind is Verdict.COLLINEAR


def test_find_lines_conjugation_equivariant(cat4, lines4):
    keys = {frozenset(r.support) for r in lines4}
    for r in lines4:
        conj = frozenset(SpecialPoint(cat4.conj(p.x), cat4.conj(p.y)) for p in r.support)
        assert conj in keys


def test_find_lines_nonspecial_filter(cat4, lines4):
    ns = find_lines(cat4, 3, nonspecial_only=True)
    assert [r.support for r in ns] == [r.support for r in lines4 if not r.kind.special]


def test_find_lines_k_too_small(cat4):
    with pytest.raises(ContractError):
        find_lines(cat4, 2)


def test_find_lines_pair_budget(cat4):
    with pytest.raises(ResourceError):
        find_lines(cat4, 3, limits=Limits(pair_budget=100))


def test_pencil(cat3, cat4):
    P = pt(cat3, -1, -2)
    recs = pencil_two_point_lines(P, cat3)
    assert recs
    for r in recs:
        assert P in r.support and len(r.support) >= 2
    origin = pt(cat4, 0, 0)
    sup = _supports(cat4, pencil_two_point_lines(origin, cat4))
    assert any(frozenset({(0j, 0j), (1j, -1j), (-1j, 1j)}) <= s for s in sup)
    assert pencil_two_point_lines(P, cat3, ids=[]) == []


def test_pencil_distinct_lines(cat3):
    recs = pencil_two_point_lines(pt(cat3, -1, -2), cat3)
    n_other = len(cat3) ** 2 - 1
    assert sum(len(r.support) - 1 for r in recs) == n_other


def test_sum_spectrum(cat4, lines4):
    groups = sum_spectrum(cat4)
    z, i, mi, m1, m2 = ids(cat4, 0, 1j, -1j, -1, -2)
    zero = next(g for g in groups if (z, z) in g.pairs)
    assert tuple(sorted((i, mi))) in [tuple(sorted(p)) for p in zero.pairs]
    g3 = next(g for g in groups if tuple(sorted((m1, m2))) in [tuple(sorted(p)) for p in g.pairs])
    assert set(g3.support) == {SpecialPoint(m1, m2), SpecialPoint(m2, m1)}
    assert abs(g3.value + 3) < 1e-12
    # every sum line with >= 3 points is found by the line search
    keys = [frozenset(r.support) for r in lines4]
    for g in groups:
        if len(g.support) >= 3:
            assert any(frozenset(g.support) <= k for k in keys)


def test_horizontal_pairs(cat4):
    assert horizontal_pair_search(cat4.restricted(ids(cat4, 0, -1, -2))) == []
    assert horizontal_pair_search(cat4.restricted(ids(cat4, 1j, -1j))) == []


def test_horizontal_pairs_synthetic():
    b = make_ball(0, 0, -100)
    params = [PcfParam("a", OrbitIndex(0, 1), b, 1, exact=QI(1, 1), conj_id="a2"),
              PcfParam("a2", OrbitIndex(0, 1), b, 1, exact=QI(1, -1), conj_id="a"),
              PcfParam("b", OrbitIndex(0, 1), b, 1, exact=QI(-3, 1), conj_id="b2"),
              PcfParam("b2", OrbitIndex(0, 1), b, 1, exact=QI(-3, -1), conj_id="b")]
    cat = Catalog(1, "1e-30", params)
    out = horizontal_pair_search(cat)
    pairs = sorted(p for p, _ in out)
    assert pairs == [("a", "b"), ("a2", "b2"), ("b", "a"), ("b2", "a2")]
    line = dict(out)[("a", "b")]
    assert line.r.constant_value() == QI(1, 1) + QI(-3, -1)


def test_family_tags_bound4(cat4):
    recs = find_lines(cat4, 3, nonspecial_only=True)
    tags = [family_tags(r.line, r.support, cat4) for r in recs]
    assert all(t[0] == "through a special point" and "special" not in t for t in tags)
    # x + y = 0 through (i, -i) and x + y = -2 through (-1, -1)
    assert sum("x + y constant" in t for t in tags) == 2
    vert = next(r for r in find_lines(cat4, 3) if r.kind is LineKind.VERTICAL)
    assert "special" in family_tags(vert.line, vert.support, cat4)
