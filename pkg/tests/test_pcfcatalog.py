import json

import pytest

from pcfgeom.balls import make_ball, precision
from pcfgeom.errors import ContractError, IntegrityError, ParseError
from pcfgeom.heights import green_mandelbrot
from pcfgeom.pcfcatalog import (SpecialPoint, build_catalog, classify_exact_type, dumps_catalog,
                                load_catalog, loads_catalog, period_center_count, save_catalog)
from pcfgeom.polycore import OrbitIndex
from pcfgeom.rootcert import pairwise_disjoint


def _values(cat):
    return sorted((round(p.approx().real, 10), round(p.approx().imag, 10), p.m, p.n) for p in cat)


def test_bound_two():
    assert _values(build_catalog(2)) == [(-1.0, 0.0, 0, 2), (0.0, 0.0, 0, 1)]


def test_bound_three(cat3):
    vals = _values(cat3)
    assert (-2.0, 0.0, 2, 1) in vals
    period3 = [v for v in vals if (v[2], v[3]) == (0, 3)]
    assert [v[:2] for v in period3] == [(-1.7548776662, 0.0), (-0.1225611669, -0.7448617666),
                                        (-0.1225611669, 0.7448617666)]
    assert len(cat3) == 6


def test_known_small_parameters(cat4):
    want = {0: OrbitIndex(0, 1), -1: OrbitIndex(0, 2), -2: OrbitIndex(2, 1),
            1j: OrbitIndex(2, 2), -1j: OrbitIndex(2, 2)}
    for z, t in want.items():
        pid = cat4.by_value(z)
        assert pid is not None and cat4[pid].index == t
        assert cat4[pid].exact is not None


@pytest.mark.parametrize("n,count", [(1, 1), (2, 1), (3, 3), (4, 6), (5, 15), (6, 27), (7, 63), (8, 120)])
def test_period_center_count(n, count):
    assert period_center_count(n) == count


def test_classify_exact_type():
    with precision(128):
        assert classify_exact_type(make_ball(0, 0, -60), OrbitIndex(2, 1)) == OrbitIndex(0, 1)
        assert classify_exact_type(make_ball(-1, 0, -60), OrbitIndex(0, 2)) == OrbitIndex(0, 2)
        assert classify_exact_type(make_ball(-2, 0, -60), OrbitIndex(2, 1)) == OrbitIndex(2, 1)


def test_catalog_invariants(catalogs):
    cat = catalogs(6)
    counts = cat.counts_by_type()
    for n in range(1, 7):
        assert counts[OrbitIndex(0, n)] == period_center_count(n)
    assert not any(t.m == 1 for t in counts)
    assert pairwise_disjoint([p.ball for p in cat])
    for p in cat:
        q = cat[p.conj_id]
        assert q.index == p.index
        with precision(200):
            assert q.ball.overlaps(p.ball.conjugate())


def test_ids_deterministic(catalogs):
    assert build_catalog(5).ids() == catalogs(5).ids()


def test_factor_and_classify_routes_agree(cat4):
    other = build_catalog(4, method="classify")
    assert [p.index for p in other] == [p.index for p in cat4]
    assert all(a.ball.overlaps(b.ball) for a, b in zip(other, cat4))


def test_round_trip(tmp_path, cat3):
    path = tmp_path / "cat.json"
    save_catalog(cat3, path)
    assert load_catalog(path) == cat3


def test_truncated_file_is_parse_error(cat3):
    text = dumps_catalog(cat3)
    with pytest.raises(ParseError, match="line"):
        loads_catalog(text[: len(text) // 2])


def test_missing_field_names_context(cat3):
    data = json.loads(dumps_catalog(cat3))
    del data["params"][2]["rad"]
    with pytest.raises(ParseError, match=r"params\[2\]"):
        loads_catalog(json.dumps(data))


def test_tampered_ball_is_integrity_error(cat3):
    data = json.loads(dumps_catalog(cat3))
    data["params"][0]["mid"][0] = "0.5"
    with pytest.raises(IntegrityError):
        loads_catalog(json.dumps(data))


def test_missing_parameter_is_integrity_error(cat3):
    data = json.loads(dumps_catalog(cat3))
    data["params"].pop()
    with pytest.raises(IntegrityError):
        loads_catalog(json.dumps(data))


def test_unknown_id(cat3):
    with pytest.raises(ContractError):
        cat3["nope"]


def test_green_zero_on_catalog_balls(cat5):
    for p in cat5:
        assert not green_mandelbrot(p.ball).escaped


def test_special_point_swap():
    assert SpecialPoint("a", "b").swap() == SpecialPoint("b", "a")


def test_refined_ball_nested(cat5):
    pid = cat5.ids()[-1]
    fine = cat5.ball(pid, 300)
    with precision(400):
        assert cat5[pid].ball.contains(fine.mid())
