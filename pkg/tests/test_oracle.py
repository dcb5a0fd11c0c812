from fractions import Fraction as F

import pytest

from twistchar.folded import folded_data
from twistchar.oracle import (
    Cache,
    WeightMultTable,
    build_gcm,
    check_gcm,
    check_weyl_symmetry,
    freudenthal_char,
    heisenberg_char,
    level1_char,
    oracle_series,
    peterson_mults,
    reflect,
)
from twistchar.quadform import determinant

from conftest import TWISTED


def test_gcm_a3():
    g = build_gcm(folded_data("A3^2"))
    assert g.a == ((2, 0, -2), (0, 2, -2), (-1, -1, 2))
    assert g.marks == (1, 1, 1)
    check_gcm(g)


def test_gcm_untwisted_a1():
    g = build_gcm(folded_data("untwisted:A1"))
    assert g.a == ((2, -2), (-2, 2))
    check_gcm(g)


def test_gcm_d4_triality():
    g = build_gcm(folded_data("D4^3"))
    assert determinant(g.a) == 0
    # chain 0 - 1 => 2: simple bond, then a triple bond, marks (1, 2, 1)
    assert g.a == ((2, -1, 0), (-1, 2, -3), (0, -1, 2))
    assert g.marks == (1, 2, 1)
    check_gcm(g)


@pytest.mark.parametrize("token", TWISTED + ["untwisted:A2", "untwisted:D4", "untwisted:E6"])
def test_gcm_structure(token):
    g = build_gcm(folded_data(token))
    check_gcm(g)
    n = g.size
    for i in range(n):
        assert sum(g.a[i][j] * g.marks[j] for j in range(n)) == 0
        for j in range(n):
            assert g.a[i][j] == 2 * g.bgram[i][j] / g.bgram[i][i]


def test_check_gcm_rejects():
    g = build_gcm(folded_data("A3^2"))
    bad = type(g)(g.folded, ((2, 0, -2), (0, 2, -2), (-1, -1, 3)), g.sym, g.marks, g.bgram, g.beta0)
    with pytest.raises(AssertionError):
        check_gcm(bad)


@pytest.mark.parametrize("token", TWISTED)
def test_peterson_imaginary_and_real(token):
    f = folded_data(token)
    g = build_gcm(f)
    table = peterson_mults(g, 12)
    for n in range(1, 13):
        assert table.mult(table.delta(n)) == f.h_dims[n % f.r]
    for c, m in table.roots():
        if table.is_real(c):
            assert m == 1
        else:
            assert g.pair(c, c) == 0


def test_peterson_examples():
    t = peterson_mults(build_gcm(folded_data("A3^2")), 8)
    assert [t.mult(t.delta(n)) for n in range(1, 9)] == [1, 2] * 4
    t = peterson_mults(build_gcm(folded_data("D4^3")), 9)
    assert [t.mult(t.delta(n)) for n in range(1, 10)] == [1, 1, 2] * 3
    with pytest.raises(ValueError):
        peterson_mults(t.gcm, 0)


def test_peterson_untwisted_a1():
    t = peterson_mults(build_gcm(folded_data("untwisted:A1")), 6)
    for n in range(1, 7):
        assert t.mult(t.delta(n)) == 1
        assert t.mult((n, n - 1)) == t.mult((n, n + 1)) == 1
    assert t.mult((2, 0)) == 0


def test_freudenthal_highest_weight():
    for token in ["A3^2", "D4^3"]:
        for k in (1, 2, 3):
            t = freudenthal_char(build_gcm(folded_data(token)), k, 0)
            assert t.mults == {((0, 0), 0): 1}


def test_freudenthal_a3_half_slice():
    f = folded_data("A3^2")
    t = freudenthal_char(build_gcm(f), 1, 1)
    assert sum(m for (w, d), m in t.mults.items() if d == 1) == 5
    assert t.energy(1) == F(1, 2)


def test_freudenthal_errors():
    g = build_gcm(folded_data("A3^2"))
    with pytest.raises(ValueError):
        freudenthal_char(g, 0, 2)
    with pytest.raises(ValueError):
        freudenthal_char(g, 1, -1)


@pytest.mark.parametrize("token", TWISTED)
def test_freudenthal_equals_level1(token):
    f = folded_data(token)
    N = F(3) if f.l <= 3 else F(2)
    assert oracle_series(f, 1, N) == level1_char(f, N)


def test_freudenthal_untwisted_a1_level1():
    f = folded_data("untwisted:A1")
    assert oracle_series(f, 1, 6) == level1_char(f, 6)


@pytest.mark.parametrize("token,k", [("A3^2", 2), ("D4^3", 2), ("A5^2", 1), ("E6^2", 1)])
def test_weyl_symmetry(token, k):
    f = folded_data(token)
    check_weyl_symmetry(freudenthal_char(build_gcm(f), k, 4), f)


def test_reflect_is_involution():
    f = folded_data("E6^2")
    w = (1, -2, 3, 0)
    for i in range(f.l):
        assert reflect(f, reflect(f, w, i), i) == w


def test_level1_examples():
    s = level1_char(folded_data("A3^2"), F(1, 2))
    assert s.terms() == {(F(0), (0, 0)): 1, (F(1, 2), (0, 0)): 1,
                         (F(1, 2), (1, 0)): 1, (F(1, 2), (-1, 0)): 1,
                         (F(1, 2), (1, 1)): 1, (F(1, 2), (-1, -1)): 1}
    # six short vectors of the folded lattice at 1/3, plus one Heisenberg state
    s = level1_char(folded_data("D4^3"), F(1, 3))
    assert s.coefficient(F(1, 3), (0, 0)) == 1
    assert sum(c for (q, y), c in s.terms().items() if q == F(1, 3)) == 7
    assert level1_char(folded_data("E6^2"), 0).terms() == {(F(0), (0,) * 4): 1}


@pytest.mark.parametrize("token", TWISTED)
def test_heisenberg_constant_term(token):
    s = heisenberg_char(folded_data(token), 2)
    assert s.coefficient(0) == 1
    f = folded_data(token)
    assert s.coefficient(F(1, f.r)) == f.h_dims[1 % f.r]


def test_table_json_round_trip():
    t = freudenthal_char(build_gcm(folded_data("D4^3")), 2, 3)
    text = t.to_json()
    back = WeightMultTable.from_json(text)
    assert back.mults == t.mults and back.to_json() == text
    assert back.to_series() == t.to_series()


def test_cache_round_trip(tmp_path):
    cache = Cache(tmp_path / "c")
    f = folded_data("A3^2")
    g = build_gcm(f)
    cold = freudenthal_char(g, 2, 4, cache=cache)
    assert len(cache.entries()) == 1
    raw = cache.entries()[0].read_bytes()
    warm = freudenthal_char(g, 2, 4, cache=cache)
    assert warm.to_json() == cold.to_json() == freudenthal_char(g, 2, 4).to_json()
    assert cache.entries()[0].read_bytes() == raw
    assert cache.stat()["entries"] == 1
    assert cache.clear() == 1 and cache.entries() == []


def test_cache_rejects_stale_header(tmp_path):
    cache = Cache(tmp_path)
    f = folded_data("A3^2")
    t = freudenthal_char(build_gcm(f), 1, 2, cache=cache)
    p = cache.path("A3^2", 1, 2)
    p.write_text(p.read_text().replace('"format_version":1', '"format_version":0'))
    assert cache.load("A3^2", 1, 2) is None
    p.write_text("not json")
    assert cache.load("A3^2", 1, 2) is None
    assert freudenthal_char(build_gcm(f), 1, 2, cache=cache).mults == t.mults


def test_cache_env(monkeypatch, tmp_path):
    monkeypatch.setenv("TWISTCHAR_CACHE", str(tmp_path / "env"))
    assert Cache().dir == tmp_path / "env"
