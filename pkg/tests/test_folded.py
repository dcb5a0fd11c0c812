from fractions import Fraction as F

import pytest

from twistchar.folded import (
    AmbientLattice,
    DiagramAutomorphism,
    UnknownTypeError,
    build_ambient,
    fold,
    folded_data,
    parse_type,
    theta_series,
)
from twistchar.quadform import is_positive_definite

from conftest import TWISTED, brute_lattice


def test_build_ambient_a3():
    amb, aut = build_ambient("A3^2")
    assert amb.rank == 3
    assert amb.gram == ((2, -1, 0), (-1, 2, -1), (0, -1, 2))
    assert aut.order == 2 and aut.perm == (2, 1, 0)


def test_build_ambient_untwisted_a1():
    amb, aut = build_ambient("untwisted:A1")
    assert amb.gram == ((2,),) and aut.order == 1 and aut.perm == (0,)


def test_build_ambient_d4_triality():
    amb, aut = build_ambient("D4^3")
    # 1 -> 3 -> 4 -> 1, node 2 fixed
    assert aut.perm == (2, 1, 3, 0)
    assert [o for o in aut.orbits()] == [(0, 2, 3), (1,)]
    assert amb.gram[1] == (-1, 2, -1, -1)


def test_build_ambient_e6_and_d_labels():
    amb, aut = build_ambient("E6^2")
    assert aut.perm == (5, 4, 2, 3, 1, 0)
    assert amb.gram[2][3] == -1 and amb.gram[2][4] == -1
    amb, aut = build_ambient("D5^2")
    assert aut.perm == (0, 1, 2, 4, 3)
    assert amb.gram[2][3] == amb.gram[2][4] == -1


@pytest.mark.parametrize("token", ["X9^9", "A4^2", "A1^2", "D2^2", "E7^2", "D5^3", "untwisted:D3",
                                   "untwisted:E9", "A3", "a3^2", ""])
def test_bad_tokens(token):
    with pytest.raises(UnknownTypeError):
        parse_type(token)


def test_ambient_rejects_bad_gram():
    with pytest.raises(ValueError):
        AmbientLattice(2, ((2, -2), (-2, 2)), ("a", "b"))
    with pytest.raises(ValueError):
        AmbientLattice(2, ((2, 1), (1, 2)), ("a", "b"))


def test_fold_rejects_non_preserving_perm():
    amb, _ = build_ambient("untwisted:A3")
    with pytest.raises(ValueError):
        fold(amb, DiagramAutomorphism(2, (1, 0, 2)))


def test_fold_a3():
    f = folded_data("A3^2")
    assert f.gram0 == ((1, -1), (-1, 2))
    assert f.rho == (F(1, 2), 1)
    assert f.h_dims == (2, 1)
    assert f.orbit_reps == (1, 2)


def test_fold_d4():
    f = folded_data("D4^3")
    assert f.gram0 == ((F(2, 3), -1), (-1, 2))
    assert f.rho == (F(1, 3), 1)
    assert f.h_dims == (2, 1, 1)


def test_fold_e6_and_a5():
    f = folded_data("E6^2")
    assert f.gram0 == ((1, F(-1, 2), 0, 0), (F(-1, 2), 1, -1, 0), (0, -1, 2, -1), (0, 0, -1, 2))
    assert f.theta0_folded == (2, 3, 2, 1)
    f = folded_data("A5^2")
    assert f.gram0 == ((1, F(-1, 2), 0), (F(-1, 2), 1, -1), (0, -1, 2))


@pytest.mark.parametrize("token", ["untwisted:A1", "untwisted:A4", "untwisted:D5", "untwisted:E6"])
def test_fold_identity(token):
    f = folded_data(token)
    assert [[int(x) for x in row] for row in f.gram0] == [list(r) for r in f.ambient.gram]
    assert all(r == 1 for r in f.rho)


@pytest.mark.parametrize("token", TWISTED)
def test_folded_invariants(token):
    f = folded_data(token)
    g, amb, r = f.gram0, f.ambient.gram, f.r
    assert is_positive_definite(g)
    assert all(f.rho[i] == g[i][i] / 2 for i in range(f.l))
    assert sum(f.h_dims) == f.ambient.rank and f.h_dims[0] == f.l
    assert f.is_chain()
    powers = [f.automorphism.power(p) for p in range(r)]
    for i, oi in enumerate(f.orbits):
        assert (f.rho[i] * r).denominator == 1 and f.rho[i] > 0
        for j, oj in enumerate(f.orbits):
            # project one side vs both sides
            one = F(sum(amb[pw[oi[0]]][oj[0]] for pw in powers), r)
            both = F(sum(amb[p1[oi[0]]][p2[oj[0]]] for p1 in powers for p2 in powers), r * r)
            assert g[i][j] == one == both
            if i != j:
                assert g[i][j] <= 0 and (g[i][j] * r).denominator == 1


def test_theta_a3():
    s = theta_series(folded_data("A3^2"), F(1, 2))
    assert s.terms() == {(0, (0, 0)): 1, (F(1, 2), (1, 0)): 1, (F(1, 2), (-1, 0)): 1,
                         (F(1, 2), (1, 1)): 1, (F(1, 2), (-1, -1)): 1}


def test_theta_d4_has_six_short_vectors():
    # the folded lattice is the G2 root lattice: six vectors of norm 2/3
    s = theta_series(folded_data("D4^3"), F(1, 3))
    assert s.coefficient(0) == 1
    assert sorted(y for (q, y), c in s.items() if q == F(1, 3)) == [
        (-2, -1), (-1, -1), (-1, 0), (1, 0), (1, 1), (2, 1)]


@pytest.mark.parametrize("token", TWISTED)
def test_theta_zero_truncation(token):
    s = theta_series(folded_data(token), 0)
    assert s.terms() == {(0, (0,) * folded_data(token).l): 1}


@pytest.mark.parametrize("token", ["A3^2", "D4^3", "D3^2"])
def test_theta_matches_brute_force(token):
    f = folded_data(token)
    N = F(3, 2)
    brute = brute_lattice(f.gram0, 2 * N)
    s = theta_series(f, N)
    assert s.terms() == {(v / 2, x): 1 for x, v in brute.items()}


@pytest.mark.parametrize("token", TWISTED)
def test_theta_symmetric(token):
    s = theta_series(folded_data(token), 2)
    for (q, y), c in s.items():
        assert s.coefficient(q, tuple(-a for a in y)) == c
