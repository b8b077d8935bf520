from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from macc2d.errors import ParameterError
from macc2d.grid import (CacheId, NetworkParams, UserId, access_set, accessing_users, as_fraction,
                         cyc, grid_positions)


def brute_access(i, j, k1, k2, r):
    return {(a, b) for a in range(1, k1 + 1) for b in range(1, k2 + 1)
            if (a - i) % k1 < r and (b - j) % k2 < r}


@pytest.mark.parametrize("x, m, want", [(1, 3, 1), (3, 3, 3), (4, 3, 1), (0, 3, 3), (-1, 3, 2),
                                        (7, 4, 3), (8, 4, 4)])
def test_cyc(x, m, want):
    assert cyc(x, m) == want


def test_cyc_rejects_zero_modulus():
    with pytest.raises(ParameterError):
        cyc(1, 0)


def test_access_set_wraps_both_axes():
    got = access_set((3, 4), 3, 4, 2)
    assert set(got) == {(3, 4), (3, 1), (1, 4), (1, 1)}
    assert got[0] == CacheId(3, 4)


def test_access_set_forms_agree():
    p = NetworkParams(3, 4, 2, 4, Fraction(1, 6))
    assert access_set(UserId(2, 3), p) == access_set((2, 3), 3, 4, 2) == access_set(7, p)


def test_user_flat_index_roundtrip():
    assert UserId(2, 1).flat(3) == 4
    assert UserId.from_flat(4, 3) == UserId(2, 1)
    assert NetworkParams(3, 3, 2, 5, Fraction(1, 9)).user(9) == UserId(3, 3)


def test_grid_positions_orders():
    assert grid_positions(2, 3)[:3] == [(1, 1), (1, 2), (1, 3)]
    assert grid_positions(2, 3, "col")[:3] == [(1, 1), (2, 1), (1, 2)]
    with pytest.raises(ValueError):
        grid_positions(2, 3, "diag")


@pytest.mark.parametrize("kwargs", [
    dict(k1=3, k2=2, r=1, l=1),             # K2 < K1
    dict(k1=3, k2=3, r=3, l=1),             # r >= K1
    dict(k1=3, k2=3, r=0, l=1),
    dict(k1=3, k2=3, r=1, l=0),
    dict(k1=3, k2=3, r=1, l=1, mu=Fraction(0)),
    dict(k1=3, k2=3, r=1, l=1, mu=Fraction(3, 2)),
])
def test_network_params_rejects(kwargs):
    with pytest.raises(ParameterError):
        NetworkParams(**kwargs)


def test_as_fraction():
    assert as_fraction("1/9") == Fraction(1, 9)
    assert as_fraction(Fraction(2, 4)) == Fraction(1, 2)
    with pytest.raises(ParameterError):
        as_fraction(0.5)
    assert as_fraction(" 2/18 ") == Fraction(1, 9)
    for bad in ("one ninth", "0.11", "1e-1", "1/0", "1/-9"):
        with pytest.raises(ParameterError):
            as_fraction(bad)


dims = st.integers(2, 7).flatmap(
    lambda k1: st.tuples(st.just(k1), st.integers(k1, 8), st.integers(1, k1 - 1)))


@given(dims, st.data())
def test_access_set_matches_brute_force(d, data):
    k1, k2, r = d
    i = data.draw(st.integers(1, k1))
    j = data.draw(st.integers(1, k2))
    got = access_set((i, j), k1, k2, r)
    assert len(got) == len(set(got)) == r * r
    assert set(got) == brute_access(i, j, k1, k2, r)


@given(dims)
def test_every_cache_serves_r_squared_users(d):
    k1, k2, r = d
    for cache in grid_positions(k1, k2):
        users = accessing_users(cache, k1, k2, r)
        assert len(set(users)) == r * r
        assert all(cache in access_set(u, k1, k2, r) for u in users)


@given(dims, st.data())
def test_access_set_shift_symmetry(d, data):
    k1, k2, r = d
    i, j = data.draw(st.integers(1, k1)), data.draw(st.integers(1, k2))
    a, b = data.draw(st.integers(0, k1)), data.draw(st.integers(0, k2))
    shifted = {(cyc(x + a, k1), cyc(y + b, k2)) for x, y in access_set((i, j), k1, k2, r)}
    assert shifted == set(access_set((cyc(i + a, k1), cyc(j + b, k2)), k1, k2, r))
