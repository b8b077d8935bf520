from fractions import Fraction

import numpy as np
import pytest

from goldens import EPDA_4
from macc2d.arrays import Epda
from macc2d.constructions import generalized_construct, lemma1_construct, optimal_construct
from macc2d.errors import DegenerateChannelError, ParameterError, StructureError
from macc2d.grid import NetworkParams
from macc2d.scheme import (ChannelRealization, Demand, _null_projection, _zero_forcing_group,
                           build_placement, build_plan, compute_ndt, delivery_schedule,
                           draw_channel, run_trials, simulate_decode)

OPT3x3 = NetworkParams(3, 3, 2, 5, Fraction(1, 9))
GEN3x4 = NetworkParams(3, 4, 2, 4, Fraction(1, 6))
LIFT = NetworkParams(4, 4, 2, 2, Fraction(1, 8))


@pytest.fixture(scope="module")
def opt3x3():
    return optimal_construct(OPT3x3)


def test_placement_of_example(opt3x3):
    c, _ = opt3x3
    pl = build_placement(c, 9)
    assert pl.mu == Fraction(1, 9)
    assert pl.accessible_rows(1, 2) == {1, 2, 4, 5}
    assert pl.accessible_rows((3, 3), 2) == {9, 7, 3, 1}
    with pytest.raises(ParameterError):
        build_placement(c, 8)


def test_interference_set_of_first_occurrence(opt3x3):
    _, b = opt3x3
    t = delivery_schedule(b)[0]
    assert t.s == 1 and t.eta == 9
    a = [n for n in range(t.eta) if t.users[n] == 1][0]
    assert t.rows[a] + 1 == 3
    assert set(t.interference[a]) == {4, 5, 6, 7}
    assert max(len(p) for tr in delivery_schedule(b) for p in tr.interference) <= OPT3x3.l - 1


def test_precoders_null_and_gain(opt3x3):
    _, b = opt3x3
    h = draw_channel(5, 9, 7)
    plan = build_plan(b, h, Demand.distinct(9))
    for t in plan.transmissions:
        assert t.precoder.shape == (5, t.eta)
        assert np.allclose(np.linalg.norm(t.precoder, axis=0), 1)
        for a, users in enumerate(t.interference):
            v = t.precoder[:, a]
            for u in users:
                assert abs(h.h[:, u - 1] @ v) < 1e-9
            assert abs(h.h[:, t.users[a] - 1] @ v) > 1e-3
    assert plan.max_residual < 1e-9 and plan.min_gain > 1e-3


def test_single_occurrence_uses_matched_filter():
    c, b = lemma1_construct(Epda(4, 2, 4, 2, 2, EPDA_4), LIFT)
    h = draw_channel(2, 16, 3)
    plan = build_plan(b, h, Demand.distinct(16))
    for t in plan.transmissions:
        for a, users in enumerate(t.interference):
            if not users:
                hk = h.h[:, t.users[a] - 1]
                want = np.conj(hk) / np.linalg.norm(hk)
                assert np.allclose(t.precoder[:, a], want)


def test_decode_example(opt3x3):
    c, b = opt3x3
    h = draw_channel(5, 9, 11)
    plan = build_plan(b, h, Demand.distinct(9))
    rep = simulate_decode(plan, build_placement(c, 9), h, seed=4)
    assert rep.ok and rep.failures == []
    assert max(rep.max_error.values()) < 1e-6
    assert rep.recovered[1] == 5                     # F - r^2 subfiles over the air
    first = plan.transmissions[0]
    assert 2 in first.rows[first.users == 1]         # row 3, 0-based


def test_same_file_demand(opt3x3):
    c, b = opt3x3
    h = draw_channel(5, 9, 2)
    d = Demand((1,) * 9)
    rep = simulate_decode(build_plan(b, h, d), build_placement(c, 9), h, d, seed=1)
    assert rep.ok


def test_missing_integer_is_reported(opt3x3):
    c, b = opt3x3
    h = draw_channel(5, 9, 2)
    plan = build_plan(b, h, Demand.distinct(9))
    plan.schedule.users[0] = plan.schedule.users[1]  # occurrence now served to the wrong user
    rep = simulate_decode(plan, build_placement(c, 9), h, seed=1)
    assert not rep.ok
    assert any(f["reason"] == "subfile neither cached nor delivered" for f in rep.failures)


def test_degenerate_channel_raises(opt3x3):
    _, b = opt3x3
    h = draw_channel(5, 9, 0).h.copy()
    h[:, 4] = h[:, 3]                                 # users 4 and 5 indistinguishable
    with pytest.raises(DegenerateChannelError):
        build_plan(b, ChannelRealization(h), Demand.distinct(9))


def test_interference_beyond_antennas_raises(opt3x3):
    _, b = opt3x3
    from macc2d.arrays import DeliveryArray
    narrow = DeliveryArray(b.k1, b.k2, b.r, 4, b.s, b.cells, b.cols, parent=b.parent)
    with pytest.raises(StructureError):
        build_plan(narrow, draw_channel(4, 9, 0), Demand.distinct(9))


def test_null_projection_rank_deficient():
    rng = np.random.default_rng(0)
    h = rng.standard_normal((4, 3)) + 1j * rng.standard_normal((4, 3))
    g = np.stack([h[:, 0], 2 * h[:, 0], h[:, 1]])[None]      # rank 2
    a = np.conj(h[:, 2])[None]
    v = _null_projection(g, a)[0]
    assert np.abs(g[0] @ v).max() < 1e-10
    assert abs(h[:, 2] @ v) > 1e-3
    _, ok = _zero_forcing_group(np.stack([h[:, 0], h[:, 0], h[:, 1]], axis=1),
                                np.array([[0, 1, 2]]))
    assert not ok[0]


def test_demand_validation():
    with pytest.raises(ParameterError):
        Demand((1, 2)).validate(3, 3)
    with pytest.raises(ParameterError):
        Demand((1, 2, 4)).validate(3, 3)


def test_trials_generalized_3x4():
    c, b = generalized_construct(GEN3x4)
    out = run_trials(c, b, trials=100, seed=0)
    assert out["ok"] and out["degenerate_channels"] == 0
    assert out["max_nulling_residual"] < 1e-9 and out["min_desired_gain"] > 1e-3
    assert out["max_rel_error"] < 1e-6
    assert out["max_interference_set"] <= GEN3x4.l - 1


def test_trials_random_demand_deterministic(opt3x3):
    c, b = opt3x3
    one = run_trials(c, b, n_files=12, trials=10, seed=5, demand="random")
    two = run_trials(c, b, n_files=12, trials=10, seed=5, demand="random")
    assert one == two and one["ok"]


def test_ndt_optimal_3x3(opt3x3):
    c, b = opt3x3
    n = compute_ndt(b, OPT3x3, c)
    assert n.achieved == Fraction(5, 9) == n.lower_bound == n.formula_corollary1
    assert n.formula_remark1 == Fraction(5, 6)
    assert n.optimal_flag is True


def test_ndt_generalized_3x4():
    c, b = generalized_construct(GEN3x4)
    n = compute_ndt(b, GEN3x4, c)
    assert n.achieved == n.lower_bound == Fraction(1, 3) and n.optimal_flag


def test_ndt_lift_matches_closed_form():
    c, b = lemma1_construct(Epda(4, 2, 4, 2, 2, EPDA_4), LIFT)
    n = compute_ndt(b, LIFT, c)
    assert n.achieved == Fraction(2) == n.formula_remark1
    assert n.lower_bound == Fraction(4, 5) and not n.optimal_flag


def test_ndt_rejects_wrong_mu(opt3x3):
    c, b = opt3x3
    with pytest.raises(ParameterError):
        compute_ndt(b, NetworkParams(3, 3, 2, 5, Fraction(1, 8)), c)
