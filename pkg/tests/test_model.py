import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from meshsched.model import (ConfigError, PhyConfig, RateTable, channel_gain, dbm_to_mw,
                             gain_matrix, mw_to_dbm, sample_positions)


@pytest.mark.parametrize("d, expected", [(10, 1.0), (20, 0.125), (100, 1e-3)])
def test_channel_gain_examples(phy, d, expected):
    assert channel_gain((0, 0), (d, 0), phy) == pytest.approx(expected, rel=1e-12)


def test_coincident_positions_rejected(phy):
    with pytest.raises(ConfigError):
        channel_gain((1, 2), (1, 2), phy)
    with pytest.raises(ConfigError):
        gain_matrix(np.array([[0.0, 0.0], [0.0, 0.0]]), phy)


@pytest.mark.parametrize("dbm, mw", [(0, 1.0), (-90, 1e-9), (20, 100.0)])
def test_dbm_examples(dbm, mw):
    assert dbm_to_mw(dbm) == pytest.approx(mw, rel=1e-12)


@given(st.floats(min_value=1e-15, max_value=1e6))
def test_dbm_round_trip(p):
    assert dbm_to_mw(mw_to_dbm(p)) == pytest.approx(p, rel=1e-12)


def test_mw_to_dbm_rejects_nonpositive():
    with pytest.raises(ConfigError):
        mw_to_dbm(0.0)


@given(st.floats(min_value=0.1, max_value=1e4), st.floats(min_value=1e-3, max_value=1e3),
       st.floats(min_value=0.5, max_value=6))
def test_gain_strictly_decreasing(d, extra, alpha):
    phy = PhyConfig(path_loss_exponent=alpha)
    assert channel_gain((0, 0), (d + extra, 0), phy) < channel_gain((0, 0), (d, 0), phy)


def test_gain_matrix_matches_pairwise(phy):
    pos = sample_positions(6, 200, seed=3)
    g = gain_matrix(pos, phy)
    for i in range(6):
        for j in range(6):
            if i != j:
                assert g[i, j] == pytest.approx(channel_gain(pos[i], pos[j], phy), rel=1e-12)
    assert np.allclose(g, g.T)


def test_default_rate_table_content():
    t = RateTable.default()
    assert len(t) == 8
    assert [e.rate / 1e6 for e in t.entries] == [54, 48, 36, 24, 18, 12, 9, 6]
    assert [e.threshold_db for e in t.entries] == [24.56, 24.05, 18.8, 17.04,
                                                  10.79, 9.03, 7.78, 6.02]
    assert np.all(np.diff(t.thresholds) < 0)
    for e in t.entries:
        assert e.threshold == pytest.approx(10 ** (e.threshold_db / 10))


def test_rate_table_lookup_bijection():
    t = RateTable.default()
    for k, e in enumerate(t.entries):
        assert t.index_of(e.rate) == k
        assert t.threshold_for(e.rate) == t.thresholds[k]
    with pytest.raises(KeyError):
        t.index_of(7e6)


def test_rate_table_rejects_unordered():
    with pytest.raises(ConfigError):
        RateTable.from_pairs([(6e6, 6.0), (54e6, 24.0)])
    with pytest.raises(ConfigError):
        RateTable.from_pairs([(54e6, 6.0), (6e6, 24.0)])


def test_phy_defaults_and_validation():
    phy = PhyConfig()
    assert phy.noise_mw == pytest.approx(1e-9)
    assert phy.max_power_mw == pytest.approx(100.0)
    assert phy.packet_bits == 11760
    assert phy.packets_per_slot(54e6) == pytest.approx(33750 / 11760)
    with pytest.raises(ConfigError):
        PhyConfig(path_loss_exponent=0)


def test_sample_positions_seeded():
    a = sample_positions(10, 350, seed=7)
    assert np.array_equal(a, sample_positions(10, 350, seed=7))
    assert not np.array_equal(a, sample_positions(10, 350, seed=8))
    assert a.min() >= 0 and a.max() <= 350
    assert math.isclose(a.shape[0], 10)
