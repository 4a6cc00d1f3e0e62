import numpy as np
import pytest

from meshsched.model import PhyConfig, RateTable, gain_matrix
from meshsched.oracle import (MAX_LINKS, TinyInstance, fixed_point_powers, is_feasible,
                              objective, optimal_schedule)
from meshsched.power import gain_matrix_from_indices, solve_powers

PHY = PhyConfig()
TABLE = RateTable.default()


def instance(pos, links, weights):
    return TinyInstance(gain_matrix(np.asarray(pos, float), PHY), tuple(links),
                        tuple(weights), TABLE, PHY)


def test_single_link_gets_fastest_feasible_rate():
    inst = instance([[0, 0], [10, 0]], [(0, 1)], [3.0])
    res = optimal_schedule(inst)
    assert res.links == (0,) and res.rate_index == (0,)
    assert res.objective == pytest.approx(3.0 + 33750 / 11760)


def test_long_link_rate_limited():
    # at 8 km, 54 and 48 Mbps need about 146 and 130 mW; 36 Mbps needs about 39 mW
    inst = instance([[0, 0], [8000, 0]], [(0, 1)], [1.0])
    assert optimal_schedule(inst).rate_index == (2,)


def test_conflicting_links_pick_larger_term():
    inst = instance([[0, 0], [10, 0], [20, 0]], [(0, 1), (1, 2)], [1.0, 4.0])
    res = optimal_schedule(inst)
    assert res.links == (1,)


def test_fixed_point_matches_direct_solve():
    pos = [[0, 0], [15, 0], [300, 0], [300, 20]]
    inst = instance(pos, [(0, 1), (2, 3)], [1, 1])
    p = fixed_point_powers(inst, (0, 1), (3, 5))
    a = gain_matrix_from_indices(inst.gains, [0, 2], [1, 3], TABLE.thresholds[[3, 5]])
    assert np.allclose(p, solve_powers(a, PHY.noise_mw).powers, rtol=1e-9)
    assert is_feasible(inst, (0, 1), (3, 5), p)
    assert not is_feasible(inst, (0, 1), (3, 5), np.asarray(p) * 0.5)


def test_checker_rejects_shared_node():
    inst = instance([[0, 0], [10, 0], [20, 0]], [(0, 1), (1, 2)], [1, 1])
    assert not is_feasible(inst, (0, 1), (7, 7), [1.0, 1.0])


def test_objective_sums_rate_and_weight():
    inst = instance([[0, 0], [10, 0], [500, 0], [510, 0]], [(0, 1), (2, 3)], [2, -1])
    assert objective(inst, (0, 1), (0, 7)) == pytest.approx(
        (54e6 + 6e6) * 625e-6 / 11760 + 1)


def test_refuses_large_instances():
    pos = np.arange(40).reshape(-1, 2) * 10.0
    links = [(2 * k, 2 * k + 1) for k in range(MAX_LINKS + 1)]
    with pytest.raises(ValueError):
        optimal_schedule(instance(pos, links, [1] * len(links)))
