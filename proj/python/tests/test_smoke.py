import math

import numpy as np
import pytest

import netcomp as nc


def figure_network():
    return nc.parse_network_csv("from,to,amount\n1,2,1\n2,1,10\n2,3,2\n3,2,20\n3,1,3\n1,3,30\n")


def test_network_layout_and_net_positions():
    net = figure_network()
    assert net.size == 3
    assert net.matrix.shape == (3, 4)
    assert nc.gross_notional(net) == pytest.approx(66.0)
    np.testing.assert_allclose(nc.net_positions(net), [18.0, -9.0, -9.0])


def test_clearing_two_bank():
    net = nc.parse_network_csv("from,to,amount\n1,0,1\n1,2,1\n2,0,1\n")
    res = nc.clearing_payments(np.array([1.0, 0.0]), net)
    np.testing.assert_allclose(res.payments, [1.0, 0.5])
    assert res.defaults == [True, True]


def test_thresholds_of_compressed_network():
    net = nc.fully_compressed_network(3, 1.0)
    shock = nc.ShockModel(np.zeros(3), np.array([1.0, 2.0, 3.0]))
    q = nc.solvency_thresholds(net, shock)
    np.testing.assert_allclose(q, [1.0, 0.5, 1.0 / 3.0], rtol=1e-8)
    prof = nc.threshold_profile(net, shock)
    assert list(prof.order) == [0, 1, 2]
    assert math.isinf(prof.boundary(0))


def test_closed_form_es_against_monte_carlo():
    net = nc.fully_compressed_network(3, 1.0)
    shock = nc.ShockModel(np.zeros(3), np.array([1.0, 2.0, 3.0]))
    params = nc.ClearingParams()
    closed = nc.es_systematic(net, shock, params, nc.Aggregation.SOLVENT_COUNT, 0.2)
    mc = nc.es_monte_carlo(net, shock, params, nc.Aggregation.SOLVENT_COUNT, 0.2, 100000, 1)
    assert abs(closed - mc.estimate) <= 4 * mc.standard_error + 1e-9


def test_maximal_bilateral_compression():
    spec = nc.ConstraintSpec(figure_network(), nc.CompressionKind.BILATERAL)
    comp = nc.maximal_compression(spec)
    assert nc.gross_notional(comp) == pytest.approx(54.0)
    assert nc.is_feasible(comp, spec)
    assert not nc.is_feasible(figure_network().matrix * 2.0, spec)


def test_ga_is_deterministic_and_seeded():
    spec = nc.ConstraintSpec(figure_network(), nc.CompressionKind.NONCONSERVATIVE)
    cfg = nc.GAConfig()
    cfg.population_size, cfg.elite_count, cfg.max_generations, cfg.seed = 12, 2, 20, 4
    a = nc.ga_optimize(nc.Objective.entropy(), spec, cfg)
    b = nc.ga_optimize(nc.Objective.entropy(), spec, cfg)
    assert a.history == b.history
    assert a.best_value <= nc.entropy(figure_network()) + 1e-12
    assert nc.is_feasible(a.best, spec)


def test_subset_sum_oracle():
    assert nc.subset_sum_oracle(nc.SubsetSumInstance([1, 2, 3], 3)).solvable
    assert not nc.subset_sum_oracle(nc.SubsetSumInstance([2, 4], 3)).solvable


def test_errors_map_to_exceptions():
    with pytest.raises(nc.ValidationError):
        nc.LiabilityNetwork(np.array([[1.0, -1.0]]))
    with pytest.raises(nc.ParseError):
        nc.parse_network_csv("from,to,amount\n1,2,x\n")
    with pytest.raises(nc.Error):
        nc.ClearingParams(mu=2.0)
