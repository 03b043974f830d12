import math

import numpy as np
import pytest
from scipy import stats

from ppsim import (
    HawkesNetwork,
    InteractionKernel,
    InvalidArgumentError,
    RngStream,
    gen_erdos_renyi,
    simulate_fullscan,
)
from ppsim.fullscan import select_node
from reference import DenseChecker

BOX = InteractionKernel.box(5.0, 0.02)


def test_single_poisson_count():
    lam, T = 3.0, 100.0
    counts = [len(simulate_fullscan(HawkesNetwork([lam]), T, RngStream(s))) for s in range(30)]
    mean, sd = lam * T, math.sqrt(lam * T)
    assert abs(np.mean(counts) - mean) < 3 * sd / math.sqrt(30)
    assert np.mean(np.abs(np.array(counts) - mean) <= 3 * sd) >= 0.9


def test_poisson_delays_exponential():
    res = simulate_fullscan(HawkesNetwork([2.0]), 2000.0, RngStream(1))
    assert stats.kstest(np.diff(res.times, prepend=0.0), "expon", args=(0, 0.5)).pvalue > 0.01


def test_superposition_mark_fraction():
    res = simulate_fullscan(HawkesNetwork([1.0, 2.0]), 3000.0, RngStream(2))
    frac = np.mean(res.marks == 1)
    n = len(res)
    assert abs(frac - 2 / 3) < 3 * math.sqrt(2 / 9 / n)


def test_select_node_chi_square():
    r = RngStream(5)
    levels = [0.5, 2.0, 1.5]
    picks = np.array([select_node(levels, r) for _ in range(100_000)])
    observed = np.bincount(picks, minlength=3)
    expected = np.array(levels) / sum(levels) * picks.size
    assert stats.chisquare(observed, expected).pvalue > 0.01
    assert r.draws == 100_000


def test_select_node_skips_zero_levels():
    r = RngStream(0)
    assert {select_node([0.0, 1.0, 0.0], r) for _ in range(200)} == {1}
    with pytest.raises(InvalidArgumentError):
        select_node([0.0, 0.0], r)


def test_result_shape_and_meta():
    net = HawkesNetwork.from_edges(5, [(0, 1), (1, 2), (2, 0)], BOX, 2.0)
    res = simulate_fullscan(net, 20.0, RngStream(7, 3))
    res.check()
    assert res.algorithm == "fullscan" and res.seed == 7 and res.stream == 3
    assert res.iterations == len(res) + 1
    assert res.counters["draws"] == 2 * len(res) + 1
    assert res.wall_seconds > 0 and res.horizon == 20.0 and not res.truncated


def test_deterministic():
    net = HawkesNetwork.from_edges(4, [(0, 1), (1, 1)], BOX, 3.0)
    a = simulate_fullscan(net, 30.0, RngStream(9))
    b = simulate_fullscan(net, 30.0, RngStream(9))
    assert a.to_csv() == b.to_csv()


def test_zero_intensity_truncates():
    res = simulate_fullscan(HawkesNetwork([0.0, 0.0]), 10.0, RngStream(0))
    assert len(res) == 0 and res.truncated


def test_bad_horizon():
    with pytest.raises(InvalidArgumentError):
        simulate_fullscan(HawkesNetwork([1.0]), 0.0, RngStream(0))


def test_debug_union_check_runs():
    edges = gen_erdos_renyi(15, 0.15, RngStream(1))
    net = HawkesNetwork.balanced(15, edges, BOX, 5.0)
    res = simulate_fullscan(net, 5.0, RngStream(2), debug=True)
    assert len(res) > 100


def test_schedulers_match_dense_intensity():
    h = InteractionKernel([(0.0, 3.0), (0.01, 2.0), (0.03, -5.0)])
    net = HawkesNetwork([2.0, 3.0, 1.0], {(0, 1): h, (1, 1): h, (1, 2): BOX, (2, 0): BOX})
    chk = DenseChecker(net)
    res = simulate_fullscan(net, 15.0, RngStream(4), observer=chk)
    assert len(chk.times) == len(res) > 50
    assert chk.worst <= 1e-9
    assert all(t == tuple(range(3)) for _, t in chk.touched_log)


def test_mean_rate_matches_stationary_mean():
    from ppsim import mean_intensity
    net = HawkesNetwork([4.0, 2.0], {(0, 1): InteractionKernel.box(20.0, 0.02), (1, 1): BOX})
    m = mean_intensity(net)
    counts = np.array([simulate_fullscan(net, 100.0, RngStream(s, 1)).counts() for s in range(20)]) / 100.0
    se = counts.std(axis=0, ddof=1) / math.sqrt(20)
    assert np.all(np.abs(counts.mean(axis=0) - m) < 4 * se)
