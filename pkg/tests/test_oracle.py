import math

import numpy as np
import pytest
from scipy import stats

from ppsim import HawkesNetwork, InteractionKernel, RngStream, simulate_localgraph, simulate_naive
from ppsim.gof import compensator
from ppsim.oracle import intensities_at, kernel_value

BOX = InteractionKernel.box(5.0, 0.02)


def test_kernel_value():
    bps = InteractionKernel([(0.0, 3.0), (0.01, 2.0), (0.03, -5.0)]).breakpoints
    assert [kernel_value(bps, d) for d in (-0.1, 0, 0.01, 0.02, 0.03)] == [0, 3, 5, 5, 0]


def test_intensities_at():
    net = HawkesNetwork([1.0, 2.0], {(0, 1): BOX, (1, 1): BOX})
    lam = intensities_at(net, [0.5, 0.51], [0, 1], 0.515)
    assert lam.tolist() == [1.0, 12.0]
    assert intensities_at(net, [0.5], [0], 0.5).tolist() == [1.0, 2.0]
    assert intensities_at(net, [0.5], [0], 0.5, strict=False).tolist() == [1.0, 7.0]


def test_poisson_counts():
    net = HawkesNetwork([2.0, 5.0])
    counts = np.array([simulate_naive(net, 20.0, RngStream(s)).counts() for s in range(30)])
    for i, nu in enumerate([2.0, 5.0]):
        assert abs(counts[:, i].mean() - 20 * nu) < 3 * math.sqrt(20 * nu / 30)


def test_result_valid():
    net = HawkesNetwork([1.0, 1.0], {(0, 1): BOX, (1, 0): BOX})
    res = simulate_naive(net, 50.0, RngStream(2))
    res.check()
    assert res.algorithm == "naive" and res.counters["candidates"] >= len(res)


def test_chain_matches_localgraph():
    net = HawkesNetwork([5.0, 2.0], {(0, 1): BOX})

    def rescaled(sim, seed):
        res = sim(net, 20.0, RngStream(seed, 7))
        tau = compensator(net, res, 1)(res.points(1))
        return np.diff(tau, prepend=0.0)

    a = np.concatenate([rescaled(simulate_naive, s) for s in range(100)])
    b = np.concatenate([rescaled(simulate_localgraph, s) for s in range(100)])
    assert stats.ks_2samp(a, b).pvalue > 0.01
    assert stats.kstest(a, "expon").pvalue > 0.01


def test_bad_horizon():
    with pytest.raises(ValueError):
        simulate_naive(HawkesNetwork([1.0]), 0.0, RngStream(0))
