import math

import numpy as np
import pytest
from scipy import stats

from ppsim import (
    DependenceGraph,
    HawkesNetwork,
    InteractionKernel,
    InvalidArgumentError,
    RngStream,
    gen_erdos_renyi,
    simulate_localgraph,
)
from reference import DenseChecker

BOX = InteractionKernel.box(5.0, 0.02)
EXAMPLE_EDGES_1 = [(1, 2), (5, 2), (2, 3), (2, 6), (3, 4), (4, 5), (6, 7), (7, 4)]


def test_touched_sets_example_graph():
    net = HawkesNetwork.from_edges(7, [(j - 1, i - 1) for j, i in EXAMPLE_EDGES_1], BOX, 2.0)
    chk = DenseChecker(net)
    simulate_localgraph(net, 10.0, RngStream(3), observer=chk)
    seen = {node: touched for node, touched in chk.touched_log}
    assert sorted(i + 1 for i in seen[1]) == [2, 3, 6]
    for node, touched in chk.touched_log:
        assert set(touched) == set(net.children[node]) | {node}
    assert chk.untouched_changes == 0
    assert chk.worst <= 1e-9


def test_disconnected_nodes_touch_only_themselves():
    net = HawkesNetwork([1.0, 2.0, 5.0])
    res = simulate_localgraph(net, 500.0, RngStream(1))
    assert res.counters["touched"] == len(res)
    for i, nu in enumerate([1.0, 2.0, 5.0]):
        d = np.diff(res.points(i), prepend=0.0)
        assert stats.kstest(d, "expon", args=(0, 1 / nu)).pvalue > 0.01


def test_chain_kernel_raises_child():
    net = HawkesNetwork([3.0, 1.0], {(0, 1): BOX})
    chk = DenseChecker(net, probes_per_event=6)
    res = simulate_localgraph(net, 30.0, RngStream(8), observer=chk)
    assert chk.worst <= 1e-9
    assert np.sum(res.marks == 0) > 50


def test_touched_counter():
    edges = gen_erdos_renyi(20, 0.1, RngStream(2))
    net = HawkesNetwork.balanced(20, edges, BOX, 5.0)
    res = simulate_localgraph(net, 10.0, RngStream(3))
    sizes = np.array([len(set(net.children[j]) | {j}) for j in range(20)])
    assert res.counters["touched"] == int(sizes[res.marks].sum())
    assert res.counters["ties"] == 0


def test_self_loop_dense_check():
    h = InteractionKernel([(0.0, 3.0), (0.01, 2.0), (0.03, -5.0)])
    net = HawkesNetwork([2.0, 3.0, 1.0], {(0, 1): h, (1, 1): h, (1, 2): BOX, (2, 0): BOX})
    chk = DenseChecker(net)
    res = simulate_localgraph(net, 15.0, RngStream(4), observer=chk)
    res.check()
    assert chk.worst <= 1e-9 and chk.untouched_changes == 0


def test_graph_argument():
    net = HawkesNetwork.from_edges(3, [(0, 1)], BOX, 1.0)
    simulate_localgraph(net, 1.0, RngStream(0), graph=DependenceGraph.from_network(net))
    with pytest.raises(InvalidArgumentError):
        simulate_localgraph(net, 1.0, RngStream(0), graph=DependenceGraph.from_edges(3, [(1, 0)]))
    with pytest.raises(InvalidArgumentError):
        simulate_localgraph(net, -1.0, RngStream(0))


def test_deterministic_and_meta():
    net = HawkesNetwork.from_edges(4, [(0, 1), (1, 1)], BOX, 3.0)
    a = simulate_localgraph(net, 30.0, RngStream(9, 2))
    b = simulate_localgraph(net, 30.0, RngStream(9, 2))
    assert a.to_csv() == b.to_csv()
    assert a.algorithm == "localgraph" and a.stream == 2


def test_zero_rates_truncate():
    res = simulate_localgraph(HawkesNetwork([0.0, 0.0]), 5.0, RngStream(0))
    assert len(res) == 0 and res.truncated


def test_single_poisson_count():
    lam, T = 3.0, 100.0
    counts = np.array([len(simulate_localgraph(HawkesNetwork([lam]), T, RngStream(s))) for s in range(30)])
    assert abs(counts.mean() - lam * T) < 3 * math.sqrt(lam * T / 30)
