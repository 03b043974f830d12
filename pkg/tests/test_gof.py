import math

import numpy as np
import pytest
from scipy import stats

from ppsim import (
    DegenerateSampleError,
    HawkesNetwork,
    InsufficientSampleError,
    InteractionKernel,
    InvalidArgumentError,
    RngStream,
    SimulationResult,
    simulate_localgraph,
)
from ppsim import gof
from reference import dense_intensity, exact_window_integral

BOX = InteractionKernel.box(5.0, 0.02)


def test_time_rescale_linear_and_empty():
    pts = np.array([0.5, 1.0, 2.5])
    assert gof.time_rescale(pts, lambda t: 3 * t).tolist() == [1.5, 3.0, 7.5]
    assert gof.time_rescale([], lambda t: t).size == 0


def test_time_rescale_one_jump_by_hand():
    # lambda = 2 on [0, 1), 5 after
    Lam = lambda t: np.where(t < 1, 2 * t, 2 + 5 * (t - 1))  # noqa: E731
    assert gof.time_rescale([0.25, 1.0, 1.5], Lam).tolist() == [0.5, 2.0, 4.5]


def test_time_rescale_rejects_non_monotone():
    with pytest.raises(InvalidArgumentError):
        gof.time_rescale([1.0, 2.0], lambda t: -np.asarray(t))
    with pytest.raises(InvalidArgumentError):
        gof.time_rescale([2.0, 1.0], lambda t: t)


def test_ks_pvalue_series():
    assert gof.ks_pvalue(0.0, 100) == 1.0
    n = 400
    assert gof.ks_pvalue(1.36 / math.sqrt(n), n) == pytest.approx(0.049, abs=1e-3)
    for x in (0.3, 0.8, 1.0, 1.36, 2.0):
        assert gof.ks_pvalue(x / 10, 100) == pytest.approx(stats.kstwobign.sf(x), abs=1e-9)
    assert 0.0 <= gof.ks_pvalue(0.01, 10) <= 1.0


def test_uniform_grid_minimal_distance():
    n = 99
    u = np.arange(1, n + 1) / (n + 1)
    assert gof.ks_statistic(u) == pytest.approx(1 / (n + 1))
    assert gof.ks_test_uniform(u * 7.0, 7.0) > 0.99


def test_ks_statistic_matches_scipy():
    rng = np.random.default_rng(0)
    x = rng.exponential(size=300)
    D = gof.ks_statistic(-np.expm1(-x))
    assert D == pytest.approx(stats.kstest(x, "expon").statistic, abs=1e-12)
    assert gof.ks_test_exp1(x) == pytest.approx(stats.kstwobign.sf(math.sqrt(300) * D))


def test_ks_sample_size():
    with pytest.raises(InsufficientSampleError):
        gof.ks_test_exp1([1.0, 2.0, 3.0, 4.0])
    with pytest.raises(InsufficientSampleError):
        gof.ks_of_ks(np.linspace(0.01, 0.99, 49))


def test_ks_of_ks_extremes():
    assert gof.ks_of_ks((np.arange(200) + 0.5) / 200) > 0.99
    assert gof.ks_of_ks(np.full(200, 0.5)) < 1e-10


def test_autocorr_extremes():
    alt = np.tile([1.0, 3.0], 100)
    assert gof.autocorr(alt, 1) == pytest.approx(-1.0, abs=0.01)
    assert gof.autocorr_test(alt, 1) < 1e-10
    with pytest.raises(DegenerateSampleError):
        gof.autocorr_test(np.ones(50), 1)
    with pytest.raises(InsufficientSampleError):
        gof.autocorr_test(np.arange(9.0), 4)


def test_autocorr_null_uniform():
    rng = np.random.default_rng(12)
    ps = [gof.autocorr_test(rng.exponential(size=10_000), 1 + k % 9) for k in range(200)]
    assert stats.kstest(ps, "uniform").pvalue > 0.01


def hawkes_setup():
    h = InteractionKernel([(0.0, 3.0), (0.01, 2.0), (0.03, -5.0)])
    return HawkesNetwork([2.0, 3.0, 1.0], {(0, 1): h, (1, 1): h, (1, 2): BOX, (2, 0): BOX})


def test_compensator_and_intensity_match_dense_reference():
    net = hawkes_setup()
    res = simulate_localgraph(net, 10.0, RngStream(3))
    rng = np.random.default_rng(1)
    s = np.sort(rng.uniform(0, 10, 300))
    for i in range(3):
        lam = gof.intensity(net, res, i)(s)
        ref = [dense_intensity(net, res.times[res.times < x], res.marks[res.times < x], i, x) for x in s]
        assert np.max(np.abs(lam - ref)) < 1e-9
    # right at a point of a parent the new kernel is not yet counted
    t0 = res.points(1)[0]
    assert gof.intensity(net, res, 2)(t0) == pytest.approx(dense_intensity(net, [], [], 2, t0))


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_martingale_integral_matches_riemann_sum(seed):
    net = hawkes_setup()
    res = simulate_localgraph(net, 20.0, RngStream(seed, 5))
    step = 1e-5
    grid = (np.arange(int(round(res.horizon / step))) + 0.5) * step
    for node in range(3):
        Lam = gof.compensator(net, res, node)
        lam = gof.intensity(net, res, node)(grid)
        assert Lam(res.horizon) == pytest.approx(lam.sum() * step, rel=1e-6)
        for j in sorted(set(net.parents[node]) | {node}):
            for win in (gof.RECENT, gof.LAGGED):
                psi = gof.window_counts(res.points(j), grid, win)
                exact = gof.weighted_compensator(Lam, res.points(j), win, res.horizon)
                assert exact == pytest.approx(float(psi @ lam) * step, rel=1e-6)


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_weighted_compensator_matches_breakpoint_integration(seed):
    net = hawkes_setup()
    res = simulate_localgraph(net, 20.0, RngStream(seed, 5))
    for node in range(3):
        Lam = gof.compensator(net, res, node)
        for j in sorted(set(net.parents[node]) | {node}):
            for win in (gof.RECENT, gof.LAGGED):
                got = gof.weighted_compensator(Lam, res.points(j), win, res.horizon)
                ref = exact_window_integral(net, res.times, res.marks, node, res.points(j), win, res.horizon)
                assert got == pytest.approx(ref, rel=1e-9)


def test_martingale_trivial_cases():
    net = HawkesNetwork([1.0])
    res = SimulationResult([1.0], [0], 1, 2.0)
    X = gof.martingale_residuals(res, net, 0)
    assert X[("baseline", None)] == pytest.approx(-1.0)
    # the lone point finds nothing in its own window; the compensator still accrues 0.02 at rate 1
    assert X[("recent", 0)] == pytest.approx(-1.0 * 0.02)
    empty = SimulationResult([], [], 1, 2.0)
    X = gof.martingale_residuals(empty, net, 0)
    assert X[("recent", 0)] == 0.0 and X[("lagged", 0)] == 0.0


def test_window_counts_half_open():
    src = [1.0, 1.25, 1.5]
    win = (0.5, 0.25)
    # [t - 0.5, t - 0.25): left edge in, right edge out
    assert gof.window_counts(src, [1.25, 1.5, 1.75, 2.0, 2.25], win).tolist() == [0, 1, 1, 1, 0]
    assert gof.window_counts(src, [1.5], (0.5, 0.0)).tolist() == [2]


def test_martingale_mismatch():
    with pytest.raises(InvalidArgumentError):
        gof.martingale_residuals(SimulationResult([], [], 2, 1.0), HawkesNetwork([1.0]), 0)


def test_battery_report():
    net = hawkes_setup()
    res = simulate_localgraph(net, 100.0, RngStream(4))
    rep = gof.battery(res, net, 1)
    assert list(rep.p_values) == ["test1", "test2"] + [f"test3_lag{k}" for k in range(1, 10)]
    assert all(0.0 <= p <= 1.0 for p in rep.p_values.values())
    assert rep.n["test1"] == len(res.points(1))
    rows = rep.rows().splitlines()
    assert len(rows) == 11 and rows[0].startswith("test1,2,")
    assert rep.table().startswith("node 2\n")
