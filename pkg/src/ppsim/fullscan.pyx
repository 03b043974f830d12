# distutils: language = c++
# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Full-scan simulation: every intensity is scanned and updated at every point.

Each iteration rebuilds the total-intensity scheduler from all per-node
schedulers, samples the next point from it, then selects the node by the
cumulative intensities at that time.  Cost per point is linear in the total
number of events held, which makes this the quadratic-in-M baseline.
"""
from time import perf_counter

from libcpp.vector cimport vector

from ppsim.rng cimport RngStream
from ppsim.sampling cimport clamp_level, next_point
from ppsim.scheduler cimport Scheduler

import numpy as np

from ppsim.errors import InvalidArgumentError, InvariantViolation
from ppsim.result import SimulationResult


cdef int _check_union(Scheduler bar, list L, double tol) except -1:
    # evaluate(bar, s) must equal the sum of node intensities at every breakpoint of bar
    cdef Scheduler q
    cdef double s, total, expected
    for s in bar.times():
        total = bar.sum_through(s)
        expected = 0.0
        for q in L:
            expected += q.sum_through(s)
        if abs(total - expected) > tol * (1.0 + abs(expected)):
            raise InvariantViolation(
                f"union intensity {total!r} != sum of node intensities {expected!r} at {s!r}")
    return 0


cdef inline Py_ssize_t _pick(double[::1] cum, Py_ssize_t M, double target) noexcept:
    # smallest j with cum[j] >= target
    cdef Py_ssize_t j = 0
    while j < M - 1 and cum[j] < target:
        j += 1
    return j


def select_node(levels, RngStream rng):
    """Index drawn with probability ``levels[i] / sum(levels)``; consumes one uniform."""
    cdef double[::1] cum = np.cumsum(np.asarray(levels, dtype=np.float64))
    if cum.shape[0] == 0 or not cum[cum.shape[0] - 1] > 0.0:
        raise InvalidArgumentError("selection needs a positive total intensity")
    return _pick(cum, cum.shape[0], rng.next_uniform() * cum[cum.shape[0] - 1])


def simulate_fullscan(net, horizon, RngStream rng, bint debug=False, observer=None):
    """Simulate ``net`` on ``[0, horizon)`` with the full-scan algorithm.

    Two uniforms are consumed per accepted point (time, then node) and one for
    the final draw that lands beyond the horizon.  ``observer(k, t, node,
    touched, schedulers)`` is called after each point once the schedulers are
    updated.
    """
    cdef double T = horizon
    if not T > 0.0:
        raise InvalidArgumentError(f"horizon must be positive, got {horizon!r}")
    cdef Py_ssize_t M = net.M, j, node
    cdef list L = [Scheduler([(0.0, float(v))]) for v in net.nu]
    # rows[j][i] is the kernel scheduler of edge j -> i
    cdef list rows = [{i: h.scheduler for i, h in net.out_kernels(j).items()} for j in range(M)]
    cdef dict row
    cdef double[::1] cum = np.empty(max(M, 1))
    cdef vector[double] times
    cdef vector[long] marks
    cdef Scheduler bar, q
    cdef double t = 0.0, t_prev = -1.0, total
    cdef long iterations = 0
    cdef bint truncated = False
    everyone = range(M)

    started = perf_counter()
    while True:
        bar = Scheduler.__new__(Scheduler)
        for j in range(M):
            bar.add_shifted(<Scheduler>L[j], 0.0)
        if debug:
            _check_union(bar, L, 1e-9)
        iterations += 1
        if not next_point(bar, rng, &t):
            truncated = True
            break
        if t >= T:
            break
        if t <= t_prev:
            raise InvariantViolation(f"non-increasing point time {t!r} after {t_prev!r}")

        total = 0.0
        for j in range(M):
            total += clamp_level((<Scheduler>L[j]).collapse_to(t))
            cum[j] = total
        if not total > 0.0:
            raise InvariantViolation(f"total intensity vanished at sampled time {t!r}")
        node = _pick(cum, M, rng.next_uniform() * total)

        row = <dict>rows[node]
        for j in range(M):
            h = row.get(j)
            if h is not None:
                (<Scheduler>L[j]).add_shifted(<Scheduler>h, t)
        times.push_back(t)
        marks.push_back(node)
        t_prev = t
        if observer is not None:
            observer(times.size() - 1, t, node, everyone, L)
    elapsed = perf_counter() - started

    return SimulationResult(
        np.array(times, dtype=np.float64), np.array(marks, dtype=np.int64), M, T,
        algorithm="fullscan", seed=rng.seed, stream=rng.stream, iterations=iterations,
        wall_seconds=elapsed, truncated=truncated,
        counters={"draws": rng.draws, "touched": M * <long>times.size()},
    )
