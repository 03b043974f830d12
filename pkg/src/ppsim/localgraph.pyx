# distutils: language = c++
# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Local-graph simulation: after a point on ``j`` only ``ch(j) | {j}`` is touched.

Every node keeps its own pending next point, drawn from its own intensity.  The
pending points live in an ordered set of ``(time, node)`` pairs; a point on
``j`` can only change the intensities of ``j``'s children, so only those (and
``j``, whose pending draw was just consumed) are redrawn.
"""
from time import perf_counter

from cython.operator cimport dereference as deref
from libc.math cimport NAN, isnan
from libcpp.pair cimport pair
from libcpp.set cimport set as cset
from libcpp.vector cimport vector

from ppsim.rng cimport RngStream
from ppsim.sampling cimport next_point
from ppsim.scheduler cimport Scheduler

import numpy as np

from ppsim.errors import InvalidArgumentError, InvariantViolation
from ppsim.graph import DependenceGraph
from ppsim.result import SimulationResult

ctypedef pair[double, long] pending_t


def simulate_localgraph(net, horizon, RngStream rng, graph=None, observer=None):
    """Simulate ``net`` on ``[0, horizon)`` with the local-graph algorithm.

    ``graph`` defaults to the network's own dependence graph; if given it must
    match it.  ``observer(k, t, node, touched, schedulers)`` is called after each
    point, before the touched nodes are redrawn.
    """
    cdef double T = horizon
    if not T > 0.0:
        raise InvalidArgumentError(f"horizon must be positive, got {horizon!r}")
    if graph is None:
        graph = DependenceGraph.from_network(net)
    elif graph.M != net.M or tuple(graph.children) != tuple(net.children):
        raise InvalidArgumentError("dependence graph does not match the network's kernels")

    cdef Py_ssize_t M = net.M, i, k, n_touch
    cdef list L = [Scheduler([(0.0, float(v))]) for v in net.nu]
    # touch[j]: nodes refreshed after a point on j; kern[j][k]: kernel onto touch[j][k] or None
    cdef list touch = []
    cdef list kern = []
    for j in range(M):
        nodes = graph.touched(j)
        touch.append(nodes)
        kern.append(tuple(net.kernels[(j, c)].scheduler if (j, c) in net.kernels else None
                          for c in nodes))
    cdef tuple nodes_j, kern_j
    cdef double[::1] pending = np.full(max(M, 1), NAN)
    cdef cset[pending_t] queue
    cdef vector[double] times
    cdef vector[long] marks
    cdef Scheduler q
    cdef double t, t_prev = -1.0, t_new
    cdef long node, ties = 0, touched = 0, iterations = 0
    cdef bint truncated = False

    started = perf_counter()
    for i in range(M):
        if next_point(<Scheduler>L[i], rng, &t_new):
            queue.insert(pending_t(t_new, i))
            pending[i] = t_new
    while True:
        iterations += 1
        if queue.empty():
            truncated = True
            break
        t = deref(queue.begin()).first
        node = deref(queue.begin()).second
        if t >= T:
            break
        queue.erase(queue.begin())
        pending[node] = NAN
        if t <= t_prev:
            if t < t_prev:
                raise InvariantViolation(f"point at {t!r} precedes previous point {t_prev!r}")
            ties += 1

        nodes_j = <tuple>touch[node]
        kern_j = <tuple>kern[node]
        n_touch = len(nodes_j)
        for k in range(n_touch):
            q = <Scheduler>L[<long>nodes_j[k]]
            q.collapse_to(t)
            h = kern_j[k]
            if h is not None:
                q.add_shifted(<Scheduler>h, t)
        touched += n_touch
        times.push_back(t)
        marks.push_back(node)
        t_prev = t
        if observer is not None:
            observer(times.size() - 1, t, node, nodes_j, L)

        for k in range(n_touch):
            i = <long>nodes_j[k]
            if not isnan(pending[i]):
                queue.erase(pending_t(pending[i], i))
                pending[i] = NAN
            if next_point(<Scheduler>L[i], rng, &t_new):
                queue.insert(pending_t(t_new, i))
                pending[i] = t_new
    elapsed = perf_counter() - started

    return SimulationResult(
        np.array(times, dtype=np.float64), np.array(marks, dtype=np.int64), M, T,
        algorithm="localgraph", seed=rng.seed, stream=rng.stream, iterations=iterations,
        wall_seconds=elapsed, truncated=truncated,
        counters={"draws": rng.draws, "touched": touched, "ties": ties},
    )
