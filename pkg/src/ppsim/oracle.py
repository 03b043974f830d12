"""Brute-force reference simulator.

Intensities are recomputed from the raw point history at every candidate and
points are drawn by Ogata thinning.  Nothing here touches the scheduler
machinery, so a bug there cannot hide itself in both simulators at once.
"""
from __future__ import annotations

import bisect
import math
from time import perf_counter

import numpy as np

from ppsim.errors import InvalidArgumentError, OracleInconsistencyError
from ppsim.result import SimulationResult


def kernel_value(breakpoints, delay: float) -> float:
    """Level of a kernel given as ``(delay, jump)`` pairs; 0 outside its support."""
    if delay < 0:
        return 0.0
    level = 0.0
    for d, jump in breakpoints:
        if d > delay:
            break
        level += jump
    return level


def intensities_at(net, times, marks, s: float, strict: bool = True) -> np.ndarray:
    """``lambda_i(s)`` for every node from the points before ``s`` (``<= s`` if not strict)."""
    lam = np.array(net.nu, dtype=np.float64)
    S = net.max_support
    times = list(times)
    lo = bisect.bisect_left(times, s - S)
    hi = bisect.bisect_left(times, s) if strict else bisect.bisect_right(times, s)
    for k in range(lo, hi):
        j = int(marks[k])
        for i in net.children[j]:
            lam[i] += kernel_value(net.kernels[(j, i)].breakpoints, s - times[k])
    return lam


def simulate_naive(net, horizon: float, rng, tol: float = 1e-12) -> SimulationResult:
    """Simulate ``net`` on ``[0, horizon)`` by thinning.

    The dominating rate at time ``t`` is ``sum(nu)`` plus, for each point still
    inside the kernel window, the sum over its children of the kernel's maximum
    level.  It only decreases between accepted points, so it bounds the total
    intensity until the next acceptance.
    """
    T = float(horizon)
    if not T > 0:
        raise InvalidArgumentError(f"horizon must be positive, got {horizon!r}")
    M = net.M
    S = net.max_support
    nu_total = float(np.sum(net.nu))
    out_max = [sum(net.kernels[(j, i)].max_level for i in net.children[j]) for j in range(M)]

    times: list[float] = []
    marks: list[int] = []
    t = 0.0
    candidates = 0
    truncated = False
    started = perf_counter()
    while True:
        lo = bisect.bisect_left(times, t - S)
        bound = nu_total + sum(out_max[marks[k]] for k in range(lo, len(times)))
        if bound <= 0:
            truncated = True
            break
        t += -math.log(rng.uniform()) / bound
        if t >= T:
            break
        candidates += 1
        lam = intensities_at(net, times, marks, t)
        lam = np.where(lam > 0, lam, 0.0)
        total = float(lam.sum())
        if total > bound * (1 + tol):
            raise OracleInconsistencyError(f"intensity {total!r} above bound {bound!r} at t={t!r}")
        if rng.uniform() * bound <= total:
            cum = np.cumsum(lam)
            node = int(np.searchsorted(cum, rng.uniform() * total, side="left"))
            times.append(t)
            marks.append(min(node, M - 1))
    elapsed = perf_counter() - started

    return SimulationResult(
        np.array(times), np.array(marks, dtype=np.int64), M, T,
        algorithm="naive", seed=getattr(rng, "seed", None), stream=getattr(rng, "stream", None),
        iterations=candidates, wall_seconds=elapsed, truncated=truncated,
        counters={"candidates": candidates},
    )
