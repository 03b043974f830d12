"""Goodness-of-fit checks for simulated Hawkes output.

Compensators are rebuilt from the point history and the kernels alone; the
simulator's own intensity schedulers are never consulted.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ppsim.errors import (
    DegenerateSampleError,
    InsufficientSampleError,
    InvalidArgumentError,
)

MIN_KS_SAMPLE = 5
MIN_KS_OF_KS = 50
MAX_LAG = 9
RECENT = (0.02, 0.0)
LAGGED = (0.04, 0.02)


def _kernel_knots(h):
    # knots of G(u) = int_0^u h: G is linear between breakpoints and flat past the support
    d = [0.0]
    g = [0.0]
    level = 0.0
    for delay, jump in h.breakpoints:
        if delay > d[-1]:
            g.append(g[-1] + level * (delay - d[-1]))
            d.append(delay)
        level += jump
    return np.array(d), np.array(g)


def _pairs(x: np.ndarray, src: np.ndarray, width: float):
    """Index pairs (k, l) with ``x[k] - width < src[l] < x[k]``."""
    lo = np.searchsorted(src, x - width, side="right")
    hi = np.searchsorted(src, x, side="left")
    cnt = hi - lo
    k = np.repeat(np.arange(x.size), cnt)
    starts = np.repeat(lo - np.cumsum(cnt) + cnt, cnt)
    l = starts + np.arange(k.size)
    return k, l, lo


def compensator(net, result, node: int):
    """``Lambda_node`` as a vectorised callable, built from ``result``'s points."""
    node = _check_node(net, result, node)
    terms = []
    for j in net.parents[node]:
        h = net.kernels[(j, node)]
        knots, g = _kernel_knots(h)
        terms.append((result.points(j), h.support, h.integral, knots, g))
    nu = float(net.nu[node])

    def Lambda(x):
        x = np.asarray(x, dtype=np.float64)
        flat = np.atleast_1d(x).ravel()
        out = nu * flat
        for src, S, total, knots, g in terms:
            k, l, lo = _pairs(flat, src, S)
            out = out + total * lo
            if k.size:
                out += np.bincount(k, weights=np.interp(flat[k] - src[l], knots, g),
                                   minlength=flat.size)
        return out.reshape(x.shape) if x.ndim else float(out[0])

    return Lambda


def intensity(net, result, node: int):
    """Left-continuous ``lambda_node(x)`` from the history strictly before ``x``."""
    node = _check_node(net, result, node)
    terms = []
    for j in net.parents[node]:
        h = net.kernels[(j, node)]
        d = np.array([b.time for b in h.breakpoints])
        lv = np.cumsum([b.value for b in h.breakpoints])
        terms.append((result.points(j), h.support, d, lv))
    nu = float(net.nu[node])

    def lam(x):
        x = np.asarray(x, dtype=np.float64)
        flat = np.atleast_1d(x).ravel()
        out = np.full(flat.size, nu)
        for src, S, d, lv in terms:
            k, l, _ = _pairs(flat, src, S)
            if k.size:
                pos = np.searchsorted(d, flat[k] - src[l], side="right") - 1
                val = np.where(pos >= 0, lv[np.maximum(pos, 0)], 0.0)
                out += np.bincount(k, weights=val, minlength=flat.size)
        return out.reshape(x.shape) if x.ndim else float(out[0])

    return lam


def _check_node(net, result, node):
    if net.M != result.M:
        raise InvalidArgumentError(f"result has M={result.M} but network has M={net.M}")
    node = int(node)
    if not 0 <= node < net.M:
        raise InvalidArgumentError(f"node {node} outside 0..{net.M - 1}")
    return node


def time_rescale(points, Lambda) -> np.ndarray:
    """``Lambda(T_i)`` for each point; a correct model maps them to a rate-1 Poisson sample."""
    pts = np.asarray(points, dtype=np.float64)
    if pts.size == 0:
        return np.empty(0)
    if np.any(np.diff(pts) < 0):
        raise InvalidArgumentError("points must be nondecreasing")
    out = np.asarray(Lambda(pts), dtype=np.float64)
    if np.any(np.diff(out) < 0) or out[0] < 0:
        raise InvalidArgumentError("compensator is not nondecreasing")
    return out


def ks_pvalue(D: float, n: int) -> float:
    """Asymptotic Kolmogorov tail probability of ``sqrt(n) * D``."""
    x2 = n * D * D
    if x2 <= 0.0:
        return 1.0
    total = 0.0
    k = 1
    while True:
        term = math.exp(-2.0 * k * k * x2)
        total += term if k % 2 else -term
        if term < 1e-12:
            break
        k += 1
    return min(1.0, max(0.0, 2.0 * total))


def ks_statistic(u) -> float:
    """One-sample KS distance of ``u`` from U[0, 1]."""
    u = np.sort(np.asarray(u, dtype=np.float64))
    n = u.size
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - u), np.max(u - (i - 1) / n)))


def _ks_uniform01(u, minimum=MIN_KS_SAMPLE) -> tuple[float, float]:
    u = np.asarray(u, dtype=np.float64)
    if u.size < minimum:
        raise InsufficientSampleError(f"need at least {minimum} values, got {u.size}")
    D = ks_statistic(u)
    return D, ks_pvalue(D, u.size)


def ks_test_exp1(delays) -> float:
    return _ks_uniform01(-np.expm1(-np.asarray(delays, dtype=np.float64)))[1]


def ks_test_uniform(points, horizon: float) -> float:
    return _ks_uniform01(np.asarray(points, dtype=np.float64) / horizon)[1]


def autocorr(delays, lag: int) -> float:
    x = np.asarray(delays, dtype=np.float64)
    if lag < 1 or x.size <= lag + 5:
        raise InsufficientSampleError(f"need more than {lag + 5} delays for lag {lag}, got {x.size}")
    c = x - x.mean()
    denom = float(c @ c)
    if denom <= 0.0:
        raise DegenerateSampleError("delays have zero variance")
    return float(c[:-lag] @ c[lag:]) / denom


def autocorr_test(delays, lag: int) -> float:
    """Two-sided normal test of zero lag-``lag`` autocorrelation (``z = r sqrt(n)``)."""
    r = autocorr(delays, lag)
    z = r * math.sqrt(len(delays))
    return math.erfc(abs(z) / math.sqrt(2.0))


def ks_of_ks(p_values) -> float:
    """Uniformity of a sample of p-values."""
    return _ks_uniform01(p_values, MIN_KS_OF_KS)[1]


@dataclass
class TestReport:
    __test__ = False  # keep pytest from collecting this

    node: int
    p_values: dict = field(default_factory=dict)
    statistics: dict = field(default_factory=dict)
    n: dict = field(default_factory=dict)

    def table(self) -> str:
        width = max(map(len, self.p_values), default=4)
        lines = [f"node {self.node + 1}"]
        for name, p in self.p_values.items():
            lines.append(f"{name:<{width}}  stat={self.statistics[name]:.6g}  n={self.n[name]}  p={p:.6g}")
        return "\n".join(lines) + "\n"

    def rows(self) -> str:
        return "".join(f"{name},{self.node + 1},{p!r}\n" for name, p in self.p_values.items())


def battery(result, net, node: int, max_lag: int = MAX_LAG) -> TestReport:
    """Time-rescaling tests for one node.

    ``test1``: rescaled delays vs Exp(1). ``test2``: rescaled times uniform on
    ``[0, Lambda(T)]``. ``test3_lagK``: lag-K autocorrelation of the delays.
    """
    Lambda = compensator(net, result, node)
    tau = time_rescale(result.points(node), Lambda)
    delays = np.diff(tau, prepend=0.0)
    rep = TestReport(node)

    u = -np.expm1(-delays)
    D, p = _ks_uniform01(u)
    rep.p_values["test1"], rep.statistics["test1"], rep.n["test1"] = p, D, delays.size
    total = Lambda(result.horizon)
    D, p = _ks_uniform01(tau / total)
    rep.p_values["test2"], rep.statistics["test2"], rep.n["test2"] = p, D, tau.size
    for lag in range(1, max_lag + 1):
        name = f"test3_lag{lag}"
        r = autocorr(delays, lag)
        rep.statistics[name] = r
        rep.n[name] = delays.size
        rep.p_values[name] = math.erfc(abs(r) * math.sqrt(delays.size) / math.sqrt(2.0))
    return rep


def window_counts(src, at, window) -> np.ndarray:
    """``#{T in src : t - a <= T < t - b}`` for each ``t`` in ``at``, with ``window = (a, b)``."""
    a, b = window
    src = np.asarray(src, dtype=np.float64)
    at = np.asarray(at, dtype=np.float64)
    return np.searchsorted(src, at - b, side="left") - np.searchsorted(src, at - a, side="left")


def weighted_compensator(Lambda, src, window, horizon: float) -> float:
    """``int_0^T psi(t) dLambda(t)`` with ``psi(t) = #{T in src : t - a <= T < t - b}``.

    Each source point contributes the compensator increment over
    ``(T + b, T + a]`` clipped to the horizon, which is exact.
    """
    a, b = window
    src = np.asarray(src, dtype=np.float64)
    if src.size == 0:
        return 0.0
    upper = np.minimum(src + a, horizon)
    lower = np.minimum(src + b, horizon)
    return float(np.sum(Lambda(upper) - Lambda(lower)))


def martingale_residuals(result, net, node: int, sources=None,
                         windows=(("recent", RECENT), ("lagged", LAGGED))) -> dict:
    """``int psi (dN - dLambda)`` for the constant weight and windowed-count weights.

    Keys are ``("baseline", None)`` and ``(window_name, j)`` for each source
    ``j``; sources default to the parents of ``node`` plus ``node`` itself.
    """
    node = _check_node(net, result, node)
    if sources is None:
        sources = sorted(set(net.parents[node]) | {node})
    Lambda = compensator(net, result, node)
    T = result.horizon
    own = result.points(node)
    out = {("baseline", None): own.size - Lambda(T)}
    for j in sources:
        src = result.points(j)
        for name, win in windows:
            dN = float(np.sum(window_counts(src, own, win)))
            out[(name, j)] = dN - weighted_compensator(Lambda, src, win, T)
    return out
