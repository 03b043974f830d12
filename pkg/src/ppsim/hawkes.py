"""Linear multivariate Hawkes processes with piecewise-constant, finite-support kernels."""
from __future__ import annotations

import math
from collections.abc import Iterable, Mapping
from pathlib import Path

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph

from ppsim.errors import (
    CausalityError,
    GraphDiscarded,
    InvalidArgumentError,
    NumericError,
    StationarityError,
)
from ppsim.events import Event
from ppsim.scheduler import Scheduler

LEVEL_TOL = 1e-12


class InteractionKernel:
    """Nonnegative piecewise-constant kernel ``h`` on ``[0, S]``.

    ``breakpoints`` are ``(delay, jump)`` pairs: the level is 0 before the first
    delay and changes by ``jump`` at each delay.  The last jump must bring the
    level back to 0, which fixes the support end ``S``.
    """

    __slots__ = ("breakpoints", "integral", "support", "max_level", "_scheduler")

    def __init__(self, breakpoints: Iterable[tuple[float, float]]):
        merged: dict[float, float] = {}
        for delay, jump in breakpoints:
            delay, jump = float(delay), float(jump)
            if not (math.isfinite(delay) and delay >= 0.0 and math.isfinite(jump)):
                raise InvalidArgumentError(f"bad kernel breakpoint ({delay!r}, {jump!r})")
            merged[delay] = merged.get(delay, 0.0) + jump
        if not merged:
            raise InvalidArgumentError("kernel needs at least one breakpoint")
        bps = tuple(Event(d, merged[d]) for d in sorted(merged))

        level = integral = max_level = 0.0
        for k, (delay, jump) in enumerate(bps):
            level += jump
            if level < -LEVEL_TOL:
                raise InvalidArgumentError("kernels must be nonnegative")
            max_level = max(max_level, level)
            if k + 1 < len(bps):
                integral += level * (bps[k + 1].time - delay)
        if abs(level) > LEVEL_TOL * max(1.0, max_level):
            raise InvalidArgumentError("kernel must return to 0 after its last breakpoint")

        self.breakpoints = bps
        self.integral = integral
        self.support = bps[-1].time
        self.max_level = max_level
        self._scheduler = None

    @classmethod
    def box(cls, height: float, width: float) -> InteractionKernel:
        """``height * 1[0, width)``."""
        return cls([(0.0, height), (width, -height)])

    @property
    def scheduler(self) -> Scheduler:
        if self._scheduler is None:
            self._scheduler = Scheduler(self.breakpoints)
        return self._scheduler

    def __call__(self, delay: float) -> float:
        value = 0.0
        for t, jump in self.breakpoints:
            if t > delay:
                break
            value += jump
        return value

    def __eq__(self, other):
        if not isinstance(other, InteractionKernel):
            return NotImplemented
        return self.breakpoints == other.breakpoints

    def __hash__(self):
        return hash(self.breakpoints)

    def __repr__(self):
        return f"InteractionKernel({[tuple(b) for b in self.breakpoints]!r})"

    def __getstate__(self):
        return self.breakpoints

    def __setstate__(self, state):
        self.__init__(state)


class HawkesNetwork:
    """Spontaneous rates ``nu`` and kernels ``h[j -> i]`` of an M-node Hawkes process.

    ``kernels`` maps ``(source, target)`` (0-indexed) to an
    :class:`InteractionKernel`.  Kernels with zero integral are dropped, so an
    edge ``j -> i`` exists exactly when ``H[i, j] > 0``.  Construction fails with
    :class:`StationarityError` unless the spectral radius of ``H`` is below 1.
    """

    def __init__(self, nu, kernels: Mapping[tuple[int, int], InteractionKernel] | None = None):
        nu = np.array(nu, dtype=np.float64).reshape(-1)
        if nu.size == 0:
            raise InvalidArgumentError("network needs at least one node")
        if not np.all(np.isfinite(nu)) or np.any(nu < 0):
            raise InvalidArgumentError("spontaneous rates must be finite and >= 0")
        M = nu.size
        kept: dict[tuple[int, int], InteractionKernel] = {}
        for (j, i), h in (kernels or {}).items():
            j, i = int(j), int(i)
            if not (0 <= j < M and 0 <= i < M):
                raise InvalidArgumentError(f"kernel {j}->{i} outside 0..{M - 1}")
            if not isinstance(h, InteractionKernel):
                h = InteractionKernel(h)
            if h.integral != 0.0:
                kept[(j, i)] = h

        H = np.zeros((M, M))
        for (j, i), h in kept.items():
            H[i, j] = h.integral
        rows = [i for _, i in kept]
        cols = [j for j, _ in kept]
        rho = spectral_radius(sparse.csr_matrix(
            ([H[i, j] for i, j in zip(rows, cols)], (rows, cols)), shape=(M, M)))
        if rho >= 1.0:
            raise StationarityError(f"spectral radius of H is {rho:.6g} >= 1")

        self.M = M
        self.nu = nu
        self.nu.setflags(write=False)
        self.kernels = kept
        self.H = H
        self.H.setflags(write=False)
        self.R = (H != 0).astype(np.int8)
        self.R.setflags(write=False)
        self.rho = rho
        children: list[list[int]] = [[] for _ in range(M)]
        parents: list[list[int]] = [[] for _ in range(M)]
        for j, i in sorted(kept):
            children[j].append(i)
            parents[i].append(j)
        self.children = [tuple(c) for c in children]
        self.parents = [tuple(p) for p in parents]

    @classmethod
    def from_edges(cls, M: int, edges: Iterable[tuple[int, int]], kernel: InteractionKernel,
                   nu) -> HawkesNetwork:
        """Same kernel on every edge; ``nu`` is a scalar or a length-M vector."""
        nu = np.broadcast_to(np.asarray(nu, dtype=np.float64), (M,))
        return cls(nu, {(j, i): kernel for j, i in edges})

    @classmethod
    def balanced(cls, M: int, edges: Iterable[tuple[int, int]], kernel: InteractionKernel,
                 target_m=10.0) -> HawkesNetwork:
        """Network whose stationary mean intensity is ``target_m``.

        Raises :class:`GraphDiscarded` when ``H`` is explosive or a balanced
        spontaneous rate would be negative.
        """
        edges = list(edges)
        m = np.broadcast_to(np.asarray(target_m, dtype=np.float64), (M,))
        src = np.fromiter((j for j, _ in edges), dtype=np.int64, count=len(edges))
        dst = np.fromiter((i for _, i in edges), dtype=np.int64, count=len(edges))
        # nu = (I - H) m, accumulated edge by edge; the cheap negativity check goes first
        Hm = np.zeros(M)
        np.add.at(Hm, dst, kernel.integral * m[src])
        nu = m - Hm
        reason = discard_reason(sparse.csr_matrix((np.full(len(edges), kernel.integral), (dst, src)),
                                                  shape=(M, M)), nu)
        if reason:
            raise GraphDiscarded(reason)
        return cls(nu, {(j, i): kernel for j, i in edges})

    def kernel(self, j: int, i: int) -> InteractionKernel | None:
        return self.kernels.get((j, i))

    def out_kernels(self, j: int) -> dict[int, InteractionKernel]:
        return {i: self.kernels[(j, i)] for i in self.children[j]}

    @property
    def max_support(self) -> float:
        return max((h.support for h in self.kernels.values()), default=0.0)

    def __eq__(self, other):
        if not isinstance(other, HawkesNetwork):
            return NotImplemented
        return np.array_equal(self.nu, other.nu) and self.kernels == other.kernels

    def __repr__(self):
        return f"HawkesNetwork(M={self.M}, edges={len(self.kernels)}, rho={self.rho:.4g})"

    def __reduce__(self):
        return (HawkesNetwork, (np.array(self.nu), dict(self.kernels)))


def spectral_radius(H, tol: float = 1e-10, max_iter: int = 100_000) -> float:
    """Perron root of a nonnegative square matrix.

    The matrix is split into strongly connected components; the radius is the
    largest Perron root over the irreducible diagonal blocks, each found by power
    iteration on ``B + c*I`` (primitive, so it converges) until the
    Collatz-Wielandt bounds agree to ``tol`` relative.
    """
    A = sparse.csr_matrix(H, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise InvalidArgumentError(f"expected a square matrix, got shape {A.shape}")
    A.eliminate_zeros()
    if np.any(A.data < 0) or not np.all(np.isfinite(A.data)):
        raise InvalidArgumentError("spectral_radius expects a finite nonnegative matrix")
    if A.nnz == 0:
        return 0.0
    n_comp, labels = csgraph.connected_components(A, directed=True, connection="strong")
    sizes = np.bincount(labels, minlength=n_comp)
    rho = 0.0
    singles = sizes[labels] == 1
    if singles.any():
        rho = float(np.max(A.diagonal()[singles]))
    for c in np.flatnonzero(sizes > 1):
        idx = np.flatnonzero(labels == c)
        rho = max(rho, _perron_root(A[idx][:, idx], tol, max_iter))
    return rho


def _perron_root(B, tol: float, max_iter: int) -> float:
    n = B.shape[0]
    shift = B.sum() / n
    x = np.ones(n)
    for _ in range(max_iter):
        y = B @ x + shift * x
        ratio = y / x
        lo, hi = ratio.min(), ratio.max()
        if hi - lo <= tol * max(lo - shift, np.finfo(float).tiny):
            return float(0.5 * (lo + hi) - shift)
        x = y / hi
    raise NumericError(f"power iteration did not converge in {max_iter} iterations")


def mean_intensity(net: HawkesNetwork) -> np.ndarray:
    """Stationary mean intensity ``m = (I - H)^-1 nu``."""
    if net.rho >= 1.0:
        raise StationarityError(f"spectral radius {net.rho} >= 1")
    try:
        return np.linalg.solve(np.eye(net.M) - net.H, net.nu)
    except np.linalg.LinAlgError as exc:
        raise StationarityError("I - H is singular") from exc


def balance_rates(H, target_m) -> np.ndarray:
    """Spontaneous rates giving mean intensity ``target_m``: ``nu = (I - H) m``.

    Negative entries are returned as is; see :func:`discard_reason`.
    """
    H = np.asarray(H, dtype=np.float64)
    m = np.asarray(target_m, dtype=np.float64)
    return m - H @ m


def discard_reason(H, nu=None) -> str | None:
    """Why a graph must be thrown away, or ``None`` if it is usable."""
    if nu is not None:
        neg = np.flatnonzero(np.asarray(nu) < 0)
        if neg.size:
            return f"{neg.size} negative spontaneous rate(s), first at node {neg[0]}"
    rho = spectral_radius(H)
    if rho >= 1.0:
        return f"spectral radius {rho:.6g} >= 1"
    return None


class IntensityState:
    """Per-node intensity schedulers ``L[i]``, each encoding ``lambda_i`` on ``[t_i, inf)``."""

    def __init__(self, net: HawkesNetwork, t0: float = 0.0):
        self.net = net
        self.schedulers = [Scheduler([(t0, nu_i)]) for nu_i in net.nu]

    def __getitem__(self, i: int) -> Scheduler:
        return self.schedulers[i]

    def intensity(self, i: int, s: float) -> float:
        value = self.schedulers[i].evaluate(s)
        return value if value > 0.0 else 0.0

    def apply_point(self, j: int, t: float, targets: Iterable[int]) -> None:
        """Record a point of node ``j`` at ``t`` on every node in ``targets``.

        Each target is restricted to ``[t, inf)``; targets with an edge
        ``j -> i`` also receive the kernel shifted to ``t``.
        """
        for i in targets:
            L = self.schedulers[i]
            if t < L.start_time:
                raise CausalityError(
                    f"point at {t!r} precedes node {i}'s current time {L.start_time!r}")
            L.prune_pcw(t)
            h = self.net.kernels.get((j, i))
            if h is not None:
                L.update(h.scheduler, shift=t)


def apply_point(state: IntensityState, j: int, t: float, targets: Iterable[int]) -> IntensityState:
    state.apply_point(j, t, targets)
    return state


def write_network(net: HawkesNetwork, path) -> None:
    """Textual network file with 1-indexed nodes and round-trip float precision."""
    lines = [f"M {net.M}"]
    lines += [f"nu {i + 1} {v!r}" for i, v in enumerate(net.nu.tolist())]
    for (j, i), h in sorted(net.kernels.items()):
        lines.append(f"kernel {j + 1} {i + 1}")
        lines += [f"{t!r} {d!r}" for t, d in h.breakpoints]
        lines.append("")
    Path(path).write_text("\n".join(lines) + "\n")


def read_network(path) -> HawkesNetwork:
    return parse_network(Path(path).read_text())


def parse_network(text: str) -> HawkesNetwork:
    M = None
    nu: dict[int, float] = {}
    kernels: dict[tuple[int, int], list[tuple[float, float]]] = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            current = None
            continue
        parts = line.split()
        try:
            if M is None:
                M = int(parts[-1])
            elif parts[0] == "nu":
                nu[int(parts[1]) - 1] = float(parts[2])
                current = None
            elif parts[0] == "kernel":
                current = (int(parts[1]) - 1, int(parts[2]) - 1)
                kernels[current] = []
            elif current is not None:
                kernels[current].append((float(parts[0]), float(parts[1])))
            else:
                raise ValueError(f"unexpected line {raw!r}")
        except (ValueError, IndexError) as exc:
            raise InvalidArgumentError(f"network file line {lineno}: {exc}") from exc
    if M is None:
        raise InvalidArgumentError("network file has no header")
    if set(nu) != set(range(M)):
        raise InvalidArgumentError("network file must give nu for every node 1..M")
    return HawkesNetwork([nu[i] for i in range(M)],
                         {k: InteractionKernel(v) for k, v in kernels.items()})
