"""Local independence graphs and the random topologies used for benchmarking."""
from __future__ import annotations

import math
from collections.abc import Iterable
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ppsim.errors import InvalidArgumentError


@dataclass(frozen=True)
class DependenceGraph:
    """Directed graph on nodes ``0..M-1``; edge ``j -> i`` means ``j``'s past drives ``i``."""

    M: int
    children: tuple[tuple[int, ...], ...]
    parents: tuple[tuple[int, ...], ...]

    @classmethod
    def from_edges(cls, M: int, edges: Iterable[tuple[int, int]]) -> DependenceGraph:
        ch: list[set[int]] = [set() for _ in range(M)]
        pa: list[set[int]] = [set() for _ in range(M)]
        for j, i in edges:
            j, i = int(j), int(i)
            if not (0 <= j < M and 0 <= i < M):
                raise InvalidArgumentError(f"edge {j}->{i} outside 0..{M - 1}")
            ch[j].add(i)
            pa[i].add(j)
        return cls(M, tuple(tuple(sorted(c)) for c in ch), tuple(tuple(sorted(p)) for p in pa))

    @classmethod
    def from_network(cls, net) -> DependenceGraph:
        return cls(net.M, tuple(net.children), tuple(net.parents))

    def edges(self) -> list[tuple[int, int]]:
        return [(j, i) for j in range(self.M) for i in self.children[j]]

    @property
    def n_edges(self) -> int:
        return sum(len(c) for c in self.children)

    def touched(self, j: int) -> tuple[int, ...]:
        """Nodes whose intensity must be refreshed after a point on ``j``."""
        ch = self.children[j]
        return ch if j in ch else tuple(sorted(ch + (j,)))

    def check(self) -> bool:
        for j, ch in enumerate(self.children):
            for i in ch:
                if j not in self.parents[i]:
                    return False
        return sum(map(len, self.parents)) == self.n_edges


def from_kernels(net) -> DependenceGraph:
    return DependenceGraph.from_network(net)


def gen_erdos_renyi(M: int, p: float, rng, self_loops: bool = True) -> list[tuple[int, int]]:
    """Each ordered pair present independently with probability ``p``.

    Uses ``M*M`` uniforms from ``rng`` in row-major (source, target) order.
    """
    if not 0.0 <= p <= 1.0:
        raise InvalidArgumentError(f"edge probability {p!r} not in [0, 1]")
    return _bernoulli_edges(np.full((M, M), float(p)), rng, self_loops)


def gen_stochastic_block(M: int, block_sizes, prob_matrix, rng,
                         self_loops: bool = True) -> list[tuple[int, int]]:
    """Erdős-Rényi by block: edge from a block-b node to a block-c node w.p. ``prob_matrix[b][c]``.

    Blocks are consecutive runs of node indices.
    """
    sizes = np.asarray(block_sizes, dtype=np.int64)
    P = np.asarray(prob_matrix, dtype=np.float64)
    if sizes.ndim != 1 or np.any(sizes < 0) or sizes.sum() != M:
        raise InvalidArgumentError(f"block sizes {list(sizes)} do not sum to M={M}")
    if P.shape != (sizes.size, sizes.size):
        raise InvalidArgumentError(f"probability matrix shape {P.shape} does not match {sizes.size} blocks")
    if np.any(P < 0) or np.any(P > 1) or not np.all(np.isfinite(P)):
        raise InvalidArgumentError("block probabilities must lie in [0, 1]")
    block = np.repeat(np.arange(sizes.size), sizes)
    return _bernoulli_edges(P[np.ix_(block, block)], rng, self_loops)


def _bernoulli_edges(probs: np.ndarray, rng, self_loops: bool) -> list[tuple[int, int]]:
    M = probs.shape[0]
    if M == 0:
        return []
    u = np.asarray(rng.uniforms(M * M)).reshape(M, M)
    present = u < probs
    if not self_loops:
        np.fill_diagonal(present, False)
    src, dst = np.nonzero(present)
    return list(zip(src.tolist(), dst.tolist()))


def gen_cascade(M: int) -> list[tuple[int, int]]:
    """Chain ``0 -> 1 -> ... -> M-1``."""
    if M < 2:
        raise InvalidArgumentError("cascade needs M >= 2")
    return [(i, i + 1) for i in range(M - 1)]


def sbm_preset(M: int, preset: int):
    """Block sizes and probability matrix of the three benchmark configurations.

    1: two halves, edges only inside blocks. 2: two halves, edges only across.
    3: a block of ceil(ln M) nodes, edges only across, asymmetric rates.
    """
    if M < 4:
        raise InvalidArgumentError("block presets need M >= 4")
    q = (2.0 / M) * math.log(M / 2.0)
    if preset == 1:
        return (M // 2, M - M // 2), [[q, 0.0], [0.0, q]]
    if preset == 2:
        return (M // 2, M - M // 2), [[0.0, q], [q, 0.0]]
    if preset == 3:
        c = math.ceil(math.log(M))
        r = M - c
        return (c, r), [[0.0, math.log(c) / c], [math.log(r) / r, 0.0]]
    raise InvalidArgumentError(f"unknown block preset {preset!r}; expected 1, 2 or 3")


def write_graph(M: int, edges: Iterable[tuple[int, int]], path) -> None:
    lines = [f"M {M}"] + [f"{j + 1} {i + 1}" for j, i in sorted(edges)]
    Path(path).write_text("\n".join(lines) + "\n")


def read_graph(path) -> tuple[int, list[tuple[int, int]]]:
    M = None
    edges = []
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            if parts[0] == "M":
                M = int(parts[1])
            else:
                j, i = int(parts[0]) - 1, int(parts[1]) - 1
                edges.append((j, i))
        except (ValueError, IndexError) as exc:
            raise InvalidArgumentError(f"graph file line {lineno}: {raw!r}") from exc
    if M is None:
        raise InvalidArgumentError("graph file lacks an 'M <count>' header")
    for j, i in edges:
        if not (0 <= j < M and 0 <= i < M):
            raise InvalidArgumentError(f"edge {j + 1} {i + 1} outside 1..{M}")
    return M, edges
