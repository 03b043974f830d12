"""Scaling experiments: cost predictors, timed runs over random topologies, log-log fits."""
from __future__ import annotations

import csv
import io
import math
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields

import numpy as np
from numpy.random import SeedSequence

from ppsim.errors import GraphDiscarded, InsufficientSampleError, InvalidArgumentError
from ppsim.fullscan import simulate_fullscan
from ppsim.graph import gen_cascade, gen_erdos_renyi, gen_stochastic_block, sbm_preset
from ppsim.hawkes import HawkesNetwork, InteractionKernel, mean_intensity
from ppsim.localgraph import simulate_localgraph
from ppsim.oracle import simulate_naive
from ppsim.rng import RngStream

SIMULATORS = {
    "fullscan": simulate_fullscan,
    "localgraph": simulate_localgraph,
    "naive": simulate_naive,
}
TOPOLOGIES = ("erdos_renyi", "cascade", "sbm")
COLUMNS = ("topology", "M", "p_or_preset", "seed", "algo", "points", "wall_seconds", "predicted")


def _log(x: float) -> float:
    return math.log(max(x, 2.0))


def predict_fullscan(net: HawkesNetwork, horizon: float) -> float:
    """``T |m|_1 (M + |Rm|_1) log(M + |Rm|_1)``."""
    m = mean_intensity(net)
    Rm = net.R @ m
    size = net.M + Rm.sum()
    return float(horizon * m.sum() * size * _log(size))


def predict_localgraph(net: HawkesNetwork, horizon: float) -> float:
    """``T (m'Rm + log(M)|m|_1 + m'R'Rm + log(M)|Rm|_1)``."""
    m = mean_intensity(net)
    Rm = net.R @ m
    logM = _log(net.M)
    return float(horizon * (m @ Rm + logM * m.sum() + Rm @ Rm + logM * Rm.sum()))


PREDICTORS = {"fullscan": predict_fullscan, "localgraph": predict_localgraph}


def derive_seed(master: int, *key: int) -> int:
    """64-bit seed for the run or graph named by ``key`` under ``master``."""
    lo, hi = SeedSequence(int(master), spawn_key=tuple(int(k) for k in key)).generate_state(2)
    return int(lo) | (int(hi) << 32)


def simulate(net, horizon: float, seed: int, algo: str = "localgraph", stream=None):
    try:
        sim = SIMULATORS[algo]
    except KeyError:
        raise InvalidArgumentError(f"unknown algorithm {algo!r}; choose from {sorted(SIMULATORS)}") from None
    return sim(net, horizon, RngStream(seed, stream))


@dataclass
class BenchConfig:
    topologies: tuple = TOPOLOGIES
    M_local: tuple = (10, 20, 30, 40, 50, 60, 70, 80, 90, 100, 200, 400, 800, 1200)
    M_full: tuple = (10, 20, 30, 40, 50, 60, 70, 80, 90, 100, 200, 400)
    fullscan_max_M: int = 400
    algorithms: tuple = ("fullscan", "localgraph")
    er_degree: float | None = None     # None: p over the grid {0, 1/M, ..., (ln M - 1)/M}
    sbm_presets: tuple = (1, 2, 3)
    reps: int = 10
    warmup: int = 1
    horizon: float = 10.0
    target_m: float = 10.0
    kernel_height: float = 5.0
    kernel_width: float = 0.02
    seed: int = 0
    resample_discarded: int = 0        # extra graph draws allowed after a discard
    jobs: int = 1

    @property
    def kernel(self) -> InteractionKernel:
        return InteractionKernel.box(self.kernel_height, self.kernel_width)


def parse_config(text: str) -> BenchConfig:
    """``key = value`` lines; lists are comma separated; ``#`` starts a comment."""
    types = {f.name: f.type for f in fields(BenchConfig)}
    kw = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidArgumentError(f"config line {lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in types:
            raise InvalidArgumentError(f"config line {lineno}: unknown key {key!r}")
        try:
            kw[key] = _coerce(key, value)
        except ValueError as exc:
            raise InvalidArgumentError(f"config line {lineno}: {exc}") from exc
    cfg = BenchConfig(**kw)
    _validate(cfg)
    return cfg


def _coerce(key, value):
    items = [v.strip() for v in value.split(",") if v.strip()]
    if key in ("topologies", "algorithms"):
        return tuple(items)
    if key in ("M_local", "M_full", "sbm_presets"):
        return tuple(int(v) for v in items)
    if key == "er_degree":
        return None if value.lower() in ("", "none", "grid") else float(value)
    if key in ("horizon", "target_m", "kernel_height", "kernel_width"):
        return float(value)
    return int(value)


def _validate(cfg: BenchConfig) -> None:
    for t in cfg.topologies:
        if t not in TOPOLOGIES:
            raise InvalidArgumentError(f"unknown topology {t!r}")
    for a in cfg.algorithms:
        if a not in PREDICTORS:
            raise InvalidArgumentError(f"algorithm {a!r} cannot be benchmarked")
    if cfg.reps < 1 or cfg.warmup < 0 or cfg.jobs < 1 or cfg.resample_discarded < 0:
        raise InvalidArgumentError("reps >= 1, warmup >= 0, jobs >= 1, resample_discarded >= 0")
    if not cfg.horizon > 0:
        raise InvalidArgumentError("horizon must be positive")


@dataclass(frozen=True)
class Unit:
    topology: str
    M: int
    label: str
    key: tuple
    param: object


def _units(cfg: BenchConfig) -> list[Unit]:
    Ms = sorted(set(cfg.M_local if "localgraph" in cfg.algorithms else ())
                | set(m for m in cfg.M_full if m <= cfg.fullscan_max_M))
    out = []
    for t_id, topo in enumerate(TOPOLOGIES):
        if topo not in cfg.topologies:
            continue
        for M in Ms:
            if topo == "erdos_renyi":
                if cfg.er_degree is not None:
                    params = [min(1.0, cfg.er_degree / M)]
                else:
                    params = [k / M for k in range(int(math.floor(math.log(M) - 1)) + 1)]
                for k, p in enumerate(params):
                    out.append(Unit(topo, M, repr(p), (t_id, M, k), p))
            elif topo == "cascade":
                out.append(Unit(topo, M, "-", (t_id, M, 0), None))
            else:
                for preset in cfg.sbm_presets:
                    out.append(Unit(topo, M, str(preset), (t_id, M, preset), preset))
    return out


def build_network(cfg: BenchConfig, unit: Unit):
    """Balanced network for ``unit``; returns ``(net, graph_seed, discards)``."""
    discards = []
    for attempt in range(cfg.resample_discarded + 1):
        gseed = derive_seed(cfg.seed, *unit.key, attempt, 0)
        rng = RngStream(gseed)
        if unit.topology == "erdos_renyi":
            edges = gen_erdos_renyi(unit.M, unit.param, rng)
        elif unit.topology == "cascade":
            edges = gen_cascade(unit.M)
        else:
            sizes, probs = sbm_preset(unit.M, unit.param)
            edges = gen_stochastic_block(unit.M, sizes, probs, rng)
        try:
            return HawkesNetwork.balanced(unit.M, edges, cfg.kernel, cfg.target_m), gseed, discards
        except GraphDiscarded as exc:
            discards.append({"topology": unit.topology, "M": unit.M, "p_or_preset": unit.label,
                             "seed": gseed, "reason": exc.reason})
    return None, None, discards


def _run_unit(cfg: BenchConfig, unit: Unit):
    net, gseed, discards = build_network(cfg, unit)
    rows = []
    if net is None:
        return rows, discards
    for a_id, algo in enumerate(("fullscan", "localgraph")):
        if algo not in cfg.algorithms:
            continue
        if algo == "fullscan" and (unit.M > cfg.fullscan_max_M or unit.M not in cfg.M_full):
            continue
        if algo == "localgraph" and unit.M not in cfg.M_local:
            continue
        predicted = PREDICTORS[algo](net, cfg.horizon)
        for rep in range(-cfg.warmup, cfg.reps):
            seed = derive_seed(cfg.seed, *unit.key, a_id, rep + cfg.warmup, 1)
            res = SIMULATORS[algo](net, cfg.horizon, RngStream(seed))
            if rep < 0:
                continue
            rows.append({"topology": unit.topology, "M": unit.M, "p_or_preset": unit.label,
                         "seed": seed, "algo": algo, "points": len(res),
                         "wall_seconds": res.wall_seconds, "predicted": predicted})
    return rows, discards


@dataclass
class SuiteResult:
    rows: list = field(default_factory=list)
    discards: list = field(default_factory=list)

    def to_csv(self) -> str:
        return rows_to_csv(self.rows)


def run_scaling_suite(config: BenchConfig) -> SuiteResult:
    """Time both simulators over the configured grid.

    Units are processed in a fixed order and merged by key, so the rows (timings
    aside) do not depend on ``config.jobs``.
    """
    _validate(config)
    units = _units(config)
    if config.jobs > 1:
        with ProcessPoolExecutor(config.jobs) as pool:
            outputs = list(pool.map(_run_unit, [config] * len(units), units))
    else:
        outputs = [_run_unit(config, u) for u in units]
    out = SuiteResult()
    for rows, discards in outputs:
        out.rows.extend(rows)
        out.discards.extend(discards)
    return out


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for r in rows:
        w.writerow([repr(r[c]) if isinstance(r[c], float) else r[c] for c in COLUMNS])
    return buf.getvalue()


def read_rows(text: str) -> list[dict]:
    rows = []
    for r in csv.DictReader(io.StringIO(text)):
        r["M"] = int(r["M"])
        r["seed"] = int(r["seed"])
        r["points"] = int(r["points"])
        r["wall_seconds"] = float(r["wall_seconds"])
        r["predicted"] = float(r["predicted"])
        rows.append(r)
    return rows


def summarize(rows) -> list[dict]:
    """Median and mean wall time per (topology, M, p_or_preset, algo)."""
    groups: dict[tuple, list] = {}
    for r in rows:
        groups.setdefault((r["topology"], r["M"], r["p_or_preset"], r["algo"]), []).append(r)
    out = []
    for (topo, M, label, algo), rs in sorted(groups.items(), key=lambda kv: (kv[0][0], kv[0][3], kv[0][1], kv[0][2])):
        walls = [r["wall_seconds"] for r in rs]
        out.append({"topology": topo, "M": M, "p_or_preset": label, "algo": algo,
                    "runs": len(rs), "median_seconds": statistics.median(walls),
                    "mean_seconds": statistics.fmean(walls),
                    "median_points": statistics.median(r["points"] for r in rs),
                    "predicted": rs[0]["predicted"]})
    return out


def fit_loglog_slope(x, y, min_distinct: int = 5) -> tuple[float, float]:
    """Least-squares slope of ``log y`` on ``log x`` and its standard error."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or np.any(x <= 0) or np.any(y <= 0):
        raise InvalidArgumentError("log-log fit needs matching positive samples")
    if np.unique(x).size < min_distinct:
        raise InsufficientSampleError(f"need at least {min_distinct} distinct x values")
    lx, ly = np.log(x), np.log(y)
    lx_c = lx - lx.mean()
    sxx = float(lx_c @ lx_c)
    slope = float(lx_c @ (ly - ly.mean())) / sxx
    resid = ly - ly.mean() - slope * lx_c
    dof = x.size - 2
    se = math.sqrt(float(resid @ resid) / dof / sxx) if dof > 0 else float("nan")
    return slope, se


def _batch_one(args):
    net, horizon, algo, master, k = args
    return simulate(net, horizon, master, algo, stream=k).to_csv()


def run_batch(net, horizon: float, algo: str, master_seed: int, n_runs: int, jobs: int = 1) -> list[str]:
    """``points.csv`` text for runs ``0..n_runs-1`` of a batch; identical for any ``jobs``."""
    tasks = [(net, horizon, algo, master_seed, k) for k in range(n_runs)]
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as pool:
            return list(pool.map(_batch_one, tasks))
    return [_batch_one(t) for t in tasks]
