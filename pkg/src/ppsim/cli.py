"""Command line entry point: ``ppsim simulate | gof | bench``."""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from ppsim import bench, gof
from ppsim.errors import (
    CorruptedIntensityError,
    DegenerateSampleError,
    GraphDiscarded,
    InsufficientSampleError,
    InvalidArgumentError,
    InvariantViolation,
    OracleInconsistencyError,
    PPSimError,
    StationarityError,
)
from ppsim.graph import gen_cascade, gen_erdos_renyi, gen_stochastic_block, read_graph, sbm_preset
from ppsim.hawkes import HawkesNetwork, InteractionKernel, read_network, write_network
from ppsim.result import SimulationResult
from ppsim.rng import RngStream

EXIT_OK, EXIT_CONFIG, EXIT_DISCARD, EXIT_INVARIANT = 0, 2, 3, 4

log = logging.getLogger("ppsim")


def parse_kernel(spec: str) -> InteractionKernel:
    """``box:HEIGHT:WIDTH`` or ``pcw:DELAY:JUMP,DELAY:JUMP,...``."""
    kind, _, rest = spec.partition(":")
    try:
        if kind == "box":
            height, width = (float(v) for v in rest.split(":"))
            return InteractionKernel.box(height, width)
        if kind == "pcw":
            return InteractionKernel([tuple(float(v) for v in bp.split(":")) for bp in rest.split(",")])
    except ValueError as exc:
        raise InvalidArgumentError(f"bad kernel spec {spec!r}: {exc}") from exc
    raise InvalidArgumentError(f"bad kernel spec {spec!r}; expected box:H:W or pcw:d:j,...")


def parse_graph(spec: str, graph_seed: int) -> tuple[int, list]:
    """A graph file, or ``er:M:p``, ``cascade:M``, ``sbm:M:PRESET``."""
    kind, _, rest = spec.partition(":")
    if kind in ("er", "cascade", "sbm") and not Path(spec).exists():
        try:
            parts = rest.split(":")
            M = int(parts[0])
            rng = RngStream(graph_seed)
            if kind == "er":
                return M, gen_erdos_renyi(M, float(parts[1]), rng)
            if kind == "cascade":
                return M, gen_cascade(M)
            sizes, probs = sbm_preset(M, int(parts[1]))
            return M, gen_stochastic_block(M, sizes, probs, rng)
        except (ValueError, IndexError) as exc:
            raise InvalidArgumentError(f"bad graph spec {spec!r}") from exc
    return read_graph(spec)


def build_net(M: int, edges, kernel: InteractionKernel, nu_spec: str) -> HawkesNetwork:
    if nu_spec.startswith("balance:"):
        return HawkesNetwork.balanced(M, edges, kernel, float(nu_spec.split(":", 1)[1]))
    try:
        values = [float(v) for v in nu_spec.split(",")]
    except ValueError as exc:
        raise InvalidArgumentError(f"bad nu spec {nu_spec!r}") from exc
    if len(values) not in (1, M):
        raise InvalidArgumentError(f"nu spec gives {len(values)} values for {M} nodes")
    return HawkesNetwork.from_edges(M, edges, kernel, values[0] if len(values) == 1 else values)


def cmd_simulate(args) -> int:
    if args.net:
        net = read_network(args.net)
    else:
        if not args.graph:
            raise InvalidArgumentError("give --graph (file or generator spec) or --net")
        graph_seed = args.graph_seed if args.graph_seed is not None else bench.derive_seed(args.seed, 0)
        M, edges = parse_graph(args.graph, graph_seed)
        net = build_net(M, edges, parse_kernel(args.kernel), args.nu)
    if args.save_net:
        write_network(net, args.save_net)
    rng = RngStream(args.seed)
    if args.algo == "fullscan":
        res = bench.simulate_fullscan(net, args.horizon, rng, debug=args.debug)
    else:
        res = bench.SIMULATORS[args.algo](net, args.horizon, rng)
    res.check()
    if args.out == "-":
        sys.stdout.write(res.to_csv())
    else:
        res.to_csv(args.out)
    log.info("%s: %d points on [0, %g) in %.3fs", args.algo, len(res), args.horizon, res.wall_seconds)
    return EXIT_OK


def cmd_gof(args) -> int:
    net = read_network(args.net)
    res = SimulationResult.from_csv(args.points, M=net.M,
                                    horizon=args.horizon if args.horizon else None)
    try:
        res.check()
    except InvariantViolation as exc:
        raise InvalidArgumentError(f"{args.points}: {exc}") from None
    nodes = [n - 1 for n in args.node] if args.node else range(net.M)
    reports = [gof.battery(res, net, n) for n in nodes]
    body = "test,node,p_value\n" + "".join(r.rows() for r in reports)
    if args.out:
        Path(args.out).write_text(body)
    for r in reports:
        sys.stdout.write(r.table())
    return EXIT_OK


def cmd_bench(args) -> int:
    cfg = bench.parse_config(Path(args.config).read_text())
    if args.jobs:
        cfg.jobs = args.jobs
    suite = bench.run_scaling_suite(cfg)
    Path(args.out).write_text(suite.to_csv())
    for d in suite.discards:
        log.warning("discarded %s M=%s %s seed=%s: %s", d["topology"], d["M"], d["p_or_preset"],
                    d["seed"], d["reason"])
    for s in bench.summarize(suite.rows):
        print(f"{s['topology']:<12} {s['algo']:<10} M={s['M']:<5} {s['p_or_preset']:<22} "
              f"median={s['median_seconds']:.4g}s mean={s['mean_seconds']:.4g}s "
              f"predicted={s['predicted']:.4g}")
    if not suite.rows and suite.discards:
        return EXIT_DISCARD
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ppsim", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="simulate a Hawkes network and write points.csv")
    s.add_argument("--algo", choices=sorted(bench.SIMULATORS), default="localgraph")
    s.add_argument("--graph", help="graph file, or er:M:p | cascade:M | sbm:M:PRESET")
    s.add_argument("--net", help="network file (overrides --graph/--kernel/--nu)")
    s.add_argument("--kernel", default="box:5:0.02", help="box:H:W or pcw:d:j,d:j,... (default %(default)s)")
    s.add_argument("--nu", default="balance:10", help="rate, comma list, or balance:m (default %(default)s)")
    s.add_argument("--horizon", type=float, required=True)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--graph-seed", type=int)
    s.add_argument("--out", default="-")
    s.add_argument("--save-net")
    s.add_argument("--debug", action="store_true", help="union consistency checks (fullscan)")
    s.set_defaults(func=cmd_simulate)

    g = sub.add_parser("gof", help="time-rescaling tests on a points file")
    g.add_argument("--points", required=True)
    g.add_argument("--net", required=True)
    g.add_argument("--node", type=int, action="append", help="1-indexed; repeatable (default all)")
    g.add_argument("--horizon", type=float, help="observation horizon (default last point)")
    g.add_argument("--out")
    g.set_defaults(func=cmd_gof)

    b = sub.add_parser("bench", help="scaling experiment")
    b.add_argument("--config", required=True, help="key = value file")
    b.add_argument("--out", required=True)
    b.add_argument("--jobs", type=int)
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    np.seterr(all="ignore")
    try:
        return args.func(args)
    except GraphDiscarded as exc:
        log.error("graph discarded: %s", exc.reason)
        return EXIT_DISCARD
    except (InvariantViolation, CorruptedIntensityError, OracleInconsistencyError) as exc:
        log.error("invariant violation: %s", exc)
        return EXIT_INVARIANT
    except (InvalidArgumentError, StationarityError, InsufficientSampleError, DegenerateSampleError,
            OSError) as exc:
        log.error("%s", exc)
        return EXIT_CONFIG
    except PPSimError as exc:
        log.error("%s", exc)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
