"""Exact simulation of linear multivariate Hawkes processes with piecewise-constant kernels."""
from ppsim.errors import *  # noqa: F401,F403
from ppsim.events import Event
from ppsim.fullscan import simulate_fullscan
from ppsim.graph import (
    DependenceGraph,
    from_kernels,
    gen_cascade,
    gen_erdos_renyi,
    gen_stochastic_block,
    sbm_preset,
)
from ppsim.hawkes import (
    HawkesNetwork,
    IntensityState,
    InteractionKernel,
    apply_point,
    balance_rates,
    mean_intensity,
    spectral_radius,
)
from ppsim.localgraph import simulate_localgraph
from ppsim.oracle import simulate_naive
from ppsim.result import SimulationResult
from ppsim.rng import RngStream
from ppsim.sampling import get_t_next, thin_next
from ppsim.scheduler import Scheduler

__version__ = "0.1.0"
